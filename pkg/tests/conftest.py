import numpy as np
import pytest

from metagame import _accel

ACCEPTANCE = {}


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    if request.param == "numba" and _accel.numba is None:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])


@pytest.fixture
def record():
    """Store one summary line per acceptance criterion."""
    def _record(number, title, ok, detail):
        line = f"[AC{number}] {'PASS' if ok else 'FAIL'} {title}: {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok
    return _record
