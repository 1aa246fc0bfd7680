"""``metagame`` command-line front end.

Inputs are file paths or ``fixture:NAME`` for packaged data. Exit codes: 0 on
success, 2 for bad input, 3 when a numerical degeneracy warning was raised
(outputs are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import dynamics as dyn
from . import equilibrium as eq
from . import fixtures, render
from .blotto import BlottoStrategy, blotto_meta_table, payoff_matrix_exact
from .game import BimatrixGame, GameFormatError, NormalFormGame, is_symmetric
from .hpt import MetaPayoffTable, WinRateMatrix, table_to_matrix

log = logging.getLogger("metagame")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class InputError(Exception):
    pass


# -- input loading --------------------------------------------------------------


def _read(spec: str):
    """Parse a game, meta table or win-rate matrix from a path or ``fixture:NAME``."""
    if spec.startswith("fixture:"):
        fx = fixtures.fixture(spec.split(":", 1)[1])
        obj = fx.payload
        if fx.kind == "blotto_table":
            obj = obj.table
        elif fx.kind not in ("meta_table", "winrates", "game", "bimatrix"):
            raise InputError(f"fixture {fx.name!r} ({fx.kind}) cannot be used as a game input")
        return obj
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"no such file: {spec}")
    text = path.read_text()
    if path.suffix.lower() == ".json":
        d = json.loads(text)
        if "rows" in d:
            return MetaPayoffTable.from_dict(d)
        if "player1" in d:
            raise InputError("asymmetric meta tables are analysed through their bimatrix game")
        g = NormalFormGame.from_dict(d)
        return BimatrixGame.from_normal_form(g) if g.num_players == 2 else g
    # CSV: two blocks is a bimatrix game, one block a win-rate matrix
    blocks = [b for b in text.replace("\r\n", "\n").split("\n\n") if b.strip()]
    if len(blocks) == 2:
        return BimatrixGame.from_csv(text)
    return WinRateMatrix.from_csv(text)


def _subset(arg):
    return [s.strip() for s in arg.split(",") if s.strip()] if arg else None


def _as_table(obj, subset) -> MetaPayoffTable:
    if isinstance(obj, WinRateMatrix):
        return obj.table(subset)
    if isinstance(obj, MetaPayoffTable):
        if subset:
            unknown = [s for s in subset if s not in obj.labels]
            if unknown:
                raise InputError(f"unknown strategy label(s) {unknown}; known: {list(obj.labels)}")
            return obj.restrict([obj.labels.index(s) for s in subset])
        return obj
    raise InputError(f"expected a meta table or win-rate matrix, got {type(obj).__name__}")


def _field_for(obj, subset, weighting):
    if isinstance(obj, BimatrixGame):
        if subset:
            raise InputError("--subset applies to symmetric tables only")
        return dyn.two_population_field(obj)
    table = _as_table(obj, subset)
    return dyn.single_population_field(table, weighting)


def _parse_starts(arg: str, field: dyn.VectorField):
    starts = []
    for chunk in arg.split(";"):
        if not chunk.strip():
            continue
        parts = [p for p in chunk.split("|")]
        vecs = [np.array([float(v) for v in p.split(",")]) for p in parts]
        if len(vecs) != len(field.dims) or any(v.shape != (k,) for v, k in zip(vecs, field.dims)):
            raise InputError(f"start {chunk!r} does not match population sizes {field.dims}")
        starts.append(np.concatenate(vecs))
    if not starts:
        raise InputError("--starts is empty")
    return starts


def _default_starts(field: dyn.VectorField, resolution: int):
    if len(field.dims) == 1:
        return list(dyn.default_starts(field.dims[0], resolution))
    xs = dyn.default_starts(field.dims[0], resolution)
    ys = dyn.default_starts(field.dims[1], resolution)
    return [np.concatenate([x, y]) for x in xs for y in ys]


def _formats(arg: str, allowed):
    fmts = [f.strip() for f in arg.split(",") if f.strip()]
    bad = [f for f in fmts if f not in allowed]
    if bad:
        raise InputError(f"unsupported --format {bad}; choose from {sorted(allowed)}")
    return fmts


def _write(out_dir: Path, name: str, text: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    print(f"wrote {path}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _labels(field: dyn.VectorField):
    if len(field.labels) == 1:
        return list(field.labels[0])
    return [f"x_{s}" for s in field.labels[0]] + [f"y_{s}" for s in field.labels[1]]


# -- commands -------------------------------------------------------------------


def cmd_build_table(args) -> int:
    obj = _read(args.input)
    table = _as_table(obj, _subset(args.subset))
    fmts = _formats(args.format or "json", {"json", "csv"})
    out = Path(args.out_dir)
    if "json" in fmts:
        _write(out, "meta_table.json", _dump(table.to_dict()))
    if "csv" in fmts:
        _write(out, "meta_table.csv", table.to_csv())
    return EXIT_OK


def _check_run(args):
    if not args.step > 0 or not args.horizon > 0:
        raise InputError("--step and --horizon must be positive")
    if args.grid < 2:
        raise InputError("--grid must be >= 2")


def cmd_trajectories(args) -> int:
    _check_run(args)
    field = _field_for(_read(args.input), _subset(args.subset), args.weighting)
    starts = _parse_starts(args.starts, field) if args.starts else _default_starts(field, args.grid)
    try:
        trajs = dyn.integrate_many(field, starts, args.horizon, args.step)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    labels = _labels(field)
    out = Path(args.out_dir)
    fmts = _formats(args.format or "csv,svg", {"csv", "svg", "json"})
    rows = []
    for i, t in enumerate(trajs):
        label = dyn.classify(t)
        start = ",".join(f"{v:.4f}" for v in t.points[0])
        end = ",".join(f"{v:.4f}" for v in t.final)
        rows.append({"trajectory": i, "start": t.points[0].tolist(), "final": t.final.tolist(),
                     "classification": label})
        print(f"trajectory {i} start=({start}) final=({end}) {label}")
    if "csv" in fmts:
        _write(out, "trajectories.csv", render.trajectories_csv(trajs, labels, args.every))
        _write(out, "classification.csv",
               render._rows_to_csv(["trajectory", "classification"] + [f"start_{s}" for s in labels],
                                   [[r["trajectory"], r["classification"]] + [repr(v) for v in r["start"]]
                                    for r in rows]))
    if "json" in fmts:
        _write(out, "classification.json", _dump(rows))
    if "svg" in fmts:
        if field.dims == (3,):
            _write(out, "trajectories.svg", render.trajectories_svg(trajs, labels))
        else:
            print("svg skipped: plots need a single population of 3 strategies")
    return EXIT_OK


def cmd_field(args) -> int:
    if args.grid < 1:
        raise InputError("--grid must be >= 1")
    field = _field_for(_read(args.input), _subset(args.subset), args.weighting)
    if field.dims != (3,):
        raise InputError(f"directional fields need a single population of 3 strategies, got {field.dims}")
    df = dyn.directional_field(field, args.grid)
    labels = _labels(field)
    out = Path(args.out_dir)
    fmts = _formats(args.format or "csv,svg", {"csv", "svg"})
    if "csv" in fmts:
        _write(out, "field.csv", render.field_csv(df, labels))
    if "svg" in fmts:
        _write(out, "field.svg", render.field_svg(df, labels))
    return EXIT_OK


def _nash_report(args):
    obj = _read(args.input)
    if args.mode == "symmetric":
        if isinstance(obj, (MetaPayoffTable, WinRateMatrix)):
            table = _as_table(obj, _subset(args.subset))
            if table.p != 2:
                raise InputError("symmetric Nash needs a two-player table")
            A, labels = table_to_matrix(table), list(table.labels)
        elif isinstance(obj, BimatrixGame):
            if not is_symmetric(obj):
                raise InputError("game is not symmetric (B != A transposed); use --mode bimatrix")
            A, labels = np.asarray(obj.A), list(obj.row_labels)
        else:
            raise InputError("symmetric mode needs a two-player game or table")
        cands = eq.symmetric_equilibria(A)
        return {"mode": "symmetric", "strategies": labels, "equilibria": [c.to_dict() for c in cands]}
    if not isinstance(obj, BimatrixGame):
        raise InputError(f"--mode {args.mode} needs a two-player bimatrix game")
    report = {"mode": args.mode, "row_strategies": list(obj.row_labels), "col_strategies": list(obj.col_labels)}
    if args.mode == "bimatrix":
        report["equilibria"] = [c.to_dict() for c in eq.support_enumeration_2p(obj)]
        return report
    A, Bt = eq.counterpart_games(obj)
    report["counterparts"] = [
        {"player": 1, "matrix": A.tolist(),
         "equilibria": [x.tolist() for x in eq.single_population_equilibria(A)]},
        {"player": 2, "matrix": Bt.tolist(),
         "equilibria": [x.tolist() for x in eq.single_population_equilibria(Bt)]},
    ]
    report["equilibria"] = [c.to_dict() for c in eq.counterpart_nash_filter(obj)]
    return report


def cmd_nash(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", eq.DegenerateGameWarning)
        report = _nash_report(args)
    degenerate = [str(w.message) for w in caught if issubclass(w.category, eq.DegenerateGameWarning)]
    report["warnings"] = degenerate
    _write(Path(args.out_dir), "nash.json", _dump(report))
    for e in report["equilibria"]:
        prof = " | ".join(",".join(f"{v:.4f}" for v in x) for x in e["profile"])
        print(f"{e['method']}: ({prof}) exploitability={e['exploitability']:.3g}")
    for msg in degenerate:
        print(f"warning: {msg}", file=sys.stderr)
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def _ints(arg):
    try:
        return [int(v) for v in arg.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {arg!r}") from None


def cmd_bounds(args) -> int:
    if not args.epsilon > 0:
        raise InputError("--epsilon must be positive")
    if not 0 < args.delta < 1:
        raise InputError("--delta must lie in (0, 1)")
    sizes = _ints(args.sizes) if args.sizes else None
    report = {"epsilon": args.epsilon, "delta": args.delta}
    counts = None
    if args.input:
        if not sizes:
            raise InputError("--sizes is required to read an observation log")
        lo, hi = (float(v) for v in args.payoff_bounds.split(","))
        obs = bnd.ObservationLog.from_csv(Path(args.input).read_text(), (lo, hi))
        try:
            _, arr = bnd.estimate_game(obs, sizes)
        except bnd.MissingDataError as exc:
            raise InputError(str(exc)) from None
        rng = args.range if args.range is not None else obs.payoff_range
        counts = bnd.unordered_pairs(arr) if args.cells == "unordered" else bnd.ordered_cells(arr)
    elif args.counts:
        rng = args.range if args.range is not None else 1.0
        counts = _ints(args.counts)
    elif sizes:
        rng = args.range if args.range is not None else 1.0
    else:
        raise InputError("give --counts, --input (with --sizes) or --sizes")
    if not rng > 0:
        raise InputError("--range must be positive")
    report["range"] = rng
    if counts is not None:
        batch = bnd.batch_confidence(counts, args.epsilon, rng)
        report["batch"] = batch.to_dict()
        report["confidence"] = batch.confidence
    if sizes:
        n_req = bnd.required_samples(args.epsilon, args.delta, sizes, rng)
        report["sizes"] = sizes
        report["cells"] = int(np.prod(sizes)) * len(sizes)
        report["required_samples"] = n_req
        report["required_samples_without_factor"] = bnd.required_samples_without_factor(
            args.epsilon, args.delta, sizes, rng)
        if counts is not None:
            n_min = min(counts.values()) if isinstance(counts, dict) else min(counts)
            report["uniform_confidence_at_min_count"] = bnd.uniform_confidence(
                n_min, sizes, args.epsilon, rng)
    report["two_epsilon"] = 2.0 * args.epsilon
    _write(Path(args.out_dir), "bounds.json", _dump(report))
    if "confidence" in report:
        print(f"confidence >= {report['confidence']:.4f} that every payoff is within {args.epsilon} "
              f"(equilibria are {2 * args.epsilon}-Nash)")
    if "required_samples" in report:
        print(f"required samples per cell: {report['required_samples']}")
    return EXIT_OK


def cmd_blotto(args) -> int:
    try:
        strats = [BlottoStrategy.parse(s) for s in args.strategies]
        M = payoff_matrix_exact(strats)
        table = blotto_meta_table(strats) if len(strats) > 1 else None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    labels = [str(s) for s in strats]
    out = Path(args.out_dir)
    _write(out, "blotto_matrix.csv", render._rows_to_csv(
        ["strategy"] + labels, [[lab] + [str(v) for v in row] for lab, row in zip(labels, M)]))
    if table is not None:
        _write(out, "meta_table.json", _dump(table.to_dict()))
        _write(out, "meta_table.csv", table.to_csv())
    for lab, row in zip(labels, M):
        print(lab.ljust(20), " ".join(f"{float(v):.2f}" for v in row))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metagame", description="Empirical meta-game analysis toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="file path or fixture:NAME")
        sp.add_argument("--out-dir", default=".")
        sp.add_argument("--format", default=None)

    sp = sub.add_parser("build-table", help="meta table from a win-rate matrix")
    common(sp)
    sp.add_argument("--subset", help="comma-separated strategy labels")
    sp.set_defaults(func=cmd_build_table)

    for name, func in (("trajectories", cmd_trajectories), ("field", cmd_field)):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--subset")
        sp.add_argument("--weighting", choices=("count", "presence"), default="count")
        sp.add_argument("--grid", type=int, default=5 if name == "trajectories" else 10)
        if name == "trajectories":
            sp.add_argument("--starts", help="'x1,x2,x3;...'; two populations as 'x..|y..'")
            sp.add_argument("--step", type=float, default=dyn.DEFAULT_STEP)
            sp.add_argument("--horizon", type=float, default=dyn.DEFAULT_HORIZON)
            sp.add_argument("--every", type=int, default=10, help="CSV keeps every n-th step")
        sp.set_defaults(func=func)

    sp = sub.add_parser("nash")
    common(sp)
    sp.add_argument("--mode", choices=("symmetric", "bimatrix", "counterpart"), default="bimatrix")
    sp.add_argument("--subset")
    sp.set_defaults(func=cmd_nash)

    sp = sub.add_parser("bounds")
    common(sp, needs_input=False)
    sp.add_argument("--input", help="observation log CSV: player,joint...,reward")
    sp.add_argument("--counts", help="comma-separated samples per cell")
    sp.add_argument("--sizes", help="strategies per player, e.g. 3,3")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--range", type=float, default=None, help="payoff range b - a")
    sp.add_argument("--payoff-bounds", default="0,1", help="a,b for log samples")
    sp.add_argument("--cells", choices=("ordered", "unordered"), default="ordered",
                    help="how log counts map to bound factors")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("blotto")
    common(sp, needs_input=False)
    sp.add_argument("strategies", nargs="+", help="allocations such as 36,35,24,3,2")
    sp.set_defaults(func=cmd_blotto)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, GameFormatError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
