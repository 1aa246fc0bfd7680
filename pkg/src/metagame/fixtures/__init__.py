"""Regression data shipped with the package (JSON/CSV under ``data/``)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..blotto import BlottoStrategy
from ..game import BimatrixGame, GameFormatError, NormalFormGame
from ..hpt import MetaPayoffTable, WinRateMatrix


@dataclass(frozen=True)
class Fixture:
    name: str
    source: str
    kind: str
    payload: object


@dataclass(frozen=True)
class BlottoTable:
    strategies: tuple
    table: MetaPayoffTable


def _data(name: str) -> str:
    return resources.files(__name__).joinpath("data", name).read_text(encoding="utf-8")


def _index() -> dict:
    return json.loads(_data("index.json"))


def names() -> list[str]:
    return sorted(_index())


def _counts(d):
    for face in d["faces"]:
        for pair in face["pairs"]:
            if int(pair["n"]) < 1 or len(pair["pair"]) != 2:
                raise GameFormatError(f"bad count entry {pair!r}")
            if not set(pair["pair"]) <= set(face["strategies"]):
                raise GameFormatError(f"pair {pair['pair']} not in face {face['strategies']}")
    return d


def _blotto_table(d):
    strats = tuple(BlottoStrategy.parse(s) for s in d["strategies"])
    table = MetaPayoffTable.from_dict(d["table"])
    if list(table.labels) != [str(s) for s in strats]:
        raise GameFormatError("table labels do not match the strategy list")
    return BlottoTable(strats, table)


def _blotto_list(d):
    out = []
    for entry in d["strategies"]:
        s = BlottoStrategy(tuple(entry["allocation"]))
        if s.m != d["troops"] or s.n != d["battlefields"]:
            raise GameFormatError(f"{s} does not allocate {d['troops']} troops over {d['battlefields']} fields")
        out.append({**entry, "allocation": s})
    return out


def _matrices(d):
    out = {}
    for key, v in d.items():
        M = np.array(v["matrix"], dtype=np.float64)
        if M.shape != (len(v["labels"]),) * 2:
            raise GameFormatError(f"{key}: matrix shape {M.shape} does not match labels")
        out[key] = (tuple(v["labels"]), M)
    return out


def _parse(kind: str, text: str, meta: dict):
    if kind == "meta_table":
        return MetaPayoffTable.from_dict(json.loads(text))
    if kind == "winrates":
        return WinRateMatrix.from_csv(text)
    if kind == "counts":
        return _counts(json.loads(text))
    if kind == "game":
        return BimatrixGame.from_normal_form(NormalFormGame.from_dict(json.loads(text)))
    if kind == "bimatrix":
        g = BimatrixGame.from_csv(text)
        return BimatrixGame(g.A, g.B, g.row_labels, g.col_labels, tuple(meta["bounds"]))
    if kind == "blotto_table":
        return _blotto_table(json.loads(text))
    if kind == "blotto_list":
        return _blotto_list(json.loads(text))
    if kind == "matrices":
        # the second published counterpart is B as printed, not the B transpose
        # that the counterpart construction uses
        return _matrices(json.loads(text))
    raise GameFormatError(f"unknown fixture kind {kind!r}")


def fixture(name: str) -> Fixture:
    index = _index()
    if name not in index:
        raise KeyError(f"unknown fixture {name!r}; available: {sorted(index)}")
    meta = index[name]
    if not meta.get("source"):
        raise GameFormatError(f"fixture {name!r} has no source description")
    try:
        payload = _parse(meta["kind"], _data(meta["file"]), meta)
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFormatError(f"fixture {name!r} does not match its schema: {exc}") from exc
    return Fixture(name, meta["source"], meta["kind"], payload)


def load(name: str):
    """Parsed, schema-checked payload of fixture ``name``."""
    return fixture(name).payload
