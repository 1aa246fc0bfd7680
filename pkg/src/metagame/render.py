"""CSV and SVG output for trajectories and directional fields on the 2-simplex."""

from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from typing import Sequence

import numpy as np

from .dynamics import DirectionalField, Trajectory

# triangle corners for strategies 0, 1, 2 in unit coordinates (y up)
CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
SIZE = 480.0
MARGIN = 40.0
MAX_PATH_POINTS = 2000


def to_cartesian(x) -> np.ndarray:
    """Barycentric point(s) on the 2-simplex to unit-triangle coordinates."""
    return np.asarray(x, dtype=np.float64) @ CORNERS


def _px(xy) -> tuple[float, float]:
    scale = SIZE - 2 * MARGIN
    bottom = (SIZE - scale * CORNERS[2, 1]) / 2  # centre the triangle vertically
    return MARGIN + scale * xy[0], SIZE - bottom - scale * xy[1]


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _canvas(labels: Sequence[str]) -> ET.Element:
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=_fmt(SIZE), height=_fmt(SIZE),
                     viewBox=f"0 0 {_fmt(SIZE)} {_fmt(SIZE)}")
    defs = ET.SubElement(svg, "defs")
    marker = ET.SubElement(defs, "marker", id="head", markerWidth="6", markerHeight="6",
                           refX="5", refY="3", orient="auto")
    ET.SubElement(marker, "polygon", points="0,0 6,3 0,6", fill="black")
    pts = " ".join(",".join(_fmt(c) for c in _px(v)) for v in CORNERS)
    ET.SubElement(svg, "polygon", points=pts, fill="none", stroke="black")
    offsets = [(-6, 16), (6, 16), (0, -8)]
    anchors = ["end", "start", "middle"]
    for v, lab, (dx, dy), anchor in zip(CORNERS, labels, offsets, anchors):
        px, py = _px(v)
        t = ET.SubElement(svg, "text", x=_fmt(px + dx), y=_fmt(py + dy), attrib={"text-anchor": anchor},
                          **{"font-size": "14"})
        t.text = str(lab)
    return svg


def _serialize(svg: ET.Element) -> str:
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def trajectories_svg(trajectories: Sequence[Trajectory], labels: Sequence[str]) -> str:
    if any(t.dims != (3,) for t in trajectories):
        raise ValueError("SVG trajectory plots need a single population of 3 strategies")
    svg = _canvas(labels)
    for i, traj in enumerate(trajectories):
        stride = max(1, int(math.ceil(len(traj) / MAX_PATH_POINTS)))
        pts = traj.points[::stride]
        if stride > 1 and not np.array_equal(pts[-1], traj.points[-1]):
            pts = np.vstack([pts, traj.points[-1]])
        xy = [_px(p) for p in to_cartesian(pts)]
        d = "M " + " L ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in xy)
        ET.SubElement(svg, "path", d=d, fill="none", stroke="steelblue",
                      attrib={"class": "trajectory", "data-index": str(i)})
        sx, sy = xy[0]
        ET.SubElement(svg, "circle", cx=_fmt(sx), cy=_fmt(sy), r="2.5", fill="steelblue",
                      attrib={"class": "start"})
    return _serialize(svg)


def field_svg(field: DirectionalField, labels: Sequence[str]) -> str:
    """One ``line`` with an arrow head per grid point; length scales with speed."""
    svg = _canvas(labels)
    base = to_cartesian(field.grid)
    step = to_cartesian(field.arrows)
    speed = np.linalg.norm(step, axis=1)
    top = speed.max() if speed.size else 0.0
    scale = 0.6 / field.resolution / top if top > 0 else 0.0
    for b, s in zip(base, step):
        x1, y1 = _px(b)
        x2, y2 = _px(b + scale * s)
        ET.SubElement(svg, "line", x1=_fmt(x1), y1=_fmt(y1), x2=_fmt(x2), y2=_fmt(y2), stroke="black",
                      attrib={"class": "arrow", "marker-end": "url(#head)"})
    return _serialize(svg)


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(v) -> str:
    return repr(float(v))


def trajectories_csv(trajectories: Sequence[Trajectory], labels: Sequence[str], every: int = 1) -> str:
    """Long format: ``trajectory,t,<label>...`` keeping every ``every``-th step and the last."""
    if every < 1:
        raise ValueError("every must be >= 1")
    rows = []
    for i, traj in enumerate(trajectories):
        keep = list(range(0, len(traj), every))
        if keep[-1] != len(traj) - 1:
            keep.append(len(traj) - 1)
        for j in keep:
            rows.append([i, _num(round(traj.times[j], 10))] + [_num(v) for v in traj.points[j]])
    return _rows_to_csv(["trajectory", "t"] + list(labels), rows)


def field_csv(field: DirectionalField, labels: Sequence[str]) -> str:
    rows = [[_num(v) for v in x] + [_num(v) for v in dx] for x, dx in zip(field.grid, field.arrows)]
    return _rows_to_csv([f"x_{s}" for s in labels] + [f"dx_{s}" for s in labels], rows)
