"""Whitespace-separated plot data from stored records (gnuplot-friendly)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constructions import family_bound
from .search import MinRecord

TRANSFORMS = ("raw", "ln", "loglog")
REFERENCE_SLOPES = (-2.0, -3.0)


class EmptySelection(ValueError):
    pass


@dataclass
class PlotSeries:
    label: str
    columns: list[str]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"# {self.label}", "# " + " ".join(self.columns)]
        lines += [" ".join(repr(float(x)) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def parse_series(text: str) -> PlotSeries:
    lines = text.splitlines()
    label = lines[0][2:]
    columns = lines[1][2:].split()
    rows = [tuple(float(x) for x in line.split()) for line in lines[2:] if line.strip()]
    return PlotSeries(label, columns, rows)


def build_series(records: list[MinRecord], k: int, transform: str = "ln",
                 overlays: tuple[str, ...] = (), filter_mod: tuple[int, int] | None = None
                 ) -> PlotSeries:
    """Series of f(k, n) against n.

    ``raw``/``ln`` may carry family overlay columns; rows where an overlay is
    not legal are dropped.  ``loglog`` carries exactly two reference columns,
    lines of slope -2 and -3 through the median data point.
    """
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform {transform!r}")
    if transform == "loglog" and overlays:
        raise ValueError("loglog output carries only the two reference lines")
    recs = sorted((r for r in records if r.k == k), key=lambda r: r.n)
    if filter_mod is not None:
        m, res = filter_mod
        recs = [r for r in recs if r.n % m == res % m]
    if not recs:
        raise EmptySelection(f"no records for k={k}")
    ns = np.array([r.n for r in recs], dtype=float)
    vals = np.array([float(r.value.value) for r in recs])
    label = f"f({k},n) {transform}"
    if transform == "loglog":
        x, y = np.log(ns), np.log(vals)
        xm, ym = float(np.median(x)), float(np.median(y))
        cols = ["ln_n", "ln_f", "slope_m2", "slope_m3"]
        rows = [(xi, yi, *(ym + s * (xi - xm) for s in REFERENCE_SLOPES)) for xi, yi in zip(x, y)]
        return PlotSeries(label, cols, rows)
    cols = ["n", "f" if transform == "raw" else "ln_f", *overlays]
    out = []
    for r, v in zip(recs, vals):
        row = [float(r.n), v if transform == "raw" else math.log(v)]
        ok = True
        for fam in overlays:
            fb = family_bound(fam, r.n)
            if not fb.legal:
                ok = False
                break
            w = float(fb.value.value)
            row.append(w if transform == "raw" else math.log(w))
        if ok:
            out.append(tuple(row))
    if not out:
        raise EmptySelection("no rows where all overlays are legal")
    return PlotSeries(label, cols, out)
