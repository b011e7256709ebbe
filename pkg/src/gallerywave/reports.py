"""CSV tables and self-rendered SVG polyline plots.

Every CSV starts with header comment lines carrying the full effective
configuration as key=value pairs, then a column-name row.  Numbers are
written with repr-shortest formatting so identical runs produce
byte-identical bodies.  Plots are written directly as SVG (no display
server, no plotting dependency): polylines on a log-or-linear scaled
viewport with axis ticks and optional shaded vertical bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = ["write_csv", "write_field_csv", "LinePlot", "format_float"]


def format_float(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if not math.isfinite(f):
        raise ValueError(f"non-finite value in report: {f}")
    return repr(f)


def write_csv(path, columns: dict[str, Sequence], header_items: Iterable[tuple[str, str]] = ()) -> None:
    """Write named columns with '# key=value' header lines."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n_rows = len(arrays[0])
    lines = [f"# {k}={v}" for k, v in header_items]
    lines.append(",".join(names))
    for i in range(n_rows):
        lines.append(",".join(
            arr[i] if arr.dtype.kind == "U" else format_float(arr[i])
            for arr in arrays))
    path.write_text("\n".join(lines) + "\n")


def write_field_csv(path, slab, config=None) -> None:
    """Field slice as t,x,y1[,y2],re,im,|u| rows (radial d=3 uses y1=|y|, y2=0)."""
    items = list(config.header_items()) if config is not None else []
    items += [(k, str(v)) for k, v in slab.meta.items()]
    nx, ny = slab.values.shape
    xs = np.repeat(slab.x, ny)
    ys = np.tile(slab.y, nx)
    vals = slab.values.ravel()
    columns = {
        "t": np.full(nx * ny, slab.t),
        "x": xs,
        "y1": ys,
        "re_u": vals.real,
        "im_u": vals.imag,
        "abs_u": np.abs(vals),
    }
    write_csv(path, columns, items)


@dataclass
class _Series:
    x: np.ndarray
    y: np.ndarray
    color: str
    label: str
    dash: str | None = None


class LinePlot:
    """Minimal headless vector plot: polylines + shaded bands + labels."""

    def __init__(self, title: str = "", xlabel: str = "", ylabel: str = "",
                 logx: bool = False, logy: bool = False,
                 width: int = 860, height: int = 520):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.logx, self.logy = logx, logy
        self.width, self.height = width, height
        self._series: list[_Series] = []
        self._bands: list[tuple[float, float, str]] = []
        self._marks: list[tuple[float, float, str]] = []

    def line(self, x, y, color: str = "#1f77b4", label: str = "", dash: str | None = None):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y)
        if self.logx:
            keep &= x > 0
        if self.logy:
            keep &= y > 0
        self._series.append(_Series(x[keep], y[keep], color, label, dash))
        return self

    def band(self, x0: float, x1: float, color: str = "#fdd8a0"):
        self._bands.append((x0, x1, color))
        return self

    def mark(self, x: float, y: float, color: str = "#d62728"):
        self._marks.append((x, y, color))
        return self

    def _limits(self):
        xs = np.concatenate([s.x for s in self._series if len(s.x)] or [np.array([0, 1])])
        ys = np.concatenate([s.y for s in self._series if len(s.y)] or [np.array([0, 1])])
        fx = (lambda v: np.log10(v)) if self.logx else (lambda v: v)
        fy = (lambda v: np.log10(v)) if self.logy else (lambda v: v)
        x0, x1 = float(fx(xs).min()), float(fx(xs).max())
        y0, y1 = float(fy(ys).min()), float(fy(ys).max())
        padx = 0.04 * (x1 - x0 or 1.0)
        pady = 0.06 * (y1 - y0 or 1.0)
        return x0 - padx, x1 + padx, y0 - pady, y1 + pady

    def _ticks(self, lo: float, hi: float, log: bool) -> list[float]:
        if log:
            return [v for v in range(math.ceil(lo), math.floor(hi) + 1)]
        span = hi - lo or 1.0
        step = 10 ** math.floor(math.log10(span / 5.0))
        for mult in (1, 2, 5, 10):
            if span / (step * mult) <= 7:
                step *= mult
                break
        first = math.ceil(lo / step) * step
        return list(np.arange(first, hi + step / 2, step))

    def write(self, path) -> None:
        m_l, m_r, m_t, m_b = 70, 20, 36, 52
        iw, ih = self.width - m_l - m_r, self.height - m_t - m_b
        x0, x1, y0, y1 = self._limits()
        fx = (lambda v: np.log10(v)) if self.logx else (lambda v: np.asarray(v, float))
        fy = (lambda v: np.log10(v)) if self.logy else (lambda v: np.asarray(v, float))

        def px(v):
            return m_l + (fx(v) - x0) / (x1 - x0) * iw

        def py(v):
            return m_t + (y1 - fy(v)) / (y1 - y0) * ih

        e = []
        e.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                 f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        e.append(f'<rect width="{self.width}" height="{self.height}" fill="white"/>')
        for b0, b1, color in self._bands:
            if (self.logx and (b0 <= 0 or b1 <= 0)):
                continue
            xa, xb = float(px(b0)), float(px(b1))
            xa, xb = max(xa, m_l), min(xb, m_l + iw)
            if xb > xa:
                e.append(f'<rect x="{xa:.2f}" y="{m_t}" width="{xb - xa:.2f}" '
                         f'height="{ih}" fill="{color}" opacity="0.45"/>')
        e.append(f'<rect x="{m_l}" y="{m_t}" width="{iw}" height="{ih}" '
                 'fill="none" stroke="#333" stroke-width="1"/>')
        for tv in self._ticks(x0, x1, self.logx):
            X = m_l + (tv - x0) / (x1 - x0) * iw
            if not m_l <= X <= m_l + iw:
                continue
            label = f"1e{int(tv)}" if self.logx else f"{tv:g}"
            e.append(f'<line x1="{X:.1f}" y1="{m_t + ih}" x2="{X:.1f}" '
                     f'y2="{m_t + ih + 5}" stroke="#333"/>')
            e.append(f'<text x="{X:.1f}" y="{m_t + ih + 18}" font-size="11" '
                     f'text-anchor="middle">{label}</text>')
        for tv in self._ticks(y0, y1, self.logy):
            Y = m_t + (y1 - tv) / (y1 - y0) * ih
            if not m_t <= Y <= m_t + ih:
                continue
            label = f"1e{int(tv)}" if self.logy else f"{tv:g}"
            e.append(f'<line x1="{m_l - 5}" y1="{Y:.1f}" x2="{m_l}" y2="{Y:.1f}" stroke="#333"/>')
            e.append(f'<text x="{m_l - 8}" y="{Y + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{label}</text>')
        for s in self._series:
            if not len(s.x):
                continue
            pts = " ".join(f"{float(a):.2f},{float(b):.2f}"
                           for a, b in zip(px(s.x), py(s.y)))
            dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
            e.append(f'<polyline points="{pts}" fill="none" stroke="{s.color}" '
                     f'stroke-width="1.4"{dash}/>')
        for mx, my, color in self._marks:
            e.append(f'<circle cx="{float(px(mx)):.1f}" cy="{float(py(my)):.1f}" '
                     f'r="3.5" fill="{color}"/>')
        legend_y = m_t + 14
        for s in self._series:
            if not s.label:
                continue
            e.append(f'<line x1="{m_l + iw - 170}" y1="{legend_y - 4}" '
                     f'x2="{m_l + iw - 145}" y2="{legend_y - 4}" stroke="{s.color}" '
                     f'stroke-width="2"/>')
            e.append(f'<text x="{m_l + iw - 140}" y="{legend_y}" font-size="11">{s.label}</text>')
            legend_y += 16
        if self.title:
            e.append(f'<text x="{self.width / 2}" y="20" font-size="14" '
                     f'text-anchor="middle">{self.title}</text>')
        if self.xlabel:
            e.append(f'<text x="{m_l + iw / 2}" y="{self.height - 14}" font-size="12" '
                     f'text-anchor="middle">{self.xlabel}</text>')
        if self.ylabel:
            e.append(f'<text x="18" y="{m_t + ih / 2}" font-size="12" text-anchor="middle" '
                     f'transform="rotate(-90 18 {m_t + ih / 2})">{self.ylabel}</text>')
        e.append("</svg>")
        Path(path).write_text("\n".join(e) + "\n")
