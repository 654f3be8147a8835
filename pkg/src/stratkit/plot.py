"""Minimal standalone SVG line and scatter plots."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import StratError

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=70, right=150, top=40, bottom=60)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _n(v: float) -> str:
    return f"{v:.2f}"


def _range(v: np.ndarray) -> tuple[float, float]:
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi - lo < 1e-12:
        pad = max(1.0, abs(lo)) * 0.5
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class _Frame:
    def __init__(self, xr, yr):
        self.xr, self.yr = xr, yr
        self.x0, self.x1 = MARGIN["left"], WIDTH - MARGIN["right"]
        self.y0, self.y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def px(self, x):
        return self.x0 + (np.asarray(x) - self.xr[0]) / (self.xr[1] - self.xr[0]) * (self.x1 - self.x0)

    def py(self, y):
        return self.y0 + (np.asarray(y) - self.yr[0]) / (self.yr[1] - self.yr[0]) * (self.y1 - self.y0)

    def axes(self, title: str, xlabel: str, ylabel: str) -> list[str]:
        out = [
            f'<rect x="{self.x0}" y="{self.y1}" width="{self.x1 - self.x0}" height="{self.y0 - self.y1}" fill="none" stroke="#000"/>',
            f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
            f'<text x="{(self.x0 + self.x1) / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
            f'<text x="18" y="{(self.y0 + self.y1) / 2:.0f}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {(self.y0 + self.y1) / 2:.0f})">{escape(ylabel)}</text>',
        ]
        for v in np.linspace(*self.xr, 5):
            x = float(self.px(v))
            out.append(f'<line x1="{_n(x)}" y1="{self.y0}" x2="{_n(x)}" y2="{self.y0 + 5}" stroke="#000"/>')
            out.append(f'<text x="{_n(x)}" y="{self.y0 + 20}" text-anchor="middle" font-size="11">{v:.3g}</text>')
        for v in np.linspace(*self.yr, 5):
            y = float(self.py(v))
            out.append(f'<line x1="{self.x0 - 5}" y1="{_n(y)}" x2="{self.x0}" y2="{_n(y)}" stroke="#000"/>')
            out.append(f'<text x="{self.x0 - 8}" y="{_n(y + 4)}" text-anchor="end" font-size="11">{v:.3g}</text>')
        return out

    def legend(self, names) -> list[str]:
        out = []
        for i, name in enumerate(names):
            y = self.y1 + 10 + 20 * i
            c = PALETTE[i % len(PALETTE)]
            out.append(f'<rect x="{self.x1 + 15}" y="{y}" width="12" height="12" fill="{c}"/>')
            out.append(f'<text x="{self.x1 + 33}" y="{y + 11}" font-size="12">{escape(str(name))}</text>')
        return out


def _document(body: list[str]) -> str:
    head = f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">'
    return "\n".join(['<?xml version="1.0" encoding="UTF-8"?>', head, '<rect width="100%" height="100%" fill="#fff"/>'] + body + ["</svg>"]) + "\n"


def _write(svg: str, path) -> str:
    if path is not None:
        try:
            Path(path).write_text(svg)
        except OSError as exc:
            raise StratError("io-error", str(exc)) from None
    return svg


def line_plot(series, path=None, title: str = "", xlabel: str = "x", ylabel: str = "y") -> str:
    """One polyline per ``(name, x, y)`` series, with a legend."""
    series = list(series)
    if not series:
        raise StratError("empty-plot", "no series to plot")
    clean = []
    for name, x, y in series:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or len(x) == 0:
            raise StratError("bad-data", f"series {name!r}: x and y must be equal-length 1-D")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise StratError("bad-data", f"series {name!r} has non-finite values")
        clean.append((name, x, y))
    fr = _Frame(_range(np.concatenate([c[1] for c in clean])), _range(np.concatenate([c[2] for c in clean])))
    body = fr.axes(title, xlabel, ylabel)
    for i, (name, x, y) in enumerate(clean):
        pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in zip(fr.px(x), fr.py(y)))
        body.append(f'<polyline fill="none" stroke="{PALETTE[i % len(PALETTE)]}" stroke-width="2" points="{pts}"><title>{escape(str(name))}</title></polyline>')
    body += fr.legend([c[0] for c in clean])
    return _write(_document(body), path)


def scatter_plot(points, labels=None, path=None, title: str = "", xlabel: str = "x1", ylabel: str = "x2") -> str:
    """2-D scatter colored by label (first two coordinates are used)."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or len(P) == 0:
        raise StratError("empty-plot", "no points to plot")
    if P.shape[1] < 2:
        P = np.column_stack([P[:, 0], np.zeros(len(P))])
    if not np.all(np.isfinite(P[:, :2])):
        raise StratError("bad-data", "non-finite coordinates")
    labels = np.zeros(len(P), dtype=int) if labels is None else np.asarray(labels)
    if len(labels) != len(P):
        raise StratError("bad-data", f"{len(labels)} labels for {len(P)} points")
    names = sorted(set(labels.tolist()), key=str)
    color = {lab: PALETTE[i % len(PALETTE)] for i, lab in enumerate(names)}
    fr = _Frame(_range(P[:, 0]), _range(P[:, 1]))
    body = fr.axes(title, xlabel, ylabel)
    xs, ys = fr.px(P[:, 0]), fr.py(P[:, 1])
    for x, y, lab in zip(xs, ys, labels.tolist()):
        body.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="2" fill="{color[lab]}"/>')
    body += fr.legend(names)
    return _write(_document(body), path)
