"""Result serialization: CSV files and self-contained SVG scatter plots.

Floats are written with shortest round-trip representation so re-parsing
reproduces the in-memory values exactly; row order is fixed (delta_t
ascending, then epoch / state index), making output byte-stable.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .montecarlo import StdpWindow


def _fmt(x: float) -> str:
    return repr(float(x))


def write_window_csv(w: StdpWindow, out_dir: str | Path) -> dict[str, Path]:
    """Write window.csv (per-epoch outcomes), mean.csv (per-point stats) and
    states.csv (switching-count probabilities) into out_dir."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {}

        p = out / "window.csv"
        with p.open("w", encoding="utf-8", newline="\n") as f:
            f.write("delta_t,epoch,delta_g_norm,n_set,n_reset\n")
            for k, dt in enumerate(w.delta_t):
                dts = _fmt(dt)
                for e in range(w.epochs):
                    f.write(f"{dts},{e},{_fmt(w.delta_g[k, e])},"
                            f"{int(w.n_set[k, e])},{int(w.n_reset[k, e])}\n")
        paths["window"] = p

        p = out / "mean.csv"
        with p.open("w", encoding="utf-8", newline="\n") as f:
            f.write("delta_t,mc_mean,mc_std,analytic\n")
            for k, dt in enumerate(w.delta_t):
                f.write(f"{_fmt(dt)},{_fmt(w.delta_g[k].mean())},"
                        f"{_fmt(w.delta_g[k].std())},{_fmt(w.analytic[k])}\n")
        paths["mean"] = p

        paths["states"] = write_states_csv(w.delta_t, w.states, out / "states.csv")
        return paths
    except OSError as e:
        raise OSError(f"cannot write results under {out}: {e}") from None


def read_mean_csv(path: str | Path):
    """(delta_t, mc_mean, mc_std, analytic) arrays from a mean.csv file."""
    rows = []
    with Path(path).open(encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        if header != ["delta_t", "mc_mean", "mc_std", "analytic"]:
            raise ValueError(f"{path}: unexpected header {header}")
        for line in f:
            rows.append([float(v) for v in line.strip().split(",")])
    arr = np.asarray(rows)
    return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


_W, _H = 800.0, 500.0
_ML, _MR, _MT, _MB = 60.0, 20.0, 20.0, 45.0


def _xticks(lo: float, hi: float):
    span = hi - lo
    step = 1.0 if span <= 15 else 2.0 if span <= 30 else 5.0
    t = np.ceil(lo / step) * step
    out = []
    while t <= hi + 1e-9:
        out.append(round(t, 9))
        t += step
    return out


def write_svg_scatter(w: StdpWindow, level_bin: float = 1.0, title: str = "") -> str:
    """Standalone SVG of the window: one dot per (delta_t, binned outcome)
    with opacity proportional to outcome frequency, analytic curve overlaid."""
    if w.delta_t.size == 0:
        raise ValueError("empty window")
    x_lo, x_hi = float(w.delta_t.min()), float(w.delta_t.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_abs = max(float(np.abs(w.delta_g).max()), float(np.abs(w.analytic).max()), 1.0)
    y_lo, y_hi = -1.05 * y_abs, 1.05 * y_abs

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:g}" height="{_H:g}" '
        f'viewBox="0 0 {_W:g} {_H:g}">',
        f'<rect width="{_W:g}" height="{_H:g}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2:.2f}" y="15" font-size="13" text-anchor="middle">{title}</text>')

    # dots, grouped per (point, binned level)
    parts.append('<g fill="#d62728">')
    for k, dt in enumerate(w.delta_t):
        levels = np.round(w.delta_g[k] / level_bin) * level_bin
        uniq, counts = np.unique(levels, return_counts=True)
        cmax = counts.max()
        for lvl, cnt in zip(uniq, counts):
            op = cnt / cmax
            parts.append(f'<circle cx="{sx(dt):.2f}" cy="{sy(lvl):.2f}" r="2.5" '
                         f'fill-opacity="{op:.4f}"/>')
    parts.append("</g>")

    pts = " ".join(f"{sx(dt):.2f},{sy(a):.2f}" for dt, a in zip(w.delta_t, w.analytic))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')

    # axes
    ax_y = sy(0.0) if y_lo <= 0.0 <= y_hi else _H - _MB
    parts.append(f'<line x1="{_ML:g}" y1="{ax_y:.2f}" x2="{_W - _MR:g}" y2="{ax_y:.2f}" '
                 f'stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{sx(0.0):.2f}" y1="{_MT:g}" x2="{sx(0.0):.2f}" y2="{_H - _MB:g}" '
                 f'stroke="black" stroke-width="1"/>' if x_lo <= 0.0 <= x_hi else
                 f'<line x1="{_ML:g}" y1="{_MT:g}" x2="{_ML:g}" y2="{_H - _MB:g}" '
                 f'stroke="black" stroke-width="1"/>')
    for t in _xticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(t):.2f}" y1="{_H - _MB:g}" x2="{sx(t):.2f}" '
                     f'y2="{_H - _MB + 5:g}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{sx(t):.2f}" y="{_H - _MB + 17:g}" font-size="10" '
                     f'text-anchor="middle">{t:g}</text>')
    y_step = max(1.0, round(y_abs / 4))
    t = -np.floor(y_abs / y_step) * y_step
    while t <= y_abs + 1e-9:
        parts.append(f'<line x1="{_ML - 5:g}" y1="{sy(t):.2f}" x2="{_ML:g}" y2="{sy(t):.2f}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{_ML - 8:g}" y="{sy(t) + 3:.2f}" font-size="10" '
                     f'text-anchor="end">{t:g}</text>')
        t += y_step
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{_H - 8:g}" font-size="12" '
                 f'text-anchor="middle">relative spike timing &#916;t (time units)</text>')
    parts.append(f'<text x="14" y="{(_MT + _H - _MB) / 2:.2f}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 14 {(_MT + _H - _MB) / 2:.2f})">'
                 f'normalized conductance change &#916;G&#183;R_ON</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


_STATE_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                 "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def write_states_csv(delta_t, states, path: str | Path) -> Path:
    """states.csv from bare arrays (used by both the window and statedist runs)."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8", newline="\n") as f:
        f.write("delta_t,state_index,probability\n")
        for k, dt in enumerate(delta_t):
            dts = _fmt(dt)
            for s in range(states.shape[1]):
                f.write(f"{dts},{s},{_fmt(states[k, s])}\n")
    return p


def write_svg_states(delta_t, states, title: str = "") -> str:
    """SVG of per-state occupancy probability versus offset, one polyline per
    switching-count state."""
    delta_t = np.asarray(delta_t, dtype=float)
    states = np.asarray(states, dtype=float)
    if delta_t.size == 0:
        raise ValueError("empty window")
    x_lo, x_hi = float(delta_t.min()), float(delta_t.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(p):
        return _H - _MB - p * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:g}" height="{_H:g}" '
        f'viewBox="0 0 {_W:g} {_H:g}">',
        f'<rect width="{_W:g}" height="{_H:g}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2:.2f}" y="15" font-size="13" text-anchor="middle">{title}</text>')
    for s in range(states.shape[1]):
        color = _STATE_COLORS[s % len(_STATE_COLORS)]
        pts = " ".join(f"{sx(dt):.2f},{sy(p):.2f}" for dt, p in zip(delta_t, states[:, s]))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
    parts.append(f'<line x1="{_ML:g}" y1="{_H - _MB:g}" x2="{_W - _MR:g}" y2="{_H - _MB:g}" '
                 f'stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{_ML:g}" y1="{_MT:g}" x2="{_ML:g}" y2="{_H - _MB:g}" '
                 f'stroke="black" stroke-width="1"/>')
    for t in _xticks(x_lo, x_hi):
        parts.append(f'<text x="{sx(t):.2f}" y="{_H - _MB + 17:g}" font-size="10" '
                     f'text-anchor="middle">{t:g}</text>')
    for p in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(f'<text x="{_ML - 8:g}" y="{sy(p) + 3:.2f}" font-size="10" '
                     f'text-anchor="end">{p:g}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{_H - 8:g}" font-size="12" '
                 f'text-anchor="middle">relative spike timing &#916;t (time units)</text>')
    parts.append(f'<text x="14" y="{(_MT + _H - _MB) / 2:.2f}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 14 {(_MT + _H - _MB) / 2:.2f})">state probability</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
