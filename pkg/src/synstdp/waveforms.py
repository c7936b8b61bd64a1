"""Parametric spike waveforms.

Every waveform is a piecewise function of time built from a positive "head"
on [-tau_minus, 0) and a negative "tail" on [0, tau_plus).  Evaluation is
right-continuous at piece boundaries; one-sided limits are available for
exact peak extraction in the pairing engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

DEFAULT_A_PLUS = 0.9
DEFAULT_A_MINUS = 0.4
DEFAULT_TAU_MINUS = 1.0
DEFAULT_TAU_PLUS = 5.0

MAX_AMPLITUDE = 10.0  # volts; sanity cap for configuration input
EDGE_SNAP_TOL = 1e-9  # piece-edge snapping for one-sided limits


class Shape(str, Enum):
    HRHT = "hrht"
    RECTANGULAR = "rect"
    DOUBLE_SAWTOOTH = "sawtooth"
    DOUBLE_EXPONENTIAL = "dexp"
    BIO_PLAUSIBLE = "bio"


# extras accepted per shape, with defaults
_DEXP_EXTRA = {"tau_head": 0.3, "tau_tail": 1.5}
_BIO_EXTRA = {"head_center": -0.2, "head_width": 0.3, "tail_center": 2.0, "tail_width": 1.5}


@dataclass(frozen=True)
class Piece:
    """One analytic segment [lo, hi) of a waveform."""
    lo: float
    hi: float
    func: Callable[[np.ndarray], np.ndarray]
    curved: bool = False  # True if extrema may fall strictly inside the piece


@dataclass(frozen=True)
class SpikeWaveform:
    """A spike shape with head amplitude a_plus and tail peak a_minus.

    The head occupies t in [-tau_minus, 0), the tail t in [0, tau_plus)
    (the bio shape extends slightly past both, see its pieces).  Values are
    volts, times are in normalized time units.
    """
    shape: Shape
    a_plus: float = DEFAULT_A_PLUS
    a_minus: float = DEFAULT_A_MINUS
    tau_minus: float = DEFAULT_TAU_MINUS
    tau_plus: float = DEFAULT_TAU_PLUS
    extra: tuple = ()  # sorted (key, value) pairs; see make_waveform

    def _extra_dict(self) -> dict:
        return dict(self.extra)

    def pieces(self) -> list[Piece]:
        ap, am, tm, tp = self.a_plus, self.a_minus, self.tau_minus, self.tau_plus
        if self.shape is Shape.HRHT:
            return [
                Piece(-tm, 0.0, lambda t: np.full_like(t, ap, dtype=float)),
                Piece(0.0, tp, lambda t: -am * (1.0 - t / tp)),
            ]
        if self.shape is Shape.RECTANGULAR:
            return [
                Piece(-tm, 0.0, lambda t: np.full_like(t, ap, dtype=float)),
                Piece(0.0, tp, lambda t: np.full_like(t, -am, dtype=float)),
            ]
        if self.shape is Shape.DOUBLE_SAWTOOTH:
            return [
                Piece(-tm, 0.0, lambda t: ap * (1.0 + t / tm)),
                Piece(0.0, tp, lambda t: -am * (1.0 - t / tp)),
            ]
        if self.shape is Shape.DOUBLE_EXPONENTIAL:
            ex = self._extra_dict()
            th, tt = ex["tau_head"], ex["tau_tail"]
            return [
                Piece(-tm, 0.0, lambda t: ap * np.exp(t / th), curved=True),
                Piece(0.0, tp, lambda t: -am * np.exp(-t / tt), curved=True),
            ]
        if self.shape is Shape.BIO_PLAUSIBLE:
            ex = self._extra_dict()
            hc, hw = ex["head_center"], ex["head_width"]
            tc, tw = ex["tail_center"], ex["tail_width"]

            def bio(t):
                return ap * np.exp(-(((t - hc) / hw) ** 2)) - am * np.exp(-(((t - tc) / tw) ** 2))

            return [Piece(-tm - 0.5, tp + 1.0, bio, curved=True)]
        raise AssertionError(f"unhandled shape {self.shape}")

    def support(self) -> tuple[float, float]:
        """Interval outside which the waveform is exactly zero."""
        ps = self.pieces()
        return ps[0].lo, ps[-1].hi

    def breakpoints(self) -> np.ndarray:
        edges = set()
        for p in self.pieces():
            edges.add(p.lo)
            edges.add(p.hi)
        return np.array(sorted(edges))

    def has_curved_pieces(self) -> bool:
        return any(p.curved for p in self.pieces())

    def evaluate(self, t) -> np.ndarray | float:
        """Waveform value at time(s) t; right-continuous at piece edges."""
        arr = np.asarray(t, dtype=float)
        out = np.zeros_like(arr)
        for p in self.pieces():
            m = (arr >= p.lo) & (arr < p.hi)
            if m.any():
                out[m] = p.func(arr[m])
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def _piece_at(self, t: float, side: int) -> Piece | None:
        pieces = self.pieces()
        # snap to a piece edge when within rounding distance, so that branch
        # delays or offsets carrying ~1e-16 representation error cannot open
        # phantom slivers of head/tail overlap
        for p in pieces:
            if abs(t - p.lo) <= EDGE_SNAP_TOL:
                t = p.lo
                break
            if abs(t - p.hi) <= EDGE_SNAP_TOL:
                t = p.hi
                break
        for p in pieces:
            inside = (p.lo <= t < p.hi) if side > 0 else (p.lo < t <= p.hi)
            if inside:
                return p
        return None

    def evaluate_limit(self, t: float, side: int) -> float:
        """One-sided limit at t: side=+1 approaches from above, -1 from below."""
        p = self._piece_at(t, side)
        return 0.0 if p is None else float(p.func(np.asarray([t], dtype=float))[0])

    def limit_with_support(self, t: float, side: int) -> tuple[float, bool]:
        """One-sided limit plus whether (t, side) lies within the support.
        A tail decaying continuously to zero is still inside at its edge."""
        p = self._piece_at(t, side)
        if p is None:
            return 0.0, False
        return float(p.func(np.asarray([t], dtype=float))[0]), True

    def integral(self, step: float = 0.01) -> float:
        """Piece-aware trapezoid integral (exact for linear pieces)."""
        total = 0.0
        for p in self.pieces():
            n = max(2, int(math.ceil((p.hi - p.lo) / step)) + 1)
            ts = np.linspace(p.lo, p.hi, n)
            total += float(np.trapezoid(p.func(ts), ts))
        return total


def make_waveform(shape: Shape | str, params: dict | None = None, **kw) -> SpikeWaveform:
    """Validated construction; missing parameters fall back to the defaults
    (a_plus=0.9 V, tau_minus=1, a_minus=0.4 V, tau_plus=5)."""
    shape = Shape(shape)
    p = dict(params or {})
    p.update(kw)
    a_plus = float(p.pop("a_plus", DEFAULT_A_PLUS))
    a_minus = float(p.pop("a_minus", DEFAULT_A_MINUS))
    tau_minus = float(p.pop("tau_minus", DEFAULT_TAU_MINUS))
    tau_plus = float(p.pop("tau_plus", DEFAULT_TAU_PLUS))
    extra_in = dict(p.pop("extra", {}))
    if p:
        raise ValueError(f"unknown waveform parameters: {sorted(p)}")

    if not (0.0 < a_plus <= MAX_AMPLITUDE):
        raise ValueError(f"a_plus must be in (0, {MAX_AMPLITUDE}] V, got {a_plus}")
    if not (0.0 <= a_minus <= MAX_AMPLITUDE):
        raise ValueError(f"a_minus must be in [0, {MAX_AMPLITUDE}] V, got {a_minus}")
    if tau_minus <= 0.0:
        raise ValueError(f"tau_minus must be positive, got {tau_minus}")
    if tau_plus <= 0.0:
        raise ValueError(f"tau_plus must be positive, got {tau_plus}")

    defaults = {Shape.DOUBLE_EXPONENTIAL: _DEXP_EXTRA, Shape.BIO_PLAUSIBLE: _BIO_EXTRA}.get(shape, {})
    unknown = set(extra_in) - set(defaults)
    if unknown:
        raise ValueError(f"unknown extra parameters for shape {shape.value}: {sorted(unknown)}")
    extra = dict(defaults)
    extra.update({k: float(v) for k, v in extra_in.items()})
    for key, val in extra.items():
        if key.startswith("tau") or key.endswith("width"):
            if val <= 0.0:
                raise ValueError(f"extra parameter {key} must be positive, got {val}")

    return SpikeWaveform(
        shape=shape,
        a_plus=a_plus,
        a_minus=a_minus,
        tau_minus=tau_minus,
        tau_plus=tau_plus,
        extra=tuple(sorted(extra.items())),
    )
