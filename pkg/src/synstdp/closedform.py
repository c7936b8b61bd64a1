"""Closed-form average-conductance analysis for the linear switching model.

Under a linear switching probability of slope gamma and branch peaks that
fall off linearly with both branch index and pairing offset,

    V_i(dt) = A - i*dV - beta*dt,

the compound average conductance is a sum of clamped ramps.  Treating the
active-branch cutoff as a continuous quantity turns that sum into an exact
quadratic in dt, which is the analytic route to the exponential-like window
shape.  Two coefficient sets are produced: the published formulas taken
verbatim, and the quadratic actually interpolating the continuous-cutoff
expression; they disagree, and both are reported side by side against the
direct sum rather than silently reconciled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dendrite import DendriteBank
from .waveforms import SpikeWaveform


@dataclass(frozen=True)
class ClosedFormParams:
    n: int            # parallel branches
    a_total: float    # peak-to-peak amplitude A = a_plus + a_minus (V)
    delta_v: float    # per-branch amplitude step (V)
    beta: float       # peak decay per unit offset, a_minus / tau_plus (V per time unit)
    v_th: float       # switching threshold (V)
    gamma: float      # linear switching slope (1/V)

    def __post_init__(self):
        for name in ("a_total", "delta_v", "v_th", "gamma"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.beta < 0.0:  # zero allowed: offset-independent degenerate case
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if self.n * self.delta_v >= self.a_total:
            raise ValueError("need n*delta_v < a_total so every branch peaks positive at dt=0")

    @classmethod
    def from_waveform(cls, w: SpikeWaveform, bank: DendriteBank,
                      v_th: float = 1.0, gamma: float = 2.0) -> "ClosedFormParams":
        """Derive the idealized parameters from a waveform and attenuation
        bank: beta = a_minus/tau_plus and the amplitude step spreads the
        peak-to-peak swing across the attenuation span."""
        n = bank.n
        span = max(bank.alphas) - min(bank.alphas)
        a_total = w.a_plus + w.a_minus
        delta_v = span * a_total / (n - 1) if n > 1 and span > 0 else a_total / (10 * n)
        return cls(n=n, a_total=a_total, delta_v=delta_v,
                   beta=w.a_minus / w.tau_plus, v_th=v_th, gamma=gamma)


@dataclass(frozen=True)
class KIndex:
    k: float       # continuous cutoff index a1 + b1*dt
    k_ceil: int
    a1: float      # (A - v_th) / delta_v
    b1: float      # beta / delta_v


def branch_peak(p: ClosedFormParams, i: int, delta_t: float) -> float:
    """Peak potential of branch i: A - i*dV - beta*dt."""
    if not (1 <= i <= p.n):
        raise IndexError(f"branch index {i} out of range 1..{p.n}")
    return p.a_total - i * p.delta_v - p.beta * delta_t


def k_index(p: ClosedFormParams, delta_t: float) -> KIndex:
    """Cutoff index where the linear switching probability reaches zero,
    as the published linear function of the offset."""
    a1 = (p.a_total - p.v_th) / p.delta_v
    b1 = p.beta / p.delta_v
    k = a1 + b1 * delta_t
    return KIndex(k=k, k_ceil=int(math.ceil(k)), a1=a1, b1=b1)


def branch_probability(p: ClosedFormParams, i: int, delta_t: float) -> float:
    """Linear switching probability of branch i, clamped to [0, 1]."""
    return min(max(p.gamma * (branch_peak(p, i, delta_t) - p.v_th), 0.0), 1.0)


def avg_conductance_direct(p: ClosedFormParams, delta_t: float) -> float:
    """Average compound conductance (r_on normalized to 1): the sum of every
    branch's clamped switching probability.  Clamping enforces the [0, 1]
    saturation bounds the bare per-branch ramp leaves implicit."""
    total = 0.0
    for i in range(1, p.n + 1):
        total += branch_probability(p, i, delta_t)
    return total


def _kappa(p: ClosedFormParams, delta_t: float) -> float:
    """Continuous active-branch cutoff: branch i switches with positive
    probability iff i < kappa."""
    ki = k_index(p, delta_t)
    return ki.a1 - ki.b1 * delta_t


def avg_conductance_continuous(p: ClosedFormParams, delta_t: float) -> float:
    """Continuous-cutoff form of the direct sum: with kappa = a1 - b1*dt and
    no branch saturated, sum_{i=1..kappa} gamma*dV*(kappa - i) collapses to
    gamma*dV*kappa*(kappa - 1)/2 -- a single quadratic in dt."""
    kap = _kappa(p, delta_t)
    return p.gamma * p.delta_v * kap * (kap - 1.0) / 2.0


def quadratic_coeffs_published(p: ClosedFormParams) -> tuple[float, float, float]:
    """The published closed-form coefficients of value = a - b*dt + c*dt^2,
    evaluated verbatim (they are not consistent with the expansion of the
    continuous-cutoff expression; see quadratic_coeffs_fitted)."""
    ki = k_index(p, 0.0)
    a1, b1 = ki.a1, ki.b1
    a = p.gamma * (p.a_total - p.v_th) * (p.n - a1) \
        - p.gamma * p.delta_v * (p.n * (p.n + 1) - a1 * (a1 + 1)) / 2.0
    b = b1 * p.gamma * (0.5 * p.delta_v * (a1 + 1.0) - p.beta)
    c = b1 * (p.beta * p.gamma + b1)
    return a, b, c


def _clamp_breakpoints(p: ClosedFormParams) -> list[float]:
    """Offsets where some branch's probability crosses a clamp bound."""
    if p.beta == 0.0:
        return []
    pts = []
    for i in range(1, p.n + 1):
        pts.append((p.a_total - p.v_th - i * p.delta_v) / p.beta)               # p_i hits 0
        pts.append((p.a_total - p.v_th - 1.0 / p.gamma - i * p.delta_v) / p.beta)  # p_i hits 1
    return pts


def quadratic_coeffs_fitted(p: ClosedFormParams, dt_lo: float, dt_hi: float) -> tuple[float, float, float]:
    """Exact quadratic through three points of the continuous-cutoff
    expression on [dt_lo, dt_hi]; on a smooth piece this reproduces the
    expression identically.  The interval must not contain a clamping
    breakpoint (a branch probability crossing 0 or 1), must keep the cutoff
    inside [0, n], and no branch may be saturated."""
    if dt_lo > dt_hi:
        raise ValueError("need dt_lo <= dt_hi")
    for b in _clamp_breakpoints(p):
        if dt_lo < b < dt_hi:
            raise ValueError(f"interval [{dt_lo}, {dt_hi}] contains a clamping breakpoint at dt={b:.6g}")
    for dt in (dt_lo, dt_hi):
        kap = _kappa(p, dt)
        if kap > p.n + 1e-12:
            raise ValueError(f"cutoff {kap:.6g} exceeds n={p.n} at dt={dt}: piece is not quadratic")
        if kap < -1e-12:
            raise ValueError(f"cutoff negative at dt={dt}: no active branches")
        if p.gamma * (p.a_total - p.delta_v - p.beta * dt - p.v_th) > 1.0 + 1e-12:
            raise ValueError(f"branch 1 saturated at dt={dt}: piece is not quadratic")
    if dt_hi == dt_lo:
        xs = np.array([dt_lo, dt_lo + 1.0, dt_lo + 2.0])
    else:
        xs = np.array([dt_lo, 0.5 * (dt_lo + dt_hi), dt_hi])
    ys = np.array([avg_conductance_continuous(p, x) for x in xs])
    design = np.column_stack([np.ones(3), -xs, xs * xs])
    a, b, c = np.linalg.solve(design, ys)
    return float(a), float(b), float(c)


def taylor_remainder_bound(x: float) -> float:
    """|exp(-x) - (1 - x + x^2/2)| for the second-order expansion."""
    return abs(math.exp(-x) - (1.0 - x + 0.5 * x * x))


def comparison_report(p: ClosedFormParams, dt_lo: float, dt_hi: float, n_probe: int = 20) -> dict:
    """Both coefficient paths against the direct sum over probe offsets."""
    probes = np.linspace(dt_lo, dt_hi, n_probe)
    ki = k_index(p, 0.0)
    fitted = quadratic_coeffs_fitted(p, dt_lo, dt_hi)
    published = quadratic_coeffs_published(p)

    def quad(coeffs, x):
        a, b, c = coeffs
        return a - b * x + c * x * x

    direct = np.array([avg_conductance_direct(p, x) for x in probes])
    cont = np.array([avg_conductance_continuous(p, x) for x in probes])
    fit_vals = quad(fitted, probes)
    return {
        "a1": ki.a1,
        "b1": ki.b1,
        "k_samples": [{"dt": float(x), "k": k_index(p, float(x)).k} for x in probes],
        "direct_sum": [{"dt": float(x), "value": float(v)} for x, v in zip(probes, direct)],
        "published_coeffs": {"a": published[0], "b": published[1], "c": published[2]},
        "fitted_coeffs": {"a": fitted[0], "b": fitted[1], "c": fitted[2]},
        "max_dev_fitted_vs_continuous": float(np.abs(fit_vals - cont).max()),
        "max_dev_fitted_vs_direct": float(np.abs(fit_vals - direct).max()),
        "max_dev_published_vs_direct": float(np.abs(quad(published, probes) - direct).max()),
        "discretization_envelope": p.gamma * p.delta_v * p.n,
    }
