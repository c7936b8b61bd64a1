"""Net device potential for one pre/post spike pairing.

Convention: the pre-synaptic spike fires at t = 0, the post-synaptic spike
at t = delta_t (delta_t = t_post - t_pre).  The potential across device i is

    V_i(t) = post(t - delta_t) - alpha_i * pre(t - delay_i)

so a positive peak drives SET (potentiation for pre-before-post) and a
negative peak drives RESET.  With pair_only the potential is evaluated only
where both spikes are simultaneously nonzero, which suppresses lone-spike
disturb events.

Peaks are extracted exactly: extrema of a piecewise-linear potential sit at
piece boundaries of either (shifted) waveform, so candidates are one-sided
limits at those boundaries; grid samples are added only for shapes with
curved pieces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dendrite import DendriteBank
from .device import DeviceModel, reset_probability, set_probability
from .waveforms import SpikeWaveform


@dataclass(frozen=True)
class PairingGeometry:
    pre: SpikeWaveform
    post: SpikeWaveform
    bank: DendriteBank
    device: DeviceModel
    dt_step: float = 0.01
    pair_only: bool = True
    amp_noise_sigma: float = 0.0  # per-pairing amplitude noise (relative)

    def __post_init__(self):
        if self.dt_step <= 0.0:
            raise ValueError(f"dt_step must be positive, got {self.dt_step}")
        cap = min(self.pre.tau_minus, self.post.tau_minus) / 10.0
        if self.dt_step > cap + 1e-15:
            raise ValueError(
                f"dt_step {self.dt_step} too coarse; must be <= min(tau_minus)/10 = {cap}")
        if self.amp_noise_sigma < 0.0:
            raise ValueError(f"amp_noise_sigma must be >= 0, got {self.amp_noise_sigma}")


@dataclass(frozen=True)
class BranchDrive:
    """Polarity peaks of one branch's potential and the resulting switch odds."""
    v_max: float
    t_max: float
    v_min: float
    t_min: float
    p_set: float
    p_reset: float

    @property
    def reset_later(self) -> bool:
        """True when the RESET peak occurs at or after the SET peak."""
        return self.t_min >= self.t_max


@dataclass(frozen=True)
class CandidateTable:
    """Candidate extremum locations of one (branch, delta_t) pairing.

    `post_v`/`pre_v` hold the one-sided values of the post spike and the
    attenuated+delayed pre spike; rescaling either spike only rescales these
    columns, so noisy peaks are re-derived from the same table.
    Candidates are sorted by time (ties: left limit first), hence argmax /
    argmin pick the earliest extremum.
    """
    t: np.ndarray
    post_v: np.ndarray
    pre_v: np.ndarray
    valid: np.ndarray  # pair-only mask (or nonzero-anywhere mask)

    def peaks(self, s_pre: float = 1.0, s_post: float = 1.0):
        """(v_max, t_max, v_min, t_min) with both spikes rescaled."""
        if not self.valid.any():
            return 0.0, 0.0, 0.0, 0.0
        v = np.where(self.valid, s_post * self.post_v - s_pre * self.pre_v, 0.0)
        imax, imin = int(np.argmax(v)), int(np.argmin(v))
        v_max, v_min = float(v[imax]), float(v[imin])
        t_max = float(self.t[imax]) if v_max > 0.0 else 0.0
        t_min = float(self.t[imin]) if v_min < 0.0 else 0.0
        return max(v_max, 0.0), t_max, min(v_min, 0.0), t_min

    def peaks_scaled(self, s_pre: np.ndarray, s_post: np.ndarray):
        """Vectorized peaks for per-trial scale arrays; returns
        (v_max, v_min, reset_later) with shape of s_pre."""
        if not self.valid.any():
            z = np.zeros_like(np.asarray(s_pre, dtype=float))
            return z, z.copy(), np.zeros(z.shape, dtype=bool)
        pv = self.post_v[self.valid]
        qv = self.pre_v[self.valid]
        tt = self.t[self.valid]
        v = s_post[..., None] * pv - s_pre[..., None] * qv
        imax = np.argmax(v, axis=-1)
        imin = np.argmin(v, axis=-1)
        v_max = np.maximum(np.take_along_axis(v, imax[..., None], -1)[..., 0], 0.0)
        v_min = np.minimum(np.take_along_axis(v, imin[..., None], -1)[..., 0], 0.0)
        reset_later = tt[imin] >= tt[imax]
        return v_max, v_min, reset_later


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Multiples of step covering [lo, hi]."""
    k0 = int(np.ceil(lo / step - 1e-9))
    k1 = int(np.floor(hi / step + 1e-9))
    if k1 < k0:
        return np.empty(0)
    return np.arange(k0, k1 + 1) * step


def candidate_table(g: PairingGeometry, i: int, delta_t: float) -> CandidateTable:
    if not (1 <= i <= g.bank.n):
        raise IndexError(f"branch index {i} out of range 1..{g.bank.n}")
    alpha = g.bank.alphas[i - 1]
    delay = g.bank.delays[i - 1]
    pre_lo, pre_hi = g.pre.support()
    post_lo, post_hi = g.post.support()
    pre_lo, pre_hi = pre_lo + delay, pre_hi + delay
    post_lo, post_hi = post_lo + delta_t, post_hi + delta_t
    if g.pair_only:
        lo, hi = max(pre_lo, post_lo), min(pre_hi, post_hi)
    else:
        lo, hi = min(pre_lo, post_lo), max(pre_hi, post_hi)
    if lo >= hi:
        z = np.zeros(1)
        return CandidateTable(t=z, post_v=z, pre_v=z, valid=np.zeros(1, dtype=bool))

    edges = np.concatenate([g.pre.breakpoints() + delay, g.post.breakpoints() + delta_t])
    edges = edges[(edges >= lo - 1e-12) & (edges <= hi + 1e-12)]
    times = [(float(b), side) for b in edges for side in (-1, +1)]
    if g.pre.has_curved_pieces() or g.post.has_curved_pieces():
        times += [(float(t), +1) for t in _grid(lo, hi, g.dt_step)]
    times.sort(key=lambda e: (e[0], e[1]))

    t_arr = np.array([t for t, _ in times])
    post_pairs = [g.post.limit_with_support(t - delta_t, s) for t, s in times]
    pre_pairs = [g.pre.limit_with_support(t - delay, s) for t, s in times]
    post_v = np.array([v for v, _ in post_pairs])
    pre_v = alpha * np.array([v for v, _ in pre_pairs])
    post_in = np.array([ok for _, ok in post_pairs])
    pre_in = np.array([ok for _, ok in pre_pairs])
    # membership, not value: a spike decaying continuously to zero is still
    # present at its support edge, so the limit there stands for the supremum
    valid = (post_in & pre_in) if g.pair_only else (post_in | pre_in)
    return CandidateTable(t=t_arr, post_v=post_v, pre_v=pre_v, valid=valid)


def net_potential_trace(g: PairingGeometry, i: int, delta_t: float):
    """Sampled series (t, volts) at multiples of dt_step over the union of
    both supports; with pair_only, samples where either spike is zero are 0.
    Disjoint supports yield the all-zero singleton trace."""
    if not (1 <= i <= g.bank.n):
        raise IndexError(f"branch index {i} out of range 1..{g.bank.n}")
    alpha = g.bank.alphas[i - 1]
    delay = g.bank.delays[i - 1]
    pre_lo, pre_hi = g.pre.support()
    post_lo, post_hi = g.post.support()
    if g.pair_only and (min(pre_hi + delay, post_hi + delta_t)
                        <= max(pre_lo + delay, post_lo + delta_t)):
        return np.zeros(1), np.zeros(1)
    lo = min(pre_lo + delay, post_lo + delta_t)
    hi = max(pre_hi + delay, post_hi + delta_t)
    t = _grid(lo, hi, g.dt_step)
    post_v = g.post.evaluate(t - delta_t)
    pre_v = alpha * g.pre.evaluate(t - delay)
    v = post_v - pre_v
    if g.pair_only:
        v = np.where((post_v != 0.0) & (pre_v != 0.0), v, 0.0)
    return t, v


def branch_drive(g: PairingGeometry, i: int, delta_t: float,
                 s_pre: float = 1.0, s_post: float = 1.0) -> BranchDrive:
    """Peak drive of branch i at offset delta_t and its switch probabilities."""
    v_max, t_max, v_min, t_min = candidate_table(g, i, delta_t).peaks(s_pre, s_post)
    return BranchDrive(
        v_max=v_max, t_max=t_max, v_min=v_min, t_min=t_min,
        p_set=set_probability(g.device, v_max),
        p_reset=reset_probability(g.device, v_min),
    )


def all_branch_drives(g: PairingGeometry, delta_t: float,
                      s_pre: float = 1.0, s_post: float = 1.0) -> list[BranchDrive]:
    return [branch_drive(g, i, delta_t, s_pre, s_post) for i in range(1, g.bank.n + 1)]


def apply_pairing(g: PairingGeometry, states: list, delta_t: float,
                  rng: np.random.Generator):
    """Apply one spike pairing to caller-owned device states.

    Draws, in order: amplitude-noise scales (when enabled), then per branch
    one SET and one RESET uniform.  Successful attempts land in chronological
    order of the two peaks, so the later event wins the final state; attempts
    on a device already in the target state are no-ops.  Returns
    (n_set, n_reset) counting OFF->ON and ON->OFF transitions.
    """
    if len(states) != g.bank.n:
        raise ValueError(f"need {g.bank.n} device states, got {len(states)}")
    s_pre = s_post = 1.0
    if g.amp_noise_sigma > 0.0:
        s_pre, s_post = 1.0 + rng.normal(0.0, g.amp_noise_sigma, 2)
    u = rng.random((g.bank.n, 2))
    n_set = n_reset = 0
    for idx, st in enumerate(states):
        drive = branch_drive(g, idx + 1, delta_t, s_pre, s_post)
        set_ok = u[idx, 0] < drive.p_set
        reset_ok = u[idx, 1] < drive.p_reset
        events = [(drive.t_max, "set", set_ok), (drive.t_min, "reset", reset_ok)]
        events.sort(key=lambda e: (e[0], e[1] == "reset"))  # reset wins a time tie
        for _, kind, ok in events:
            if not ok:
                continue
            if kind == "set" and not st.on:
                st.on = True
                n_set += 1
            elif kind == "reset" and st.on:
                st.on = False
                n_reset += 1
    return n_set, n_reset
