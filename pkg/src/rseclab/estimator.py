"""Alice-side soft information for slice values.

Two estimators feed the reconciliation chain, both returning natural-log
LLRs with the convention ln(P(bit=0)/P(bit=1)):

* the sign slice of rotated data, computed without Bob's norm: the rotated
  magnitudes concentrate near the group norm, so Alice substitutes her own
  and the SNR for the missing side information;
* every other slice, computed from closed-form Gaussian interval masses
  restricted to the intervals consistent with the already-known slices.
  The common prior factor exp(-x^2 / 2 delta^2) cancels in the ratio and is
  dropped; accumulation runs in the log domain to survive far-tail inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import quantizer
from .numerics import LLR_MAX, log_gauss_interval


@dataclass(frozen=True)
class SliceLlr:
    """One log-likelihood ratio, ln(P(bit=0)/P(bit=1)), saturated at +-LLR_MAX."""

    value: float
    clamped: bool = False

    @property
    def hard(self) -> int:
        return 0 if self.value > 0 else 1


def _clamp(value: float) -> SliceLlr:
    if value > LLR_MAX:
        return SliceLlr(LLR_MAX, True)
    if value < -LLR_MAX:
        return SliceLlr(-LLR_MAX, True)
    return SliceLlr(float(value), False)


def hard_estimate(llr) -> int:
    """Hard decision: 0 for positive LLR, 1 otherwise (ties decide 1)."""
    value = llr.value if isinstance(llr, SliceLlr) else float(llr)
    return 0 if value > 0 else 1


def llr_last_slice_batch(x_rot, norms, snr) -> np.ndarray:
    """Norm-free sign-slice LLRs for arrays of rotated samples and group norms."""
    x_rot = np.asarray(x_rot, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if (norms <= 0).any():
        raise ValueError("group norms must be positive")
    v = np.clip(x_rot / norms, -1.0 + 1e-16, 1.0 - 1e-16)
    llr = snr * norms * (np.log1p(-v) - np.log1p(v))
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def llr_last_slice(x_rot_i: float, norm_x: float, snr: float) -> SliceLlr:
    """Sign-slice LLR for one rotated component given its group norm."""
    if norm_x <= 0:
        raise ValueError(f"group norm must be positive, got {norm_x}")
    if snr < 0:
        raise ValueError(f"snr must be nonnegative, got {snr}")
    if abs(x_rot_i) >= norm_x:
        # component equals the whole norm: fully saturated decision
        return SliceLlr(-LLR_MAX if x_rot_i > 0 else LLR_MAX, True)
    value = llr_last_slice_batch(np.asarray([x_rot_i]), np.asarray([norm_x]), snr)[0]
    return _clamp(value)


def candidate_intervals(grid, k: int, known_bits: dict):
    """Interval indices consistent with known slice values, split by slice k.

    Returns (intervals with slice k = 0, intervals with slice k = 1).
    """
    idx = np.arange(grid.n_intervals)
    mask = np.ones(grid.n_intervals, dtype=bool)
    for s, b in known_bits.items():
        mask &= ((idx >> (s - 1)) & 1) == int(b)
    sel = idx[mask]
    bit_k = (sel >> (k - 1)) & 1
    return sel[bit_k == 0], sel[bit_k == 1]


def _interval_logmass(x, cand, grid, sigma):
    """log Gaussian mass of each candidate interval around each sample, summed."""
    taus = grid.boundaries
    logs = np.stack([
        log_gauss_interval((taus[a] - x) / sigma, (taus[a + 1] - x) / sigma)
        for a in cand
    ])
    return logsumexp(logs, axis=0)


def llr_conditional_batch(x, k, known_slices, true_bits, grid, params) -> np.ndarray:
    """Conditional slice-k LLRs for a whole block, conditioning on true bits.

    ``known_slices`` lists the 1-based slice indices assumed known; each
    sample's conditioning values are read from its row of ``true_bits``.
    Samples are grouped by conditioning pattern so every distinct candidate
    set is evaluated once, vectorized over its samples.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    m = grid.m
    sigma = np.sqrt(params.noise_variance)
    idx_all = np.arange(grid.n_intervals)

    pattern = np.zeros(n, dtype=np.int64)
    pattern_all = np.zeros(grid.n_intervals, dtype=np.int64)
    for j, s in enumerate(known_slices):
        pattern |= true_bits[:, s - 1].astype(np.int64) << j
        pattern_all |= ((idx_all >> (s - 1)) & 1) << j

    llr = np.empty(n)
    order = np.argsort(pattern, kind="stable")
    sorted_pat = pattern[order]
    boundaries = np.searchsorted(sorted_pat, np.arange(2 ** len(known_slices) + 1))
    for p in range(2 ** len(known_slices)):
        lo, hi = boundaries[p], boundaries[p + 1]
        if lo == hi:
            continue
        rows = order[lo:hi]
        cand = idx_all[pattern_all == p]
        bit_k = (cand >> (k - 1)) & 1
        c0, c1 = cand[bit_k == 0], cand[bit_k == 1]
        xs = x[rows]
        if c0.size == 0:
            llr[rows] = -LLR_MAX
            continue
        if c1.size == 0:
            llr[rows] = LLR_MAX
            continue
        llr[rows] = _interval_logmass(xs, c0, grid, sigma) - _interval_logmass(xs, c1, grid, sigma)
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def _llr_known(x_i, k, known_bits, grid, params) -> SliceLlr:
    c0, c1 = candidate_intervals(grid, k, known_bits)
    if c0.size == 0 and c1.size == 0:
        raise ValueError("known bits rule out every interval")
    if c0.size == 0:
        return SliceLlr(-LLR_MAX, True)
    if c1.size == 0:
        return SliceLlr(LLR_MAX, True)
    sigma = np.sqrt(params.noise_variance)
    xs = np.asarray([float(x_i)])
    value = float(_interval_logmass(xs, c0, grid, sigma)[0] - _interval_logmass(xs, c1, grid, sigma)[0])
    return _clamp(value)


def llr_intermediate(x_rot_i, k, known_bits, grid, params) -> SliceLlr:
    """Conditional LLR of slice k of a rotated sample, sign slice already known.

    ``known_bits`` maps slice index -> bit and must cover slices 1..k-1 plus
    slice m, the decode-order prior of the rotation-based protocol.
    """
    m = grid.m
    if not 1 <= k < m:
        raise ValueError(f"intermediate slice index must satisfy 1 <= k < {m}, got {k}")
    required = set(range(1, k)) | {m}
    if set(known_bits) != required:
        raise ValueError(f"known bits must cover slices {sorted(required)}, got {sorted(known_bits)}")
    return _llr_known(x_rot_i, k, known_bits, grid, params)


def llr_sec(x_i, k, known_bits, grid, params) -> SliceLlr:
    """Conditional LLR of slice k for the unrotated baseline, ascending order.

    ``known_bits`` must cover exactly slices 1..k-1; there is no sign prior.
    """
    m = grid.m
    if not 1 <= k <= m:
        raise ValueError(f"slice index must satisfy 1 <= k <= {m}, got {k}")
    required = set(range(1, k))
    if set(known_bits) != required:
        raise ValueError(f"known bits must cover slices {sorted(required)}, got {sorted(known_bits)}")
    return _llr_known(x_i, k, known_bits, grid, params)
