"""Correlated Gaussian channel simulation and per-slice error-rate calibration.

Models the additive channel y = x + z with x ~ N(0, modulation variance) and
z ~ N(0, noise variance).  Calibration replays the protocol's estimation
chain on a dedicated seeded block and measures, slice by slice, how often the
hard estimate disagrees with Bob's true slice value when every slice decoded
earlier in the protocol order is known exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import estimator, quantizer, rotation
from .numerics import derive_seed

#: Lower clamp applied to calibrated error rates before code construction.
BER_FLOOR = 1e-6

#: Smallest calibration block accepted for code construction.
MIN_CALIBRATION_SAMPLES = 10 ** 4

PROTOCOL_RSEC = "rsec"
PROTOCOL_SEC = "sec"

_ROTATION_TAG = 0x5EED


@dataclass(frozen=True)
class ChannelParams:
    """Channel description: modulation variance, noise variance, and their ratio."""

    modulation_variance: float
    noise_variance: float

    def __post_init__(self):
        for name in ("modulation_variance", "noise_variance"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be finite and positive, got {v}")

    @classmethod
    def from_snr(cls, snr: float, modulation_variance: float = 1.0) -> "ChannelParams":
        if not np.isfinite(snr) or snr <= 0:
            raise ValueError(f"snr must be finite and positive, got {snr}")
        return cls(modulation_variance, modulation_variance / snr)

    @property
    def snr(self) -> float:
        return self.modulation_variance / self.noise_variance

    @property
    def total_variance(self) -> float:
        """Variance of Bob's samples."""
        return self.modulation_variance + self.noise_variance


@dataclass(frozen=True)
class CorrelatedBlock:
    """Paired raw data of Alice (x) and Bob (y) plus its generation record."""

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    params: ChannelParams
    seed: int

    def __len__(self):
        return self.x.size


@dataclass(frozen=True)
class SliceBerEstimate:
    """Calibrated per-slice error rates (protocol decode-order conditioning)."""

    e: np.ndarray
    sample_count: int
    protocol: str

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if ((e < 0) | (e > 0.5)).any():
            raise ValueError("slice error rates must lie in [0, 0.5]")
        object.__setattr__(self, "e", e)

    def clamped(self) -> np.ndarray:
        """Error rates floored for code construction (degenerate-input guard)."""
        return np.clip(self.e, BER_FLOOR, 0.5)

    def csv_rows(self, snr: float):
        """Export as (snr, slice_index, e_i, samples) rows."""
        return [(snr, i + 1, float(ei), self.sample_count) for i, ei in enumerate(self.e)]


def generate_block(n: int, params: ChannelParams, seed: int) -> CorrelatedBlock:
    """Draw one correlated block: x Gaussian, y = x + z, deterministic in seed."""
    if n <= 0:
        raise ValueError(f"block length must be positive, got {n}")
    rng = np.random.default_rng(int(seed))
    x = rng.normal(0.0, np.sqrt(params.modulation_variance), n)
    z = rng.normal(0.0, np.sqrt(params.noise_variance), n)
    return CorrelatedBlock(x=x, y=x + z, params=params, seed=int(seed))


def mutual_information(snr: float) -> float:
    """Shannon capacity of the Gaussian channel, 0.5 * log2(1 + snr), bits/symbol."""
    if snr < 0 or not np.isfinite(snr):
        raise ValueError(f"snr must be nonnegative and finite, got {snr}")
    return 0.5 * float(np.log2(1.0 + snr))


@dataclass(frozen=True)
class CalibrationData:
    """Protocol-side view of a block, ready to be scored against any grid."""

    x_eff: np.ndarray = field(repr=False)
    y_eff: np.ndarray = field(repr=False)
    group_norms: np.ndarray = field(repr=False)  # |x| per rotation group (RSEC only)
    params: ChannelParams
    protocol: str
    d: int


def prepare_calibration(block: CorrelatedBlock, protocol: str, d: int) -> CalibrationData:
    """Apply the protocol's data transformation once; grids can vary afterwards."""
    if protocol == PROTOCOL_RSEC:
        rot_seed = derive_seed(block.seed, _ROTATION_TAG)
        x_rot, y_rot, _ = rotation.rotate_groups(block.x, block.y, rot_seed, d)
        norms = np.repeat(np.linalg.norm(block.x.reshape(-1, d), axis=1), d)
        return CalibrationData(x_rot, y_rot, norms, block.params, protocol, d)
    if protocol == PROTOCOL_SEC:
        return CalibrationData(block.x, block.y, np.empty(0), block.params, protocol, d)
    raise ValueError(f"unknown protocol: {protocol!r}")


def slice_error_rates(data: CalibrationData, grid, params: ChannelParams, protocol: str) -> SliceBerEstimate:
    """Genie-aided slice error rates on prepared data, decode-order conditioning.

    RSEC order: slice m first with no priors, then each slice k < m given the
    true values of slices 1..k-1 and m.  SEC order: ascending, slice k given
    the true values of slices 1..k-1.
    """
    m = grid.m
    idx = quantizer.interval_indices(data.y_eff, grid)
    bits = quantizer.slice_bits(idx, m)
    e = np.empty(m)
    if protocol == PROTOCOL_RSEC:
        llr_m = estimator.llr_last_slice_batch(data.x_eff, data.group_norms, params.snr)
        e[m - 1] = np.mean((llr_m <= 0).astype(np.uint8) != bits[:, m - 1])
        for k in range(1, m):
            known = list(range(1, k)) + [m]
            llr = estimator.llr_conditional_batch(data.x_eff, k, known, bits, grid, params)
            e[k - 1] = np.mean((llr <= 0).astype(np.uint8) != bits[:, k - 1])
    elif protocol == PROTOCOL_SEC:
        for k in range(1, m + 1):
            known = list(range(1, k))
            llr = estimator.llr_conditional_batch(data.x_eff, k, known, bits, grid, params)
            e[k - 1] = np.mean((llr <= 0).astype(np.uint8) != bits[:, k - 1])
    else:
        raise ValueError(f"unknown protocol: {protocol!r}")
    return SliceBerEstimate(e=np.clip(e, 0.0, 0.5), sample_count=len(data.x_eff), protocol=protocol)


def estimate_slice_ber(calibration: CorrelatedBlock, protocol: str, grid, d: int) -> SliceBerEstimate:
    """Calibrate the virtual-channel error rate of every slice on a block."""
    if len(calibration) == 0:
        raise ValueError("empty calibration block")
    data = prepare_calibration(calibration, protocol, d)
    return slice_error_rates(data, grid, calibration.params, protocol)
