"""Polar codes on the binary symmetric channel: construction, encoding, SC decoding.

The generator is the Kronecker power of [[1,0],[1,1]] composed with the
bit-reversal permutation; it is an involution over GF(2) (encoding twice
recovers the input), which is what lets a slice sequence be treated as a
codeword of a virtual channel.  Construction tracks the Bhattacharyya
parameter through the standard degrade/upgrade recursion; decoding is
successive cancellation in the log domain with exact (tanh-rule) combining,
vectorized across a batch of codewords.
"""

from __future__ import annotations

import binascii
from dataclasses import dataclass, field

import numpy as np

from .numerics import binary_entropy

CRC_WIDTH_DEFAULT = 32
_CRC_POLY_REFLECTED = 0xEDB88320  # reflected 0x04C11DB7
_LLR_CAP = 1e30  # decoder-internal cap keeping +-inf out of f/g arithmetic


def _require_power_of_two(n: int):
    if n <= 0 or (n & (n - 1)) != 0:
        raise ValueError(f"block length must be a power of two, got {n}")


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Index permutation reversing the log2(n)-bit binary representation."""
    _require_power_of_two(n)
    bits = max(n.bit_length() - 1, 0)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def polar_transform(u) -> np.ndarray:
    """Multiply u (last axis, length a power of two) by the generator over GF(2).

    O(n log n): bit-reversal indexing followed by the butterfly network.
    Involutive: applying it twice returns the input.
    """
    u = np.asarray(u)
    n = u.shape[-1]
    _require_power_of_two(n)
    x = np.ascontiguousarray(u[..., bit_reversal_permutation(n)]).astype(np.uint8)
    h = 1
    while h < n:
        view = x.reshape(x.shape[:-1] + (n // (2 * h), 2, h))
        view[..., 0, :] ^= view[..., 1, :]
        h *= 2
    return x.reshape(u.shape)


def bhattacharyya_vector(n: int, e: float) -> np.ndarray:
    """Bhattacharyya parameters of the n synthetic channels of a BSC.

    Starts from 2*sqrt(e(1-e)) and doubles with the bound Z- <= 2Z - Z^2 and
    the exact Z+ = Z^2; entry j is the parameter of the j-th decoded bit.
    """
    _require_power_of_two(n)
    if not 0.0 < e <= 0.5:
        raise ValueError(f"crossover probability must be in (0, 0.5], got {e}")
    z = np.array([2.0 * np.sqrt(e * (1.0 - e))])
    while z.size < n:
        out = np.empty(z.size * 2)
        out[0::2] = np.minimum(2.0 * z - z * z, 1.0)
        out[1::2] = z * z
        z = out
    return z


@dataclass(frozen=True)
class PolarCode:
    """Code instance: frozen positions plus the virtual-channel parameters."""

    n: int
    frozen_set: np.ndarray = field(repr=False)
    rate_pre_crc: float
    n_crc: int = CRC_WIDTH_DEFAULT
    bsc_error: float = 0.0

    def __post_init__(self):
        _require_power_of_two(self.n)
        frozen = np.unique(np.asarray(self.frozen_set, dtype=np.int64))
        if frozen.size and (frozen[0] < 0 or frozen[-1] >= self.n):
            raise ValueError("frozen indices out of range")
        object.__setattr__(self, "frozen_set", frozen)
        if frozen.size != self.n - round(self.rate_pre_crc * self.n):
            raise ValueError("frozen-set size inconsistent with the pre-CRC rate")

    @property
    def k(self) -> int:
        """Number of information positions (CRC included)."""
        return self.n - self.frozen_set.size

    @property
    def rate(self) -> float:
        """Effective rate after discarding the CRC bits."""
        return self.rate_pre_crc - self.n_crc / self.n

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.frozen_set] = True
        return mask

    @property
    def info_set(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen_mask)

    @property
    def channel_llr_magnitude(self) -> float:
        """|LLR| of one observation through the BSC(bsc_error) virtual channel."""
        e = min(max(self.bsc_error, 1e-12), 0.5)
        return float(np.log1p(-e) - np.log(e))


@dataclass(frozen=True)
class DecodeResult:
    """Successive-cancellation output: input vector, payload, CRC verdict."""

    u_hat: np.ndarray = field(repr=False)
    payload: np.ndarray = field(repr=False)
    crc_ok: bool


def construct_bsc(n: int, e: float, target_info_count: int, n_crc: int = CRC_WIDTH_DEFAULT) -> PolarCode:
    """Freeze the n-k least reliable synthetic channels of a BSC(e).

    Reliability order comes from the Bhattacharyya recursion; ties freeze the
    lower index first, so frozen sets nest as the rate varies.
    """
    if not 0.0 < e < 0.5:
        raise ValueError(f"crossover probability must be in (0, 0.5), got {e}")
    if not 0 <= target_info_count <= n:
        raise ValueError(f"information count must be in [0, {n}], got {target_info_count}")
    z = bhattacharyya_vector(n, e)
    order = np.lexsort((np.arange(n), -z))  # Z descending, lower index first on ties
    frozen = np.sort(order[: n - target_info_count])
    return PolarCode(n=n, frozen_set=frozen, rate_pre_crc=target_info_count / n,
                     n_crc=n_crc, bsc_error=e)


def select_rate(e_slice: float, n: int, target_fer: float) -> float:
    """Largest rate (granularity 1/n) whose Bhattacharyya union bound meets the FER target.

    The chosen information set collects the smallest parameters until their
    sum would exceed ``target_fer``; the rate is additionally capped at the
    BSC capacity 1 - H2(e).
    """
    if not 0.0 < e_slice < 0.5:
        raise ValueError(f"crossover probability must be in (0, 0.5), got {e_slice}")
    if not 0.0 < target_fer < 1.0:
        raise ValueError(f"target frame error rate must be in (0, 1), got {target_fer}")
    z = np.sort(bhattacharyya_vector(n, e_slice))
    k = int(np.searchsorted(np.cumsum(z), target_fer, side="right"))
    k = min(k, int(np.floor((1.0 - binary_entropy(e_slice)) * n)))
    return k / n


def _f_llr(a, b):
    """Exact check-node combination 2*atanh(tanh(a/2)tanh(b/2)), stably."""
    s = a + b
    d = a - b
    return (np.maximum(s, 0.0) - np.maximum(a, b)
            + np.log1p(np.exp(-np.abs(s))) - np.log1p(np.exp(-np.abs(d))))


def _sc_decode_core(llr, frozen_mask_w, frozen_values_w):
    """Batched SC decoding in the bit-reversed domain.

    llr: (batch, n) channel LLRs in codeword order; frozen data indexed in
    the decoder's depth-first order.  Returns the decoded input vector in
    that same order, (batch, n) uint8.
    """
    batch, n = llr.shape
    w_hat = np.empty((batch, n), dtype=np.uint8)

    def rec(metrics, offset, span):
        if span == 1:
            if frozen_mask_w[offset]:
                bit = np.broadcast_to(frozen_values_w[..., offset], (batch,)).astype(np.uint8)
            else:
                bit = (metrics[:, 0] < 0).astype(np.uint8)
            w_hat[:, offset] = bit
            return bit[:, None].copy()
        half = span // 2
        left, right = metrics[:, :half], metrics[:, half:]
        x_left = rec(_f_llr(left, right), offset, half)
        sign = 1.0 - 2.0 * x_left
        x_right = rec(sign * left + right, offset + half, half)
        return np.concatenate([x_left ^ x_right, x_right], axis=1)

    rec(np.clip(llr, -_LLR_CAP, _LLR_CAP).astype(float), 0, n)
    return w_hat


def sc_decode_batch(llr, code: PolarCode, frozen_values) -> np.ndarray:
    """Decode a batch of codeword LLRs, returning u_hat rows (batch, n)."""
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    if llr.shape[1] != code.n:
        raise ValueError(f"LLR length {llr.shape[1]} does not match block length {code.n}")
    rev = bit_reversal_permutation(code.n)
    frozen_values = np.asarray(frozen_values, dtype=np.uint8)
    full = np.zeros(llr.shape[:1] + (code.n,), dtype=np.uint8)
    if code.frozen_set.size:
        full[..., code.frozen_set] = frozen_values
    w_hat = _sc_decode_core(llr, code.frozen_mask[rev], full[..., rev])
    return w_hat[..., rev]


def sc_decode(llr_init, code: PolarCode, frozen_values) -> DecodeResult:
    """Successive-cancellation decode of one received word.

    Frozen positions are forced to the supplied values; information positions
    are decided by LLR sign (nonnegative decodes 0).  The information bits
    are interpreted as payload followed by a CRC, which is verified.
    """
    llr_init = np.asarray(llr_init, dtype=float)
    if not np.isfinite(llr_init).all():
        raise ValueError("channel LLRs must be finite")
    u_hat = sc_decode_batch(llr_init[None, :], code, np.asarray(frozen_values, dtype=np.uint8))[0]
    info = u_hat[code.info_set]
    if code.n_crc > 0 and info.size >= code.n_crc:
        payload = info[: info.size - code.n_crc]
        ok = bool(crc_check(info))
    else:
        payload = info
        ok = code.n_crc == 0
    return DecodeResult(u_hat=u_hat, payload=payload, crc_ok=ok)


def encode_payload(code: PolarCode, payload, frozen_values=None) -> np.ndarray:
    """Forward-direction helper: place payload+CRC on the information set and transform."""
    payload = np.asarray(payload, dtype=np.uint8)
    info = crc_attach(payload) if code.n_crc > 0 else payload
    if info.size != code.k:
        raise ValueError(f"payload+CRC size {info.size} does not fill {code.k} information positions")
    u = np.zeros(code.n, dtype=np.uint8)
    u[code.info_set] = info
    if frozen_values is not None and code.frozen_set.size:
        u[code.frozen_set] = np.asarray(frozen_values, dtype=np.uint8)
    return polar_transform(u)


def crc32_bits(bits) -> int:
    """CRC-32 of a bit sequence (reflected 0x04C11DB7, init/final 0xFFFFFFFF).

    Whole bytes are taken least-significant-bit first, so byte data unpacked
    that way reproduces the standard byte-oriented check value.
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    nbytes = bits.size // 8
    reg = binascii.crc32(np.packbits(bits[: nbytes * 8], bitorder="little").tobytes()) ^ 0xFFFFFFFF
    for b in bits[nbytes * 8:]:
        low = (reg ^ int(b)) & 1
        reg >>= 1
        if low:
            reg ^= _CRC_POLY_REFLECTED
    return reg ^ 0xFFFFFFFF


def crc_value_bits(bits, width: int = CRC_WIDTH_DEFAULT) -> np.ndarray:
    """CRC of a bit sequence as a bit array, least significant bit first."""
    value = crc32_bits(bits)
    return np.array([(value >> i) & 1 for i in range(width)], dtype=np.uint8)


def crc_attach(payload) -> np.ndarray:
    """Append the 32-bit CRC of the payload bits."""
    payload = np.asarray(payload, dtype=np.uint8).ravel()
    return np.concatenate([payload, crc_value_bits(payload)])


def crc_check(bits) -> bool:
    """Verify a payload+CRC bit sequence produced by crc_attach."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size < CRC_WIDTH_DEFAULT:
        return False
    payload, tail = bits[:-CRC_WIDTH_DEFAULT], bits[-CRC_WIDTH_DEFAULT:]
    return bool(np.array_equal(crc_value_bits(payload), tail))


def write_frozen_set(path, code: PolarCode):
    """Persist a code as its header and sorted frozen indices, one per line."""
    with open(path, "w") as fh:
        fh.write(f"n={code.n} e={code.bsc_error!r} rate_pre_crc={code.rate_pre_crc!r} n_crc={code.n_crc}\n")
        for idx in code.frozen_set:
            fh.write(f"{int(idx)}\n")


def read_frozen_set(path) -> PolarCode:
    """Load a code written by write_frozen_set."""
    with open(path) as fh:
        header = fh.readline().strip().split()
        fields = dict(part.split("=", 1) for part in header)
        frozen = [int(line) for line in fh if line.strip()]
    return PolarCode(
        n=int(fields["n"]),
        frozen_set=np.asarray(frozen, dtype=np.int64),
        rate_pre_crc=float(fields["rate_pre_crc"]),
        n_crc=int(fields["n_crc"]),
        bsc_error=float(fields["e"]),
    )
