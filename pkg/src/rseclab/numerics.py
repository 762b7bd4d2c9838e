"""Shared numeric helpers: entropies, stable Gaussian interval masses, seeding."""

from __future__ import annotations

import numpy as np
from scipy.special import erf, log_ndtr

#: Saturation bound for log-likelihood ratios (natural-log units).  Beyond
#: exp(-40) the probabilities are below double-precision noise anyway.
LLR_MAX = 40.0

_SQRT2 = np.sqrt(2.0)


def binary_entropy(e):
    """Binary entropy H2(e) in bits, with H2(0) = H2(1) = 0."""
    e = np.asarray(e, dtype=float)
    inside = (e > 0.0) & (e < 1.0)
    es = np.where(inside, e, 0.5)
    h = np.where(inside, -es * np.log2(es) - (1 - es) * np.log2(1 - es), 0.0)
    if h.ndim == 0:
        return float(h)
    return h


def log_gauss_interval(lo, hi):
    """log(Phi(hi) - Phi(lo)) for standardized bounds lo < hi, elementwise.

    Stable in the far tails: same-sign bounds go through log_ndtr, bounds
    straddling zero add two positive erf terms (no cancellation).  Bounds may
    be +-inf; an empty interval returns -inf.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    out = np.full(lo.shape, -np.inf)

    neg = hi <= 0.0
    if neg.any():
        la = log_ndtr(lo[neg])
        lb = log_ndtr(hi[neg])
        out[neg] = lb + np.log1p(-np.exp(np.minimum(la - lb, 0.0)))

    pos = lo >= 0.0
    if pos.any():
        la = log_ndtr(-hi[pos])
        lb = log_ndtr(-lo[pos])
        out[pos] = lb + np.log1p(-np.exp(np.minimum(la - lb, 0.0)))

    mid = ~(neg | pos)
    if mid.any():
        mass = 0.5 * (erf(hi[mid] / _SQRT2) + erf(-lo[mid] / _SQRT2))
        with np.errstate(divide="ignore"):
            out[mid] = np.log(mass)
    return out


def derive_seed(master_seed, *tags):
    """Derive an independent 64-bit substream seed from a master seed.

    Hash-based (numpy SeedSequence), so substreams for different tag tuples
    are statistically independent and reproducible across platforms.
    """
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(t) for t in tags))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def golden_section_max(f, lo, hi, tol, coarse=17):
    """Maximize a scalar function on [lo, hi]: coarse scan, then golden section.

    The coarse scan guards against non-unimodal objectives; the refinement
    then runs inside the best coarse bracket.  Deterministic for a
    deterministic f.  Returns (x_best, f(x_best)).
    """
    xs = np.linspace(lo, hi, coarse)
    vals = [f(x) for x in xs]
    i = int(np.argmax(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    best_x, best_v = xs[i], vals[i]

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    for x, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_x, best_v = x, v
    return float(best_x), float(best_v)
