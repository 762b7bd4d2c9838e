"""Random orthogonal rotation of d-dimensional raw-data groups.

Bob draws a uniform bit string b, forms the target unit vector with
components (-1)^{b_i}/sqrt(d), and builds an orthogonal map sending his
normalized data onto that target.  Both parties apply the same map, so the
noise between the rotated sequences keeps its distribution while Bob's
rotated samples land on the target ray: the sign of each rotated sample is
pinned to the corresponding bit of b.

The map is realized as a single Householder reflection (identity when the
two unit vectors already coincide), which applies in O(d) and is exactly
orthogonal.  It is fully determined by (b, y/||y||), so a transcript only
needs the bit-string seed, never a dense matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_EPS_COLLINEAR = 1e-24


@dataclass(frozen=True)
class RotationBundle:
    """One rotated d-vector pair plus the randomness that produced it."""

    d: int
    bits: np.ndarray
    target: np.ndarray
    x_rot: np.ndarray
    y_rot: np.ndarray
    householder: np.ndarray = field(repr=False)  # reflection vector, zero => identity

    @property
    def matrix(self) -> np.ndarray:
        """Materialize the orthogonal map as a dense d x d array."""
        v = self.householder
        vv = float(v @ v)
        if vv <= _EPS_COLLINEAR:
            return np.eye(self.d)
        return np.eye(self.d) - 2.0 * np.outer(v, v) / vv


def make_target_point(bits, rng=None) -> np.ndarray:
    """Unit-sphere target for a bit string: component i has sign (-1)^{b_i}.

    Without an rng this is the symmetric corner point with components
    (-1)^{b_i}/sqrt(d).  With an rng, a random point of the same orthant is
    drawn instead (componentwise |gaussian|, normalized, signs applied),
    which makes the rotated output of a Gaussian ensemble exactly Gaussian
    again; the sign structure, and hence the sign slice, is unchanged.
    """
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("empty bit string")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("target bit string must be 0/1 valued")
    d = bits.size
    signs = 1.0 - 2.0 * bits.astype(float)
    if rng is None:
        return signs / np.sqrt(d)
    mags = np.abs(rng.standard_normal(d))
    norm = np.linalg.norm(mags)
    if norm == 0.0:  # probability zero
        return signs / np.sqrt(d)
    return signs * mags / norm


def build_orthogonal_map(t, u) -> np.ndarray:
    """Orthogonal matrix M with M @ t = u, for unit vectors t and u.

    Householder reflection through the bisector: M = I - 2 v v^T / (v^T v)
    with v = t - u; the identity when t and u coincide.
    """
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    if t.shape != u.shape or t.ndim != 1:
        raise ValueError("t and u must be 1-D vectors of equal length")
    for name, vec in (("t", t), ("u", u)):
        if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
            raise ValueError(f"{name} is not a unit vector (|{name}| = {np.linalg.norm(vec)})")
    v = t - u
    vv = v @ v
    if vv <= _EPS_COLLINEAR:
        return np.eye(t.size)
    return np.eye(t.size) - 2.0 * np.outer(v, v) / vv


def rsec_rotate(x, y, seed, target_mode="corner") -> RotationBundle:
    """Rotate one d-vector pair: draw bits from seed, map y onto the target ray.

    ``target_mode`` selects the target construction: "corner" uses the exact
    symmetric corner point; "orthant" perturbs it to a random same-orthant
    point (see make_target_point).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D vectors of equal length")
    norm_y = np.linalg.norm(y)
    if norm_y <= 0.0:
        raise ValueError("cannot rotate a zero-norm vector")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, x.size)
    target = make_target_point(bits, rng if target_mode == "orthant" else None)
    t = y / norm_y
    v = t - target
    vv = v @ v
    if vv <= _EPS_COLLINEAR:
        x_rot, y_rot = x.copy(), y.copy()
        v = np.zeros_like(v)
    else:
        x_rot = x - v * (2.0 * (v @ x) / vv)
        y_rot = y - v * (2.0 * (v @ y) / vv)
    return RotationBundle(d=x.size, bits=bits, target=target, x_rot=x_rot, y_rot=y_rot, householder=v)


def rotate_groups(x, y, seed, d, target_mode="corner"):
    """Vectorized rsec_rotate over a whole block reshaped into (n/d, d) groups.

    Returns (x_rot, y_rot, bits) as flat arrays matching the input layout.
    One bit string is drawn per group from a single seeded stream.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size % d != 0:
        raise ValueError(f"block length {x.size} not divisible by dimension {d}")
    g = x.size // d
    xg = x.reshape(g, d)
    yg = y.reshape(g, d)
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, (g, d))
    signs = 1.0 - 2.0 * bits.astype(float)
    if target_mode == "corner":
        targets = signs / np.sqrt(d)
    elif target_mode == "orthant":
        mags = np.abs(rng.standard_normal((g, d)))
        targets = signs * mags / np.linalg.norm(mags, axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown target mode: {target_mode!r}")
    norms = np.linalg.norm(yg, axis=1, keepdims=True)
    if (norms == 0).any():
        raise ValueError("cannot rotate a zero-norm vector")
    v = yg / norms - targets
    vv = np.sum(v * v, axis=1, keepdims=True)
    safe = vv > _EPS_COLLINEAR
    denom = np.where(safe, vv, 1.0)
    x_rot = np.where(safe, xg - v * (2.0 * np.sum(v * xg, axis=1, keepdims=True) / denom), xg)
    y_rot = np.where(safe, yg - v * (2.0 * np.sum(v * yg, axis=1, keepdims=True) / denom), yg)
    return x_rot.reshape(-1), y_rot.reshape(-1), bits
