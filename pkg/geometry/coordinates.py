"""
Coordinates adapted to the Simons cone C = {s = t} in R^{2m}:

    s = |(x_1, ..., x_m)|,  t = |(x_{m+1}, ..., x_{2m})|
    y = (s + t) / sqrt 2,   z = (s - t) / sqrt 2

|z| is the distance to the cone.
"""
from typing import Optional, Tuple

import numpy as np

from utils.errors import DimensionMismatch, DomainViolation

SQRT2 = np.sqrt(2.0)


def st_coords(x, m: Optional[int] = None) -> Tuple:
    """
    Block norms (s, t) of a point (or rows of points) in R^{2m}.

    Raises:
        DimensionMismatch: dim(x) is odd or differs from 2m
    """
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    if m is None:
        if dim % 2:
            raise DimensionMismatch(f"point has odd dimension {dim}")
        m = dim // 2
    if dim != 2 * m:
        raise DimensionMismatch(f"point has dimension {dim}, expected 2m = {2 * m}")
    s = np.linalg.norm(x[..., :m], axis=-1)
    t = np.linalg.norm(x[..., m:], axis=-1)
    if s.ndim == 0:
        return float(s), float(t)
    return s, t


def dist_to_cone(s, t):
    """|s - t| / sqrt 2."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("s and t must be nonnegative")
    d = np.abs(s - t) / SQRT2
    return float(d) if d.ndim == 0 else d


def yz_coords(s, t):
    """(y, z) = ((s + t) / sqrt 2, (s - t) / sqrt 2)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("s and t must be nonnegative")
    y = (s + t) / SQRT2
    z = (s - t) / SQRT2
    if y.ndim == 0:
        return float(y), float(z)
    return y, z


def st_from_yz(y, z):
    """
    Inverse of yz_coords.

    Raises:
        DomainViolation: |z| > y, i.e. outside the image of the quarter-plane
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    outside = np.abs(z) > y * (1.0 + 4e-16)
    if np.any(outside):
        k = np.flatnonzero(np.atleast_1d(outside))[0]
        yy, zz = np.atleast_1d(y * np.ones_like(z))[k], np.atleast_1d(z * np.ones_like(y))[k]
        raise DomainViolation(f"(y, z) = ({yy:.6g}, {zz:.6g}) lies outside the wedge |z| <= y")
    s = np.maximum((y + z) / SQRT2, 0.0)
    t = np.maximum((y - z) / SQRT2, 0.0)
    if s.ndim == 0:
        return float(s), float(t)
    return s, t
