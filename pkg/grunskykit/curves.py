from __future__ import annotations
import logging

import numpy as np

from .models import CurveSample, LaurentMap, TaylorMap

logger = logging.getLogger(__name__)

_CHUNK = 256


class CurveError(ValueError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n >= 4 and n & (n - 1) == 0


def sample_curve(fmap: TaylorMap | LaurentMap, N: int, check_simple: bool = True) -> CurveSample:
    if not _is_power_of_two(int(N)):
        raise CurveError(f"N must be a power of 2 (>= 4), got {N}")
    if N < 4 * fmap.coefficient_count:
        raise CurveError(f"N={N} too small for {fmap.coefficient_count} stored coefficients")
    z = np.exp(2j * np.pi * np.arange(N) / N)
    points = np.asarray(fmap(z), dtype=complex)
    derivs = 1j * z * np.asarray(fmap.derivative(z), dtype=complex)
    curve = CurveSample(int(N), points, derivs, "positive", fmap)
    if check_simple:
        if not is_simple(points):
            raise CurveError(f"not simple at resolution {N}")
        if signed_area(points) <= 0:
            raise CurveError(f"negatively oriented at resolution {N}")
    logger.debug("sampled curve N=%s perimeter=%.6g", N, curve.perimeter)
    return curve


def signed_area(points: np.ndarray) -> float:
    nxt = np.roll(points, -1)
    return 0.5 * float(np.sum(np.imag(np.conj(points) * nxt)))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.imag(np.conj(a) * b)


def is_simple(points: np.ndarray) -> bool:
    points = np.asarray(points, dtype=complex)
    N = len(points)
    start = points
    end = np.roll(points, -1)
    seg = end - start
    idx = np.arange(N)
    for c0 in range(0, N, _CHUNK):
        rows = idx[c0:c0 + _CHUNK]
        p = start[rows, None]
        r = seg[rows, None]
        q = start[None, :]
        s = seg[None, :]
        d1 = _cross(r, q - p)
        d2 = _cross(r, q + s - p)
        d3 = _cross(s, p - q)
        d4 = _cross(s, p + r - q)
        hit = (d1 * d2 < 0) & (d3 * d4 < 0)
        gap = np.abs(rows[:, None] - idx[None, :])
        hit &= (gap > 1) & (gap < N - 1)
        if hit.any():
            i, j = np.argwhere(hit)[0]
            logger.debug("sides %s and %s intersect", rows[i], j)
            return False
    return True


def winding_number(curve: CurveSample | np.ndarray, z) -> np.ndarray:
    points = curve.points if isinstance(curve, CurveSample) else np.asarray(curve, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=int)
    flat = z.ravel()
    res = out.ravel()
    for c0 in range(0, len(flat), _CHUNK):
        d = points[None, :] - flat[c0:c0 + _CHUNK, None]
        turns = np.angle(np.roll(d, -1, axis=1) / d).sum(axis=1) / (2 * np.pi)
        res[c0:c0 + _CHUNK] = np.rint(turns).astype(int)
    if isinstance(curve, CurveSample) and curve.orientation == "negative":
        out = -out
    return out


def distance_to_curve(curve: CurveSample, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    flat = z.ravel()
    out = np.empty(len(flat))
    for c0 in range(0, len(flat), _CHUNK):
        out[c0:c0 + _CHUNK] = np.min(np.abs(curve.points[None, :] - flat[c0:c0 + _CHUNK, None]), axis=1)
    return out.reshape(z.shape)


def curve_distance(a: CurveSample, b: CurveSample) -> float:
    return float(np.min(distance_to_curve(a, b.points)))


def curve_center(curve: CurveSample) -> complex:
    fmap = curve.source_map
    if isinstance(fmap, TaylorMap):
        return fmap.center
    if isinstance(fmap, LaurentMap):
        return complex(fmap.coeffs[0])
    return complex(np.mean(curve.points))


def curve_radius(curve: CurveSample) -> float:
    return float(np.max(np.abs(curve.points - curve_center(curve))))
