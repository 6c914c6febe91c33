from __future__ import annotations
import logging

import numpy as np

from .cauchy import jump_decompose, theta_derivative
from .models import BoundaryFunction, CurveSample, DiskFunction, HarmonicPair

logger = logging.getLogger(__name__)

_CHUNK = 256


class NotACircleError(ValueError):
    pass


def dirichlet_energy(f: DiskFunction) -> float:
    """Area integral of |f'|^2 over the disk (interior) or its exterior."""
    return float(np.pi * np.sum(np.abs(f.exponents) * np.abs(f.coeffs) ** 2))


def harmonic_dirichlet_norm(h: HarmonicPair) -> float:
    return float(np.sqrt(abs(h.at_origin()) ** 2 + dirichlet_energy(h.holo) + dirichlet_energy(h.antiholo)))


def _half_norm_sq(u: BoundaryFunction) -> float:
    weights = np.where(u.modes == 0, 1.0, np.abs(u.modes))
    return float(np.sum(weights * np.abs(u.fourier) ** 2))


def h_half_norm(u: BoundaryFunction) -> float:
    if u.curve is not None and not u.curve.is_circle:
        raise NotACircleError("h_half_norm needs circle data; use besov_seminorm")
    return float(np.sqrt(_half_norm_sq(u)))


def _samples(curve: CurveSample, u) -> np.ndarray:
    if isinstance(u, BoundaryFunction):
        if u.samples is not None and len(u.samples) == curve.N:
            return np.asarray(u.samples, dtype=complex)
        return u.sample_values(curve.N)
    return np.asarray(u, dtype=complex)


def besov_seminorm(curve: CurveSample, u) -> float:
    """Square root of the double integral of |u(x) - u(y)|^2 / |x - y|^2 in arc length.

    The diagonal is filled with its limit |u_theta|^2 / |gamma'|^2.
    """
    values = _samples(curve, u)
    w = curve.arc_weights
    total = 0.0
    N = curve.N
    for c0 in range(0, N, _CHUNK):
        rows = slice(c0, c0 + _CHUNK)
        du = values[rows, None] - values[None, :]
        dz = curve.points[rows, None] - curve.points[None, :]
        dz[np.abs(dz) == 0] = 1.0
        total += float(np.sum(w[rows, None] * w[None, :] * np.abs(du / dz) ** 2))
    diagonal = np.abs(theta_derivative(values)) ** 2 / np.abs(curve.derivs) ** 2
    total += float(np.sum(diagonal * w ** 2))
    return float(np.sqrt(total))


def besov_norm(curve: CurveSample, u) -> float:
    values = _samples(curve, u)
    l2 = float(np.sum(np.abs(values) ** 2 * curve.arc_weights))
    return float(np.sqrt(l2 + besov_seminorm(curve, values) ** 2))


def besov_fourier_ratio(curve: CurveSample, u: BoundaryFunction) -> float:
    """Double-integral seminorm squared over 4 pi^2 sum |n| |h_n|^2; exactly 1 on the unit circle."""
    fourier = np.sum(np.abs(u.modes) * np.abs(u.fourier) ** 2)
    if fourier == 0:
        return 0.0
    return float(besov_seminorm(curve, u) ** 2 / (4 * np.pi ** 2 * fourier))


def projection_bound(curve: CurveSample, u: BoundaryFunction) -> float:
    """Measured C in |u+|^2 + |u-|^2 <= C |u|^2 for the Fourier half-order norm."""
    jump = jump_decompose(curve, u)
    base = _half_norm_sq(u)
    if base == 0:
        return 0.0
    C = (_half_norm_sq(jump.u_plus) + _half_norm_sq(jump.u_minus)) / base
    logger.debug("projection bound N=%s C=%.6g", curve.N, C)
    return float(C)


def chord_arc_constant(curve: CurveSample) -> float:
    """Max over node pairs of shorter arc length divided by chord length."""
    arc = np.concatenate([[0.0], np.cumsum(curve.arc_weights)[:-1]])
    L = curve.perimeter
    best = 0.0
    N = curve.N
    for c0 in range(0, N, _CHUNK):
        rows = slice(c0, c0 + _CHUNK)
        d = np.abs(arc[rows, None] - arc[None, :])
        shorter = np.minimum(d, L - d)
        chord = np.abs(curve.points[rows, None] - curve.points[None, :])
        mask = chord > 0
        if mask.any():
            best = max(best, float(np.max(shorter[mask] / chord[mask])))
    return best
