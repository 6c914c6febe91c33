from __future__ import annotations
import logging
from dataclasses import dataclass

import numpy as np

from .cauchy import jump_decompose
from .curves import sample_curve
from .models import BoundaryFunction, FaberFamily, FaberSeries, LaurentMap, TaylorMap
from .series import build_power_matrix, laurent_reversion, series_reversion

logger = logging.getLogger(__name__)

HOLOMORPHIC_TOLERANCE = 1e-8


class NotHolomorphicError(ValueError):
    def __init__(self, message: str, mass: float):
        super().__init__(message)
        self.mass = mass


def faber_polynomials(fmap: LaurentMap, K: int) -> FaberFamily:
    if not isinstance(fmap, LaurentMap):
        raise TypeError("interior Faber polynomials need a LaurentMap")
    inverse = laurent_reversion(fmap, order=K + 2)
    pm = build_power_matrix(inverse, (0, K), (0, K))
    polys = tuple(pm.entries[k, :k + 1].copy() for k in range(K + 1))
    logger.debug("faber_polynomials K=%s leading=%s", K, polys[-1][-1])
    return FaberFamily("interior", fmap, K, polys, 0j)


def faber_polynomials_exterior(fmap: TaylorMap, K: int) -> FaberFamily:
    if not isinstance(fmap, TaylorMap):
        raise TypeError("exterior Faber polynomials need a TaylorMap")
    inverse = series_reversion(fmap, order=K + 2)
    pm = build_power_matrix(inverse, (-K, -1), (-K, -1), precision=K + 2)
    polys = []
    for k in range(1, K + 1):
        row = pm.entries[K - k, :]
        polys.append(row[::-1][:k].copy())
    return FaberFamily("exterior", fmap, K, tuple(polys), fmap.center)


def faber_series(h: BoundaryFunction, family: FaberFamily,
                 tolerance: float = HOLOMORPHIC_TOLERANCE) -> FaberSeries:
    """Expand boundary data of a holomorphic function in the Faber family of its domain.

    ``h`` holds samples of h(F(e^{i theta})) on the family's curve.
    """
    curve = h.curve
    if curve is None:
        raise ValueError("faber_series needs data attached to a sampled curve")
    jump = jump_decompose(curve, h)
    K = family.K
    if family.domain_side == "interior":
        mass = jump.u_minus.fourier_mass()
        coefficients = h.mode_vector(range(0, K + 1))
    else:
        mass = jump.u_plus.fourier_mass()
        coefficients = h.mode_vector(range(-1, -K - 1, -1))
    if mass > tolerance:
        raise NotHolomorphicError(
            f"data is not holomorphic on the {family.domain_side} domain (mass {mass:.3e})", mass)
    return FaberSeries(family, coefficients)


def fit_geometric_ratio(errors, floor: float = 1e-13) -> float:
    errors = np.asarray(errors, dtype=float)
    k = np.flatnonzero(errors > floor)
    if k.size < 2:
        return 0.0
    slope = np.polyfit(k, np.log(errors[k]), 1)[0]
    return float(np.exp(slope))


def trivialization_apply(fmap: TaylorMap | LaurentMap, side: str, g: BoundaryFunction,
                         N: int = 512) -> BoundaryFunction:
    """Transplant circle data onto the curve F(|z| = 1) and take the Cauchy projection
    for the domain ``side``.

    Interior (F a LaurentMap) returns the interior part; exterior (F a TaylorMap)
    returns the integral over the curve oriented as the boundary of the exterior
    domain, which is minus the exterior part.
    """
    if side not in ("interior", "exterior"):
        raise ValueError(f"Unsupported side: {side}")
    curve = sample_curve(fmap, N)
    transplanted = BoundaryFunction.from_samples(curve, g.sample_values(N), min(g.K, N // 2 - 1))
    jump = jump_decompose(curve, transplanted)
    if side == "interior":
        return jump.u_plus
    return -jump.u_minus


@dataclass(frozen=True, eq=False)
class ProjectionColumns:
    """Columns k = 1..K of the circle-side operator applied to z^-k.

    ``minus[l-1, k-1]`` is the z^-l coefficient, ``plus[m, k-1]`` the z^m coefficient.
    """
    minus: np.ndarray
    plus: np.ndarray
    predicted_plus: np.ndarray

    @property
    def identity_residual(self) -> float:
        return float(np.max(np.abs(self.minus - np.eye(self.minus.shape[0]))))

    @property
    def prediction_residual(self) -> float:
        return float(np.max(np.abs(self.plus - self.predicted_plus)))


def predicted_plus_columns(fmap: TaylorMap, K: int) -> np.ndarray:
    """z^m coefficients (m = 0..K) of Phi_k(F(z)) from power matrices."""
    inverse = series_reversion(fmap, order=2 * K + 2)
    inverse_pm = build_power_matrix(inverse, (-K, -1), (0, K), precision=2 * K + 2)
    map_pm = build_power_matrix(fmap.power_series(), (0, K), (0, K))
    prod = inverse_pm.entries @ map_pm.entries
    # row -k of the product sits at index K - k
    return -np.array([prod[K - k, :] for k in range(1, K + 1)]).T


def projection_identity_columns(fmap: TaylorMap, K: int, N: int = 1024) -> ProjectionColumns:
    minus = np.zeros((K, K), dtype=complex)
    plus = np.zeros((K + 1, K), dtype=complex)
    for k in range(1, K + 1):
        g = BoundaryFunction.from_modes({-k: 1.0})
        faber_trace = trivialization_apply(fmap, "exterior", g, N)
        # samples of Phi_k(F(e^{i theta})) are already circle data
        circle = BoundaryFunction.from_samples(None, faber_trace.samples, N // 2 - 1)
        minus[:, k - 1] = circle.mode_vector(range(-1, -K - 1, -1))
        plus[:, k - 1] = circle.mode_vector(range(0, K + 1))
    result = ProjectionColumns(minus, plus, predicted_plus_columns(fmap, K))
    logger.info("projection identity K=%s N=%s residual=%.3e", K, N, result.identity_residual)
    return result
