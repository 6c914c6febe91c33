from __future__ import annotations
import logging
import warnings

import numpy as np

from .curves import distance_to_curve
from .models import BoundaryFunction, CurveSample, JumpDecomposition

logger = logging.getLogger(__name__)

DECAY_TOLERANCE = 1e-6


class NearSingularError(ValueError):
    pass


class UnderResolvedWarning(UserWarning):
    pass


def _check_decay(u: BoundaryFunction, N: int) -> float:
    ratio = u.tail_ratio(N)
    if ratio > DECAY_TOLERANCE:
        logger.warning("under-resolved boundary data: tail ratio %.3e at N=%s", ratio, N)
        warnings.warn(f"under-resolved: tail ratio {ratio:.3e} at N={N}", UnderResolvedWarning, stacklevel=3)
    return ratio


def _values_on(curve: CurveSample, u: BoundaryFunction) -> np.ndarray:
    if u.samples is not None and len(u.samples) == curve.N:
        return np.asarray(u.samples, dtype=complex)
    return u.sample_values(curve.N)


def cauchy_matrix(curve: CurveSample, targets) -> np.ndarray:
    """Trapezoid-rule matrix of (1/2 pi i) int u(zeta)/(zeta - z) dzeta over the oriented curve."""
    targets = np.atleast_1d(np.asarray(targets, dtype=complex)).ravel()
    dist = distance_to_curve(curve, targets)
    h = curve.mesh_width
    if targets.size and np.min(dist) <= h:
        raise NearSingularError(
            f"near-singular; use boundary_values (distance {np.min(dist):.3e} <= mesh width {h:.3e})")
    return curve.sign * curve.derivs[None, :] / (curve.points[None, :] - targets[:, None]) / (1j * curve.N)


def cauchy_integral(curve: CurveSample, u: BoundaryFunction, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    values = _values_on(curve, u)
    return (cauchy_matrix(curve, z) @ values).reshape(z.shape)


def kernel_matrix(curve: CurveSample) -> np.ndarray:
    """A[m, j] = gamma'_j / (gamma_j - gamma_m), zero on the diagonal."""
    diff = curve.points[None, :] - curve.points[:, None]
    np.fill_diagonal(diff, 1.0)
    A = curve.derivs[None, :] / diff
    np.fill_diagonal(A, 0.0)
    return A


def theta_derivative(values: np.ndarray) -> np.ndarray:
    N = values.shape[0]
    n = np.fft.fftfreq(N, 1.0 / N)
    n[N // 2] = 0.0
    spectrum = np.fft.fft(values, axis=0)
    shape = (N,) + (1,) * (values.ndim - 1)
    return np.fft.ifft(1j * n.reshape(shape) * spectrum, axis=0)


def exterior_trace(curve: CurveSample, values: np.ndarray, dvalues: np.ndarray | None = None,
                   A: np.ndarray | None = None) -> np.ndarray:
    """Boundary value from outside of the Cauchy integral over the positively oriented curve.

    Columns of a 2-D ``values`` are treated as independent data.
    """
    values = np.asarray(values, dtype=complex)
    if dvalues is None:
        dvalues = theta_derivative(values)
    if A is None:
        A = kernel_matrix(curve)
    rowsum = A.sum(axis=1)
    if values.ndim == 2:
        rowsum = rowsum[:, None]
    return (A @ values - rowsum * values + dvalues) / (1j * curve.N)


def _traces(curve: CurveSample, u: BoundaryFunction) -> tuple[np.ndarray, np.ndarray]:
    _check_decay(u, curve.N)
    values = _values_on(curve, u)
    return values, exterior_trace(curve, values, u.dtheta_values(curve.N))


def boundary_values(curve: CurveSample, u: BoundaryFunction, side: str) -> BoundaryFunction:
    if side not in ("plus", "minus"):
        raise ValueError(f"Unsupported side: {side}")
    values, minus = _traces(curve, u)
    out = values + minus if side == "plus" else minus
    return BoundaryFunction.from_samples(curve, out)


def jump_decompose(curve: CurveSample, u: BoundaryFunction) -> JumpDecomposition:
    values, minus = _traces(curve, u)
    u_plus = BoundaryFunction.from_samples(curve, values + minus)
    u_minus = BoundaryFunction.from_samples(curve, minus)
    residual = float(np.max(np.abs(u_plus.samples - u_minus.samples - values)))
    logger.debug("jump N=%s residual=%.3e", curve.N, residual)
    return JumpDecomposition(u_plus, u_minus, residual)


def project_interior(curve: CurveSample, u: BoundaryFunction) -> BoundaryFunction:
    return jump_decompose(curve, u).u_plus


def project_exterior(curve: CurveSample, u: BoundaryFunction) -> BoundaryFunction:
    return jump_decompose(curve, u).u_minus
