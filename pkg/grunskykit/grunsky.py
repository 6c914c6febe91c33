from __future__ import annotations
import logging

import numpy as np

from .faber import faber_polynomials
from .models import GrunskyMatrix, LaurentMap
from .series import FormalSeries, alternating_log_sum, series_compose

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9


class IdentityViolatedError(ValueError):
    pass


def _bivariate_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two series in (x, y) truncated to the stored window."""
    n0, n1 = a.shape
    out = np.zeros_like(a)
    for i, j in zip(*np.nonzero(a)):
        out[i:, j:] += a[i, j] * b[:n0 - i, :n1 - j]
    return out


def grunsky_via_generating(fmap: LaurentMap, K: int) -> GrunskyMatrix:
    """b_km from log((f(z) - f(zeta)) / (b (z - zeta))) = -sum b_km z^-k zeta^-m."""
    b = fmap.leading
    U = np.zeros((K + 1, K + 1), dtype=complex)
    for m, c in enumerate(fmap.coeffs):
        if m == 0 or c == 0:
            continue
        # (z^-m - zeta^-m) / (z - zeta) = -sum_{j=1..m} z^-j zeta^-(m+1-j)
        for j in range(1, m + 1):
            if j <= K and m + 1 - j <= K:
                U[j, m + 1 - j] -= c / b
    # every term of U has total degree >= 2
    L = alternating_log_sum(U, _bivariate_product, max(K, 1))
    entries = -L[1:, 1:]
    logger.debug("grunsky_via_generating K=%s max|b|=%.3e", K, np.max(np.abs(entries)) if K else 0.0)
    return GrunskyMatrix(K, entries, fmap)


def grunsky_via_faber(fmap: LaurentMap, K: int,
                      tolerance: float = IDENTITY_TOLERANCE) -> GrunskyMatrix:
    """b_km from Phi_k(f(z)) = z^k + k sum_m b_km z^-m."""
    family = faber_polynomials(fmap, K)
    inner = fmap.power_series()
    entries = np.zeros((K, K), dtype=complex)
    for k in range(1, K + 1):
        outer = FormalSeries.exact(family.poly(k), lo=0, point="infinity")
        composed = series_compose(outer, inner)
        head = composed.window(0, k)
        head[k] -= 1.0
        residual = float(np.max(np.abs(head)))
        if residual > tolerance:
            raise IdentityViolatedError(f"identity violated for Phi_{k}: residual {residual:.3e}")
        entries[k - 1, :] = composed.window(-K, -1)[::-1] / k
    return GrunskyMatrix(K, entries, fmap)


def route_agreement(fmap: LaurentMap, K: int) -> float:
    a = grunsky_via_generating(fmap, K)
    b = grunsky_via_faber(fmap, K)
    return float(np.max(np.abs(a.entries - b.entries)))


def grunsky_hs_norm(matrix: GrunskyMatrix) -> float:
    """Frobenius norm of sqrt(k m) b_km, the operator in the orthonormal Dirichlet basis."""
    idx = np.arange(1, matrix.K + 1)
    return float(np.linalg.norm(np.sqrt(np.outer(idx, idx)) * matrix.entries))


def grunsky_hs_partial_sums(matrix: GrunskyMatrix) -> np.ndarray:
    idx = np.arange(1, matrix.K + 1)
    weighted = np.abs(np.sqrt(np.outer(idx, idx)) * matrix.entries) ** 2
    return np.sqrt(np.array([weighted[:k, :k].sum() for k in range(1, matrix.K + 1)]))
