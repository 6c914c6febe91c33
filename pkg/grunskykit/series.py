from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 32


class SeriesError(ValueError):
    pass


class TruncationError(SeriesError):
    pass


class OrientationError(SeriesError):
    pass


@dataclass(frozen=True, eq=False)
class FormalSeries:
    """Truncated bilateral power series.

    ``point="zero"`` is an expansion at 0: exponents below ``lo`` are zero and
    exponents ``>= truncation_order`` are unknown. ``point="infinity"`` is an
    expansion at infinity: exponents above ``hi`` are zero and exponents
    ``<= truncation_order`` are unknown. ``truncation_order=None`` marks a
    finite series whose unstored coefficients are all zero.
    """
    lo: int
    coeffs: np.ndarray
    truncation_order: Optional[int] = None
    point: str = "zero"

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise SeriesError("coeffs must be a non-empty vector")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "lo", int(self.lo))
        if self.point not in ("zero", "infinity"):
            raise SeriesError(f"Unsupported expansion point: {self.point}")
        t = self.truncation_order
        if t is not None:
            if self.point == "zero" and self.hi >= t:
                raise TruncationError(f"stored exponent {self.hi} lies beyond truncation order {t}")
            if self.point == "infinity" and self.lo <= t:
                raise TruncationError(f"stored exponent {self.lo} lies beyond truncation order {t}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return self.truncation_order is None

    @classmethod
    def exact(cls, coeffs, lo: int = 0, point: str = "zero") -> "FormalSeries":
        return cls(lo, coeffs, None, point)

    @classmethod
    def monomial(cls, exponent: int, coefficient: complex = 1.0, point: str = "zero") -> "FormalSeries":
        return cls(exponent, [coefficient], None, point)

    def is_known(self, k: int) -> bool:
        t = self.truncation_order
        if t is None:
            return True
        return k < t if self.point == "zero" else k > t

    def coefficient(self, k: int) -> complex:
        if not self.is_known(k):
            raise TruncationError(f"insufficient truncation: coefficient of z^{k} is unknown")
        if self.lo <= k <= self.hi:
            return complex(self.coeffs[k - self.lo])
        return 0j

    def window(self, k0: int, k1: int) -> np.ndarray:
        return np.array([self.coefficient(k) for k in range(k0, k1 + 1)], dtype=complex)

    def reflect(self) -> "FormalSeries":
        """Substitute z -> 1/z; swaps the expansion point."""
        t = None if self.truncation_order is None else -self.truncation_order
        point = "infinity" if self.point == "zero" else "zero"
        return FormalSeries(-self.hi, self.coeffs[::-1], t, point)

    def valuation(self) -> float:
        """Lowest exponent with a nonzero stored coefficient (zero point)."""
        nz = np.flatnonzero(self.coeffs)
        if nz.size:
            return self.lo + int(nz[0])
        return math.inf if self.truncation_order is None else self.truncation_order

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __add__(self, other):
        if isinstance(other, FormalSeries):
            return series_add(self, other)
        return series_add(self, FormalSeries.monomial(0, other, self.point))

    __radd__ = __add__

    def __neg__(self):
        return series_scale(self, -1.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return (f"FormalSeries(lo={self.lo}, hi={self.hi}, point={self.point!r}, "
                f"truncation_order={self.truncation_order})")


@dataclass(frozen=True, eq=False)
class PowerMatrix:
    """Window of coefficients [F]^m_k of z^k in F(z)^m, rows m, columns k."""
    m_range: Tuple[int, int]
    k_range: Tuple[int, int]
    entries: np.ndarray
    orientation: str

    def entry(self, m: int, k: int) -> complex:
        m0, m1 = self.m_range
        k0, k1 = self.k_range
        if not (m0 <= m <= m1 and k0 <= k <= k1):
            raise IndexError(f"({m}, {k}) outside power matrix window")
        return complex(self.entries[m - m0, k - k0])

    def product(self, other: "PowerMatrix") -> "PowerMatrix":
        if self.k_range != other.m_range:
            raise SeriesError(f"windows do not chain: {self.k_range} vs {other.m_range}")
        return PowerMatrix(self.m_range, other.k_range, self.entries @ other.entries, self.orientation)


def _order_of(value: float) -> Optional[int]:
    return None if math.isinf(value) else int(value)


def _inf(t: Optional[int]) -> float:
    return math.inf if t is None else t


def _same_point(a: FormalSeries, b: FormalSeries) -> None:
    if a.point != b.point:
        raise OrientationError(f"cannot combine expansions at {a.point} and {b.point}")


def _clip(lo: int, coeffs: np.ndarray, order: float) -> FormalSeries:
    if not math.isinf(order):
        keep = int(order) - lo
        if keep <= 0:
            raise TruncationError("truncation exhausted")
        coeffs = coeffs[:keep]
    return FormalSeries(lo, coeffs, _order_of(order), "zero")


def series_truncate(s: FormalSeries, order: int) -> FormalSeries:
    if s.point == "infinity":
        return series_truncate(s.reflect(), -order).reflect()
    return _clip(s.lo, s.coeffs, min(_inf(s.truncation_order), order))


def series_scale(a: FormalSeries, c: complex) -> FormalSeries:
    return FormalSeries(a.lo, a.coeffs * c, a.truncation_order, a.point)


def series_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    _same_point(a, b)
    if a.point == "infinity":
        return series_add(a.reflect(), b.reflect()).reflect()
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    out = np.zeros(hi - lo + 1, dtype=complex)
    out[a.lo - lo:a.hi - lo + 1] += a.coeffs
    out[b.lo - lo:b.hi - lo + 1] += b.coeffs
    return _clip(lo, out, min(_inf(a.truncation_order), _inf(b.truncation_order)))


def series_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Product; the unknown tail starts at min(t_a + v_b, t_b + v_a)."""
    _same_point(a, b)
    if a.point == "infinity":
        return series_mul(a.reflect(), b.reflect()).reflect()
    order = min(_inf(a.truncation_order) + b.valuation(), _inf(b.truncation_order) + a.valuation())
    return _clip(a.lo + b.lo, np.convolve(a.coeffs, b.coeffs), order)


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    m = min(n, len(a))
    out[:m] = a[:m]
    return out


def _inv_trunc(a: np.ndarray, n: int) -> np.ndarray:
    a = _pad(a, n)
    if a[0] == 0:
        raise SeriesError("non-invertible leading coefficient")
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, n):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1]) / a[0]
    return out


def _compose_trunc(outer: np.ndarray, inner: np.ndarray, n: int) -> np.ndarray:
    """outer(inner) mod w^n for inner without constant term (Horner)."""
    inner = _pad(inner, n)
    out = np.zeros(n, dtype=complex)
    for c in outer[:n][::-1]:
        out = np.convolve(out, inner)[:n]
        out[0] += c
    return out


def _derivative(a: np.ndarray) -> np.ndarray:
    if len(a) < 2:
        return np.zeros(1, dtype=complex)
    return a[1:] * np.arange(1, len(a))


def _revert_trunc(a: np.ndarray, n: int) -> np.ndarray:
    """Compositional inverse of a (a[0] = 0) mod w^n by Newton iteration."""
    a = _pad(a, max(n, 2))
    if a[1] == 0:
        raise SeriesError("non-invertible leading coefficient")
    da = _derivative(a)
    g = np.zeros(n, dtype=complex)
    if n > 1:
        g[1] = 1.0 / a[1]
    prec = 2
    while prec < n:
        prec = min(2 * prec, n)
        residual = _compose_trunc(a, g[:prec], prec)
        residual[1] -= 1.0
        slope = _compose_trunc(da, g[:prec], prec)
        g[:prec] -= np.convolve(residual, _inv_trunc(slope, prec))[:prec]
    return g


def series_reciprocal(s: FormalSeries, precision: Optional[int] = None) -> FormalSeries:
    """1/s. An exact non-monomial input is expanded to ``precision`` terms."""
    if s.point == "infinity":
        return series_reciprocal(s.reflect(), precision).reflect()
    v = s.valuation()
    if math.isinf(v) or not s.is_known(int(v)):
        raise TruncationError("cannot invert a series with no known nonzero coefficient")
    v = int(v)
    unit = s.coeffs[v - s.lo:]
    if s.truncation_order is None:
        unit = np.trim_zeros(unit, "b")
        if len(unit) == 1:
            return FormalSeries(-v, [1.0 / unit[0]], None, "zero")
        rel = precision or DEFAULT_PRECISION
    else:
        rel = s.truncation_order - v
    return FormalSeries(-v, _inv_trunc(unit, rel), -v + rel, "zero")


def series_pow(s: FormalSeries, m: int, precision: Optional[int] = None) -> FormalSeries:
    if m < 0:
        return series_pow(series_reciprocal(s, precision), -m)
    result = FormalSeries.monomial(0, 1.0, s.point)
    base = s
    while m:
        if m & 1:
            result = series_mul(result, base)
        m >>= 1
        if m:
            base = series_mul(base, base)
    return result


def series_compose(outer: FormalSeries, inner: FormalSeries, precision: Optional[int] = None) -> FormalSeries:
    """outer(inner) by Horner's scheme.

    At zero the inner series must vanish at 0; at infinity it must have a simple
    pole (highest exponent 1 with nonzero coefficient).
    """
    _same_point(outer, inner)
    if inner.point == "zero":
        v = inner.valuation()
        if inner.lo < 1 and np.any(inner.coeffs[:1 - inner.lo] != 0):
            raise OrientationError("inner series must have zero constant term")
        if math.isinf(v):
            raise TruncationError("inner series has no known nonzero coefficient")
        tail = _inf(outer.truncation_order) * v if outer.truncation_order is not None else math.inf
    else:
        top = np.flatnonzero(inner.coeffs)
        if top.size == 0 or inner.lo + int(top[-1]) != 1:
            raise OrientationError("inner series must have simple-pole form at infinity")
        tail = math.inf if outer.truncation_order is None else -outer.truncation_order

    result = FormalSeries.monomial(0, 0.0, inner.point)
    if outer.hi >= 0:
        for k in range(outer.hi, -1, -1):
            result = series_mul(result, inner) + outer.coefficient(k)
    if outer.lo < 0:
        recip = series_reciprocal(inner, precision)
        negative = FormalSeries.monomial(0, 0.0, inner.point)
        for k in range(outer.lo, 0):
            negative = series_mul(negative, recip) + outer.coeffs[k - outer.lo]
        result = result + series_mul(negative, recip)
    if not math.isinf(tail):
        result = series_truncate(result, int(tail) if inner.point == "zero" else -int(tail))
    return result


def series_reversion(f, order: Optional[int] = None) -> FormalSeries:
    """Inverse of a Taylor map as a series in (w - center).

    ``f(g(w)) = w + O(w^order)``; the default order is M + 1.
    """
    coeffs = np.asarray(f.coeffs, dtype=complex)
    n = order if order is not None else len(coeffs) + 1
    if n < 2:
        raise SeriesError("reversion needs order >= 2")
    a = np.zeros(n, dtype=complex)
    a[1:] = _pad(coeffs, n - 1)
    g = _revert_trunc(a, n)
    result = FormalSeries(1, g[1:], n, "zero")
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("series_reversion order=%s residual=%.3e", n, composition_residual(f, result))
    return result


def laurent_reversion(f, order: Optional[int] = None) -> FormalSeries:
    """Inverse of a Laurent map near infinity, ``order`` terms from w^1 down.

    Works through s -> 1/f(1/s), which is a Taylor series at 0.
    """
    if f.leading == 0:
        raise SeriesError("non-invertible leading coefficient")
    n = order if order is not None else len(f.coeffs) + 2
    if n < 1:
        raise SeriesError("reversion needs at least one term")
    denominator = np.concatenate([[f.leading], np.asarray(f.coeffs, dtype=complex)])
    conjugate = np.zeros(n + 1, dtype=complex)
    conjugate[1:] = _inv_trunc(denominator, n)
    inverse = _revert_trunc(conjugate, n + 1)
    expansion = _inv_trunc(inverse[1:], n)
    result = FormalSeries(2 - n, expansion[::-1], 1 - n, "infinity")
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("laurent_reversion order=%s residual=%.3e", n, composition_residual(f, result))
    return result


def composition_residual(f, g: FormalSeries) -> float:
    """Largest known coefficient of f(g(w)) - w."""
    composed = series_compose(f.power_series(), g)
    identity = FormalSeries.monomial(1, 1.0, composed.point)
    diff = composed - identity
    return float(np.max(np.abs(diff.coeffs))) if diff.coeffs.size else 0.0


def alternating_log_sum(u, multiply: Callable, terms: int):
    """sum_{j=1}^{terms} (-1)^(j+1) u^j / j with a caller-supplied product."""
    total = u
    power = u
    for j in range(2, terms + 1):
        power = multiply(power, u)
        total = total + ((-1.0) ** (j + 1) / j) * power
    return total


def _zero_point_terms(u: FormalSeries, precision: Optional[int], name: str) -> Tuple[FormalSeries, int]:
    if u.lo <= 0 and np.any(u.coeffs[:1 - u.lo] != 0):
        raise SeriesError(f"{name}: constant term present")
    t = u.truncation_order
    if t is None:
        t = precision or DEFAULT_PRECISION
        u = series_truncate(u, t)
    v = u.valuation()
    if math.isinf(v) or v >= t:
        return u, 0
    return u, (t - 1) // int(v)


def series_log1p(u: FormalSeries, precision: Optional[int] = None) -> FormalSeries:
    """log(1 + u) for u with strictly positive (zero point) or strictly negative
    (infinity point) exponent support."""
    if u.point == "infinity":
        return series_log1p(u.reflect(), precision).reflect()
    u, terms = _zero_point_terms(u, precision, "log1p")
    if terms == 0:
        return series_scale(u, 0.0)
    return alternating_log_sum(u, series_mul, terms)


def series_exp(u: FormalSeries, precision: Optional[int] = None) -> FormalSeries:
    if u.point == "infinity":
        return series_exp(u.reflect(), precision).reflect()
    u, terms = _zero_point_terms(u, precision, "exp")
    result = FormalSeries(0, [1.0], u.truncation_order, "zero")
    power = FormalSeries.monomial(0, 1.0)
    factorial = 1.0
    for j in range(1, terms + 1):
        power = series_mul(power, u)
        factorial *= j
        result = result + series_scale(power, 1.0 / factorial)
    return result


def build_power_matrix(source, m_range: Tuple[int, int], k_range: Tuple[int, int],
                       precision: Optional[int] = None) -> PowerMatrix:
    """Window of [F]^m_k for a map (through its ``power_series``) or a series."""
    s = source if isinstance(source, FormalSeries) else source.power_series()
    m0, m1 = m_range
    k0, k1 = k_range
    if m1 < m0 or k1 < k0:
        raise SeriesError("empty power matrix window")
    if precision is None:
        precision = max(abs(k0), abs(k1)) + max(abs(m0), abs(m1)) * max(abs(s.lo), abs(s.hi), 1) + 2
    entries = np.zeros((m1 - m0 + 1, k1 - k0 + 1), dtype=complex)
    for m in range(m0, m1 + 1):
        p = series_pow(s, m, precision)
        entries[m - m0, :] = p.window(k0, k1)
    orientation = "upper" if s.point == "zero" else "lower"
    return PowerMatrix((m0, m1), (k0, k1), entries, orientation)
