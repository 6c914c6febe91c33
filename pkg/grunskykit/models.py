from __future__ import annotations
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .series import FormalSeries


class MapError(ValueError):
    pass


def _vector(values) -> np.ndarray:
    return np.atleast_1d(np.asarray(values, dtype=complex))


def complex_pair(value: complex) -> list:
    value = complex(value)
    return [value.real, value.imag]


@dataclass(frozen=True, eq=False)
class TaylorMap:
    """f(z) = center + a_1 z + ... + a_M z^M on the unit disk."""
    center: complex
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = _vector(self.coeffs)
        if coeffs.size == 0 or coeffs[0] == 0:
            raise MapError("TaylorMap needs a1 != 0")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", complex(self.center))

    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def a1(self) -> complex:
        return complex(self.coeffs[0])

    @property
    def coefficient_count(self) -> int:
        return len(self.coeffs)

    @property
    def is_circle(self) -> bool:
        return not np.any(self.coeffs[1:])

    def __call__(self, z):
        return self.center + P.polyval(z, np.concatenate([[0.0], self.coeffs]))

    def derivative(self, z):
        return P.polyval(z, self.coeffs * np.arange(1, self.M + 1))

    def power_series(self) -> FormalSeries:
        """f - center, the series whose powers fill upper power matrices."""
        return FormalSeries(1, self.coeffs)

    def translated(self, shift: complex) -> "TaylorMap":
        return replace(self, center=self.center + shift)

    def to_raw(self) -> dict:
        return {
            "kind": "taylor",
            "center": complex_pair(self.center),
            "coeffs": [complex_pair(c) for c in self.coeffs],
        }


@dataclass(frozen=True, eq=False)
class LaurentMap:
    """f(z) = b z + c_0 + c_1/z + ... + c_M/z^M on the exterior disk."""
    leading: complex
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=complex))

    def __post_init__(self):
        if complex(self.leading) == 0:
            raise MapError("LaurentMap needs b != 0")
        coeffs = _vector(self.coeffs)
        if coeffs.size == 0:
            coeffs = np.zeros(1, dtype=complex)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "leading", complex(self.leading))

    @property
    def M(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coefficient_count(self) -> int:
        return len(self.coeffs)

    @property
    def is_circle(self) -> bool:
        return not np.any(self.coeffs[1:])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.leading * z + P.polyval(1.0 / z, self.coeffs)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        m = np.arange(len(self.coeffs))
        tail = P.polyval(1.0 / z, np.concatenate([[0.0], -m[1:] * self.coeffs[1:]]))
        return self.leading + tail / z

    def power_series(self) -> FormalSeries:
        return FormalSeries(-self.M, np.concatenate([self.coeffs[::-1], [self.leading]]), None, "infinity")

    def translated(self, shift: complex) -> "LaurentMap":
        coeffs = self.coeffs.copy()
        coeffs[0] += shift
        return replace(self, coeffs=coeffs)

    def to_raw(self) -> dict:
        return {
            "kind": "laurent",
            "leading": complex_pair(self.leading),
            "coeffs": [complex_pair(c) for c in self.coeffs],
        }


@dataclass(frozen=True, eq=False)
class CurveSample:
    N: int
    points: np.ndarray
    derivs: np.ndarray
    orientation: str = "positive"
    source_map: Optional[object] = None

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.N) / self.N

    @property
    def sign(self) -> float:
        return 1.0 if self.orientation == "positive" else -1.0

    @property
    def complex_weights(self) -> np.ndarray:
        """d(zeta) per node, including the orientation sign."""
        return self.sign * self.derivs * (2.0 * np.pi / self.N)

    @property
    def arc_weights(self) -> np.ndarray:
        return np.abs(self.derivs) * (2.0 * np.pi / self.N)

    @property
    def mesh_width(self) -> float:
        return float(np.max(np.abs(np.roll(self.points, -1) - self.points)))

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.arc_weights))

    @property
    def is_circle(self) -> bool:
        return self.source_map is None or bool(getattr(self.source_map, "is_circle", False))

    def with_orientation(self, orientation: str) -> "CurveSample":
        if orientation not in ("positive", "negative"):
            raise ValueError(f"Unsupported orientation: {orientation}")
        return replace(self, orientation=orientation)


def _place(fourier: np.ndarray, K: int, N: int) -> np.ndarray:
    if K > N // 2 - 1:
        raise ValueError(f"{2 * K + 1} Fourier modes do not fit on {N} nodes")
    spectrum = np.zeros(N, dtype=complex)
    spectrum[np.arange(-K, K + 1) % N] = fourier
    return spectrum


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Fourier data h_n, n = -K..K, in the circle parameter of a curve.

    ``curve=None`` means data on the unit circle with no discretization attached.
    """
    curve: Optional[CurveSample]
    fourier: np.ndarray
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        fourier = _vector(self.fourier)
        if fourier.size % 2 != 1:
            raise ValueError("fourier must hold an odd number of modes (-K..K)")
        object.__setattr__(self, "fourier", fourier)

    @property
    def K(self) -> int:
        return (len(self.fourier) - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def mode(self, n: int) -> complex:
        if abs(n) > self.K:
            return 0j
        return complex(self.fourier[n + self.K])

    def mode_vector(self, modes) -> np.ndarray:
        return np.array([self.mode(int(n)) for n in modes], dtype=complex)

    @classmethod
    def from_samples(cls, curve: Optional[CurveSample], values, K: Optional[int] = None) -> "BoundaryFunction":
        values = _vector(values)
        N = len(values)
        if K is None:
            K = N // 2 - 1
        spectrum = np.fft.fft(values) / N
        return cls(curve, spectrum[np.arange(-K, K + 1) % N], values)

    @classmethod
    def from_callable(cls, curve: CurveSample, fn, K: Optional[int] = None) -> "BoundaryFunction":
        return cls.from_samples(curve, fn(curve.points), K)

    @classmethod
    def from_modes(cls, modes: Dict[int, complex], curve: Optional[CurveSample] = None,
                   K: Optional[int] = None) -> "BoundaryFunction":
        K = max([abs(n) for n in modes] + [0]) if K is None else K
        fourier = np.zeros(2 * K + 1, dtype=complex)
        for n, value in modes.items():
            fourier[n + K] = value
        return cls(curve, fourier)

    @classmethod
    def zeros(cls, K: int, curve: Optional[CurveSample] = None) -> "BoundaryFunction":
        return cls(curve, np.zeros(2 * K + 1, dtype=complex))

    def _nodes(self, N: Optional[int]) -> int:
        if N is not None:
            return N
        if self.curve is None:
            raise ValueError("sample count needed for data without a curve")
        return self.curve.N

    def sample_values(self, N: Optional[int] = None) -> np.ndarray:
        N = self._nodes(N)
        return np.fft.ifft(_place(self.fourier, self.K, N)) * N

    def dtheta_values(self, N: Optional[int] = None) -> np.ndarray:
        N = self._nodes(N)
        return np.fft.ifft(_place(1j * self.modes * self.fourier, self.K, N)) * N

    def values_at(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ self.fourier

    def restrict(self, part: str) -> "BoundaryFunction":
        keep = self.modes >= 0 if part == "nonnegative" else self.modes < 0
        if part not in ("nonnegative", "negative"):
            raise ValueError(f"Unsupported part: {part}")
        return replace(self, fourier=np.where(keep, self.fourier, 0), samples=None)

    def with_K(self, K: int) -> "BoundaryFunction":
        return replace(self, fourier=self.mode_vector(range(-K, K + 1)), samples=None)

    def fourier_mass(self, part: str = "all") -> float:
        data = self.fourier if part == "all" else self.restrict(part).fourier
        return float(np.sqrt(np.sum(np.abs(data) ** 2)))

    def tail_ratio(self, N: Optional[int] = None) -> float:
        """Largest coefficient in the upper half of the resolvable band, relative."""
        N = self._nodes(N)
        peak = np.max(np.abs(self.fourier))
        band = np.abs(self.modes) >= N // 4
        if peak == 0 or not band.any():
            return 0.0
        return float(np.max(np.abs(self.fourier[band])) / peak)

    def parseval_residual(self) -> float:
        if self.samples is None:
            return 0.0
        return float(np.max(np.abs(self.sample_values(len(self.samples)) - self.samples)))

    def _combine(self, other: "BoundaryFunction", sign: float) -> "BoundaryFunction":
        K = max(self.K, other.K)
        fourier = self.mode_vector(range(-K, K + 1)) + sign * other.mode_vector(range(-K, K + 1))
        return BoundaryFunction(self.curve if self.curve is not None else other.curve, fourier)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return replace(self, fourier=-self.fourier, samples=None if self.samples is None else -self.samples)

    def __mul__(self, c):
        return replace(self, fourier=self.fourier * c, samples=None if self.samples is None else self.samples * c)

    __rmul__ = __mul__

    def to_raw(self) -> dict:
        return {"K": self.K, "fourier": [complex_pair(c) for c in self.fourier]}


@dataclass(frozen=True)
class JumpDecomposition:
    u_plus: BoundaryFunction
    u_minus: BoundaryFunction
    residual: float


@dataclass(frozen=True, eq=False)
class FaberFamily:
    """Faber polynomials of one side of a curve.

    Interior families store Phi_k as coefficients of w^0..w^k (k = 0..K).
    Exterior families store Phi_k as coefficients of s^-1..s^-k with
    s = w - center (k = 1..K).
    """
    domain_side: str
    source_map: object
    K: int
    polys: Tuple[np.ndarray, ...]
    center: complex = 0j

    @property
    def start(self) -> int:
        return 0 if self.domain_side == "interior" else 1

    def poly(self, k: int) -> np.ndarray:
        if not self.start <= k <= self.K:
            raise IndexError(f"Faber index {k} outside {self.start}..{self.K}")
        return self.polys[k - self.start]

    def leading(self, k: int) -> complex:
        return complex(self.poly(k)[-1])

    def evaluate(self, k: int, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        if self.domain_side == "interior":
            return P.polyval(w, self.poly(k))
        return P.polyval(1.0 / (w - self.center), np.concatenate([[0.0], self.poly(k)]))

    def to_raw(self) -> dict:
        return {
            "side": self.domain_side,
            "K": self.K,
            "center": complex_pair(self.center),
            "polys": [[complex_pair(c) for c in self.poly(k)] for k in range(self.start, self.K + 1)],
        }


@dataclass(frozen=True, eq=False)
class FaberSeries:
    family: FaberFamily
    coefficients: np.ndarray

    def terms(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        start = self.family.start
        return np.array([self.coefficients[k - start] * self.family.evaluate(k, w)
                         for k in range(start, self.family.K + 1)])

    def partial_sum(self, w, n_terms: int) -> np.ndarray:
        return self.terms(w)[:n_terms].sum(axis=0)

    def __call__(self, w) -> np.ndarray:
        return self.terms(w).sum(axis=0)

    def sup_errors(self, probes, reference) -> np.ndarray:
        partial = np.cumsum(self.terms(probes), axis=0)
        return np.max(np.abs(partial - np.asarray(reference)[None, ...]), axis=-1)


@dataclass(frozen=True, eq=False)
class GrunskyMatrix:
    """b_km for k, m = 1..K, stored at entries[k-1, m-1]."""
    K: int
    entries: np.ndarray
    source_map: object

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))

    def operator_matrix(self) -> np.ndarray:
        """G[m-1, k-1] = k b_mk: the operator z^k -> sum_m k b_mk z^-m."""
        return self.entries * np.arange(1, self.K + 1)[None, :]

    def weighted_symmetry_residual(self) -> float:
        G = self.operator_matrix()
        idx = np.arange(1, self.K + 1)
        return float(np.max(np.abs(idx[:, None] * G - (idx[:, None] * G).T)))

    def to_raw(self) -> dict:
        return {"K": self.K, "entries": [[complex_pair(c) for c in row] for row in self.entries]}


@dataclass(frozen=True, eq=False)
class DiskFunction:
    """Interior: coeffs[n] multiplies z^n (n = 0..K). Exterior: coeffs[n-1] multiplies z^-n."""
    side: str
    coeffs: np.ndarray

    def __post_init__(self):
        if self.side not in ("interior", "exterior"):
            raise ValueError(f"Unsupported side: {self.side}")
        object.__setattr__(self, "coeffs", _vector(self.coeffs))

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1 if self.side == "interior" else len(self.coeffs)

    @property
    def exponents(self) -> np.ndarray:
        if self.side == "interior":
            return np.arange(len(self.coeffs))
        return -np.arange(1, len(self.coeffs) + 1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.sum(self.coeffs[:, None] * np.power.outer(z.ravel(), self.exponents).T, axis=0).reshape(z.shape)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        e = self.exponents
        powers = np.power.outer(z.ravel(), e - 1).T
        return np.sum((self.coeffs * e)[:, None] * powers, axis=0).reshape(z.shape)


@dataclass(frozen=True)
class HarmonicPair:
    """h = holo + conj(antiholo); both parts are interior disk functions."""
    holo: DiskFunction
    antiholo: DiskFunction

    def at_origin(self) -> complex:
        return complex(self.holo.coeffs[0] + np.conj(self.antiholo.coeffs[0]))

    def __call__(self, z):
        return self.holo(z) + np.conj(self.antiholo(z))


@dataclass(frozen=True)
class HTuple:
    """Circle data per boundary slot; slot n is read against the exterior disk."""
    components: Tuple[BoundaryFunction, ...]

    @property
    def n(self) -> int:
        return len(self.components) - 1

    @classmethod
    def zeros(cls, n: int, K: int) -> "HTuple":
        return cls(tuple(BoundaryFunction.zeros(K) for _ in range(n + 1)))

    def max_abs_difference(self, other: "HTuple") -> float:
        return max(float(np.max(np.abs((a - b).fourier))) for a, b in zip(self.components, other.components))

    def to_raw(self) -> dict:
        return {"n": self.n, "components": [c.to_raw() for c in self.components]}


@dataclass(frozen=True, eq=False)
class GrunskyBlocks:
    """blocks[i][j] maps slot-i minus modes to slot-j plus modes."""
    n: int
    K: int
    blocks: Tuple[Tuple[np.ndarray, ...], ...]
    input_modes: Tuple[np.ndarray, ...]
    output_modes: Tuple[np.ndarray, ...]
    identity_residual: float = 0.0
    stray_minus_mass: float = 0.0

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]

    def to_raw(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "input_modes": [[int(m) for m in modes] for modes in self.input_modes],
            "output_modes": [[int(m) for m in modes] for modes in self.output_modes],
            "blocks": [[[[complex_pair(c) for c in row] for row in b] for b in row_blocks]
                       for row_blocks in self.blocks],
        }


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    min_distance: float
    pair_distances: Dict[str, float]
    winding_checks: Dict[str, bool]
    chord_arc: Tuple[float, ...]

    def to_raw(self) -> dict:
        return {
            "valid": self.valid,
            "min_distance": self.min_distance,
            "pair_distances": dict(self.pair_distances),
            "winding_checks": dict(self.winding_checks),
            "chord_arc": list(self.chord_arc),
        }


@dataclass(frozen=True)
class GraphReport:
    residual: float
    slot_residuals: Tuple[float, ...]
    minus_tail: float

    def to_raw(self) -> dict:
        return {
            "residual": self.residual,
            "slot_residuals": list(self.slot_residuals),
            "minus_tail": self.minus_tail,
        }


@dataclass(frozen=True, eq=False)
class KDecomposition:
    probes: np.ndarray
    components: np.ndarray
    residual: float


@dataclass(frozen=True)
class Tolerances:
    symmetry: float = 1e-10
    agreement: float = 1e-10
    plemelj: float = 1e-8
    identity: float = 1e-6
    graph: float = 1e-6
    roundtrip: float = 1e-8
    hs: float = 1e-10


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str
    output_path: str
    K: int = 8
    N: Optional[int] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
