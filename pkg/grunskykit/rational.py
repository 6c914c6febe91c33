from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .curves import distance_to_curve, winding_number
from .models import BoundaryFunction, CurveSample, complex_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoleTerm:
    pole: complex
    residue: complex
    order: int = 1

    def __call__(self, w):
        return self.residue / (np.asarray(w, dtype=complex) - self.pole) ** self.order

    def to_raw(self) -> dict:
        return {"pole": complex_pair(self.pole), "residue": complex_pair(self.residue), "order": self.order}


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Sum of pole terms plus a polynomial part (the singularity at infinity)."""
    terms: tuple[PoleTerm, ...] = ()
    polynomial: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "polynomial", np.atleast_1d(np.asarray(self.polynomial, dtype=complex)))

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape, dtype=complex)
        if self.polynomial.size:
            out = out + P.polyval(w, self.polynomial)
        for term in self.terms:
            out = out + term(w)
        return out

    @property
    def poles(self) -> np.ndarray:
        return np.array([t.pole for t in self.terms], dtype=complex)

    def principal_part(self, pole: complex) -> "RationalFunction":
        return RationalFunction(tuple(t for t in self.terms if t.pole == pole))

    def trace(self, curve: CurveSample, K: int | None = None) -> BoundaryFunction:
        if self.terms and np.min(distance_to_curve(curve, self.poles)) <= curve.mesh_width:
            raise ValueError("pole on curve")
        return BoundaryFunction.from_samples(curve, self(curve.points), K)

    def to_raw(self) -> dict:
        return {
            "terms": [t.to_raw() for t in self.terms],
            "polynomial": [complex_pair(c) for c in self.polynomial],
        }


def slot_of(curves: Sequence[CurveSample], pole: complex) -> int:
    """Cap holding a pole: inner caps lie inside curves 0..n-1, the outer cap outside curve n."""
    n = len(curves) - 1
    for i in range(n):
        if winding_number(curves[i].points, pole)[0] != 0:
            return i
    if winding_number(curves[n].points, pole)[0] == 0:
        return n
    raise ValueError(f"pole {pole} does not lie in any cap")


def split_by_slot(h: RationalFunction, curves: Sequence[CurveSample]) -> list[RationalFunction]:
    n = len(curves) - 1
    buckets: list[list[PoleTerm]] = [[] for _ in range(n + 1)]
    for term in h.terms:
        buckets[slot_of(curves, term.pole)].append(term)
    parts = [RationalFunction(tuple(b)) for b in buckets]
    parts[n] = RationalFunction(tuple(buckets[n]), h.polynomial)
    return parts


def random_rational(rigging, seed: int = 0, poles_per_cap: int = 1,
                    inner_radius: tuple[float, float] = (0.1, 0.3),
                    outer_radius: tuple[float, float] = (4.0, 6.0),
                    caps: Sequence[int] | None = None) -> RationalFunction:
    rng = np.random.default_rng(seed)
    n = len(rigging.maps) - 1
    caps = range(n + 1) if caps is None else caps
    terms = []
    for i in caps:
        fmap = rigging.maps[i]
        lo, hi = inner_radius if i < n else outer_radius
        for _ in range(poles_per_cap):
            rho = rng.uniform(lo, hi)
            phi = rng.uniform(0.0, 2 * np.pi)
            pole = complex(fmap(rho * np.exp(1j * phi)))
            residue = complex(rng.normal(), rng.normal())
            terms.append(PoleTerm(pole, residue))
    logger.debug("random_rational seed=%s poles=%s", seed, len(terms))
    return RationalFunction(tuple(terms))
