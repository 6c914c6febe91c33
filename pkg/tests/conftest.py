from __future__ import annotations

import numpy as np
import pytest

from grunskykit.models import LaurentMap, TaylorMap
from grunskykit.rigging import Rigging, assemble_grunsky_blocks


@pytest.fixture
def ellipse_map() -> LaurentMap:
    return LaurentMap(1.0, [0.0, 0.3])


@pytest.fixture(scope="session")
def annulus() -> Rigging:
    return Rigging((TaylorMap(0.0, [0.3]), LaurentMap(3.0, [0.0])), 1024)


@pytest.fixture(scope="session")
def three_caps() -> Rigging:
    return Rigging((
        TaylorMap(0.0, [1.0]),
        TaylorMap(4.0, [1.0, 0.1]),
        LaurentMap(10.0, [0.0]),
    ), 1024)


@pytest.fixture(scope="session")
def annulus_blocks(annulus):
    return assemble_grunsky_blocks(annulus, 8)


@pytest.fixture(scope="session")
def three_cap_blocks(three_caps):
    return assemble_grunsky_blocks(three_caps, 8)


def polar_energy(derivative, n_r: int = 64, n_theta: int = 256) -> float:
    """Area integral of |f'|^2 over the unit disk: Gauss-Legendre in r, trapezoid in theta."""
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = r[:, None] * np.exp(1j * theta[None, :])
    integrand = np.abs(derivative(z)) ** 2 * r[:, None]
    return float(np.sum(wr[:, None] * integrand) * 2 * np.pi / n_theta)


@pytest.fixture
def polar_quadrature():
    return polar_energy
