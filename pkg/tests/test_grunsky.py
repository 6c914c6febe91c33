from __future__ import annotations

import numpy as np
import pytest

from grunskykit.grunsky import (
    grunsky_hs_norm, grunsky_hs_partial_sums, grunsky_via_faber, grunsky_via_generating,
    route_agreement,
)
from grunskykit.models import LaurentMap


def _random_maps(count: int, seed: int = 0) -> list[LaurentMap]:
    rng = np.random.default_rng(seed)
    maps = []
    for _ in range(count):
        M = int(rng.integers(2, 6))
        radius = rng.uniform(0.0, 1.0, M) * 0.1 / np.arange(1, M + 1)
        tail = radius * np.exp(2j * np.pi * rng.uniform(size=M))
        coeffs = np.concatenate([[complex(rng.normal(), rng.normal())], tail])
        maps.append(LaurentMap(complex(rng.uniform(0.5, 2.0), rng.normal()), coeffs))
    return maps


@pytest.mark.parametrize("c", [0.3, -0.2, 0.25j])
def test_joukowski_closed_form(c) -> None:
    K = 8
    expected = np.diag([c ** k / k for k in range(1, K + 1)])
    for route in (grunsky_via_generating, grunsky_via_faber):
        matrix = route(LaurentMap(1.0, [0.0, c]), K)
        np.testing.assert_allclose(matrix.entries, expected, atol=1e-13)


def test_scaled_joukowski_closed_form() -> None:
    matrix = grunsky_via_generating(LaurentMap(3.0, [0.0, 0.3]), 6)
    np.testing.assert_allclose(np.diag(matrix.entries), [0.1 ** k / k for k in range(1, 7)], rtol=1e-12)
    assert np.max(np.abs(matrix.entries - np.diag(np.diag(matrix.entries)))) == 0


def test_disk_has_zero_coefficients() -> None:
    matrix = grunsky_via_generating(LaurentMap(2.0, [1.0]), 5)
    assert np.max(np.abs(matrix.entries)) == 0
    assert grunsky_hs_norm(matrix) == 0


def test_quadratic_tail_first_entries() -> None:
    # f = z + c/z^2: b_12 = b_21 = c, b_11 = 0
    c = 0.05
    matrix = grunsky_via_generating(LaurentMap(1.0, [0.0, 0.0, c]), 4)
    assert matrix.entries[0, 0] == pytest.approx(0.0)
    assert matrix.entries[0, 1] == pytest.approx(c)
    assert matrix.entries[1, 0] == pytest.approx(c)


def test_routes_agree_on_random_maps() -> None:
    for fmap in _random_maps(5, seed=7):
        assert route_agreement(fmap, 12) < 1e-10


def test_symmetry_on_random_maps() -> None:
    for fmap in _random_maps(5, seed=3):
        matrix = grunsky_via_generating(fmap, 12)
        assert matrix.symmetry_residual() < 1e-10
        assert matrix.weighted_symmetry_residual() == pytest.approx(0.0, abs=1e-8)


def test_grunsky_inequality_on_random_maps() -> None:
    for fmap in _random_maps(5, seed=11):
        matrix = grunsky_via_generating(fmap, 10)
        idx = np.arange(1, 11)
        weighted = np.sqrt(np.outer(idx, idx)) * matrix.entries
        assert np.linalg.norm(weighted, 2) <= 1.0


def test_translation_and_scaling_invariance() -> None:
    fmap = _random_maps(1, seed=5)[0]
    base = grunsky_via_generating(fmap, 8).entries
    shifted = grunsky_via_generating(fmap.translated(2.0 - 1.0j), 8).entries
    scaled = grunsky_via_generating(LaurentMap(2.5 * fmap.leading, 2.5 * fmap.coeffs), 8).entries
    np.testing.assert_allclose(shifted, base, atol=1e-14)
    np.testing.assert_allclose(scaled, base, atol=1e-13)


def test_hs_norm_closed_form() -> None:
    c = 0.3
    K = 10
    matrix = grunsky_via_faber(LaurentMap(1.0, [0.0, c]), K)
    expected = np.sqrt(sum(c ** (2 * k) for k in range(1, K + 1)))
    assert grunsky_hs_norm(matrix) == pytest.approx(expected, rel=1e-12)
    partial = grunsky_hs_partial_sums(matrix)
    assert partial.shape == (K,)
    assert np.all(np.diff(partial) >= 0)
    assert partial[-1] == pytest.approx(expected, rel=1e-12)
    assert partial[0] == pytest.approx(c)


def test_routes_give_the_same_hs_norm() -> None:
    fmap = _random_maps(1, seed=9)[0]
    a = grunsky_hs_norm(grunsky_via_generating(fmap, 12))
    b = grunsky_hs_norm(grunsky_via_faber(fmap, 12))
    assert abs(a - b) < 1e-10
