from __future__ import annotations

import numpy as np
import pytest

from grunskykit.curves import sample_curve
from grunskykit.faber import (
    NotHolomorphicError, faber_polynomials, faber_polynomials_exterior, faber_series,
    fit_geometric_ratio, predicted_plus_columns, projection_identity_columns, trivialization_apply,
)
from grunskykit.models import BoundaryFunction, LaurentMap, TaylorMap


def test_ellipse_faber_polynomials(ellipse_map) -> None:
    family = faber_polynomials(ellipse_map, 4)
    np.testing.assert_allclose(family.poly(0), [1.0], atol=1e-14)
    np.testing.assert_allclose(family.poly(1), [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(family.poly(2), [-0.6, 0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(family.poly(3), [0.0, -0.9, 0.0, 1.0], atol=1e-14)


def test_faber_polynomials_of_a_disk() -> None:
    family = faber_polynomials(LaurentMap(3.0, [0.0]), 5)
    for k in range(6):
        expected = np.zeros(k + 1)
        expected[k] = 3.0 ** -k
        np.testing.assert_allclose(family.poly(k), expected, atol=1e-14)
        assert family.leading(k) == pytest.approx(3.0 ** -k)


def test_faber_polynomials_follow_translation(ellipse_map) -> None:
    shifted = ellipse_map.translated(1.0 + 0.5j)
    base = faber_polynomials(ellipse_map, 5)
    moved = faber_polynomials(shifted, 5)
    w = np.array([0.3, -0.2 + 0.4j, 1.1j])
    for k in range(6):
        np.testing.assert_allclose(moved.evaluate(k, w + 1.0 + 0.5j), base.evaluate(k, w), atol=1e-12)


def test_exterior_faber_of_scaled_disk() -> None:
    family = faber_polynomials_exterior(TaylorMap(0.5, [0.4]), 5)
    assert family.center == 0.5
    for k in range(1, 6):
        expected = np.zeros(k)
        expected[-1] = 0.4 ** k
        np.testing.assert_allclose(family.poly(k), expected, atol=1e-14)
    np.testing.assert_allclose(family.evaluate(2, np.array([1.5])), [0.16], atol=1e-14)


def test_faber_family_needs_matching_map(ellipse_map) -> None:
    with pytest.raises(TypeError):
        faber_polynomials(TaylorMap(0.0, [1.0]), 3)
    with pytest.raises(TypeError):
        faber_polynomials_exterior(ellipse_map, 3)


def test_interior_trivialization_gives_faber_polynomials(ellipse_map) -> None:
    family = faber_polynomials(ellipse_map, 3)
    curve = sample_curve(ellipse_map, 512)
    for k in (1, 2, 3):
        g = BoundaryFunction.from_modes({k: 1.0})
        image = trivialization_apply(ellipse_map, "interior", g, 512)
        np.testing.assert_allclose(image.samples, family.evaluate(k, curve.points), atol=1e-10)


def test_exterior_trivialization_gives_faber_polynomials() -> None:
    fmap = TaylorMap(0.5, [1.0, 0.1])
    family = faber_polynomials_exterior(fmap, 3)
    curve = sample_curve(fmap, 512)
    for k in (1, 2, 3):
        g = BoundaryFunction.from_modes({-k: 1.0})
        image = trivialization_apply(fmap, "exterior", g, 512)
        np.testing.assert_allclose(image.samples, family.evaluate(k, curve.points), atol=1e-10)


def test_trivialization_rejects_unknown_side(ellipse_map) -> None:
    with pytest.raises(ValueError):
        trivialization_apply(ellipse_map, "inside", BoundaryFunction.from_modes({1: 1.0}))


@pytest.mark.parametrize("center", [0.0, 0.5 - 0.25j])
def test_projection_identity(center) -> None:
    columns = projection_identity_columns(TaylorMap(center, [1.0, 0.1]), 8, 1024)
    assert columns.identity_residual < 1e-7
    assert columns.prediction_residual < 1e-7


def test_projection_columns_do_not_depend_on_the_center() -> None:
    a = projection_identity_columns(TaylorMap(0.0, [1.0, 0.1]), 8, 1024)
    b = projection_identity_columns(TaylorMap(0.5 - 0.25j, [1.0, 0.1]), 8, 1024)
    np.testing.assert_allclose(a.minus, b.minus, atol=1e-7)
    np.testing.assert_allclose(a.plus, b.plus, atol=1e-7)


def test_predicted_plus_of_a_disk_is_zero() -> None:
    # Phi_k(F(z)) = z^-k exactly when F is a scaled disk
    assert np.max(np.abs(predicted_plus_columns(TaylorMap(0.0, [2.0]), 4))) < 1e-14


def test_faber_series_converges_geometrically(ellipse_map) -> None:
    curve = sample_curve(ellipse_map, 512)
    h = lambda w: 1.0 / (w - 5.0)
    family = faber_polynomials(ellipse_map, 20)
    series = faber_series(BoundaryFunction.from_callable(curve, h), family)
    # ellipse with semi-axes 1.3 and 0.7
    r, phi = np.meshgrid([0.0, 0.3, 0.6, 0.9], 2 * np.pi * np.arange(16) / 16)
    probes = (1.3 * r * np.cos(phi) + 0.7j * r * np.sin(phi)).ravel()
    errors = series.sup_errors(probes, h(probes))
    assert errors[-1] < 1e-10
    assert fit_geometric_ratio(errors) < 0.5


def test_faber_series_rejects_exterior_data(ellipse_map) -> None:
    curve = sample_curve(ellipse_map, 512)
    data = BoundaryFunction.from_callable(curve, lambda w: 1.0 / (w - 0.1))
    with pytest.raises(NotHolomorphicError) as info:
        faber_series(data, faber_polynomials(ellipse_map, 4))
    assert info.value.mass > 1e-3


def test_exterior_faber_series() -> None:
    fmap = TaylorMap(0.0, [1.0, 0.1])
    curve = sample_curve(fmap, 512)
    h = lambda w: 1.0 / (w - 0.2)
    family = faber_polynomials_exterior(fmap, 20)
    series = faber_series(BoundaryFunction.from_callable(curve, h), family)
    probes = 2.0 * np.exp(2j * np.pi * np.arange(16) / 16)
    assert np.max(np.abs(series(probes) - h(probes))) < 1e-8


def test_fit_geometric_ratio() -> None:
    errors = 3.0 * 0.25 ** np.arange(12)
    assert fit_geometric_ratio(errors) == pytest.approx(0.25)
    assert fit_geometric_ratio([1e-15, 1e-16]) == 0.0
