from __future__ import annotations

import numpy as np
import pytest

from grunskykit.curves import sample_curve
from grunskykit.models import TaylorMap
from grunskykit.rational import PoleTerm, RationalFunction, random_rational, slot_of, split_by_slot


def test_rational_evaluation() -> None:
    h = RationalFunction((PoleTerm(1.0, 2.0), PoleTerm(-1.0j, 1.0, 2)), [0.5, 1.0])
    w = np.array([0.0, 2.0 + 1.0j])
    expected = 0.5 + w + 2.0 / (w - 1.0) + 1.0 / (w + 1.0j) ** 2
    np.testing.assert_allclose(h(w), expected)
    np.testing.assert_allclose(h.poles, [1.0, -1.0j])
    assert len(h.principal_part(1.0).terms) == 1


def test_trace_rejects_pole_on_curve() -> None:
    curve = sample_curve(TaylorMap(0.0, [1.0]), 64)
    with pytest.raises(ValueError, match="pole on curve"):
        RationalFunction((PoleTerm(1.0, 1.0),)).trace(curve)


def test_trace_modes_on_circle() -> None:
    curve = sample_curve(TaylorMap(0.0, [1.0]), 64)
    trace = RationalFunction((PoleTerm(0.0, 1.0),), [0.0, 2.0]).trace(curve, K=4)
    assert trace.mode(-1) == pytest.approx(1.0)
    assert trace.mode(1) == pytest.approx(2.0)


def test_slot_assignment(three_caps) -> None:
    curves = three_caps.curves
    assert slot_of(curves, 0.2) == 0
    assert slot_of(curves, 4.1 + 0.1j) == 1
    assert slot_of(curves, 20.0) == 2
    with pytest.raises(ValueError, match="does not lie in any cap"):
        slot_of(curves, 2.5)


def test_split_by_slot_recovers_h(three_caps) -> None:
    h = RationalFunction((PoleTerm(0.1, 1.0), PoleTerm(4.2, -1.0j), PoleTerm(30.0, 2.0)), [1.0])
    parts = split_by_slot(h, three_caps.curves)
    assert [len(p.terms) for p in parts] == [1, 1, 1]
    np.testing.assert_allclose(parts[2].polynomial, [1.0])
    w = np.array([2.0 + 1.0j, 6.0])
    np.testing.assert_allclose(sum(p(w) for p in parts), h(w))


def test_random_rational_is_seeded(three_caps) -> None:
    a = random_rational(three_caps, seed=4)
    b = random_rational(three_caps, seed=4)
    np.testing.assert_array_equal(a.poles, b.poles)
    assert len(a.terms) == 3
    slots = [slot_of(three_caps.curves, p) for p in a.poles]
    assert slots == [0, 1, 2]


def test_random_rational_selected_caps(three_caps) -> None:
    h = random_rational(three_caps, seed=1, poles_per_cap=2, caps=[1])
    assert len(h.terms) == 2
    assert all(slot_of(three_caps.curves, p) == 1 for p in h.poles)


def test_rational_to_raw() -> None:
    raw = RationalFunction((PoleTerm(1.0 + 2.0j, 3.0),)).to_raw()
    assert raw == {"terms": [{"pole": [1.0, 2.0], "residue": [3.0, 0.0], "order": 1}], "polynomial": []}
