from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tir import mechanics

from conftest import COTTON


def test_reference_point_reproduces_cotton():
    est = mechanics.estimate_mechanics("woven_cotton", 140.0, 0.35)
    assert est.bending_B_gfcm2_cm == pytest.approx(0.12)
    assert est.stretch_N_m == pytest.approx(2400.0)
    assert est.estimated


def test_thickness_cubes_bending_and_scales_stretch_linearly():
    base = mechanics.estimate_mechanics("woven_cotton", 140.0, 0.35)
    thick = mechanics.estimate_mechanics("woven_cotton", 140.0, 0.70)
    assert thick.bending_B_gfcm2_cm == pytest.approx(8.0 * base.bending_B_gfcm2_cm)
    assert thick.stretch_N_m == pytest.approx(2.0 * base.stretch_N_m)


def test_density_scales_bending_linearly():
    base = mechanics.estimate_mechanics("woven_cotton", 140.0, 0.35)
    dense = mechanics.estimate_mechanics("woven_cotton", 280.0, 0.35)
    assert dense.bending_B_gfcm2_cm == pytest.approx(2.0 * base.bending_B_gfcm2_cm)


def test_unknown_family_raises():
    with pytest.raises(mechanics.UnknownFamily):
        mechanics.estimate_mechanics("denim", 300.0, 0.8)


def test_non_positive_inputs_rejected():
    with pytest.raises(ValueError):
        mechanics.estimate_mechanics("woven_cotton", 0.0, 0.35)
    with pytest.raises(ValueError):
        mechanics.estimate_mechanics("woven_cotton", 140.0, -0.1)


def test_known_families_sorted_and_nonempty():
    fams = mechanics.known_families()
    assert fams == sorted(fams)
    assert "woven_cotton" in fams
    assert "knit_jersey" in fams


def test_mechanics_for_prefers_measured_values(db):
    spec = db.get(COTTON)
    m = mechanics.mechanics_for(spec)
    assert not m.estimated
    assert m.bending_B_gfcm2_cm == pytest.approx(spec.bending_B_gfcm2_cm)
    assert m.poisson == pytest.approx(spec.poisson)


@given(
    st.sampled_from(["woven_cotton", "knit_jersey", "leather"]),
    st.floats(50.0, 2000.0),
    st.floats(0.05, 5.0),
    st.floats(1.01, 3.0),
)
def test_estimates_monotone_in_density_and_thickness(family, dens, thick, factor):
    base = mechanics.estimate_mechanics(family, dens, thick)
    denser = mechanics.estimate_mechanics(family, dens * factor, thick)
    thicker = mechanics.estimate_mechanics(family, dens, thick * factor)
    assert denser.bending_B_gfcm2_cm > base.bending_B_gfcm2_cm
    assert thicker.bending_B_gfcm2_cm > base.bending_B_gfcm2_cm
    assert denser.stretch_N_m > base.stretch_N_m
    assert thicker.stretch_N_m > base.stretch_N_m
    assert base.bending_B_gfcm2_cm > 0
