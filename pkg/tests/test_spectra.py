import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from birkhoff_levels.errors import Infeasible
from birkhoff_levels.observables import constant, from_values
from birkhoff_levels.spectra import (
    LevelSetQuery,
    SpectrumPoint,
    concavity_violation,
    joint_level_value,
    level_set_value,
    level_value,
    reg_irreg_value,
    slice_width,
    spectrum_curve,
    support_extremes,
)
from birkhoff_levels.systems import full_shift, golden_mean
from birkhoff_levels.thermo import pressure

from reference import binary_entropy, golden_mean_entropy

LN2 = math.log(2)


def test_level_examples(full2, golden, ones2, golden_ones):
    r = level_value(full2, ones2, Fraction(1, 4), Fraction(1, 2))
    assert not r.empty
    assert r.value == pytest.approx(0.562335, abs=1e-6)
    assert r.endpoint_values[1] == pytest.approx(LN2, abs=1e-12)
    assert level_value(golden, golden_ones, Fraction(6, 10), Fraction(7, 10)).empty
    r = level_value(full2, ones2, Fraction(1, 2), Fraction(1, 2), potential=ones2)
    assert r.value == pytest.approx(1.193147, abs=1e-6)
    assert level_value(full2, ones2, 0, 0).value == 0


def test_min_structure(full2, ones2):
    for c, d in [(0.1, 0.7), (0.3, 0.4), (0.05, 0.95)]:
        both = level_value(full2, ones2, c, d).value
        lo = level_value(full2, ones2, c, c).value
        hi = level_value(full2, ones2, d, d).value
        assert both == min(lo, hi)


@given(
    st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=40),
    st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=40),
)
def test_golden_level_values(a, b):
    g = golden_mean()
    f = from_values(g, 1, {(1,): 1})
    c, d = min(a, b), max(a, b)
    r = level_value(g, f, c, d)
    expected = min(golden_mean_entropy(float(c)), golden_mean_entropy(float(d)))
    assert r.value == pytest.approx(expected, abs=1e-9)
    assert r.value <= pressure(g, constant(g, 0)) + 1e-12


def test_empty_outside_range(full2, ones2):
    assert level_value(full2, ones2, Fraction(1, 2), Fraction(11, 10)).empty


def test_query_rejects_reversed_interval(ones2):
    with pytest.raises(ValueError):
        LevelSetQuery(ones2, 1, 0)


def test_joint_examples(full2, ones2, pair11):
    r = level_value(full2, pair11, 0, Fraction(4, 25), pinned=[(ones2, Fraction(2, 5))])
    assert r.value == pytest.approx(0.381908, abs=1e-5)
    assert r.endpoint_values[0] == pytest.approx(0.6 * binary_entropy(2 / 3), abs=1e-9)
    assert r.endpoint_values[1] == pytest.approx(binary_entropy(0.4), abs=1e-9)
    r = level_value(full2, ones2, Fraction(3, 10), Fraction(7, 10), pinned=[(ones2, Fraction(1, 2))])
    assert r.empty


def test_joint_without_pins_matches_level(full2, ones2):
    q = LevelSetQuery(ones2, Fraction(1, 5), Fraction(3, 5))
    assert joint_level_value(full2, q).value == level_set_value(full2, q).value


def test_support_extremes_examples(full2, golden, ones2, pair11, golden_ones, golden_00):
    r = support_extremes(full2, pair11, ones2, Fraction(1, 2))
    assert float(r.lo) == pytest.approx(0, abs=1e-9) and float(r.hi) == pytest.approx(0.5, abs=1e-9)
    r = support_extremes(full2, ones2, ones2, Fraction(3, 10))
    assert float(r.lo) == pytest.approx(0.3, abs=1e-9) and float(r.hi) == pytest.approx(0.3, abs=1e-9)
    r = support_extremes(golden, golden_00, golden_ones, Fraction(1, 2))
    assert (r.lo, r.hi) == (0, 0)
    with pytest.raises(Infeasible):
        support_extremes(golden, golden_00, golden_ones, Fraction(3, 5))


@pytest.mark.parametrize("a", [0.1, 0.25, 0.4, 0.7])
def test_support_extremes_against_edge_algebra(full2, ones2, pair11, a):
    # circulations with x01 + x11 = a and x01 = x10 <= min(a, 1 - a)
    r = support_extremes(full2, pair11, ones2, Fraction(a))
    lo, hi = max(0.0, 2 * a - 1), a
    assert float(r.lo) == pytest.approx(lo, abs=1e-8)
    assert float(r.hi) == pytest.approx(hi, abs=1e-8)


def test_reg_irreg_examples(full2, ones2, pair11):
    r = reg_irreg_value(full2, ones2, pair11)
    assert r.value == pytest.approx(LN2, abs=1e-9)
    r = reg_irreg_value(full2, ones2, pair11, a=Fraction(1, 2))
    assert r.value == pytest.approx(0.693147, abs=1e-6)
    assert reg_irreg_value(full2, ones2, ones2).empty
    assert reg_irreg_value(full2, ones2, ones2, a=Fraction(1, 3)).empty


def test_reg_irreg_full_pressure_with_potential(full2, ones2, pair11):
    r = reg_irreg_value(full2, ones2, pair11, potential=ones2)
    assert r.value == pressure(full2, ones2)


def test_golden_mean_slices_are_rigid(golden, golden_ones, golden_00):
    # the 1-frequency a forces x01 = x10 = a and x00 = 1 - 2a
    assert slice_width(golden, golden_00, golden_ones, Fraction(1, 4)) == pytest.approx(0, abs=1e-9)
    assert reg_irreg_value(golden, golden_ones, golden_00, a=Fraction(1, 2)).empty
    assert reg_irreg_value(golden, golden_ones, golden_00).empty


def test_spectrum_curve_closed_form(full2, ones2):
    grid = [Fraction(k, 10) for k in range(1, 10)]
    pts = spectrum_curve(full2, ones2, grid)
    for p in pts:
        assert p.value == pytest.approx(binary_entropy(p.alpha), abs=1e-8)
        assert p.converged
    assert concavity_violation(pts) <= 1e-9


def test_spectrum_endpoints(full2, golden, ones2, golden_ones):
    assert spectrum_curve(full2, ones2, [0])[0].value == 0
    small = spectrum_curve(full2, ones2, [Fraction(1, 10**6)])[0].value
    assert small < 2e-5
    assert spectrum_curve(golden, golden_ones, [Fraction(1, 2)])[0].value == pytest.approx(0, abs=1e-12)


def test_golden_spectrum_is_concave(golden, golden_ones):
    grid = [Fraction(k, 100) for k in range(1, 50)]
    assert concavity_violation(spectrum_curve(golden, golden_ones, grid)) <= 1e-9


def test_concavity_detector_flags_convex_data():
    pts = [SpectrumPoint(a, a * a, 0.0, True) for a in np.linspace(0, 1, 5)]
    assert concavity_violation(pts) > 0


def test_three_symbol_level_set():
    s = full_shift(3)
    f = from_values(s, 1, {(1,): 1, (2,): 2})
    # mean 1 is attained by the uniform measure
    assert level_value(s, f, 1, 1).value == pytest.approx(math.log(3), abs=1e-9)
