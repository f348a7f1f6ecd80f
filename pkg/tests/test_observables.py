from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from birkhoff_levels.errors import BadCheckpoints, DepthMismatch, WordTooShort
from birkhoff_levels.observables import (
    birkhoff_average,
    birkhoff_stats,
    birkhoff_sum,
    combine,
    constant,
    from_values,
    indicator,
    observable_from_dict,
    observable_to_dict,
    prefix_averages,
    symbol_indicator,
    window_values,
)
from birkhoff_levels.systems import full_shift, golden_mean

from reference import brute_average

binary_words = st.lists(st.integers(0, 1), min_size=3, max_size=60)
values2 = st.dictionaries(
    st.tuples(st.integers(0, 1), st.integers(0, 1)),
    st.fractions(min_value=-5, max_value=5, max_denominator=12),
    min_size=4,
    max_size=4,
)


def test_average_examples(full2, ones2, pair11):
    assert birkhoff_average((0, 1, 0, 1), ones2) == Fraction(1, 2)
    assert birkhoff_average((0, 0, 0, 0), ones2) == 0
    assert birkhoff_average((0, 1, 1, 0), pair11) == Fraction(1, 3)


def test_too_short(pair11):
    with pytest.raises(WordTooShort):
        birkhoff_average((1,), pair11)


@given(binary_words, values2)
def test_average_matches_brute_force(w, vals):
    f = from_values(full_shift(2), 2, vals)
    assert birkhoff_average(w, f) == brute_average(w, vals, 2)


@given(binary_words, values2, st.fractions(min_value=-3, max_value=3, max_denominator=7))
def test_scaling_is_exact(w, vals, c):
    f = from_values(full_shift(2), 2, vals)
    assert birkhoff_average(w, f * c) == c * birkhoff_average(w, f)


@given(binary_words, values2)
def test_average_within_value_bounds(w, vals):
    f = from_values(full_shift(2), 2, vals)
    assert f.min_value <= birkhoff_average(w, f) <= f.max_value


@given(binary_words, values2)
def test_shift_relation(w, vals):
    f = from_values(full_shift(2), 2, vals)
    assert abs(birkhoff_sum(w, f) - birkhoff_sum(w[1:], f)) <= f.sup_norm


@given(binary_words, values2)
def test_numpy_paths_agree_with_exact(w, vals):
    f = from_values(full_shift(2), 2, vals)
    avgs = prefix_averages(w, f)
    assert avgs[-1] == pytest.approx(float(birkhoff_average(w, f)), abs=1e-12)
    assert window_values(w, f).size == len(w) - 1


def test_stats_periodic(ones2):
    w = (0, 1) * 500
    s = birkhoff_stats(w, ones2, list(range(100, 1001)))
    assert abs(s.liminf_estimate - 0.5) <= 0.01 and abs(s.limsup_estimate - 0.5) <= 0.01
    assert s.liminf_estimate <= s.limsup_estimate


def test_stats_constant(ones2):
    s = birkhoff_stats((0,) * 1000, ones2, [10, 100, 1000])
    assert s.liminf_estimate == s.limsup_estimate == 0


def test_stats_burn_in_discards_prefix(ones2):
    w = (1,) * 10 + (0,) * 990
    cps = list(range(1, 1001))
    s = birkhoff_stats(w, ones2, cps, burn_in_fraction=0.1)
    assert s.burn_in == 100
    assert s.limsup_estimate == pytest.approx(10 / 101)


def test_bad_checkpoints(ones2):
    with pytest.raises(BadCheckpoints):
        birkhoff_stats((0, 1) * 5, ones2, [5, 3])
    with pytest.raises(BadCheckpoints):
        birkhoff_stats((0, 1) * 5, ones2, [11])


def test_combine_lifts_to_deepest(full2, ones2, pair11):
    g = combine([(1, ones2), (Fraction(-1, 2), pair11)])
    assert g.depth == 2
    assert g((0, 1)) == 1 and g((1, 1)) == Fraction(1, 2) and g((1, 0)) == 0


def test_constant_and_shift(full2, ones2):
    assert constant(full2, 3)((1,)) == 3
    assert ones2.shift(-1)((1,)) == 0


def test_indicator_on_golden_mean_skips_forbidden_word():
    g = golden_mean()
    f = indicator(g, "00")
    assert set(f.values) == {(0, 0), (0, 1), (1, 0)}


def test_denominator(full2):
    f = from_values(full2, 1, {(0,): Fraction(1, 4), (1,): Fraction(5, 6)})
    assert f.denominator == 12


def test_file_round_trip(full2, pair11):
    g = pair11 * Fraction(3, 7)
    assert observable_from_dict(full2, observable_to_dict(g)) == g


def test_file_depth_mismatch(full2):
    with pytest.raises(DepthMismatch):
        observable_from_dict(full2, {"depth": 2, "values": [["0", 1, 1]]})


def test_window_values_vectorised_long_word(ones2):
    w = np.random.default_rng(1).integers(0, 2, 10_000)
    assert window_values(w, ones2).sum() == w.sum()
    assert symbol_indicator(full_shift(3), 2)((2,)) == 1
