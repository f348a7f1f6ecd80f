import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from birkhoff_levels import fileio
from birkhoff_levels.errors import InvalidInput
from birkhoff_levels.gluer import GluingSchedule
from birkhoff_levels.measures import bernoulli, convex_combine, periodic_orbit
from birkhoff_levels.oracle import count_words
from birkhoff_levels.systems import beta_shift, golden_mean, sft

DATA = Path(__file__).resolve().parents[1] / "data"


def test_bundled_files_load():
    full2 = fileio.load_system(DATA / "full2.sys")
    golden = fileio.load_system(DATA / "golden.sys")
    beta = fileio.load_system(DATA / "golden_beta.sys")
    assert count_words(full2, 5) == 32
    assert count_words(golden, 4) == count_words(beta, 4) == 8
    assert fileio.load_observable(full2, DATA / "pair11.obs")((1, 1)) == 1
    roof = fileio.load_roof(full2, DATA / "roof.obs")
    assert roof.min_value == 1
    sched = fileio.load_schedule(DATA / "full2_01.sched")
    assert sched["N"] == 10**6 and sched["growth_ratio"] == 4 and "schedule" not in sched


@pytest.mark.parametrize("system", [golden_mean(), sft(3, [(0, 1), (1, 2), (2, 0), (2, 2)]), beta_shift([1, 1, 0, 1], 4)])
def test_system_round_trip(tmp_path, system):
    p = tmp_path / "s.sys"
    fileio.save_system(p, system)
    assert fileio.load_system(p) == system


def test_observable_and_measure_round_trip(tmp_path, full2, pair11):
    f = pair11 * Fraction(2, 3)
    fileio.save_observable(tmp_path / "f.obs", f)
    assert fileio.load_observable(full2, tmp_path / "f.obs") == f
    m = convex_combine([bernoulli([0.25, 0.75]), periodic_orbit((0, 1), 2)], [0.5, 0.5])
    fileio.save_measure(tmp_path / "m.msr", m)
    back = fileio.load_measure(tmp_path / "m.msr")
    assert back.weights == m.weights


def test_schedule_round_trip(tmp_path):
    targets = (periodic_orbit((0,), 2), periodic_orbit((1,), 2))
    for k, t in enumerate(targets):
        fileio.save_measure(tmp_path / f"t{k}.msr", t)
    s = GluingSchedule(targets, (8, 40, 200), (0, 1, 0), Fraction(4), 9)
    fileio.save_schedule(tmp_path / "s.sched", s, ["t0.msr", "t1.msr"], 248)
    back = fileio.load_schedule(tmp_path / "s.sched")
    assert back["schedule"].block_lengths == s.block_lengths
    assert back["schedule"].assignment == s.assignment
    assert back["seed"] == 9 and back["N"] == 248


@pytest.mark.parametrize("word", [np.array([0, 1, 1, 0, 2]), np.array([3, 11, 0, 10])])
def test_word_round_trip(tmp_path, word):
    fileio.save_word(tmp_path / "w.txt", word)
    assert np.array_equal(fileio.load_word(tmp_path / "w.txt"), word)


def test_bad_files(tmp_path):
    with pytest.raises(InvalidInput):
        fileio.load_system(tmp_path / "missing.sys")
    (tmp_path / "bad.sys").write_text("{not json")
    with pytest.raises(InvalidInput):
        fileio.load_system(tmp_path / "bad.sys")
    (tmp_path / "bad.sched").write_text(json.dumps({"targets": []}))
    with pytest.raises(InvalidInput):
        fileio.load_schedule(tmp_path / "bad.sched")
    (tmp_path / "w.txt").write_text("01x1")
    with pytest.raises(InvalidInput):
        fileio.load_word(tmp_path / "w.txt")
    with pytest.raises(InvalidInput):
        fileio.digest(tmp_path / "missing")
