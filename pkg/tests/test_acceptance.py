"""The twelve acceptance criteria, one test each.

Every test prints a single ``[AC n] PASS|FAIL`` line (visible even under
output capture) before asserting, so a plain ``pytest`` run doubles as the
acceptance report.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from birkhoff_levels.errors import InvalidInput
from birkhoff_levels.gluer import glue_orbit, plan_schedule, verify_oscillation
from birkhoff_levels.measures import EmpiricalMeasure, bernoulli, periodic_orbit, weakstar_distance, weakstar_family
from birkhoff_levels.observables import combine, constant, from_values, indicator, symbol_indicator
from birkhoff_levels.oracle import Window, count_separated, count_words, level_growth, log_weighted_count
from birkhoff_levels.spectra import concavity_violation, level_value, reg_irreg_value, spectrum_curve
from birkhoff_levels.suspension import flow_entropy_at, suspension_level_value
from birkhoff_levels.systems import beta_shift, full_shift, golden_mean, higher_block_recode, sft
from birkhoff_levels.thermo import average_range, constrained_value, evaluate_pressure, pressure

from reference import binary_entropy, cycle_range

LN2 = math.log(2)
N_ORACLE = 2000


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, seconds=None, limit=None):
        timing = ""
        if seconds is not None:
            timing = f" [{seconds:.2f} s" + (f" / limit {limit} s]" if limit else "]")
            if limit is not None:
                ok = ok and seconds < limit
        with capsys.disabled():
            print(f"\n[AC {n:2d}] {'PASS' if ok else 'FAIL'} {detail}{timing}")
        assert ok, detail

    return emit


def test_ac01_closed_form_pressure(report):
    t0 = time.perf_counter()
    s = full_shift(2)
    ones = symbol_indicator(s, 1)
    errs = []
    for k in range(-10, 11):
        q = Fraction(k, 2)
        errs.append(abs(pressure(s, ones * q) - math.log(1 + math.exp(q))))
    dt = time.perf_counter() - t0
    report(1, max(errs) <= 1e-10, f"pressure vs ln(1+e^q): max error {max(errs):.2e}", dt, 1)


def test_ac02_closed_form_spectrum(report):
    t0 = time.perf_counter()
    s = full_shift(2)
    ones = symbol_indicator(s, 1)
    errs = []
    for k in range(1, 20):
        a = Fraction(k, 20)
        errs.append(abs(constrained_value(s, [(ones, a)]).value - binary_entropy(float(a))))
    dt = time.perf_counter() - t0
    report(2, max(errs) <= 1e-8, f"spectrum vs H(alpha): max error {max(errs):.2e}", dt, 5)


def test_ac03_min_formula_and_oracle(report):
    t0 = time.perf_counter()
    s = full_shift(2)
    ones = symbol_indicator(s, 1)
    c, d = Fraction(1, 4), Fraction(1, 2)
    r = level_value(s, ones, c, d)
    half = Fraction(1, 50)
    grow = [level_growth(s, ones, x - half, x + half, N_ORACLE) for x in (c, d)]
    gaps = [abs(g - v) for g, v in zip(grow, r.endpoint_values)]
    dt = time.perf_counter() - t0
    ok = abs(r.value - 0.562335) <= 1e-6 and max(gaps) <= 0.02
    report(3, ok, f"value {r.value:.7f}; oracle endpoint gaps {gaps[0]:.4f}, {gaps[1]:.4f}", dt, 30)


def test_ac04_joint_formula(report):
    t0 = time.perf_counter()
    s = full_shift(2)
    ones, pair = symbol_indicator(s, 1), indicator(s, "11")
    a = Fraction(2, 5)
    r = level_value(s, pair, 0, Fraction(4, 25), pinned=[(ones, a)])
    # narrow windows: both averages pinned to within 1/1000
    w = Fraction(1, 1000)
    gaps = []
    for xi, v in zip((Fraction(0), Fraction(4, 25)), r.endpoint_values):
        g = log_weighted_count(s, [ones, pair], [Window(0, a - w, a + w), Window(1, max(xi - w, 0), xi + w)], N_ORACLE)
        gaps.append(abs(g / N_ORACLE - v))
    dt = time.perf_counter() - t0
    ok = abs(r.value - 0.381908) <= 1e-5 and max(gaps) <= 0.02
    report(4, ok, f"value {r.value:.7f}; oracle endpoint gaps {gaps[0]:.4f}, {gaps[1]:.4f}", dt, 60)


def test_ac05_dichotomy(report):
    s = full_shift(2)
    ones, pair = symbol_indicator(s, 1), indicator(s, "11")
    same = reg_irreg_value(s, ones, ones)
    full = reg_irreg_value(s, ones, pair)
    half = reg_irreg_value(s, ones, pair, a=Fraction(1, 2))
    # 0.693147 is ln 2 to six places; the 1e-8 band is applied to ln 2 itself
    ok = same.empty and abs(full.value - LN2) <= 1e-9 and abs(half.value - LN2) <= 1e-8
    report(5, ok, f"phi2=phi1 empty={same.empty}; no a {full.value:.10f}; a=1/2 {half.value:.10f}")


def test_ac06_pressure_forms(report):
    s = full_shift(2)
    ones = symbol_indicator(s, 1)
    r = level_value(s, ones, Fraction(1, 2), Fraction(1, 2), potential=ones)
    whole = log_weighted_count(s, [ones], [Window(0, 0, 1)], N_ORACLE, ones) / N_ORACLE
    # 1.193147 is H(1/2) + 1/2 = ln 2 + 1/2 to six places
    ok = abs(r.value - (LN2 + 0.5)) <= 1e-8 and abs(whole - math.log(1 + math.e)) <= 0.01
    report(6, ok, f"level pressure {r.value:.10f}; weighted count {whole:.6f}")


def test_ac07_suspension(report):
    s = full_shift(2)
    ones = symbol_indicator(s, 1)
    battery = [(0, 0), (Fraction(1, 4), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2)),
               (Fraction(1, 10), Fraction(9, 10)), (Fraction(2, 3), 1)]
    errs = []
    for c, d in battery:
        base = level_value(s, ones, c, d)
        flow = suspension_level_value(s, ones, constant(s, 1), c, d)
        errs.append(0.0 if base.empty and flow.empty else abs(flow.value - base.value))
    roof = combine([(1, constant(s, 1)), (1, ones)])
    r = suspension_level_value(s, ones, roof, Fraction(1, 3), Fraction(1, 3))
    _, _, residual = flow_entropy_at(s, ones, roof, Fraction(1, 3))
    ok = max(errs) <= 1e-9 and abs(r.value - 0.462098) <= 1e-6 and abs(residual) <= 1e-8
    report(7, ok, f"roof=1 max gap {max(errs):.1e}; flow value {r.value:.7f}; residual {abs(residual):.1e}")


@pytest.mark.parametrize(
    "name,c,d",
    [("full2", 0, 1), ("golden", 0, Fraction(1, 2))],
)
def test_ac08_gluing(report, name, c, d):
    t0 = time.perf_counter()
    system = full_shift(2) if name == "full2" else golden_mean()
    f = symbol_indicator(system, 1)
    targets = [periodic_orbit((0,), 2), periodic_orbit((1,), 2) if name == "full2" else periodic_orbit((0, 1), 2)]
    n = 10**6
    w = glue_orbit(system, plan_schedule(targets, f, n, tol=0.01, seed=0), n)
    rep = verify_oscillation(w, f, c, d, 0.01)
    dt = time.perf_counter() - t0
    detail = f"{name} (c,d)=({c},{d}): liminf {rep.liminf_estimate:.4f}, limsup {rep.limsup_estimate:.4f}"
    report(8, rep.passed, detail, dt, 10)


def _random_primitive(rng, k):
    while True:
        a = rng.random((k, k)) < 0.5
        try:
            return sft(k, [(i, j) for i in range(k) for j in range(k) if a[i, j]])
        except InvalidInput:
            continue


def test_ac09_karp_vs_enumeration(report):
    rng = np.random.default_rng(2024)
    bad = 0
    for _ in range(100):
        s = _random_primitive(rng, int(rng.integers(1, 7)))
        vals = {e: Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8))) for e in s.edges()}
        f = from_values(s, 2, vals)
        r = average_range(s, f)
        edges = s.edges()
        if (r.lo, r.hi) != cycle_range(s.alphabet_size, edges, [f(e) for e in edges]):
            bad += 1
    report(9, bad == 0, f"{100 - bad}/100 random digraphs exact")


def test_ac10_separated_growth(report):
    t0 = time.perf_counter()
    s = full_shift(2)
    rates = {}
    for n in range(10, 19):
        r = count_separated(s, bernoulli([0.5, 0.5]), 0.1, 1 / n, n)
        rates[n] = math.log2(r.count) / n
    dt = time.perf_counter() - t0
    worst = min(rates.values())
    report(10, worst >= 1 - 0.25, f"min (1/n) log2 N over n=10..18: {worst:.4f} (need >= 0.75)", dt, 60)


def test_ac11_cross_model(report):
    g = golden_mean()
    beta = beta_shift([1, 0] * 10, 20)
    beta_ok = all(count_words(beta, n) == count_words(g, n) for n in range(1, 21))
    recode_ok = True
    for system in (full_shift(2), g):
        for k in (2, 3):
            r, _ = higher_block_recode(system, k)
            recode_ok &= all(count_words(r, n - k + 2) == count_words(system, n) for n in range(k - 1, 21))
    report(11, beta_ok and recode_ok, f"beta = golden counts n<=20: {beta_ok}; recoding k=2,3: {recode_ok}")


def test_ac12_numerical_hygiene(report):
    s = full_shift(2)
    obs = [symbol_indicator(s, 1), indicator(s, "11")]
    grad_err = 0.0
    h = 1e-6
    for q1 in np.linspace(-3, 3, 7):
        for q2 in np.linspace(-3, 3, 7):
            ev = evaluate_pressure(s, obs, [q1, q2])
            for i in range(2):
                up, dn = [q1, q2], [q1, q2]
                up[i] += h
                dn[i] -= h
                fd = (evaluate_pressure(s, obs, up).pressure - evaluate_pressure(s, obs, dn).pressure) / (2 * h)
                grad_err = max(grad_err, abs(fd - ev.gradient[i]))

    grid = [Fraction(k, 40) for k in range(1, 40)]
    concave = max(
        concavity_violation(spectrum_curve(s, obs[0], grid)),
        concavity_violation(spectrum_curve(golden_mean(), symbol_indicator(golden_mean(), 1), [x / 2 for x in grid])),
    )

    rng = np.random.default_rng(12)
    words = [w for w in weakstar_family(2, 2) if len(w) == 2]
    vecs = rng.dirichlet(np.ones(4), size=1000)
    ms = [EmpiricalMeasure(2, 2, dict(zip(words, v))) for v in vecs]
    axioms = True
    for i in range(1000):
        p, q, r = ms[i], ms[(i + 1) % 1000], ms[(i + 2) % 1000]
        dpq, dqp = weakstar_distance(p, q), weakstar_distance(q, p)
        axioms &= weakstar_distance(p, p) == 0 and abs(dpq - dqp) <= 1e-15 and dpq > 0
        axioms &= weakstar_distance(p, r) <= dpq + weakstar_distance(q, r) + 1e-12
    ok = grad_err <= 1e-6 and concave <= 1e-9 and axioms
    report(12, ok, f"gradient vs FD {grad_err:.1e}; concavity violation {concave:.1e}; metric axioms {axioms}")
