"""Explicit orbits with prescribed Birkhoff liminf and limsup.

Blocks sampled from target measures are concatenated with shortest
connector words (mixing SFTs have specification with no mistakes). Block
``k + 1`` is long enough to dominate everything before it, so the running
average is dragged to within ``tol`` of the active target's integral at the
end of every block after the first. Pulling an average from ``d`` to within
``tau`` of ``c`` costs a block about ``|d - c| / tau`` times the current
length, so a horizon ``N`` only holds on the order of
``log N / log(|d - c| / tau)`` blocks.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import HorizonTooShort, InvalidInput
from .measures import AnyMeasure, EmpiricalMeasure, as_mixture, integrate, weakstar_distance
from .observables import Observable, _frac, birkhoff_stats, prefix_averages
from .systems import SymbolicSystem, connector_word, is_admissible_array

DEFAULT_GROWTH = Fraction(4)


@dataclass(frozen=True)
class GluingSchedule:
    target_measures: tuple[AnyMeasure, ...]
    block_lengths: tuple[int, ...]
    assignment: tuple[int, ...]
    growth_ratio: Fraction = DEFAULT_GROWTH
    seed: int = 0

    def __post_init__(self):
        ratio = _frac(self.growth_ratio)
        if ratio <= 1:
            raise InvalidInput("growth_ratio must exceed 1")
        lengths = tuple(int(x) for x in self.block_lengths)
        if not lengths or lengths[0] < 1:
            raise InvalidInput("need at least one positive block length")
        total = 0
        for k, n in enumerate(lengths):
            if k and n < ratio * total:
                raise InvalidInput(f"block {k} of length {n} violates N_k+1 >= ratio * sum N_j")
            total += n
        if len(self.assignment) != len(lengths):
            raise InvalidInput("assignment needs one target index per block")
        if any(not 0 <= i < len(self.target_measures) for i in self.assignment):
            raise InvalidInput("assignment refers to a missing target")
        object.__setattr__(self, "growth_ratio", ratio)
        object.__setattr__(self, "block_lengths", lengths)
        object.__setattr__(self, "assignment", tuple(int(i) for i in self.assignment))

    @property
    def block_ends(self) -> list[int]:
        return list(np.cumsum(self.block_lengths))


def plan_schedule(
    targets: Sequence[AnyMeasure],
    f: Observable,
    total_length: int,
    tol: float = 0.01,
    growth_ratio=DEFAULT_GROWTH,
    first_block: int = 16,
    seed: int = 0,
) -> GluingSchedule:
    """Block lengths that bring the running ``f``-average within ``tol / 2``
    of each target integral in turn (targets alternate cyclically)."""
    ratio = _frac(growth_ratio)
    aims = [integrate(t, f) for t in targets]
    tau = tol / 2
    lengths = [first_block]
    assignment = [0]
    prefix, avg = first_block, aims[0]
    k = 1
    while prefix < total_length:
        i = k % len(targets)
        need = prefix * (abs(avg - aims[i]) / tau - 1)
        n = max(math.ceil(ratio * prefix), math.ceil(need), 1)
        lengths.append(n)
        assignment.append(i)
        avg = (avg * prefix + aims[i] * n) / (prefix + n)
        prefix += n
        k += 1
    return GluingSchedule(tuple(targets), tuple(lengths), tuple(assignment), ratio, seed)


def _sampler(m: AnyMeasure):
    mix = as_mixture(m)
    comps = []
    for w, c in mix.components:
        cum = [list(np.cumsum(row)) for row in c.transition]
        start = list(np.cumsum(c.stationary))
        det = [int(np.argmax(row)) if np.count_nonzero(row) == 1 else -1 for row in c.transition]
        comps.append((w, cum, start, det))
    return comps


def _sample_block(comps, length: int, rng: np.random.Generator) -> list[int]:
    weights = np.array([w for w, *_ in comps])
    _, cum, start, det = comps[int(rng.choice(len(comps), p=weights / weights.sum()))]
    u = rng.random(length).tolist()
    last = len(start) - 1
    s = min(bisect.bisect_right(start, u[0]), last)
    out = [s]
    append = out.append
    for x in u[1:]:
        d = det[s]
        s = d if d >= 0 else min(bisect.bisect_right(cum[s], x), last)
        append(s)
    return out


def glue_blocks(system: SymbolicSystem, schedule: GluingSchedule, total_length: int) -> tuple[np.ndarray, list[int]]:
    """Glued word of length ``total_length`` plus the position where each block ends."""
    if not system.is_markov:
        raise InvalidInput("gluing needs an sft or full shift")
    for t in schedule.target_measures:
        for _, c in as_mixture(t).components:
            if not c.respects(system):
                raise InvalidInput("a target measure charges a forbidden transition")
    rng = np.random.default_rng(schedule.seed)
    samplers = [_sampler(t) for t in schedule.target_measures]
    out: list[int] = []
    ends: list[int] = []
    for length, target in zip(schedule.block_lengths, schedule.assignment):
        if len(out) >= total_length:
            break
        block = _sample_block(samplers[target], min(length, total_length - len(out)), rng)
        if out:
            out.extend(connector_word(system, out[-1], block[0]))
        out.extend(block)
        ends.append(min(len(out), total_length))
    word = np.array(out[:total_length], dtype=np.int8)
    if not is_admissible_array(system, word):
        raise AssertionError("glued word is not admissible")
    return word, ends


def glue_orbit(system: SymbolicSystem, schedule: GluingSchedule, total_length: int) -> np.ndarray:
    """Admissible word of length ``total_length`` following the schedule.

    Deterministic given the schedule (its seed drives a PCG64 generator).
    """
    return glue_blocks(system, schedule, total_length)[0]


def default_checkpoints(nwin: int, ratio: float = 1.001) -> list[int]:
    """Geometric grid of window counts from 1 to ``nwin`` (always ending at ``nwin``)."""
    steps = int(math.log(nwin) / math.log(ratio)) + 1
    grid = np.unique(np.round(ratio ** np.arange(steps + 1)).astype(np.int64))
    grid = grid[(grid >= 1) & (grid <= nwin)].tolist()
    if grid[-1] != nwin:
        grid.append(nwin)
    return grid


@dataclass(frozen=True)
class OscillationReport:
    liminf_estimate: float
    limsup_estimate: float
    c: float
    d: float
    tol: float
    passed: bool
    checkpoints: int


def verify_oscillation(
    w,
    f: Observable,
    c,
    d,
    tol: float,
    checkpoints: Sequence[int] | None = None,
    burn_in_fraction: float = 0.1,
    min_length: int = 1000,
) -> OscillationReport:
    """Compare tail min/max of running averages with ``(c, d)``."""
    nwin = len(w) - f.depth + 1
    if nwin < min_length:
        raise HorizonTooShort(f"{nwin} windows; need at least {min_length}")
    cps = list(checkpoints) if checkpoints is not None else default_checkpoints(nwin)
    stats = birkhoff_stats(w, f, cps, burn_in_fraction)
    c, d = float(_frac(c)), float(_frac(d))
    ok = abs(stats.liminf_estimate - c) <= tol and abs(stats.limsup_estimate - d) <= tol
    return OscillationReport(stats.liminf_estimate, stats.limsup_estimate, c, d, tol, ok, len(cps))


def block_end_averages(w, f: Observable, ends: Sequence[int]) -> list[float]:
    """Running average of ``f`` at each block end returned by :func:`glue_blocks`."""
    avgs = prefix_averages(w, f)
    return [float(avgs[e - f.depth]) for e in ends if f.depth <= e <= len(w)]


def estimate_limit_set(w, depth: int, sample_times: Sequence[int], radius: float = 0.05, alphabet_size=None):
    """Empirical measures at ``sample_times`` merged into clusters of weak*
    radius ``radius``; returns one representative per cluster."""
    arr = np.asarray(w, dtype=np.int64)
    a = int(alphabet_size if alphabet_size is not None else arr.max() + 1)
    n = arr.size
    codes = np.zeros(n - depth + 1, dtype=np.int64)
    for j in range(depth):
        codes = codes * a + arr[j : n - depth + 1 + j]
    reps: list[EmpiricalMeasure] = []
    for t in sample_times:
        t = int(t)
        if t < depth or t > n:
            raise InvalidInput(f"sample time {t} outside [{depth}, {n}]")
        bins = np.bincount(codes[: t - depth + 1], minlength=a**depth)
        freqs = {}
        for code in np.flatnonzero(bins):
            word, cc = [], int(code)
            for _ in range(depth):
                word.append(cc % a)
                cc //= a
            freqs[tuple(reversed(word))] = bins[code] / (t - depth + 1)
        em = EmpiricalMeasure(depth, a, freqs)
        if not any(weakstar_distance(em, r) < radius for r in reps):
            reps.append(em)
    return reps
