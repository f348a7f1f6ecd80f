"""Brute-force ground truth by counting words.

On a shift space with epsilon in (1/2, 1), Bowen balls of length ``n`` are
``n``-cylinders and epsilon-separation at time ``j`` is disagreement of the
``j``-th symbols. Entropy and pressure of Birkhoff level sets therefore
reduce to growth rates of (weighted) counts of words whose Birkhoff sums lie
in a window, which this module computes by dynamic programming over
(context, lattice sum) states.

Single-observable counts are exact: the lattice polynomial of every context
is packed into one Python integer (``B`` bits per coefficient), so a DP step
is a handful of big-integer shifts and additions. Multi-observable and
weighted counts run in floating point with per-step log rescaling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateWindow, ExhaustiveTooLarge, InvalidInput, WordTooLong, WordTooShort
from .graphs import EdgeModel, edge_model
from .measures import EmpiricalMeasure, cylinder_marginal
from .observables import Observable, _frac
from .systems import SymbolicSystem, beta_automaton, iter_words

EXHAUSTIVE_MAX_N = 20
CLIQUE_MAX_VERTICES = 4096


def count_words(system: SymbolicSystem, n: int) -> int:
    """Exact number of admissible words of length ``n``."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    if n == 0:
        return 1
    if system.kind == "beta":
        if n > system.expansion_depth:
            raise WordTooLong(f"n = {n} exceeds expansion_depth {system.expansion_depth}")
        table = beta_automaton(system)
        state = {0: 1}
        for _ in range(n):
            nxt: dict[int, int] = {}
            for k, c in state.items():
                for k2 in table[k].values():
                    nxt[k2] = nxt.get(k2, 0) + c
            state = nxt
        return sum(state.values())
    a = [[int(x) for x in row] for row in system.matrix]
    vec = [1] * system.alphabet_size
    for _ in range(n - 1):
        vec = [sum(vec[i] for i in range(len(vec)) if a[i][j]) for j in range(len(vec))]
    return sum(vec)


@dataclass(frozen=True)
class CountTable:
    """Exact counts of ``n``-words by final context and scaled Birkhoff sum.

    ``packed[v]`` holds ``sum_s count(v, s) * 2**(bits * (s - offset))``;
    scaled sums are ``D`` times the Birkhoff sum over the ``n - k + 1``
    windows of the observable.
    """

    n: int
    denominator: int
    windows: int
    offset: int
    bits: int
    packed: tuple[int, ...]
    contexts: tuple[tuple[int, ...], ...]

    def coefficients(self, v: int) -> dict[int, int]:
        x = self.packed[v]
        if x == 0:
            return {}
        nbytes = self.bits // 8
        raw = x.to_bytes((x.bit_length() + 7) // 8 + nbytes, "little")
        out = {}
        for i in range(0, len(raw), nbytes):
            c = int.from_bytes(raw[i : i + nbytes], "little")
            if c:
                out[self.offset + i // nbytes] = c
        return out

    def cells(self) -> dict[tuple[tuple[int, ...], int], int]:
        return {(self.contexts[v], s): c for v in range(len(self.packed)) for s, c in self.coefficients(v).items()}

    def total(self) -> int:
        return sum(c for v in range(len(self.packed)) for c in self.coefficients(v).values())

    def count_between(self, lo: int, hi: int) -> int:
        """Words with scaled sum in ``[lo, hi]`` (integers)."""
        a, b = max(lo, self.offset), hi
        if a > b:
            return 0
        nbytes = self.bits // 8
        total = 0
        for x in self.packed:
            x >>= self.bits * (a - self.offset)
            x &= (1 << (self.bits * (b - a + 1))) - 1
            if not x:
                continue
            raw = x.to_bytes((x.bit_length() + 7) // 8 + nbytes, "little")
            for i in range(0, len(raw), nbytes):
                total += int.from_bytes(raw[i : i + nbytes], "little")
        return total


def _scaled_model(system: SymbolicSystem, f: Observable):
    model = edge_model(system, max(2, f.depth))
    d = f.denominator
    init = [int(v * d) for v in model.initial_values(f)]
    edge = [int(v * d) for v in model.edge_values(f)]
    return model, d, init, edge


def count_table(system: SymbolicSystem, f: Observable, n: int, cap: int | None = None) -> CountTable:
    """Exact DP table; sums above ``cap`` (scaled) are discarded when given."""
    if not system.is_markov:
        raise InvalidInput("level counting needs an sft or full shift")
    if n < f.depth:
        raise WordTooShort(f"n = {n} shorter than observable depth {f.depth}")
    model, d, init, edge = _scaled_model(system, f)
    k = model.depth
    steps = n - (k - 1)
    if steps < 0:
        # words shorter than a vertex: enumerate directly
        raise WordTooShort(f"n = {n} below model depth {k - 1}")
    imin, wmin = min(init), min(edge)
    offset = imin + steps * wmin
    bits = 8 * ((int(math.ceil(n * math.log2(max(2, system.alphabet_size)))) + 2 + 7) // 8)
    mask = None
    if cap is not None:
        if cap < offset:
            return CountTable(n, d, n - f.depth + 1, offset, bits, tuple(0 for _ in model.nodes), model.nodes)
    state = [1 << (bits * (init[v] - imin)) for v in range(model.n_nodes)]
    incoming: list[list[tuple[int, int]]] = [[] for _ in range(model.n_nodes)]
    for e, (u, v) in enumerate(model.edges):
        incoming[v].append((u, bits * (edge[e] - wmin)))
    if cap is not None:
        # shifted partial sums only grow, so anything above cap is dead
        mask = (1 << (bits * (cap - offset + 1))) - 1
    for _ in range(steps):
        new = []
        for v in range(model.n_nodes):
            acc = 0
            for u, sh in incoming[v]:
                acc += state[u] << sh
            if mask is not None:
                acc &= mask
            new.append(acc)
        state = new
    return CountTable(n, d, n - f.depth + 1, offset, bits, tuple(state), model.nodes)


def _window(f: Observable, lo, hi, windows: int) -> tuple[int, int]:
    lo, hi = _frac(lo), _frac(hi)
    d = f.denominator
    a = math.ceil(d * windows * lo)
    b = math.floor(d * windows * hi)
    if a > b:
        raise DegenerateWindow(f"window [{lo}, {hi}] holds no lattice point at {windows} windows")
    return a, b


def count_level_words(system: SymbolicSystem, f: Observable, lo, hi, n: int) -> int:
    """Exact number of admissible ``n``-words with Birkhoff average in ``[lo, hi]``.

    The average runs over the ``n - k + 1`` full windows of the depth-``k``
    observable, so the scaled sum must lie in
    ``[ceil(D m lo), floor(D m hi)]`` with ``m = n - k + 1``.
    """
    m = n - f.depth + 1
    a, b = _window(f, lo, hi, m)
    return count_table(system, f, n, cap=b).count_between(a, b)


def level_growth(system, f, lo, hi, n) -> float:
    """``(1/n) ln count_level_words``."""
    c = count_level_words(system, f, lo, hi, n)
    return math.log(c) / n if c else -math.inf


@dataclass(frozen=True)
class Window:
    """Constraint ``lo <= average of observable over the first t symbols <= hi``."""

    observable: int
    lo: Fraction
    hi: Fraction
    time: int | None = None


def _shift_sat(arr: np.ndarray, axis: int, w: int) -> np.ndarray:
    """Shift along ``axis`` by ``w >= 0``; the last cell is a saturating overflow bin."""
    if w == 0:
        return arr
    out = np.zeros_like(arr)
    size = arr.shape[axis]
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if w < size - 1:
        src[axis] = slice(0, size - 1 - w)
        dst[axis] = slice(w, size - 1)
        out[tuple(dst)] = arr[tuple(src)]
    src[axis] = slice(max(0, size - 1 - w), size)
    dst[axis] = slice(size - 1, size)
    out[tuple(dst)] = arr[tuple(src)].sum(axis=axis, keepdims=True)
    return out


def log_weighted_count(
    system: SymbolicSystem,
    observables: Sequence[Observable],
    windows: Sequence[Window],
    n: int,
    potential: Observable | None = None,
) -> float:
    """``ln sum exp(S_n potential(w))`` over admissible ``n``-words satisfying every window.

    Windows with ``time = t`` test the average over the full windows inside
    the first ``t`` symbols. Floating point with per-step rescaling.
    """
    obs = list(observables)
    pots = [potential] if potential is not None else []
    depth = max([2] + [f.depth for f in obs + pots])
    model = edge_model(system, depth)
    k = model.depth
    steps = n - (k - 1)
    if steps < 0 or any(n < f.depth for f in obs):
        raise WordTooShort("n shorter than the observables")
    scaled = []
    for f in obs:
        dd = f.denominator
        init = [int(v * dd) for v in model.initial_values(f)]
        edge = [int(v * dd) for v in model.edge_values(f)]
        scaled.append((dd, init, edge, min(init), min(edge)))

    # lattice bounds per observable (shifted sums) and window tests per time
    tests: dict[int, list[tuple[int, int, int]]] = {}
    caps = [0] * len(obs)
    for wdw in windows:
        t = n if wdw.time is None else int(wdw.time)
        if t < k - 1 or t > n:
            raise InvalidInput(f"window time {t} outside [{k - 1}, {n}]")
        f = obs[wdw.observable]
        dd, init, edge, imin, wmin = scaled[wdw.observable]
        m = t - f.depth + 1
        a, b = _window(f, wdw.lo, wdw.hi, m)
        shift = imin + (t - (k - 1)) * wmin
        a, b = a - shift, b - shift
        if b < 0:
            return -math.inf
        tests.setdefault(t, []).append((wdw.observable, max(a, 0), b))
        caps[wdw.observable] = max(caps[wdw.observable], b)
    shape = (model.n_nodes,) + tuple(c + 2 for c in caps)

    pot_init = np.zeros(model.n_nodes)
    pot_edge = np.zeros(len(model.edges))
    if potential is not None:
        pot_init = np.array([float(v) for v in model.initial_values(potential)])
        pot_edge = model.edge_array(potential)

    state = np.zeros(shape)
    for v in range(model.n_nodes):
        idx = [v]
        for j, (dd, init, edge, imin, wmin) in enumerate(scaled):
            idx.append(min(init[v] - imin, shape[j + 1] - 1))
        state[tuple(idx)] = math.exp(pot_init[v] - pot_init.max())
    log_scale = float(pot_init.max())

    def apply_tests(st, t):
        for j, a, b in tests.get(t, ()):
            sl = [slice(None)] * st.ndim
            keep = np.zeros(shape[j + 1], dtype=bool)
            keep[a : min(b, shape[j + 1] - 2) + 1] = True
            mask_shape = [1] * st.ndim
            mask_shape[j + 1] = shape[j + 1]
            st = st * keep.reshape(mask_shape)
        return st

    state = apply_tests(state, k - 1)
    weights = np.exp(pot_edge - pot_edge.max()) if len(pot_edge) else pot_edge
    pmax = float(pot_edge.max()) if len(pot_edge) else 0.0
    for step in range(steps):
        new = np.zeros(shape)
        for e, (u, v) in enumerate(model.edges):
            block = state[u]
            for j, (dd, init, edge, imin, wmin) in enumerate(scaled):
                block = _shift_sat(block, j, edge[e] - wmin)
            new[v] += weights[e] * block
        log_scale += pmax
        total = new.max()
        if total <= 0:
            return -math.inf
        new /= total
        log_scale += math.log(total)
        state = apply_tests(new, step + k)
    s = state.sum()
    return log_scale + math.log(s) if s > 0 else -math.inf


def joint_growth(system, constraints: Sequence[tuple[Observable, object, object]], n: int) -> float:
    """``(1/n) ln #{n-words : lo_i <= average of f_i <= hi_i for all i}``."""
    obs = [f for f, _, _ in constraints]
    wins = [Window(i, _frac(lo), _frac(hi)) for i, (_, lo, hi) in enumerate(constraints)]
    return log_weighted_count(system, obs, wins, n) / n


def pressure_of_set_estimate(system, potential: Observable, f: Observable, window, n: int) -> float:
    """``(1/n) ln sum exp(S_n potential)`` over ``n``-words whose ``f``-average lies in ``window``."""
    lo, hi = window
    return log_weighted_count(system, [f], [Window(0, _frac(lo), _frac(hi))], n, potential) / n


@dataclass(frozen=True)
class MistakeFunction:
    """``g(n, eps)``: non-decreasing in ``n`` with ``g(n, eps) / n -> 0``."""

    func: Callable[[int, float], int]
    name: str = "g"

    def __call__(self, n: int, eps: float) -> int:
        return int(self.func(n, eps))

    def validate(self, horizon: int = 10_000, eps: float = 0.75) -> None:
        vals = [self(n, eps) for n in range(1, horizon + 1)]
        if any(v < 0 for v in vals) or any(b < a for a, b in zip(vals, vals[1:])):
            raise InvalidInput(f"{self.name} is not a non-decreasing non-negative function")
        half = vals[horizon // 2 - 1] / (horizon // 2)
        end = vals[-1] / horizon
        if end >= 1 or (end > 0 and end >= half):
            raise InvalidInput(f"{self.name} does not look sublinear on [1, {horizon}]")

    @classmethod
    def zero(cls) -> "MistakeFunction":
        return cls(lambda n, eps: 0, "zero")

    @classmethod
    def constant(cls, c: int) -> "MistakeFunction":
        return cls(lambda n, eps: c, f"const{c}")

    @classmethod
    def log_ratio(cls, theta: float) -> "MistakeFunction":
        """``floor(theta * n / ln(n + e))``; monotone and sublinear."""
        return cls(lambda n, eps: math.floor(theta * n / math.log(n + math.e)), f"log_ratio({theta})")


def bowen_ball_membership(x, y, n: int, eps: float, g: MistakeFunction) -> bool:
    """``y`` in the ``(g; n, eps)``-Bowen ball around ``x``.

    With eps in (1/2, 1), ``d(T^j x, T^j y) < eps`` iff ``x_j == y_j``, so
    membership means at most ``g(n, eps)`` disagreements among the first
    ``n`` coordinates.
    """
    if not 0.5 < eps < 1:
        raise InvalidInput("eps must lie in (1/2, 1) for the coordinate reduction")
    if len(x) < n or len(y) < n:
        raise WordTooShort(f"both words need length >= {n}")
    mism = sum(1 for j in range(n) if x[j] != y[j])
    return mism <= g(n, eps)


@dataclass(frozen=True)
class SeparatedCount:
    count: int
    exact: bool
    candidates: int


def _words_array(system: SymbolicSystem, n: int) -> np.ndarray:
    a = system.alphabet_size
    if a**n > 1 << 22:
        raise ExhaustiveTooLarge(f"{a}^{n} words is too many to enumerate")
    if system.kind == "beta":
        return np.array(list(iter_words(system, n)), dtype=np.int8).reshape(-1, n)
    codes = np.arange(a**n, dtype=np.int64)
    words = np.zeros((codes.size, n), dtype=np.int8)
    for j in range(n - 1, -1, -1):
        words[:, j] = codes % a
        codes //= a
    if n > 1:
        ok = system.matrix[words[:, :-1], words[:, 1:]].all(axis=1)
        words = words[ok]
    return words


def _distances_to(words: np.ndarray, center: EmpiricalMeasure, a: int) -> np.ndarray:
    """Weak* distance of every word's empirical measure to ``center``."""
    depth = center.depth
    m, n = words.shape
    codes = np.zeros((m, n - depth + 1), dtype=np.int64)
    for j in range(depth):
        codes = codes * a + words[:, j : n - depth + 1 + j]
    counts = np.zeros((m, a**depth))
    for c in range(a**depth):
        counts[:, c] = (codes == c).sum(axis=1)
    freqs = counts / (n - depth + 1)
    total = np.zeros(m)
    j = 0
    for d in range(1, depth + 1):
        # depth-d marginal: sum over trailing depth - d symbols of the code
        marg = freqs.reshape(m, a**d, a ** (depth - d)).sum(axis=2)
        cm = center.marginal(d)
        for idx in range(a**d):
            j += 1
            word = []
            c = idx
            for _ in range(d):
                word.append(c % a)
                c //= a
            ref = cm.get(tuple(reversed(word)), 0.0)
            total += np.abs(marg[:, idx] - ref) * 0.5**j
    return total


def count_separated(
    system: SymbolicSystem,
    center,
    radius: float,
    delta: float,
    n: int,
    eps: float = 0.75,
    depth: int = 1,
    exact: bool = True,
) -> SeparatedCount:
    """Largest ``(delta, n, eps)``-separated set of ``n``-words whose empirical
    measure is within ``radius`` of ``center``.

    ``center`` is an :class:`EmpiricalMeasure` or an invariant Markov measure
    (marginalised at ``depth``). Separation means Hamming distance at least
    ``ceil(delta * n)``. Exact mode enumerates and runs a maximum-clique
    search (``n <= 20``); otherwise a greedy lexicographic packing gives a
    lower bound.
    """
    if not 0.5 < eps < 1:
        raise InvalidInput("eps must lie in (1/2, 1) for the coordinate reduction")
    if exact and n > EXHAUSTIVE_MAX_N:
        raise ExhaustiveTooLarge(f"exact mode supports n <= {EXHAUSTIVE_MAX_N}")
    if not isinstance(center, EmpiricalMeasure):
        center = cylinder_marginal(center, depth)
    a = system.alphabet_size
    words = _words_array(system, n)
    dist = _distances_to(words, center, a)
    cand = words[dist < radius]
    need = math.ceil(delta * n - 1e-12)
    if need <= 1 or len(cand) <= 1:
        return SeparatedCount(len(cand), True, len(cand))
    if exact:
        if len(cand) > CLIQUE_MAX_VERTICES:
            raise ExhaustiveTooLarge(f"{len(cand)} candidate words exceed the clique-search limit")
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(len(cand)))
        ham = (cand[:, None, :] != cand[None, :, :]).sum(axis=2)
        ii, jj = np.nonzero(np.triu(ham >= need, 1))
        g.add_edges_from(zip(ii.tolist(), jj.tolist()))
        clique, _ = nx.max_weight_clique(g, weight=None)
        return SeparatedCount(len(clique), True, len(cand))
    chosen: list[np.ndarray] = []
    for w in cand:
        if all((w != c).sum() >= need for c in chosen):
            chosen.append(w)
    return SeparatedCount(len(chosen), False, len(cand))


def count_checkpoint_words(system, f: Observable, checkpoints: Sequence[tuple[int, object, object]], n: int) -> float:
    """``(1/n) ln`` of the number of ``n``-words whose ``f``-average over the
    first ``t`` symbols lies in ``[lo, hi]`` for each ``(t, lo, hi)``."""
    wins = [Window(0, _frac(lo), _frac(hi), int(t)) for t, lo, hi in checkpoints]
    return log_weighted_count(system, [f], wins, n) / n
