"""Invariant measures: stationary Markov measures, finite mixtures of them,
empirical measures of words, and the weak* distance.

Measures are carried by their two-cylinder data (edge frequencies), which
determines every integral of a depth <= 2 observable and the entropy.
Entropies are in nats.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import BadWeights, DepthMismatch, InvalidInput, WordTooShort
from .observables import Observable
from .systems import SymbolicSystem, Word


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov measure ``(P, pi)``.

    Rows of ``P`` for symbols with ``pi_i = 0`` are irrelevant to the measure
    but still must be stochastic.
    """

    transition: np.ndarray
    stationary: np.ndarray

    def __post_init__(self):
        p = np.array(self.transition, dtype=float)
        pi = np.array(self.stationary, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or pi.shape != (p.shape[0],):
            raise InvalidInput("transition must be square and match the stationary vector")
        if (p < -1e-15).any() or (pi < -1e-15).any():
            raise InvalidInput("negative probabilities")
        if np.abs(p.sum(axis=1) - 1).max() > 1e-12:
            raise InvalidInput("transition rows must sum to 1")
        if abs(pi.sum() - 1) > 1e-12 or np.abs(pi @ p - pi).max() > 1e-10:
            raise InvalidInput("stationary vector does not satisfy pi P = pi")
        p = np.clip(p, 0, None)
        pi = np.clip(pi, 0, None)
        p.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "stationary", pi)

    @property
    def alphabet_size(self) -> int:
        return self.stationary.size

    @property
    def edge_frequencies(self) -> np.ndarray:
        return self.stationary[:, None] * self.transition

    def respects(self, system: SymbolicSystem) -> bool:
        """Support check against the transition relation (mass on rows with pi > 0)."""
        if system.alphabet_size != self.alphabet_size:
            return False
        return not ((self.edge_frequencies > 0) & (system.matrix == 0)).any()

    @classmethod
    def from_edge_frequencies(cls, x, allowed=None) -> "MarkovMeasure":
        """Measure with two-cylinder frequencies ``x`` (a circulation summing to 1).

        Rows of unvisited symbols are filled uniformly over ``allowed``
        (a 0/1 matrix) or with a self-loop when no matrix is given.
        """
        x = np.clip(np.array(x, dtype=float), 0, None)
        total = x.sum()
        if total <= 0:
            raise InvalidInput("edge frequencies must have positive mass")
        x = x / total
        pi = x.sum(axis=1)
        n = pi.size
        p = np.zeros((n, n))
        for i in range(n):
            if pi[i] > 0:
                p[i] = x[i] / pi[i]
            elif allowed is not None and np.asarray(allowed)[i].any():
                row = np.asarray(allowed)[i].astype(float)
                p[i] = row / row.sum()
            else:
                p[i, i] = 1.0
        # tiny circulation defects from floating input are absorbed here
        pi = _stationary(p, pi)
        return cls(p, pi)

    @classmethod
    def from_transition(cls, transition) -> "MarkovMeasure":
        p = np.array(transition, dtype=float)
        return cls(p, _stationary(p))


def _stationary(p: np.ndarray, guess: np.ndarray | None = None) -> np.ndarray:
    n = p.shape[0]
    if guess is not None:
        g = np.clip(guess, 0, None)
        g = g / g.sum()
        if np.abs(g @ p - g).max() <= 1e-13:
            return g
        support = g > 0
    else:
        support = np.ones(n, dtype=bool)
    # left null vector of (P - I) restricted to the support
    idx = np.flatnonzero(support)
    sub = p[np.ix_(idx, idx)]
    a = np.vstack([(sub - np.eye(idx.size)).T, np.ones(idx.size)])
    b = np.zeros(idx.size + 1)
    b[-1] = 1
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.zeros(n)
    pi[idx] = np.clip(sol, 0, None)
    return pi / pi.sum()


def bernoulli(probs: Sequence[float]) -> MarkovMeasure:
    probs = np.asarray(probs, dtype=float)
    return MarkovMeasure(np.tile(probs, (probs.size, 1)), probs)


def periodic_orbit(word: Sequence[int], alphabet_size: int, allowed=None) -> MarkovMeasure:
    """Invariant measure on the periodic orbit ``word^inf``.

    Only orbits whose period word has distinct-successor structure (each
    symbol followed by a single symbol along the cycle) are Markov; others
    are rejected.
    """
    word = tuple(int(s) for s in word)
    n = len(word)
    x = np.zeros((alphabet_size, alphabet_size))
    for i in range(n):
        x[word[i], word[(i + 1) % n]] += 1.0 / n
    m = MarkovMeasure.from_edge_frequencies(x, allowed)
    if n > 1 and any(np.count_nonzero(m.transition[s]) > 1 for s in set(word)):
        raise InvalidInput("periodic orbit is not Markov at depth 2; recode first")
    return m


@dataclass(frozen=True, eq=False)
class MarkovMixtureMeasure:
    components: tuple[tuple[float, MarkovMeasure], ...]

    def __post_init__(self):
        comps = tuple((float(w), m) for w, m in self.components)
        if not comps:
            raise BadWeights("a mixture needs at least one component")
        if any(w < 0 for w, _ in comps) or abs(sum(w for w, _ in comps) - 1) > 1e-12:
            raise BadWeights("mixture weights must be non-negative and sum to 1")
        if len({m.alphabet_size for _, m in comps}) != 1:
            raise InvalidInput("mixture components live on different alphabets")
        object.__setattr__(self, "components", comps)

    @property
    def alphabet_size(self) -> int:
        return self.components[0][1].alphabet_size

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.components)

    @property
    def edge_frequencies(self) -> np.ndarray:
        return sum(w * m.edge_frequencies for w, m in self.components)


AnyMeasure = Union[MarkovMeasure, MarkovMixtureMeasure]


def as_mixture(m: AnyMeasure) -> MarkovMixtureMeasure:
    if isinstance(m, MarkovMixtureMeasure):
        return m
    return MarkovMixtureMeasure(((1.0, m),))


def _single_entropy(m: MarkovMeasure) -> float:
    p = m.transition
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(p), 0.0)
    return float(-(m.stationary * terms.sum(axis=1)).sum())


def markov_entropy(m: AnyMeasure) -> float:
    """Metric entropy in nats, affine over mixture components."""
    return sum(w * _single_entropy(c) for w, c in as_mixture(m).components)


def _single_integral(m: MarkovMeasure, f: Observable) -> float:
    n = m.alphabet_size
    if f.alphabet_size != n:
        raise DepthMismatch("observable and measure live on different alphabets")
    if f.depth == 1:
        vals = np.array([float(f((i,))) for i in range(n)])
        return float(m.stationary @ vals)
    if f.depth == 2:
        vals = np.array([[float(f((i, j))) for j in range(n)] for i in range(n)])
        return float((m.edge_frequencies * vals).sum())
    raise DepthMismatch(f"integrate needs depth <= 2, got {f.depth}; recode the system first")


def integrate(m: AnyMeasure, f: Observable) -> float:
    return sum(w * _single_integral(c, f) for w, c in as_mixture(m).components)


def convex_combine(measures: Sequence[AnyMeasure], weights: Sequence[float]) -> MarkovMixtureMeasure:
    """Flattened mixture ``sum_i weights[i] * measures[i]``."""
    weights = [float(w) for w in weights]
    if len(weights) != len(measures) or any(w < 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
        raise BadWeights("weights must be non-negative, one per measure, summing to 1")
    comps = []
    for t, m in zip(weights, measures):
        for w, c in as_mixture(m).components:
            if t * w > 0:
                comps.append((t * w, c))
    total = sum(w for w, _ in comps)
    return MarkovMixtureMeasure(tuple((w / total, c) for w, c in comps))


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Cylinder frequencies at a fixed depth."""

    depth: int
    alphabet_size: int
    frequencies: Mapping[Word, float]

    def __post_init__(self):
        if abs(sum(self.frequencies.values()) - 1) > 1e-12:
            raise InvalidInput("cylinder frequencies must sum to 1")

    def marginal(self, d: int) -> dict[Word, float]:
        """Frequencies of the depth-``d`` prefixes, ``d <= depth``."""
        out: dict[Word, float] = {}
        for w, f in self.frequencies.items():
            out[w[:d]] = out.get(w[:d], 0.0) + f
        return out


def empirical_measure(w, depth: int, alphabet_size: int | None = None) -> EmpiricalMeasure:
    """Sliding-window frequencies of the depth-words of ``w``."""
    arr = np.asarray(w, dtype=np.int64)
    n = arr.size
    if n < depth or depth < 1:
        raise WordTooShort(f"word of length {n} is shorter than depth {depth}")
    a = int(alphabet_size if alphabet_size is not None else arr.max() + 1)
    codes = np.zeros(n - depth + 1, dtype=np.int64)
    for j in range(depth):
        codes = codes * a + arr[j : n - depth + 1 + j]
    bins = np.bincount(codes, minlength=a**depth)
    total = n - depth + 1
    freqs = {}
    for code in np.flatnonzero(bins):
        word = []
        c = int(code)
        for _ in range(depth):
            word.append(c % a)
            c //= a
        freqs[tuple(reversed(word))] = bins[code] / total
    return EmpiricalMeasure(depth, a, freqs)


def cylinder_marginal(m: AnyMeasure, depth: int) -> EmpiricalMeasure:
    """Depth-``depth`` cylinder probabilities of an invariant Markov mixture."""
    a = as_mixture(m).alphabet_size
    freqs: dict[Word, float] = {}
    for weight, c in as_mixture(m).components:
        for word in product(range(a), repeat=depth):
            p = c.stationary[word[0]]
            for s, t in zip(word, word[1:]):
                p *= c.transition[s, t]
                if p == 0:
                    break
            if p > 0:
                freqs[word] = freqs.get(word, 0.0) + weight * p
    total = sum(freqs.values())
    return EmpiricalMeasure(depth, a, {w: f / total for w, f in freqs.items()})


def weakstar_family(alphabet_size: int, depth: int) -> list[Word]:
    """The fixed test family: cylinders by depth 1..L, then lexicographic."""
    return [w for d in range(1, depth + 1) for w in product(range(alphabet_size), repeat=d)]


def weakstar_distance(p, q, depth: int | None = None) -> float:
    """``sum_j 2^-j |p(C_j) - q(C_j)|`` over the fixed cylinder family.

    Markov measures are marginalised to the depth of the empirical argument
    (or to ``depth``). Both arguments must end up at the same depth.
    """
    if depth is None:
        depths = [x.depth for x in (p, q) if isinstance(x, EmpiricalMeasure)]
        if not depths:
            raise DepthMismatch("give a depth when comparing two Markov measures")
        depth = depths[0]
    p = p if isinstance(p, EmpiricalMeasure) else cylinder_marginal(p, depth)
    q = q if isinstance(q, EmpiricalMeasure) else cylinder_marginal(q, depth)
    if p.depth != depth or q.depth != depth:
        raise DepthMismatch(f"measures at depths {p.depth} and {q.depth}, expected {depth}")
    if p.alphabet_size != q.alphabet_size:
        raise DepthMismatch("measures live on different alphabets")
    total = 0.0
    j = 0
    for d in range(1, depth + 1):
        pm, qm = p.marginal(d), q.marginal(d)
        for w in product(range(p.alphabet_size), repeat=d):
            j += 1
            total += abs(pm.get(w, 0.0) - qm.get(w, 0.0)) * 0.5**j
    return total


def measure_to_dict(m: AnyMeasure) -> dict:
    return {
        "components": [
            {
                "weight": w,
                "transition": c.transition.tolist(),
                "stationary": c.stationary.tolist(),
            }
            for w, c in as_mixture(m).components
        ]
    }


def measure_from_dict(raw: dict) -> MarkovMixtureMeasure:
    """Measure file: ``components`` list of ``{weight, transition[, stationary]}``."""
    try:
        comps = []
        for c in raw["components"]:
            p = np.array(c["transition"], dtype=float)
            if "stationary" in c:
                mm = MarkovMeasure(p, np.array(c["stationary"], dtype=float))
            else:
                mm = MarkovMeasure.from_transition(p)
            comps.append((float(c.get("weight", 1.0)), mm))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad measure description: {exc}") from exc
    return MarkovMixtureMeasure(tuple(comps))
