"""Locally constant rational observables and finite-word Birkhoff averages.

A depth-``k`` observable assigns a rational to every admissible ``k``-word.
On a finite word of length ``n`` the Birkhoff sum runs over the ``n - k + 1``
full windows; the gap to the ``1/n`` normalisation of points vanishes as
``n`` grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import BadCheckpoints, DepthMismatch, InvalidInput, WordTooShort
from .systems import SymbolicSystem, Word, format_word, iter_words, parse_word


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (tuple, list)) and len(v) == 2:
        return Fraction(int(v[0]), int(v[1]))
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    return Fraction(v)


@dataclass(frozen=True)
class Observable:
    depth: int
    values: Mapping[Word, Fraction]
    alphabet_size: int
    denominator: int = field(init=False)

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidInput("observable depth must be positive")
        vals = {tuple(w): _frac(v) for w, v in self.values.items()}
        if any(len(w) != self.depth for w in vals):
            raise DepthMismatch("every key of an observable must have length == depth")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "denominator", math.lcm(*(v.denominator for v in vals.values())) if vals else 1)

    def __call__(self, w: Sequence[int]) -> Fraction:
        return self.values.get(tuple(w), Fraction(0))

    @property
    def min_value(self) -> Fraction:
        return min(self.values.values(), default=Fraction(0))

    @property
    def max_value(self) -> Fraction:
        return max(self.values.values(), default=Fraction(0))

    @property
    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self.values.values()), default=Fraction(0))

    def scaled_integers(self) -> dict[Word, int]:
        """Values multiplied by the common denominator ``D``."""
        d = self.denominator
        return {w: int(v * d) for w, v in self.values.items()}

    def lift(self, system: SymbolicSystem, depth: int) -> "Observable":
        """Same observable read on the last ``self.depth`` symbols of a longer window."""
        if depth < self.depth:
            raise DepthMismatch("cannot lift to a smaller depth")
        if depth == self.depth:
            return self
        vals = {w: self(w[depth - self.depth :]) for w in iter_words(system, depth)}
        return Observable(depth, vals, self.alphabet_size)

    def __add__(self, other: "Observable") -> "Observable":
        return combine([(1, self), (1, other)])

    def __sub__(self, other: "Observable") -> "Observable":
        return combine([(1, self), (-1, other)])

    def __mul__(self, c) -> "Observable":
        c = _frac(c)
        return Observable(self.depth, {w: c * v for w, v in self.values.items()}, self.alphabet_size)

    __rmul__ = __mul__

    def shift(self, c) -> "Observable":
        """``self + c`` for a rational constant ``c``."""
        c = _frac(c)
        return Observable(self.depth, {w: v + c for w, v in self.values.items()}, self.alphabet_size)


def _keys_for(system: SymbolicSystem, depth: int) -> list[Word]:
    return list(iter_words(system, depth))


def from_values(system: SymbolicSystem, depth: int, values: Mapping) -> Observable:
    """Observable from a partial map; admissible words not listed get 0."""
    keys = _keys_for(system, depth)
    given = {parse_word(w) if isinstance(w, str) else tuple(w): _frac(v) for w, v in values.items()}
    vals = {w: given.get(w, Fraction(0)) for w in keys}
    extra = set(given) - set(vals)
    if any(given[w] != 0 for w in extra):
        raise InvalidInput(f"values given for non-admissible words: {sorted(extra)}")
    return Observable(depth, vals, system.alphabet_size)


def constant(system: SymbolicSystem, c, depth: int = 1) -> Observable:
    return Observable(depth, {w: _frac(c) for w in _keys_for(system, depth)}, system.alphabet_size)


def indicator(system: SymbolicSystem, word: str | Sequence[int]) -> Observable:
    """Indicator of the cylinder ``[word]`` as a depth-``len(word)`` observable."""
    w = parse_word(word)
    return from_values(system, len(w), {w: 1})


def symbol_indicator(system: SymbolicSystem, symbol: int = 1) -> Observable:
    return indicator(system, (symbol,))


def combine(terms: Sequence[tuple[object, Observable]]) -> Observable:
    """Rational linear combination, lifted to the deepest term.

    Terms must come from the same system; depths are reconciled by reading
    shallower observables on the trailing symbols of the window.
    """
    depth = max(f.depth for _, f in terms)
    alph = terms[0][1].alphabet_size
    keys: set[Word] = set()
    for _, f in terms:
        if f.depth == depth:
            keys |= set(f.values)
    if not keys:
        raise InvalidInput("combine needs at least one term")
    vals = {}
    for w in keys:
        vals[w] = sum((_frac(c) * f(w[depth - f.depth :]) for c, f in terms), Fraction(0))
    return Observable(depth, vals, alph)


def birkhoff_sum(w: Sequence[int], f: Observable) -> Fraction:
    k = f.depth
    n = len(w)
    if n < k:
        raise WordTooShort(f"word of length {n} shorter than observable depth {k}")
    w = tuple(int(s) for s in w)
    return sum((f(w[i : i + k]) for i in range(n - k + 1)), Fraction(0))


def birkhoff_average(w: Sequence[int], f: Observable) -> Fraction:
    """Exact average of ``f`` over the ``n - k + 1`` full windows of ``w``."""
    return birkhoff_sum(w, f) / (len(w) - f.depth + 1)


def window_values(w, f: Observable) -> np.ndarray:
    """Float value of ``f`` at every full window, vectorised for long words."""
    w = np.asarray(w, dtype=np.int64)
    k = f.depth
    if w.size < k:
        raise WordTooShort(f"word of length {w.size} shorter than observable depth {k}")
    a = f.alphabet_size
    table = np.zeros(a**k)
    for word, v in f.values.items():
        code = 0
        for s in word:
            code = code * a + s
        table[code] = float(v)
    codes = np.zeros(w.size - k + 1, dtype=np.int64)
    for j in range(k):
        codes = codes * a + w[j : w.size - k + 1 + j]
    return table[codes]


def prefix_averages(w, f: Observable) -> np.ndarray:
    """``out[t-1]`` is the Birkhoff average over the first ``t`` windows."""
    vals = window_values(w, f)
    return np.cumsum(vals) / np.arange(1, vals.size + 1)


@dataclass(frozen=True)
class BirkhoffStats:
    checkpoints: tuple[int, ...]
    averages: tuple[float, ...]
    liminf_estimate: float
    limsup_estimate: float
    burn_in: int


def birkhoff_stats(w, f: Observable, checkpoints: Sequence[int], burn_in_fraction: float = 0.1) -> BirkhoffStats:
    """Running averages at checkpoint window counts.

    The liminf/limsup estimates are the min/max over the checkpoints left
    after discarding the first ``burn_in_fraction`` of them.
    """
    cps = [int(t) for t in checkpoints]
    nwin = len(w) - f.depth + 1
    if not cps or any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1 or cps[-1] > nwin:
        raise BadCheckpoints(f"checkpoints must increase within [1, {nwin}]")
    avgs = prefix_averages(w, f)[np.array(cps) - 1]
    burn = int(burn_in_fraction * len(cps))
    tail = avgs[burn:]
    return BirkhoffStats(tuple(cps), tuple(float(a) for a in avgs), float(tail.min()), float(tail.max()), burn)


def observable_to_dict(f: Observable) -> dict:
    return {
        "depth": f.depth,
        "alphabet_size": f.alphabet_size,
        "values": [
            [format_word(w), v.numerator, v.denominator] for w, v in sorted(f.values.items())
        ],
    }


def observable_from_dict(system: SymbolicSystem, raw: dict) -> Observable:
    """Inverse of :func:`observable_to_dict`; ``values`` rows are ``[word, num, den]``."""
    try:
        depth = int(raw["depth"])
        rows = raw["values"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput("observable file needs 'depth' and 'values'") from exc
    vals = {}
    for row in rows:
        if len(row) != 3 or int(row[2]) <= 0:
            raise InvalidInput(f"bad observable row {row!r}")
        w = parse_word(str(row[0])) if not isinstance(row[0], list) else tuple(row[0])
        if len(w) != depth:
            raise DepthMismatch(f"word {row[0]!r} has length != depth {depth}")
        vals[w] = Fraction(int(row[1]), int(row[2]))
    return from_values(system, depth, vals)
