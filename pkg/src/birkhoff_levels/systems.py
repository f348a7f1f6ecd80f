"""Symbolic phase spaces: full shifts, mixing SFTs and truncated beta-shifts.

All systems are one-sided. Distances use the symbolic metric
``d(x, y) = 2 ** -min{i : x_i != y_i}``; for any epsilon in (1/2, 1) two
orbit points ``T^j x`` and ``T^j y`` are epsilon-apart exactly when
``x_j != y_j``. Every epsilon-parameterised routine in the package relies on
this reduction.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    BadBetaExpansion,
    EmptyAlphabet,
    InvalidInput,
    NonPrimitive,
    WordTooLong,
)

Word = tuple[int, ...]


def parse_word(text: str | Sequence[int]) -> Word:
    """Accept ``"0101"``, ``"0 1 0 1"`` or an int sequence."""
    if isinstance(text, str):
        text = text.strip()
        if "," in text:
            parts = [p for p in text.replace(" ", "").split(",") if p]
        elif " " in text:
            parts = text.split()
        else:
            parts = list(text)
        try:
            return tuple(int(p) for p in parts)
        except ValueError as exc:
            raise InvalidInput(f"cannot parse word {text!r}") from exc
    return tuple(int(s) for s in text)


def format_word(w: Sequence[int]) -> str:
    if all(0 <= s < 10 for s in w):
        return "".join(str(int(s)) for s in w)
    return " ".join(str(int(s)) for s in w)


@dataclass(frozen=True)
class SymbolicSystem:
    kind: str
    alphabet_size: int
    transitions: frozenset = frozenset()
    beta_expansion: Word = ()
    expansion_depth: int = 0
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = np.zeros((self.alphabet_size, self.alphabet_size), dtype=np.int64)
        if self.kind == "full":
            a[:] = 1
        elif self.kind == "sft":
            for i, j in self.transitions:
                a[i, j] = 1
        elif self.kind == "beta":
            # one-step transitions of the beta language (every digit may
            # follow every digit at length 2 unless (d, d') exceeds e_0 e_1)
            for i, j in product(range(self.alphabet_size), repeat=2):
                a[i, j] = int(beta_admissible(self, (i, j))) if self.expansion_depth >= 2 else 1
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def symbols(self) -> range:
        return range(self.alphabet_size)

    @property
    def is_markov(self) -> bool:
        return self.kind in ("full", "sft")

    def allowed(self, i: int, j: int) -> bool:
        return bool(self.matrix[i, j])

    def successors(self, i: int) -> list[int]:
        return [j for j in self.symbols if self.matrix[i, j]]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.symbols for j in self.symbols if self.matrix[i, j]]


def full_shift(alphabet_size: int = 2) -> SymbolicSystem:
    return validate_system({"kind": "full", "alphabet_size": alphabet_size})


def sft(alphabet_size: int, transitions: Iterable[Sequence[int]]) -> SymbolicSystem:
    return validate_system(
        {"kind": "sft", "alphabet_size": alphabet_size, "transitions": [list(t) for t in transitions]}
    )


def golden_mean() -> SymbolicSystem:
    """The SFT on {0, 1} forbidding the word 11."""
    return sft(2, [(0, 0), (0, 1), (1, 0)])


def beta_shift(expansion: Sequence[int], depth: int | None = None) -> SymbolicSystem:
    expansion = tuple(expansion)
    return validate_system(
        {
            "kind": "beta",
            "beta_expansion": list(expansion),
            "expansion_depth": depth if depth is not None else len(expansion),
        }
    )


def _is_primitive(a: np.ndarray) -> bool:
    n = a.shape[0]
    b = (a > 0).astype(np.int64)
    p = b.copy()
    for _ in range(n * n):
        if p.all():
            return True
        p = ((p @ b) > 0).astype(np.int64)
    return bool(p.all())


def validate_system(raw: dict) -> SymbolicSystem:
    """Build a checked :class:`SymbolicSystem` from a plain description."""
    if not isinstance(raw, dict) or "kind" not in raw:
        raise InvalidInput("system description needs a 'kind' field")
    kind = raw["kind"]
    if kind not in ("full", "sft", "beta"):
        raise InvalidInput(f"unknown system kind {kind!r}")

    if kind == "beta":
        expansion = tuple(int(s) for s in raw.get("beta_expansion", ()))
        if not expansion:
            raise EmptyAlphabet("beta system needs a non-empty beta_expansion")
        if expansion[0] < 1 or min(expansion) < 0:
            raise BadBetaExpansion("beta_expansion must start with a digit >= 1")
        depth = int(raw.get("expansion_depth", len(expansion)))
        if depth < 1 or depth > len(expansion):
            raise BadBetaExpansion("expansion_depth must lie in [1, len(beta_expansion)]")
        expansion = expansion[:depth]
        for j in range(1, depth):
            if expansion[j:] > expansion[: depth - j]:
                raise BadBetaExpansion(
                    f"shift {j} of the expansion exceeds the expansion (Parry criterion)"
                )
        return SymbolicSystem("beta", expansion[0] + 1, beta_expansion=expansion, expansion_depth=depth)

    n = int(raw.get("alphabet_size", 0))
    if n < 1:
        raise EmptyAlphabet("alphabet_size must be positive")
    if kind == "full":
        return SymbolicSystem("full", n)

    pairs = set()
    for t in raw.get("transitions", ()):
        if len(t) != 2:
            raise InvalidInput(f"transition {t!r} is not a pair")
        i, j = int(t[0]), int(t[1])
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidInput(f"transition {t!r} uses a symbol outside the alphabet")
        pairs.add((i, j))
    system = SymbolicSystem("sft", n, transitions=frozenset(pairs))
    a = system.matrix
    if (a.sum(axis=1) == 0).any() or (a.sum(axis=0) == 0).any():
        raise NonPrimitive("some symbol has no incoming or no outgoing transition")
    if not _is_primitive(a):
        raise NonPrimitive("transition matrix is not primitive (system is not mixing)")
    return system


def system_to_dict(system: SymbolicSystem) -> dict:
    out: dict = {"kind": system.kind}
    if system.kind == "beta":
        out["beta_expansion"] = list(system.beta_expansion)
        out["expansion_depth"] = system.expansion_depth
    else:
        out["alphabet_size"] = system.alphabet_size
        if system.kind == "sft":
            out["transitions"] = [list(t) for t in sorted(system.transitions)]
    return out


def is_admissible(system: SymbolicSystem, w: Sequence[int]) -> bool:
    if any(not 0 <= s < system.alphabet_size for s in w):
        return False
    if system.kind == "beta":
        return beta_admissible(system, w)
    a = system.matrix
    return all(a[w[i], w[i + 1]] for i in range(len(w) - 1))


def is_admissible_array(system: SymbolicSystem, w: np.ndarray) -> bool:
    """Vectorised admissibility for long SFT words."""
    w = np.asarray(w)
    if w.size == 0:
        return True
    if w.min() < 0 or w.max() >= system.alphabet_size:
        return False
    if w.size == 1:
        return True
    return bool(system.matrix[w[:-1], w[1:]].all())


def iter_words(system: SymbolicSystem, n: int) -> Iterator[Word]:
    """All admissible words of length ``n`` in lexicographic order."""
    if n == 0:
        yield ()
        return
    if system.kind == "beta" and n > system.expansion_depth:
        raise WordTooLong(f"length {n} exceeds expansion_depth {system.expansion_depth}")

    def extend(prefix: list[int]):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for s in system.symbols:
            prefix.append(s)
            if system.kind == "beta":
                ok = beta_admissible(system, prefix)
            else:
                ok = len(prefix) == 1 or system.allowed(prefix[-2], s)
            if ok:
                yield from extend(prefix)
            prefix.pop()

    yield from extend([])


def transition_gap(system: SymbolicSystem) -> int:
    """Minimal ``m`` with ``A**m`` entrywise positive."""
    if not system.is_markov:
        raise InvalidInput("transition_gap needs an sft or full shift")
    b = (system.matrix > 0).astype(np.int64)
    p = b.copy()
    m = 1
    while not p.all():
        p = ((p @ b) > 0).astype(np.int64)
        m += 1
    return m


def connector_word(system: SymbolicSystem, from_symbol: int, to_symbol: int) -> Word:
    """Lexicographically least shortest ``w`` with ``from.w.to`` admissible."""
    if not system.is_markov:
        raise InvalidInput("connector_word needs an sft or full shift")
    a = system.matrix
    n = system.alphabet_size
    # edge distance from every symbol to to_symbol
    dist = [None] * n
    dist[to_symbol] = 0
    queue = deque([to_symbol])
    while queue:
        v = queue.popleft()
        for u in range(n):
            if a[u, v] and dist[u] is None:
                dist[u] = dist[v] + 1
                queue.append(u)
    # from_symbol must step at least once
    best = min((dist[j] for j in range(n) if a[from_symbol, j] and dist[j] is not None), default=None)
    if best is None:
        raise InvalidInput("no path between the symbols")
    out: list[int] = []
    cur, remaining = from_symbol, best + 1
    while remaining > 1:
        nxt = min(j for j in range(n) if a[cur, j] and dist[j] == remaining - 1)
        out.append(nxt)
        cur, remaining = nxt, remaining - 1
    return tuple(out)


def higher_block_recode(system: SymbolicSystem, k: int) -> tuple[SymbolicSystem, list[Word]]:
    """Recode onto admissible ``(k-1)``-words.

    Returns the recoded system and the dictionary ``symbols`` with
    ``symbols[s]`` the ``(k-1)``-word represented by the new symbol ``s``.
    """
    if not system.is_markov:
        raise InvalidInput("higher_block_recode needs an sft or full shift")
    if k < 2:
        raise InvalidInput("recoding depth k must be >= 2")
    blocks = list(iter_words(system, k - 1))
    index = {b: i for i, b in enumerate(blocks)}
    pairs = []
    for b in blocks:
        for s in system.successors(b[-1]):
            c = b[1:] + (s,)
            pairs.append((index[b], index[c]))
    if len(pairs) == len(blocks) ** 2:
        return SymbolicSystem("full", len(blocks)), blocks
    return SymbolicSystem("sft", len(blocks), transitions=frozenset(pairs)), blocks


def beta_admissible(system: SymbolicSystem, w: Sequence[int]) -> bool:
    """Parry criterion: every suffix of ``w`` is lexicographically at most
    the expansion prefix of the same length."""
    if system.kind != "beta":
        raise InvalidInput("beta_admissible needs a beta system")
    w = tuple(int(s) for s in w)
    n = len(w)
    if n > system.expansion_depth:
        raise WordTooLong(f"length {n} exceeds expansion_depth {system.expansion_depth}")
    e = system.beta_expansion
    return all(w[i:] <= e[: n - i] for i in range(n))


def beta_automaton(system: SymbolicSystem) -> list[dict[int, int]]:
    """Transition table of the Parry automaton.

    State ``k`` is the length of the longest suffix read so far that equals
    ``e[:k]``; ``table[k][s]`` is the next state (absent means reject).
    States run over ``0 .. depth - 1``; reaching ``depth`` is only possible
    at the last symbol of a maximal-length word and is reported as ``depth``.
    """
    e = system.beta_expansion
    depth = system.expansion_depth
    table: list[dict[int, int]] = []
    for k in range(depth):
        borders = [j for j in range(k, -1, -1) if e[:j] == e[k - j : k]]
        row = {}
        for s in system.symbols:
            if any(s > e[j] for j in borders):
                continue
            nxt = next((j + 1 for j in borders if e[j] == s), 0)
            row[s] = nxt
        table.append(row)
    return table


def quasi_greedy_expansion(beta, depth: int) -> Word:
    """Quasi-greedy beta-expansion of 1, truncated to ``depth`` digits.

    ``beta`` may be a sympy expression (exact arithmetic, e.g.
    ``(1 + sqrt(5)) / 2``) or a decimal string, which is evaluated with
    sympy at a working precision sized to ``depth``.
    """
    import sympy

    if isinstance(beta, str):
        try:
            b = sympy.sympify(beta, rational=False)
        except sympy.SympifyError as exc:
            raise InvalidInput(f"cannot parse beta {beta!r}") from exc
    else:
        b = sympy.sympify(beta)
    if not b.is_real or not (b > 1):
        raise InvalidInput("beta must be a real number > 1")
    prec = max(50, 2 * depth)
    exact = b.is_algebraic and not b.is_Float
    digits: list[int] = []
    x = sympy.Integer(1)
    finite_at = None
    for i in range(depth):
        y = b * x
        d = int(sympy.floor(y.evalf(prec)) if not exact else sympy.floor(y))
        digits.append(d)
        x = sympy.nsimplify(y - d) if exact else (y - d).evalf(prec)
        zero = sympy.simplify(x) == 0 if exact else abs(x) < sympy.Float(10) ** (-prec // 2)
        if zero:
            finite_at = i
            break
    if finite_at is None:
        return tuple(digits)
    # 1 = d_1 ... d_n exactly: quasi-greedy is (d_1 ... d_{n-1} (d_n - 1)) repeated
    period = digits[:-1] + [digits[-1] - 1]
    out = (period * (depth // len(period) + 1))[:depth]
    return tuple(out)
