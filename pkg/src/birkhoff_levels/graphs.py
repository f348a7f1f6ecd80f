"""Edge-graph realisation of observables, and mean-cycle computations.

A family of observables of depth at most ``K`` is read on the graph whose
vertices are admissible ``(K-1)``-words and whose edges are admissible
``K``-words (``K >= 2``). Each observable becomes an edge weight (its value on
the trailing symbols of the edge word). Invariant measures of the shift are
exactly the normalised circulations on this graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InvalidInput
from .observables import Observable
from .systems import SymbolicSystem, Word, higher_block_recode


@dataclass(frozen=True)
class EdgeModel:
    system: SymbolicSystem
    depth: int
    node_system: SymbolicSystem
    nodes: tuple[Word, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def edge_word(self, e: int) -> Word:
        u, v = self.edges[e]
        return self.nodes[u] + self.nodes[v][-1:]

    def edge_values(self, f: Observable) -> list[Fraction]:
        if f.depth > self.depth:
            raise InvalidInput(f"observable depth {f.depth} exceeds model depth {self.depth}")
        return [f(self.edge_word(e)[self.depth - f.depth :]) for e in range(len(self.edges))]

    def edge_array(self, f: Observable) -> np.ndarray:
        return np.array([float(v) for v in self.edge_values(f)])

    def initial_values(self, f: Observable) -> list[Fraction]:
        """Sum of ``f`` over the full windows inside each vertex word."""
        k = f.depth
        out = []
        for w in self.nodes:
            out.append(sum((f(w[i : i + k]) for i in range(len(w) - k + 1)), Fraction(0)))
        return out

    def edge_matrix(self, values, subset=None) -> np.ndarray:
        """Dense ``n x n`` array holding ``values`` on the chosen edges, 0 elsewhere."""
        m = np.zeros((self.n_nodes, self.n_nodes))
        idx = range(len(self.edges)) if subset is None else subset
        for e in idx:
            u, v = self.edges[e]
            m[u, v] = values[e]
        return m

    def node_word_to_symbols(self, node_path: Sequence[int]) -> list[int]:
        """Decode a path of vertices into the original symbol sequence."""
        if not len(node_path):
            return []
        out = list(self.nodes[node_path[0]])
        out.extend(self.nodes[v][-1] for v in node_path[1:])
        return out


def edge_model(system: SymbolicSystem, depth: int = 2) -> EdgeModel:
    if not system.is_markov:
        raise InvalidInput("edge models need an sft or full shift")
    depth = max(2, depth)
    if depth == 2:
        node_system, nodes = system, [(s,) for s in system.symbols]
    else:
        node_system, nodes = higher_block_recode(system, depth)
    return EdgeModel(system, depth, node_system, tuple(nodes), tuple(node_system.edges()))


def model_for(system: SymbolicSystem, observables: Sequence[Observable]) -> EdgeModel:
    return edge_model(system, max([2] + [f.depth for f in observables]))


def strongly_connected_components(n: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    """Kosaraju; returns components as vertex lists."""
    out_adj: list[list[int]] = [[] for _ in range(n)]
    in_adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        out_adj[u].append(v)
        in_adj[v].append(u)
    seen = [False] * n
    order: list[int] = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [(s, iter(out_adj[s]))]
        seen[s] = True
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                order.append(v)
            elif not seen[nxt]:
                seen[nxt] = True
                stack.append((nxt, iter(out_adj[nxt])))
    comp = [-1] * n
    comps: list[list[int]] = []
    for s in reversed(order):
        if comp[s] >= 0:
            continue
        comp[s] = len(comps)
        members = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for u in in_adj[v]:
                if comp[u] < 0:
                    comp[u] = comp[s]
                    members.append(u)
                    stack.append(u)
        comps.append(sorted(members))
    return comps


def cyclic_edges(n: int, edges: Sequence[tuple[int, int]], subset: Sequence[int]) -> list[int]:
    """Edges of ``subset`` lying on some cycle of the subgraph they span."""
    sub = [edges[e] for e in subset]
    comp_of = {}
    for c, members in enumerate(strongly_connected_components(n, sub)):
        for v in members:
            comp_of[v] = c
    return [e for e in subset if comp_of[edges[e][0]] == comp_of[edges[e][1]]]


def max_mean_cycle(n: int, edges: Sequence[tuple[int, int]], weights: Sequence, subset=None):
    """Karp's maximum cycle mean.

    Exact when the weights are ints or Fractions. Walks start at every vertex
    with value 0 (a virtual source), so the graph need not be strongly
    connected. Returns ``None`` for acyclic edge sets.
    """
    idx = list(range(len(edges))) if subset is None else list(subset)
    if not idx:
        return None
    zero = weights[idx[0]] * 0
    table = [[zero] * n]
    for _ in range(n):
        prev = table[-1]
        cur = [None] * n
        for e in idx:
            u, v = edges[e]
            if prev[u] is None:
                continue
            val = prev[u] + weights[e]
            if cur[v] is None or val > cur[v]:
                cur[v] = val
        table.append(cur)
    best = None
    for v in range(n):
        dn = table[n][v]
        if dn is None:
            continue
        worst = None
        for k in range(n):
            dk = table[k][v]
            if dk is None:
                continue
            if isinstance(dn, (int, Fraction)) and isinstance(dk, (int, Fraction)):
                r = Fraction(dn - dk, n - k)
            else:
                r = (dn - dk) / (n - k)
            if worst is None or r < worst:
                worst = r
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def min_mean_cycle(n, edges, weights, subset=None):
    m = max_mean_cycle(n, edges, [-w for w in weights], subset)
    return None if m is None else -m


def critical_edges(n: int, edges, weights, subset=None, maximize: bool = True) -> list[int]:
    """Edges lying on cycles whose mean is extreme (exact for rational weights).

    With ``lam`` the extreme mean and ``h(v)`` the best walk value into ``v``
    under weights ``w - lam``, a cycle is extreme iff all its edges are tight
    (``h(u) + w(e) - lam == h(v)``).
    """
    idx = list(range(len(edges))) if subset is None else list(subset)
    w = list(weights) if maximize else [-x for x in weights]
    lam = max_mean_cycle(n, edges, w, idx)
    if lam is None:
        return []
    red = {e: w[e] - lam for e in idx}
    h = [w[idx[0]] * 0] * n
    for _ in range(n + 1):
        changed = False
        for e in idx:
            u, v = edges[e]
            if h[u] + red[e] > h[v]:
                h[v] = h[u] + red[e]
                changed = True
        if not changed:
            break
    exact = all(isinstance(x, (int, Fraction)) for x in red.values())
    tol = 0 if exact else 1e-9 * (1 + max(abs(float(x)) for x in red.values()))
    tight = [e for e in idx if abs(h[edges[e][0]] + red[e] - h[edges[e][1]]) <= tol]
    return cyclic_edges(n, edges, tight)
