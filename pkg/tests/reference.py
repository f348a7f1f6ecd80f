"""Independent reference computations used to check the package.

Nothing here calls into the package's numerical code: words are enumerated
by brute force, cycles come from networkx, spectral radii from numpy's
dense eigensolver, and constrained maxima from a primal SLSQP solve over
edge frequencies.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy.optimize import minimize

GOLDEN = (1 + math.sqrt(5)) / 2


def binary_entropy(a: float) -> float:
    if a in (0, 1):
        return 0.0
    return -a * math.log(a) - (1 - a) * math.log(1 - a)


def golden_mean_entropy(a: float) -> float:
    """Max entropy on the golden mean shift with symbol-1 frequency ``a``.

    The edge frequencies are forced: x01 = x10 = a, x00 = 1 - 2a.
    """
    if a == 0 or a == 0.5:
        return 0.0
    x00, x0 = 1 - 2 * a, 1 - a
    return -x00 * math.log(x00 / x0) - a * math.log(a / x0)


def brute_words(matrix, n: int):
    a = np.asarray(matrix)
    k = a.shape[0]
    for w in itertools.product(range(k), repeat=n):
        if all(a[w[i], w[i + 1]] for i in range(n - 1)):
            yield w


def brute_average(w, values: dict, depth: int) -> Fraction:
    m = len(w) - depth + 1
    return sum((Fraction(values.get(tuple(w[i : i + depth]), 0)) for i in range(m)), Fraction(0)) / m


def cycle_range(n: int, edges, weights):
    """Exact [min, max] cycle mean by enumerating simple cycles."""
    g = nx.MultiDiGraph()
    g.add_nodes_from(range(n))
    best = {}
    for e, (u, v) in enumerate(edges):
        key = (u, v)
        w = Fraction(weights[e])
        lo, hi = best.get(key, (w, w))
        best[key] = (min(lo, w), max(hi, w))
    simple = nx.DiGraph()
    simple.add_nodes_from(range(n))
    simple.add_edges_from(best)
    lo = hi = None
    for cyc in nx.simple_cycles(simple):
        pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
        mn = sum(best[p][0] for p in pairs) / len(pairs)
        mx = sum(best[p][1] for p in pairs) / len(pairs)
        lo = mn if lo is None else min(lo, mn)
        hi = mx if hi is None else max(hi, mx)
    return lo, hi


def spectral_pressure(matrix) -> float:
    return float(math.log(max(abs(np.linalg.eigvals(np.asarray(matrix, dtype=float))))))


def primal_value(allowed, edge_obs, targets, edge_objective=None):
    """``max h(x) + <objective, x>`` over circulations ``x`` on the allowed
    edges with ``<obs_i, x> = target_i``; SLSQP from a uniform start."""
    allowed = np.asarray(allowed)
    k = allowed.shape[0]
    edges = [(i, j) for i in range(k) for j in range(k) if allowed[i, j]]
    m = len(edges)
    obj = np.zeros(m) if edge_objective is None else np.array([edge_objective.get(e, 0) for e in edges], dtype=float)

    def neg(x):
        x = np.clip(x, 1e-15, None)
        row = np.zeros(k)
        for (i, _), xe in zip(edges, x):
            row[i] += xe
        h = -sum(xe * math.log(xe / row[i]) for (i, _), xe in zip(edges, x))
        return -(h + obj @ x)

    cons = [{"type": "eq", "fun": lambda x: x.sum() - 1}]
    for s in range(k - 1):  # conservation has rank k - 1
        out_idx = [e for e, (i, _) in enumerate(edges) if i == s]
        in_idx = [e for e, (_, j) in enumerate(edges) if j == s]
        cons.append({"type": "eq", "fun": lambda x, o=out_idx, i=in_idx: x[o].sum() - x[i].sum()})
    for ob, t in zip(edge_obs, targets):
        vec = np.array([ob.get(e, 0) for e in edges], dtype=float)
        cons.append({"type": "eq", "fun": lambda x, v=vec, t=t: v @ x - t})
    res = minimize(
        neg,
        np.full(m, 1.0 / m),
        method="SLSQP",
        bounds=[(0, 1)] * m,
        constraints=cons,
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    if not res.success:
        raise RuntimeError(res.message)
    return -res.fun
