"""Pressure, equilibrium states and entropy maximisation under linear
constraints on mixing SFTs.

The constrained problem

    sup { h(mu) + int psi dmu : int phi_i dmu = a_i }

is solved through its smooth convex dual ``inf_q P(psi + q.phi) - q.a``
with a damped Newton method. Targets on the boundary of the achievable set
(where the dual minimiser escapes to infinity) are first moved to the
relative interior of a face by restricting the edge graph: exactly, via
extreme mean cycles, for a single observable, and with a linear program on
circulations when several constraints interact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DepthMismatch, Infeasible, InvalidInput, NoConvergence
from .graphs import (
    EdgeModel,
    critical_edges,
    cyclic_edges,
    max_mean_cycle,
    min_mean_cycle,
    model_for,
    strongly_connected_components,
)
from .measures import MarkovMeasure, markov_entropy
from .observables import Observable, _frac
from .systems import SymbolicSystem

Q_MAX = 50.0
DUAL_FLOOR = -1e6
GRAD_TOL = 1e-9
MAX_NEWTON = 200


@dataclass(frozen=True)
class ValueRange:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidInput("ValueRange needs lo <= hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= _frac(x) <= self.hi


def transfer_matrix(system: SymbolicSystem, potential: Observable) -> np.ndarray:
    """``M_ij = A_ij exp(potential(ij))``; depth-1 potentials act on the target symbol."""
    if not system.is_markov:
        raise InvalidInput("transfer matrices need an sft or full shift")
    if potential.depth > 2:
        raise DepthMismatch("transfer_matrix needs depth <= 2; recode the system first")
    a = system.matrix.astype(float)
    n = system.alphabet_size
    if potential.depth == 1:
        col = np.array([math.exp(float(potential((j,)))) for j in range(n)])
        return a * col[None, :]
    w = np.array([[float(potential((i, j))) for j in range(n)] for i in range(n)])
    return a * np.exp(w)


def perron(m: np.ndarray, tol: float = 1e-14, max_iter: int = 10**6):
    """Perron root and left/right eigenvectors of an irreducible non-negative matrix.

    Power iteration on ``m / r + I`` where ``r`` is a rough spectral radius;
    the shift makes periodic (irreducible, imprimitive) matrices converge too.
    Returns ``(root, left, right, iterations)``.
    """
    n = m.shape[0]
    r = float(np.max(np.abs(np.linalg.eigvals(m)))) if n > 1 else float(m[0, 0])
    if r <= 0:
        raise NoConvergence("matrix has zero spectral radius (no cycles)", 0)
    b = m / r + np.eye(n)

    def iterate(mat):
        v = np.full(n, 1.0 / n)
        lam = 0.0
        for it in range(1, max_iter + 1):
            w = mat @ v
            lam = w.sum()
            w /= lam
            if np.abs(w - v).max() <= tol * w.max():
                return lam, w, it
            v = w
        raise NoConvergence(f"power iteration did not converge in {max_iter} iterations", max_iter)

    lam, right, it1 = iterate(b)
    _, left, it2 = iterate(b.T)
    return (lam - 1.0) * r, left, right, it1 + it2


def _as_subgraph_matrix(model: EdgeModel, weights: np.ndarray, subset: Sequence[int]):
    nodes = sorted({v for e in subset for v in model.edges[e]})
    pos = {v: i for i, v in enumerate(nodes)}
    m = np.zeros((len(nodes), len(nodes)))
    for e in subset:
        u, v = model.edges[e]
        m[pos[u], pos[v]] = math.exp(weights[e])
    return nodes, pos, m


def _evaluate(model: EdgeModel, weights: np.ndarray, subset: Sequence[int]):
    """Pressure and equilibrium edge frequencies for an irreducible edge subset."""
    nodes, pos, m = _as_subgraph_matrix(model, weights, subset)
    lam, u, v, _ = perron(m)
    x = np.zeros(len(model.edges))
    norm = lam * float(u @ v)
    for e in subset:
        a, b = model.edges[e]
        x[e] = u[pos[a]] * m[pos[a], pos[b]] * v[pos[b]] / norm
    x /= x.sum()
    return math.log(lam), x


def _measure_from_edges(model: EdgeModel, x: np.ndarray) -> MarkovMeasure:
    mat = model.edge_matrix(x)
    return MarkovMeasure.from_edge_frequencies(mat, model.node_system.matrix)


def pressure(system: SymbolicSystem, potential: Observable) -> float:
    """``ln`` of the Perron root of the transfer matrix (recoding deep potentials)."""
    model = model_for(system, [potential])
    _, m = _potential_matrix(model, potential)
    lam, _, _, _ = perron(m)
    return math.log(lam)


def _potential_matrix(model: EdgeModel, potential: Observable):
    w = model.edge_array(potential)
    return w, model.edge_matrix(np.exp(w))


def equilibrium_state(system: SymbolicSystem, potential: Observable) -> MarkovMeasure:
    """Gibbs/Parry measure built from the left/right Perron vectors.

    For depth > 2 potentials the measure lives on the higher-block recoding
    (see :func:`birkhoff_levels.graphs.edge_model`).
    """
    model = model_for(system, [potential])
    w = model.edge_array(potential)
    _, x = _evaluate(model, w, range(len(model.edges)))
    return _measure_from_edges(model, x)


def average_range(system: SymbolicSystem, f: Observable) -> ValueRange:
    """Exact ``[min, max]`` of ``int f dmu`` over invariant measures (Karp)."""
    model = model_for(system, [f])
    lo, hi = _exact_range(model, f, range(len(model.edges)))
    return ValueRange(lo, hi)


def _exact_range(model: EdgeModel, f: Observable, subset) -> tuple[Fraction, Fraction]:
    d = f.denominator
    ints = [int(v * d) for v in model.edge_values(f)]
    hi = max_mean_cycle(model.n_nodes, model.edges, ints, subset)
    lo = min_mean_cycle(model.n_nodes, model.edges, ints, subset)
    if hi is None:
        raise Infeasible("edge set carries no cycle")
    return Fraction(lo) / d, Fraction(hi) / d


@dataclass
class ConstrainedResult:
    value: float
    q: np.ndarray
    equilibrium: MarkovMeasure
    model: EdgeModel
    edge_frequencies: np.ndarray
    active_edges: tuple[int, ...]
    gradient_norm: float
    iterations: int
    converged: bool
    boundary: bool
    integrals: tuple[float, ...] = field(default=())

    @property
    def entropy(self) -> float:
        return markov_entropy(self.equilibrium)


def _lp_face(model: EdgeModel, subset, cons: list[np.ndarray], targets: list[float], tol=1e-10):
    """Edges of ``subset`` carrying mass in some feasible circulation."""
    subset = list(subset)
    k = len(subset)
    n = model.n_nodes
    rows, rhs = [], []
    for v in range(n):
        row = np.zeros(k)
        for i, e in enumerate(subset):
            a, b = model.edges[e]
            if a == v:
                row[i] += 1
            if b == v:
                row[i] -= 1
        if row.any():
            rows.append(row)
            rhs.append(0.0)
    rows.append(np.ones(k))
    rhs.append(1.0)
    for c, t in zip(cons, targets):
        rows.append(c[subset])
        rhs.append(t)
    a_eq, b_eq = np.array(rows), np.array(rhs)
    positive: set[int] = set()
    for i in range(k):
        if i in positive:
            continue
        obj = np.zeros(k)
        obj[i] = -1
        res = linprog(obj, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status == 2:
            raise Infeasible("no invariant measure satisfies the constraints")
        if res.status != 0:
            raise NoConvergence(f"LP face search failed: {res.message}")
        positive.update(j for j in range(k) if res.x[j] > tol)
    return [subset[i] for i in sorted(positive)]


def constrained_value(
    system: SymbolicSystem,
    constraints: Sequence[tuple[Observable, object]],
    objective: Observable | None = None,
    *,
    q_max: float = Q_MAX,
    dual_floor: float = DUAL_FLOOR,
    grad_tol: float = GRAD_TOL,
) -> ConstrainedResult:
    """``sup{h(mu) + int objective dmu : int phi_i dmu = a_i}`` with its dual certificate."""
    if len(constraints) > 4:
        raise InvalidInput("at most 4 constraints are supported")
    obs = [f for f, _ in constraints]
    if objective is None:
        from .observables import constant

        objective = constant(system, 0)
    model = model_for(system, obs + [objective])
    targets = [_frac(a) for _, a in constraints]
    active = list(range(len(model.edges)))
    live = list(range(len(constraints)))
    boundary = False

    # exact face restriction, one observable at a time
    changed = True
    while changed:
        changed = False
        for i in list(live):
            lo, hi = _exact_range(model, obs[i], active)
            a = targets[i]
            if a < lo or a > hi:
                raise Infeasible(f"target {a} outside achievable range [{lo}, {hi}]")
            if lo == hi:
                live.remove(i)
                continue
            if a == hi or a == lo:
                ints = [int(v * obs[i].denominator) for v in model.edge_values(obs[i])]
                active = critical_edges(model.n_nodes, model.edges, ints, active, maximize=(a == hi))
                live.remove(i)
                boundary = True
                changed = True
                break

    cons = [model.edge_array(obs[i]) for i in range(len(obs))]
    tvals = [float(t) for t in targets]
    if len(live) >= 2:
        face = _lp_face(model, active, [cons[i] for i in live], [tvals[i] for i in live])
        face = cyclic_edges(model.n_nodes, model.edges, face)
        if len(face) < len(active):
            boundary = True
        active = face

    psi = model.edge_array(objective)
    comps = _components(model, active)
    q = np.zeros(len(obs))
    if len(comps) > 1:
        if live:
            raise NoConvergence("constraint face splits into several components; unsupported")
        best = max(comps, key=lambda c: _evaluate(model, psi, c)[0])
        comps = [best]
    active = comps[0]

    def dual(qv):
        w = psi + sum(qv[j] * cons[i] for j, i in enumerate(live))
        p, x = _evaluate(model, w, active)
        grad = np.array([x @ cons[i] - tvals[i] for i in live])
        return p - sum(qv[j] * tvals[i] for j, i in enumerate(live)), grad, x

    qv = np.zeros(len(live))
    val, grad, x = dual(qv)
    it = 0
    if live:
        for it in range(1, MAX_NEWTON + 1):
            if np.linalg.norm(grad) <= grad_tol:
                break
            step = -np.linalg.lstsq(_hessian(dual, qv), grad, rcond=1e-10)[0]
            if grad @ step >= 0:
                step = -grad
            t = 1.0
            gnorm = np.linalg.norm(grad)
            while t > 1e-14:
                cand = qv + t * step
                cval, cgrad, cx = dual(cand)
                # near the optimum value decreases drop below float resolution;
                # a shrinking gradient is then the usable signal
                if cval <= val + 1e-4 * t * (grad @ step) or np.linalg.norm(cgrad) <= (1 - 1e-4 * t) * gnorm:
                    break
                t *= 0.5
            else:
                break
            qv, val, grad, x = cand, cval, cgrad, cx
            if np.linalg.norm(qv) > q_max or val < dual_floor:
                raise Infeasible(
                    f"dual diverges (|q| = {np.linalg.norm(qv):.3g}); target on or outside the boundary"
                )
        else:
            it = MAX_NEWTON
        if np.linalg.norm(grad) > grad_tol:
            qv, val, grad, x, extra = _gradient_descent(dual, qv, val, grad, x, grad_tol)
            it += extra
    converged = bool(np.linalg.norm(grad) <= grad_tol) if live else True
    if not converged:
        raise NoConvergence(f"dual gradient norm {np.linalg.norm(grad):.3g} after {it} iterations", it)
    for j, i in enumerate(live):
        q[i] = qv[j]
    for i in range(len(obs)):
        if i not in live:
            q[i] = math.nan
    return ConstrainedResult(
        value=float(val),
        q=q,
        equilibrium=_measure_from_edges(model, x),
        model=model,
        edge_frequencies=x,
        active_edges=tuple(active),
        gradient_norm=float(np.linalg.norm(grad)) if live else 0.0,
        iterations=it,
        converged=converged,
        boundary=boundary,
        integrals=tuple(float(x @ c) for c in cons),
    )


def _components(model: EdgeModel, subset) -> list[list[int]]:
    subset = cyclic_edges(model.n_nodes, model.edges, list(subset))
    if not subset:
        raise Infeasible("no cycle carries the constraints")
    sub = [model.edges[e] for e in subset]
    out = []
    for members in strongly_connected_components(model.n_nodes, sub):
        ms = set(members)
        edges = [e for e in subset if model.edges[e][0] in ms and model.edges[e][1] in ms]
        if edges:
            out.append(edges)
    return out


def _hessian(dual, q, h=1e-5):
    k = q.size
    hess = np.zeros((k, k))
    for j in range(k):
        e = np.zeros(k)
        e[j] = h
        hess[:, j] = (dual(q + e)[1] - dual(q - e)[1]) / (2 * h)
    return 0.5 * (hess + hess.T)


def _gradient_descent(dual, q, val, grad, x, grad_tol, max_iter=10_000):
    # the dual Hessian is bounded by the squared sup norm of the constraints
    step = 1.0
    for it in range(1, max_iter + 1):
        if np.linalg.norm(grad) <= grad_tol:
            return q, val, grad, x, it
        while step > 1e-16:
            cand = q - step * grad
            cval, cgrad, cx = dual(cand)
            if cval <= val - 0.5 * step * (grad @ grad) or np.linalg.norm(cgrad) < np.linalg.norm(grad):
                break
            step *= 0.5
        q, val, grad, x = cand, cval, cgrad, cx
        step *= 2
    return q, val, grad, x, max_iter


@dataclass(frozen=True)
class PressureEvaluation:
    q: np.ndarray
    pressure: float
    gradient: np.ndarray
    equilibrium: MarkovMeasure


def evaluate_pressure(
    system: SymbolicSystem,
    observables: Sequence[Observable],
    q: Sequence[float],
    potential: Observable | None = None,
) -> PressureEvaluation:
    """``P(potential + sum q_i phi_i)`` with gradient ``(int phi_i dmu_q)_i``."""
    extra = [potential] if potential is not None else []
    model = model_for(system, list(observables) + extra)
    w = sum(qi * model.edge_array(f) for qi, f in zip(q, observables))
    w = np.zeros(len(model.edges)) + w
    if potential is not None:
        w = w + model.edge_array(potential)
    p, x = _evaluate(model, w, range(len(model.edges)))
    grad = np.array([x @ model.edge_array(f) for f in observables])
    return PressureEvaluation(np.asarray(q, dtype=float), p, grad, _measure_from_edges(model, x))
