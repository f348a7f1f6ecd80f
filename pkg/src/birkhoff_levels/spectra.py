"""Entropy and pressure of Birkhoff level sets.

For a mixing SFT, observables ``phi`` and a potential ``psi``:

* ``X_phi(c, d)`` (liminf ``c``, limsup ``d``) is empty unless ``[c, d]`` lies
  in the achievable interval of ``int phi``; otherwise its pressure is
  ``min`` over ``xi in {c, d}`` of ``sup{h(mu) + int psi : int phi = xi}``.
* Pinning further averages ``phi_i = a_i`` adds equality constraints.
* A ``phi1``-regular point can be ``phi2``-irregular iff the slice
  ``{int phi2 : int phi1 = a}`` has positive width; the set of such points
  then carries the same pressure as the level set of ``phi1`` alone (or the
  full pressure when ``a`` is free).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import Infeasible
from .graphs import critical_edges, max_mean_cycle, min_mean_cycle, model_for
from .observables import Observable, _frac, constant
from .systems import SymbolicSystem
from .thermo import ConstrainedResult, ValueRange, average_range, constrained_value, pressure

WIDTH_TOL = 1e-9
A_GRID = 101
T_MAX = 1e3
GOLDEN_ITERS = 120


@dataclass(frozen=True)
class LevelSetQuery:
    level_observable: Observable
    c: Fraction
    d: Fraction
    pinned: tuple[tuple[Observable, Fraction], ...] = ()
    potential: Observable | None = None

    def __post_init__(self):
        c, d = _frac(self.c), _frac(self.d)
        if c > d:
            raise ValueError("level set needs c <= d")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "pinned", tuple((f, _frac(a)) for f, a in self.pinned))


@dataclass
class SpectrumResult:
    empty: bool
    value: float | None = None
    endpoint_values: tuple[float | None, float | None] = (None, None)
    certificates: list[ConstrainedResult] = field(default_factory=list)
    reason: str = ""

    @classmethod
    def empty_set(cls, reason: str) -> "SpectrumResult":
        return cls(empty=True, reason=reason)


def _endpoints(c: Fraction, d: Fraction) -> list[Fraction]:
    return [c] if c == d else [c, d]


def _min_over_endpoints(system, query: LevelSetQuery) -> SpectrumResult:
    certs = []
    for xi in _endpoints(query.c, query.d):
        cons = list(query.pinned) + [(query.level_observable, xi)]
        try:
            certs.append(constrained_value(system, cons, query.potential))
        except Infeasible as exc:
            return SpectrumResult.empty_set(f"endpoint {xi}: {exc}")
    vals = [r.value for r in certs]
    ends = (vals[0], vals[-1])
    return SpectrumResult(False, min(vals), ends, certs)


def level_set_value(system: SymbolicSystem, query: LevelSetQuery) -> SpectrumResult:
    """Pressure of ``X_phi(c, d)`` (entropy when the potential is 0)."""
    if query.pinned:
        return joint_level_value(system, query)
    rng = average_range(system, query.level_observable)
    if query.c < rng.lo or query.d > rng.hi:
        return SpectrumResult.empty_set(f"[{query.c}, {query.d}] not inside achievable [{rng.lo}, {rng.hi}]")
    return _min_over_endpoints(system, query)


def joint_level_value(system: SymbolicSystem, query: LevelSetQuery) -> SpectrumResult:
    """Pressure of the pinned regular sets intersected with ``X_psi(c, d)``."""
    if len(query.pinned) + 1 > 4:
        raise ValueError("at most 4 constraints in total")
    return _min_over_endpoints(system, query)


def level_value(system, phi, c, d, potential=None, pinned=()) -> SpectrumResult:
    """Convenience wrapper building the :class:`LevelSetQuery`."""
    return level_set_value(system, LevelSetQuery(phi, c, d, tuple(pinned), potential))


def _golden_min(fun, lo: float, hi: float, iters: int = GOLDEN_ITERS) -> tuple[float, float]:
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1, x2 = b - inv * (b - a), a + inv * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if b - a <= 1e-15 * max(1.0, abs(a), abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = fun(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def support_extremes(system: SymbolicSystem, objective: Observable, constraint: Observable, a) -> ValueRange:
    """``[min, max]`` of ``int objective`` over invariant measures with ``int constraint = a``.

    Interior ``a``: ``max = inf_t [maxmean(objective + t constraint) - t a]``
    by golden-section search over ``t in [-T_MAX, T_MAX]`` (and the mirror
    formula for the min). Boundary ``a``: exact mean-cycle range of the
    objective on the extreme-cycle subgraph of the constraint.
    """
    a = _frac(a)
    model = model_for(system, [objective, constraint])
    rng = average_range(system, constraint)
    if a < rng.lo or a > rng.hi:
        raise Infeasible(f"{a} outside achievable range [{rng.lo}, {rng.hi}]")
    obj_exact = model.edge_values(objective)
    con_exact = model.edge_values(constraint)
    n, edges = model.n_nodes, model.edges
    if rng.lo == rng.hi or a in (rng.lo, rng.hi):
        if rng.lo == rng.hi:
            subset = list(range(len(edges)))
        else:
            dd = constraint.denominator
            ints = [int(v * dd) for v in con_exact]
            subset = critical_edges(n, edges, ints, maximize=(a == rng.hi))
        dd = objective.denominator
        ints = [int(v * dd) for v in obj_exact]
        lo = Fraction(min_mean_cycle(n, edges, ints, subset)) / dd
        hi = Fraction(max_mean_cycle(n, edges, ints, subset)) / dd
        return ValueRange(lo, hi)
    obj = np.array([float(v) for v in obj_exact])
    con = np.array([float(v) for v in con_exact])
    af = float(a)

    def upper(sign):
        def g(t):
            return max_mean_cycle(n, edges, list(sign * obj + t * con)) - t * af

        return _golden_min(g, -T_MAX, T_MAX)[1]

    hi = float(upper(1.0))
    lo = float(-upper(-1.0)) + 0.0
    if lo > hi:
        lo = hi = 0.5 * (lo + hi)
    return ValueRange(lo, hi)


def slice_width(system, objective, constraint, a) -> float:
    r = support_extremes(system, objective, constraint, a)
    return float(r.hi) - float(r.lo)


def reg_irreg_value(
    system: SymbolicSystem,
    phi1: Observable,
    phi2: Observable,
    potential: Observable | None = None,
    a=None,
    width_tol: float = WIDTH_TOL,
) -> SpectrumResult:
    """Pressure of ``R_phi1(a) & I_phi2`` (or of ``I_phi2`` restricted to
    ``phi1``-regular points when ``a`` is ``None``)."""
    if potential is None:
        potential = constant(system, 0)
    if a is not None:
        a = _frac(a)
        try:
            w = slice_width(system, phi2, phi1, a)
        except Infeasible as exc:
            return SpectrumResult.empty_set(str(exc))
        if w <= width_tol:
            return SpectrumResult.empty_set(f"slice width {w:.3g} at a={a}: phi1-regular points are phi2-regular")
        r = constrained_value(system, [(phi1, a)], potential)
        return SpectrumResult(False, r.value, (r.value, r.value), [r])

    rng = average_range(system, phi1)
    lo, hi = rng.lo, rng.hi
    grid = [lo] if lo == hi else [lo + (hi - lo) * Fraction(i, A_GRID - 1) for i in range(A_GRID)]
    widths = []
    for x in grid:
        w = slice_width(system, phi2, phi1, x)
        if w > width_tol:
            p = pressure(system, potential)
            return SpectrumResult(False, p, (p, p), reason=f"slice width {w:.6g} at a={x}")
        widths.append(w)
    if len(grid) > 2:
        k = int(np.argmax(widths))
        left, right = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        best_a, neg_w = _golden_min(lambda t: -slice_width(system, phi2, phi1, t), float(left), float(right), 60)
        if -neg_w > width_tol:
            p = pressure(system, potential)
            return SpectrumResult(False, p, (p, p), reason=f"slice width {-neg_w:.6g} at a={best_a}")
    return SpectrumResult.empty_set("every phi1 slice has zero phi2-width")


@dataclass(frozen=True)
class SpectrumPoint:
    alpha: float
    value: float
    q: float
    converged: bool


def spectrum_curve(
    system: SymbolicSystem,
    phi: Observable,
    grid: Sequence,
    potential: Observable | None = None,
) -> list[SpectrumPoint]:
    """``alpha -> sup{h(mu) + int potential : int phi = alpha}`` on a grid."""
    out = []
    for alpha in grid:
        r = constrained_value(system, [(phi, alpha)], potential)
        out.append(SpectrumPoint(float(_frac(alpha)), r.value, float(r.q[0]), r.converged))
    return out


def concavity_violation(points: Sequence[SpectrumPoint]) -> float:
    """Largest amount by which a sample lies below the chord of its neighbours."""
    worst = 0.0
    for p0, p1, p2 in zip(points, points[1:], points[2:]):
        lam = (p2.alpha - p1.alpha) / (p2.alpha - p0.alpha)
        chord = lam * p0.value + (1 - lam) * p2.value
        worst = max(worst, chord - p1.value)
    return worst
