"""Suspension flows over a mixing SFT under a locally constant roof.

Flow observables are given in induced form ``phi(x) = int_0^rho(x) Phi``;
the flow time average of ``Phi`` along an orbit is then ``S_n phi / S_n rho``,
so every flow level set is a level set on the base for the observable
``phi - xi * rho`` at level 0. Its flow entropy is the root ``h`` of
``sup{h(mu) - h int rho : int (phi - xi rho) = 0} = 0``.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import BisectionBracketFailure, Infeasible, InvalidInput
from .measures import AnyMeasure, integrate, markov_entropy
from .observables import Observable, _frac, combine, constant
from .spectra import SpectrumResult
from .systems import SymbolicSystem
from .thermo import ConstrainedResult, average_range, constrained_value, pressure

RESIDUAL_TOL = 1e-10


def check_roof(roof: Observable) -> Observable:
    if roof.min_value <= 0:
        raise InvalidInput("roof function must be strictly positive")
    return roof


def abramov_entropy(m: AnyMeasure, roof: Observable) -> float:
    """Flow entropy of the suspended measure: ``h(mu) / int roof dmu``."""
    check_roof(roof)
    return markov_entropy(m) / integrate(m, roof)


def flow_entropy_at(system: SymbolicSystem, phi: Observable, roof: Observable, xi, tol: float = RESIDUAL_TOL):
    """Root ``h`` of the constrained pressure of ``-h roof`` at flow level ``xi``.

    Returns ``(h, certificate, residual)``; raises :class:`Infeasible` when
    0 is not an achievable average of ``phi - xi roof``.
    """
    check_roof(roof)
    xi = _frac(xi)
    level = combine([(1, phi), (-xi, roof)])
    if Fraction(0) not in average_range(system, level):
        raise Infeasible(f"flow level {xi} not achievable")

    def solve(h: float) -> ConstrainedResult:
        return constrained_value(system, [(level, 0)], roof * Fraction(-h))

    htop = pressure(system, constant(system, 0))
    lo, hi = 0.0, htop / float(roof.min_value) + 1.0
    r_lo = solve(lo)
    if abs(r_lo.value) <= tol:
        return 0.0, r_lo, r_lo.value
    r_hi = solve(hi)
    if not (r_lo.value > 0 > r_hi.value):
        raise BisectionBracketFailure(
            f"no sign change on [0, {hi:.6g}]: values {r_lo.value:.3g}, {r_hi.value:.3g}"
        )
    best = r_lo
    mid = lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        best = solve(mid)
        if abs(best.value) <= tol or hi - lo <= 1e-15:
            break
        if best.value > 0:
            lo = mid
        else:
            hi = mid
    return mid, best, best.value


def suspension_level_value(system: SymbolicSystem, phi: Observable, roof: Observable, c, d) -> SpectrumResult:
    """Flow entropy of the flow level set with liminf ``c`` and limsup ``d``."""
    c, d = _frac(c), _frac(d)
    if c > d:
        raise InvalidInput("need c <= d")
    values, certs = [], []
    for xi in [c] if c == d else [c, d]:
        try:
            h, cert, _ = flow_entropy_at(system, phi, roof, xi)
        except Infeasible as exc:
            return SpectrumResult.empty_set(f"flow level {xi}: {exc}")
        values.append(h)
        certs.append(cert)
    return SpectrumResult(False, min(values), (values[0], values[-1]), certs)
