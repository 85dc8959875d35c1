"""Homotopies of Lie algebroid morphisms and their chain operators.

A homotopy from A to B is a morphism Phi: T R x A -> B (source tagged as
``prolong(1, A)``).  Its chain operator is h = int_1 . Phi^*, and

    h . d_B + d_A . h = Phi_1^* - Phi_0^*

holds on tensor forms of B.
"""
from __future__ import annotations

from typing import Tuple

from .algebroid import (
    ChartAlgebroid,
    ChartMorphism,
    param_names,
    prolong,
    prolongation_of,
    validate_morphism,
)
from .errors import EndpointError, InvalidMorphism, NotProlongation, TargetMismatch
from .forms import TensorForm, d, pullback
from .poly import Poly
from .simplex import fiber_integrate


def projection(k: int, A: ChartAlgebroid) -> ChartMorphism:
    """pi: T R^k x A -> A over pr_2; the t-frames go to zero."""
    P = prolong(k, A)
    key = ("pi", k)
    hit = A._cache.get(key)
    if hit is None:
        S = P.space
        zero, one = Poly.zero(S), Poly.const(1, S)
        fiber = [[one if c == k + a else zero for c in range(P.rank)] for a in range(A.rank)]
        hit = ChartMorphism(P, A, [Poly.var(v, S) for v in A.space.names], fiber,
                            name=f"pi_{A.name}" if A.name else "pi")
        A._cache[key] = hit
    return hit


def zero_section_map(k: int, A: ChartAlgebroid) -> ChartMorphism:
    """G_0: A -> T R^k x A, a |-> (0, a) over x |-> (0, x)."""
    P = prolong(k, A)
    key = ("G0", k)
    hit = A._cache.get(key)
    if hit is None:
        S = A.space
        zero, one = Poly.zero(S), Poly.const(1, S)
        base = [zero] * k + [Poly.var(v, S) for v in A.space.names]
        fiber = [[one if r == k + a else zero for a in range(A.rank)] for r in range(P.rank)]
        hit = ChartMorphism(A, P, base, fiber, name=f"G0_{A.name}" if A.name else "G0")
        A._cache[key] = hit
    return hit


def _restrict(phi: ChartMorphism, value: int) -> ChartMorphism:
    P = phi.source
    _, A = prolongation_of(P)
    t = param_names(P)[0]
    subst = {v: Poly.var(v, A.space) for v in A.space.names}
    subst[t] = Poly.const(value, A.space)

    def at(p: Poly) -> Poly:
        return p.compose(subst, A.space)

    base = [at(p) for p in phi.base_map]
    fiber = [[at(p) for p in row[1:]] for row in phi.fiber]
    label = f"{phi.name}_{value}" if phi.name else ""
    return ChartMorphism(A, phi.target, base, fiber, name=label)


def endpoints(phi: ChartMorphism) -> Tuple[ChartMorphism, ChartMorphism]:
    """(Phi_0, Phi_1): set t = 0 resp. 1 and drop the d/dt column."""
    P = phi.source
    k, _ = prolongation_of(P)
    if k != 1:
        raise NotProlongation(f"a homotopy needs a source prolong(1, A), got order {k}")
    out = []
    for i in (0, 1):
        end = _restrict(phi, i)
        report = validate_morphism(end)
        if not report.ok:
            raise EndpointError(f"endpoint Phi_{i} is not a morphism:\n{report}")
        out.append(end)
    return out[0], out[1]


class Homotopy:
    """A validated morphism prolong(1, A) -> B with its cached endpoints."""

    def __init__(self, phi: ChartMorphism, name: str = ""):
        k, A = prolongation_of(phi.source)
        if k != 1:
            raise NotProlongation(f"a homotopy needs a source prolong(1, A), got order {k}")
        report = validate_morphism(phi)
        if not report.ok:
            raise InvalidMorphism(str(report))
        self.phi = phi
        self.name = name or phi.name
        self.base = A
        self.phi0, self.phi1 = endpoints(phi)

    @property
    def source(self) -> ChartAlgebroid:
        return self.base

    @property
    def target(self) -> ChartAlgebroid:
        return self.phi.target

    def __repr__(self) -> str:
        return f"Homotopy({self.name or '?'}: {self.base.label} -> {self.target.label})"


def _homotopy(h) -> Homotopy:
    return h if isinstance(h, Homotopy) else Homotopy(h)


def chain_operator(h, eta: TensorForm) -> TensorForm:
    """h(eta) = int_1 Phi^* eta, one degree below eta."""
    h = _homotopy(h)
    if eta.owner != h.target:
        raise TargetMismatch(f"form lives on {eta.owner.label}, homotopy lands in {h.target.label}")
    return fiber_integrate(1, pullback(h.phi, eta), _quiet=True)


def verify_chain(h, eta: TensorForm) -> TensorForm:
    """h(d eta) + d(h eta) - Phi_1^* eta + Phi_0^* eta; zero when the identity holds."""
    h = _homotopy(h)
    lhs = chain_operator(h, d(eta)) + d(chain_operator(h, eta))
    return lhs - pullback(h.phi1, eta) + pullback(h.phi0, eta)


def poincare_homotopy(k: int, A: ChartAlgebroid):
    """(pi, G_0, Phi) for T R^k x A, where Phi: T R x (T R^k x A) -> T R^k x A
    lies over (s, t, x) |-> (s t, x) and joins G_0 . pi to the identity."""
    if k < 1:
        raise ValueError("k must be at least 1")
    P = prolong(k, A)
    pi, g0 = projection(k, A), zero_section_map(k, A)
    key = ("poincare", k)
    hit = A._cache.get(key)
    if hit is not None:
        return pi, g0, hit
    tn = param_names(P)
    s_name = "s"
    while s_name in P.space:
        s_name += "_"
    Q = prolong(1, P, names=(s_name,))
    S = Q.space
    s = Poly.var(s_name, S)
    ts = [Poly.var(v, S) for v in tn]
    base = [s * t for t in ts] + [Poly.var(v, S) for v in A.space.names]
    zero, one = Poly.zero(S), Poly.const(1, S)
    fiber = [[zero] * Q.rank for _ in range(P.rank)]
    for i in range(k):
        fiber[i][0] = ts[i]
        fiber[i][1 + i] = s
    for a in range(A.rank):
        fiber[k + a][1 + k + a] = one
    phi = ChartMorphism(Q, P, base, fiber, name=f"poincare_{k}")
    hom = Homotopy(phi)
    A._cache[key] = hom
    return pi, g0, hom


def constant_homotopy(A: ChartAlgebroid) -> Homotopy:
    """The projection prolong(1, A) -> A as a homotopy from id_A to itself."""
    return Homotopy(projection(1, A))

