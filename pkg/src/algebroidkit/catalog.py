"""Bundled example algebroids, morphisms and homotopies used by the fuzz
suites, the CLI and the tests."""
from __future__ import annotations

from functools import lru_cache
from typing import Dict

from .algebroid import ChartAlgebroid, ChartMorphism, point, prolong, tangent
from .poly import Poly, VarSpace


@lru_cache(maxsize=None)
def tr1() -> ChartAlgebroid:
    return tangent("x", name="TR1")


@lru_cache(maxsize=None)
def tr2() -> ChartAlgebroid:
    return tangent("x1", "x2", name="TR2")


@lru_cache(maxsize=None)
def so3() -> ChartAlgebroid:
    return point(("e1", "e2", "e3"),
                 {("e1", "e2"): {"e3": 1}, ("e2", "e3"): {"e1": 1}, ("e3", "e1"): {"e2": 1}},
                 name="so3")


@lru_cache(maxsize=None)
def aff1() -> ChartAlgebroid:
    return point(("e1", "e2"), {("e1", "e2"): {"e2": 1}}, name="aff1")


@lru_cache(maxsize=None)
def heisenberg() -> ChartAlgebroid:
    return point(("e1", "e2", "e3"), {("e1", "e2"): {"e3": 1}}, name="heis")


@lru_cache(maxsize=None)
def point0() -> ChartAlgebroid:
    """The rank-0 algebroid over a point."""
    return point((), name="pt")


def abelian(n: int) -> ChartAlgebroid:
    return point(tuple(f"e{i + 1}" for i in range(n)), name=f"ab{n}")


@lru_cache(maxsize=None)
def chart2() -> ChartAlgebroid:
    """Rank-2 algebroid over R^2 with rho(e1) = d/dx, rho(e2) = x^2 d/dx + d/dy
    and [e1, e2] = 2x e1."""
    S = VarSpace.base("x", "y")
    x = Poly.var("x", S)
    return ChartAlgebroid.build(
        S, ("e1", "e2"),
        {"e1": {"x": 1}, "e2": {"x": x * x, "y": 1}},
        {("e1", "e2"): {"e1": 2 * x}},
        name="chart2",
    )


def bundled_algebroids() -> Dict[str, ChartAlgebroid]:
    """The algebroids every randomized suite runs over."""
    return {"TR1": tr1(), "TR2": tr2(), "so3": so3(), "aff1": aff1(), "chart2": chart2()}


# -- morphisms ---------------------------------------------------------------

def chart2_anchor() -> ChartMorphism:
    """The anchor of chart2 as a base-preserving morphism into T R^2."""
    A = chart2()
    T = tangent("x", "y", name="T(x,y)")
    x = Poly.var("x", A.space)
    return ChartMorphism.build(A, T, fiber={"e1": {"dx": 1}, "e2": {"dx": x * x, "dy": 1}},
                               name="rho_chart2")


def chart2_to_tr1() -> ChartMorphism:
    """chart2 -> TR1 over (x, y) |-> x."""
    A = chart2()
    x = Poly.var("x", A.space)
    return ChartMorphism.build(A, tr1(), {"x": x}, {"e1": {"dx": 1}, "e2": {"dx": x * x}},
                               name="chart2_to_TR1")


def parabola() -> ChartMorphism:
    """Tangent map of the curve x |-> (x, x^2), TR1 -> TR2."""
    A = tr1()
    x = Poly.var("x", A.space)
    return ChartMorphism.build(A, tr2(), {"x1": x, "x2": x * x},
                               {"dx": {"dx1": 1, "dx2": 2 * x}}, name="parabola")


def so3_cycle() -> ChartMorphism:
    """Automorphism e1 -> e2 -> e3 -> e1 of so(3)."""
    g = so3()
    return ChartMorphism.build(g, g, fiber={"e1": {"e2": 1}, "e2": {"e3": 1}, "e3": {"e1": 1}},
                               name="so3_cycle")


def aff1_shear() -> ChartMorphism:
    """Automorphism e1 -> e1 + e2, e2 -> 2 e2 of aff(1)."""
    g = aff1()
    return ChartMorphism.build(g, g, fiber={"e1": {"e1": 1, "e2": 1}, "e2": {"e2": 2}},
                               name="aff1_shear")


def bundled_morphisms() -> Dict[str, ChartMorphism]:
    from .homotopy import projection, zero_section_map
    from .simplex import face_map
    out = {
        "rho_chart2": chart2_anchor(),
        "chart2_to_TR1": chart2_to_tr1(),
        "parabola": parabola(),
        "so3_cycle": so3_cycle(),
        "aff1_shear": aff1_shear(),
        "pi_TR1": projection(1, tr1()),
        "G0_chart2": zero_section_map(1, chart2()),
        "face_1_0_so3": face_map(1, 0, so3()),
        "face_2_1_TR1": face_map(2, 1, tr1()),
    }
    return out


# -- homotopies ---------------------------------------------------------------

def heisenberg_gauge() -> ChartMorphism:
    """Homotopy T R x heis -> heis from id to exp(-ad e1): d/dt |-> e1,
    e2 |-> e2 - t e3.  Base preserving (both over a point)."""
    h = heisenberg()
    P = prolong(1, h)
    t = Poly.var(P.space.names[0], P.space)
    return ChartMorphism.build(P, h, fiber={
        "dt1": {"e1": 1}, "e1": {"e1": 1}, "e2": {"e2": 1, "e3": -t}, "e3": {"e3": 1}},
        name="heis_gauge")


def so3_flat() -> ChartMorphism:
    """Homotopy T R x TR1 -> so(3) along e1 with potential p = t^2 x + t x^3:
    d/dt |-> p_t e1, d/dx |-> p_x e1."""
    P = prolong(1, tr1())
    t, x = Poly.var("t1", P.space), Poly.var("x", P.space)
    p = t * t * x + t * x ** 3
    return ChartMorphism.build(P, so3(), {}, {"dt1": {"e1": p.partial("t1")},
                                              "dx": {"e1": p.partial("x")}}, name="so3_flat")
