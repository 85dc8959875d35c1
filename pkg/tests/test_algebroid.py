from fractions import Fraction

import pytest

from algebroidkit import catalog
from algebroidkit.algebroid import (
    ChartAlgebroid,
    ChartMorphism,
    anchor_apply,
    bracket,
    compose_morphisms,
    identity,
    point,
    prolong,
    product,
    psi_check,
    rename_frames,
    rename_vars,
    tangent,
    validate,
    validate_morphism,
)
from algebroidkit.errors import (
    AlgebroidMismatch,
    ChainMismatch,
    NotProlongation,
    ShapeError,
    VarClash,
)
from algebroidkit.poly import PARAM, Poly, VarSpace
from algebroidkit.sampling import random_poly, random_section, trial_rng
from oracles import product_bracket

ALGS = catalog.bundled_algebroids()


def sec(A, **coeffs):
    return A.section(coeffs)


# -- validation --------------------------------------------------------------------

def test_tangent_and_so3_validate():
    assert validate(catalog.tr2()).ok
    assert validate(catalog.so3()).ok
    for A in ALGS.values():
        assert validate(A).ok, A.label


def test_jacobi_violation_located():
    g = point(("e1", "e2", "e3"),
              {("e1", "e2"): {"e3": 1}, ("e2", "e3"): {"e1": 1}, ("e3", "e1"): {"e1": 1}})
    report = validate(g)
    assert not report.ok
    [v] = report.violations
    assert v.kind == "jacobi"
    assert v.indices == ("e1", "e2", "e3")
    assert v.residual == -g.frame_section("e3")
    assert str(v) == "jacobi violation at (e1, e2, e3): residual -e3"


def test_anchor_violation_located():
    S = VarSpace.base("x")
    A = ChartAlgebroid.build(S, ("a", "b"), {"a": {"x": 1}, "b": {"x": 1}}, {("a", "b"): {"a": 1}})
    kinds = {v.kind for v in validate(A)}
    assert kinds == {"anchor"}


def test_shape_errors():
    S = VarSpace.base("x")
    with pytest.raises(ShapeError):
        ChartAlgebroid(S, ("a",), [[]], [[[0]]])
    with pytest.raises(ShapeError):
        point(("e1", "e2"), {("e1", "e1"): {"e2": 1}})
    with pytest.raises(ShapeError):
        point(("e1", "e2"), {("e1", "e2"): {"e2": 1}, ("e2", "e1"): {"e2": 1}})


# -- bracket and anchor ----------------------------------------------------------

def test_vector_field_bracket():
    A = catalog.tr2()
    x2 = Poly.var("x2", A.space)
    assert bracket(sec(A, dx1=x2), sec(A, dx2=1)) == sec(A, dx1=-1)


def test_so3_bracket():
    g = catalog.so3()
    assert bracket(g.frame_section("e1"), g.frame_section("e2")) == g.frame_section("e3")


def test_bracket_owner_mismatch():
    with pytest.raises(AlgebroidMismatch):
        bracket(catalog.tr1().frame_section(0), catalog.so3().frame_section(0))


def test_anchor_apply_examples():
    A = catalog.tr1()
    x = Poly.var("x", A.space)
    assert anchor_apply(A.frame_section(0), x * x) == 2 * x
    g = catalog.so3()
    assert anchor_apply(g.frame_section(0) * 3, Poly.const(5)) == Poly.zero()
    B = catalog.tr2()
    x1, x2 = Poly.var("x1", B.space), Poly.var("x2", B.space)
    assert anchor_apply(sec(B, dx2=x1), x2) == x1


@pytest.mark.parametrize("name", sorted(ALGS))
def test_bracket_axioms_on_random_sections(name):
    A = ALGS[name]
    for i in range(15):
        rng = trial_rng(11, name, i)
        a, b, c = (random_section(rng, A) for _ in range(3))
        f = random_poly(rng, A.space, 2, 2)
        p = random_poly(rng, A.space, 3, 3)
        assert bracket(a, a).is_zero()
        assert bracket(a, b) == -bracket(b, a)
        # Leibniz
        assert bracket(a, f * b) == f * bracket(a, b) + anchor_apply(a, f) * b
        # Jacobi on sections, not only on frames
        jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
        assert jac.is_zero()
        # anchor is a Lie algebra homomorphism
        lhs = anchor_apply(bracket(a, b), p)
        rhs = anchor_apply(a, anchor_apply(b, p)) - anchor_apply(b, anchor_apply(a, p))
        assert lhs == rhs


# -- products and prolongations ----------------------------------------------------

def test_product_of_lines_is_plane():
    P = product(tangent("x1"), tangent("x2"))
    T = tangent("x1", "x2")
    assert P.space == T.space and P.frames == T.frames
    assert P.anchor == T.anchor and P.structure == T.structure


def test_product_with_rank_zero_point():
    A = catalog.chart2()
    P = product(A, catalog.point0())
    assert P.space == A.space and P.frames == A.frames
    assert P.anchor == A.anchor and P.structure == A.structure


def test_product_name_clash():
    with pytest.raises(VarClash):
        product(catalog.tr1(), catalog.tr1())
    other = rename_frames(rename_vars(tangent("x"), {"x": "y"}), {"dx": "dy"})
    P = product(catalog.tr1(), other)
    assert P.space.names == ("x", "y") and P.frames == ("dx", "dy")
    assert validate(P).ok


def test_product_bracket_matches_two_component_formula():
    A, B = catalog.tr1(), catalog.so3()
    P = product(A, B)
    x = Poly.var("x", P.space)
    sigma = P.section({"dx": x * x, "e1": x, "e3": 2})
    eta = P.section({"dx": 1 - x, "e1": 3, "e2": x ** 3})
    assert bracket(sigma, eta).coeffs == product_bracket(A, B, P, sigma.coeffs, eta.coeffs)
    C, G = catalog.chart2(), rename_frames(catalog.aff1(), {"e1": "f1", "e2": "f2"})
    Q = product(C, G)
    for i in range(20):
        rng = trial_rng(5, "product", i)
        s, e = random_section(rng, Q), random_section(rng, Q)
        assert bracket(s, e).coeffs == product_bracket(C, G, Q, s.coeffs, e.coeffs)


def test_prolong_shapes():
    P = prolong(1, catalog.point0())
    assert P.rank == 1 and P.space.kinds == (PARAM,)
    assert P.anchor == ((Poly.const(1, P.space),),)
    assert prolong(2, catalog.tr1()).rank == 3
    assert prolong(2, catalog.tr1()) is prolong(2, catalog.tr1())
    assert prolong(0, catalog.so3()) is catalog.so3()
    for A in ALGS.values():
        for k in (1, 2, 3):
            P = prolong(k, A)
            assert P.prolongation == (k, A)
            assert P.frames[:k] == tuple(f"dt{i + 1}" for i in range(k))
            assert validate(P).ok


# -- morphisms -------------------------------------------------------------------

def test_identity_validates():
    for A in ALGS.values():
        assert validate_morphism(identity(A)).ok


def test_bundled_morphisms_validate():
    for name, phi in catalog.bundled_morphisms().items():
        assert validate_morphism(phi).ok, name


def test_doubled_fiber_breaks_anchor():
    A = catalog.tr1()
    x = Poly.var("x", A.space)
    phi = ChartMorphism.build(A, A, {"x": x}, {"dx": {"dx": 2}})
    report = validate_morphism(phi)
    assert [v.kind for v in report] == ["anchor"]
    assert report.violations[0].residual == 1


def test_non_bracket_preserving_map():
    g = catalog.so3()
    phi = ChartMorphism.build(g, g, fiber={"e1": {"e1": 1}, "e2": {"e2": 1}, "e3": {"e3": 2}})
    assert {v.kind for v in validate_morphism(phi)} == {"bracket"}


def test_compose_with_identity():
    phi = catalog.parabola()
    assert compose_morphisms(phi, identity(phi.source)) == phi
    assert compose_morphisms(identity(phi.target), phi) == phi


def test_composite_validates():
    phi = compose_morphisms(catalog.parabola(), catalog.chart2_to_tr1())
    assert phi.source is catalog.chart2() and phi.target is catalog.tr2()
    assert validate_morphism(phi).ok
    with pytest.raises(ChainMismatch):
        compose_morphisms(catalog.chart2_to_tr1(), catalog.parabola())


@pytest.mark.parametrize("name", ["parabola", "chart2_to_TR1", "so3_cycle", "aff1_shear",
                                  "rho_chart2", "face_2_1_TR1"])
def test_morphism_bracket_on_sections(name):
    """Phi o [a, b] against the right-hand side built from Phi-decompositions."""
    phi = catalog.bundled_morphisms()[name]
    A, B = phi.source, phi.target
    for i in range(10):
        rng = trial_rng(3, name, i)
        a, b = random_section(rng, A), random_section(rng, A)
        u, v = phi.fiber_apply(a), phi.fiber_apply(b)
        lhs = phi.fiber_apply(bracket(a, b))
        for dl in range(B.rank):
            rhs = anchor_apply(a, v[dl]) - anchor_apply(b, u[dl])
            for k in range(B.rank):
                for l in range(B.rank):
                    c = B.structure[k][l][dl]
                    if c and u[k] and v[l]:
                        rhs = rhs + u[k] * v[l] * phi.pull_function(c)
            assert lhs[dl] == rhs


# -- identification with the inverse image -----------------------------------------

def test_psi_constant_pair():
    for A in ALGS.values():
        P = prolong(1, A)
        dt = P.frame_section(0)
        for i in range(A.rank):
            assert psi_check(1, A, dt, P.frame_section(1 + i)).is_zero()


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("name", sorted(ALGS))
def test_psi_random(name, k):
    A = ALGS[name]
    P = prolong(k, A)
    for i in range(8):
        rng = trial_rng(19, name, k, i)
        assert psi_check(k, A, random_section(rng, P), random_section(rng, P)).is_zero()


def test_psi_requires_prolongation():
    A = catalog.tr1()
    with pytest.raises(NotProlongation):
        psi_check(1, A, A.frame_section(0), A.frame_section(0))
    P = prolong(2, A)
    with pytest.raises(NotProlongation):
        psi_check(1, A, P.frame_section(0), P.frame_section(1))


def test_sections_have_rational_scaling():
    A = catalog.chart2()
    a = A.section({"e1": 1, "e2": Poly.var("y", A.space)})
    assert (Fraction(1, 2) * a).coeffs[1] == Poly.var("y", A.space).scale(Fraction(1, 2))
