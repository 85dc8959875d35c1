import pytest

from algebroidkit import catalog
from algebroidkit.algebroid import (
    ChartMorphism,
    compose_morphisms,
    identity,
    prolong,
    validate_morphism,
)
from algebroidkit.errors import InvalidMorphism, NotProlongation, TargetMismatch
from algebroidkit.forms import TensorForm, d, pullback
from algebroidkit.homotopy import (
    Homotopy,
    chain_operator,
    constant_homotopy,
    endpoints,
    poincare_homotopy,
    projection,
    verify_chain,
    zero_section_map,
)
from algebroidkit.poly import Poly
from algebroidkit.sampling import random_tensor_form, trial_rng


def heis_shift(c):
    """Gauge homotopy from exp(-c ad e1) to exp(-(c+1) ad e1) on the Heisenberg algebra."""
    h = catalog.heisenberg()
    P = prolong(1, h)
    t = Poly.var("t1", P.space)
    return Homotopy(ChartMorphism.build(P, h, fiber={
        "dt1": {"e1": 1}, "e1": {"e1": 1}, "e2": {"e2": 1, "e3": -(t + c)}, "e3": {"e3": 1}}))


def reversed_homotopy(H):
    """H run backwards: precompose with t |-> 1 - t, d/dt |-> -d/dt."""
    Q = H.phi.source
    S = Q.space
    t = Poly.var(S.names[0], S)
    base = [1 - t] + [Poly.var(v, S) for v in S.names[1:]]
    fiber = [[Poly.const(1 if a == b else 0, S) for a in range(Q.rank)] for b in range(Q.rank)]
    fiber[0][0] = Poly.const(-1, S)
    flip = ChartMorphism(Q, Q, base, fiber)
    assert validate_morphism(flip).ok
    return Homotopy(compose_morphisms(H.phi, flip))


# -- endpoints -------------------------------------------------------------------

def test_projection_is_constant_homotopy():
    for A in catalog.bundled_algebroids().values():
        f0, f1 = endpoints(projection(1, A))
        assert f0 == identity(A) and f1 == identity(A)


@pytest.mark.parametrize("k", [1, 2])
def test_poincare_endpoints(k):
    for A in (catalog.point0(), catalog.tr1(), catalog.so3()):
        pi, g0, H = poincare_homotopy(k, A)
        P = prolong(k, A)
        assert H.phi0 == compose_morphisms(g0, pi)
        assert H.phi1 == identity(P)
        assert H.target is P and H.base is P
        assert compose_morphisms(pi, g0) == identity(A)


def test_endpoints_need_order_one():
    phi = projection(2, catalog.tr1())
    with pytest.raises(NotProlongation):
        endpoints(phi)
    with pytest.raises(NotProlongation):
        endpoints(identity(catalog.tr1()))


def test_scaling_family_is_not_a_homotopy():
    A = catalog.tr1()
    P = prolong(1, A)
    t, x = Poly.var("t1", P.space), Poly.var("x", P.space)
    phi = ChartMorphism.build(P, A, {"x": x}, {"dx": {"dx": t}})
    report = validate_morphism(phi)
    # rho o Phi = t d/dx differs from dF o rho = d/dx away from t = 1, and
    # d/dt of the coefficient t breaks the bracket condition as well
    assert {v.kind for v in report} == {"anchor", "bracket"}
    with pytest.raises(InvalidMorphism):
        Homotopy(phi)


# -- chain operator --------------------------------------------------------------

def test_chain_operator_lowers_degree():
    H = catalog.heisenberg_gauge()
    out = chain_operator(H, TensorForm.function(catalog.heisenberg(), 5))
    assert out.degree == -1 and out.is_zero()


def test_poincare_lemma_on_the_line():
    _, _, H = poincare_homotopy(1, catalog.point0())
    P = H.target
    dt = TensorForm.from_frames(P, {("dt1",): 1})
    assert chain_operator(H, dt) == TensorForm.function(P, Poly.var("t1", P.space))
    assert verify_chain(H, dt).is_zero()
    assert d(dt).is_zero()


def test_constant_homotopy_has_zero_operator():
    A = catalog.chart2()
    H = constant_homotopy(A)
    for i in range(10):
        rng = trial_rng(79, i)
        eta = random_tensor_form(rng, A, rng.randint(0, A.rank))
        assert chain_operator(H, eta).is_zero()
        assert verify_chain(H, eta).is_zero()


def test_constants_are_closed():
    for H in (Homotopy(catalog.heisenberg_gauge()), Homotopy(catalog.so3_flat()),
              poincare_homotopy(2, catalog.tr1())[2]):
        c = TensorForm.function(H.target, 7)
        assert verify_chain(H, c).is_zero()


def test_target_mismatch():
    H = Homotopy(catalog.so3_flat())
    with pytest.raises(TargetMismatch):
        chain_operator(H, TensorForm.function(catalog.tr1(), 1))


@pytest.mark.parametrize("which", ["heis_gauge", "so3_flat", "poincare_2_TR1", "poincare_1_so3"])
def test_chain_identity_random(which):
    H = {
        "heis_gauge": lambda: Homotopy(catalog.heisenberg_gauge()),
        "so3_flat": lambda: Homotopy(catalog.so3_flat()),
        "poincare_2_TR1": lambda: poincare_homotopy(2, catalog.tr1())[2],
        "poincare_1_so3": lambda: poincare_homotopy(1, catalog.so3())[2],
    }[which]()
    B = H.target
    moved = 0
    for i in range(15):
        rng = trial_rng(83, which, i)
        eta = random_tensor_form(rng, B, rng.randint(0, B.rank))
        assert verify_chain(H, eta).is_zero()
        moved += not chain_operator(H, eta).is_zero()
    assert moved > 0


def test_g0_pi_is_identity_on_forms():
    for A in catalog.bundled_algebroids().values():
        for k in (1, 2):
            pi, g0 = projection(k, A), zero_section_map(k, A)
            for i in range(5):
                rng = trial_rng(89, A.label, k, i)
                eta = random_tensor_form(rng, A, rng.randint(0, A.rank))
                assert pullback(g0, pullback(pi, eta)) == eta


# -- concatenation -----------------------------------------------------------------

def _sum_chain(Hs, eta):
    hd = None
    dh = None
    for H in Hs:
        a, b = chain_operator(H, d(eta)), d(chain_operator(H, eta))
        hd = a if hd is None else hd + a
        dh = b if dh is None else dh + b
    return hd + dh


def test_concatenated_gauge_homotopies():
    H1, H2 = heis_shift(0), heis_shift(1)
    assert H1.phi1 == H2.phi0
    assert H1.phi == catalog.heisenberg_gauge()
    B = H1.target
    for i in range(15):
        rng = trial_rng(97, i)
        eta = random_tensor_form(rng, B, rng.randint(0, B.rank))
        total = verify_chain(H1, eta) + verify_chain(H2, eta)
        assert total.is_zero()
        joined = _sum_chain([H1, H2], eta) - pullback(H2.phi1, eta) + pullback(H1.phi0, eta)
        assert joined.is_zero()


def test_there_and_back_again():
    _, _, H = poincare_homotopy(1, catalog.tr1())
    R = reversed_homotopy(H)
    assert R.phi0 == H.phi1 and R.phi1 == H.phi0
    B = H.target
    for i in range(10):
        rng = trial_rng(101, i)
        eta = random_tensor_form(rng, B, rng.randint(1, B.rank))
        assert (chain_operator(H, eta) + chain_operator(R, eta)).is_zero()
        assert _sum_chain([H, R], eta).is_zero()
