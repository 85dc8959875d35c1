"""Standard simplices, face maps, fiber integration and the Stokes identity

    int_k . d + (-1)^(k+1) d . int_k = sum_{j=0..k} (-1)^j int_{k-1} . (dsigma_j x id)^*

checked exactly for tensor forms (via pullbacks) and for R-linear forms
(via evaluation on the images of the t-frame under the face maps).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

from .algebroid import (
    ChartAlgebroid,
    ChartMorphism,
    Section,
    include,
    param_names,
    prolong,
    prolongation_of,
)
from .errors import ArityMismatch, BadFaceIndex, DegreeTooLow, NotProlongation
from .forms import (
    FiberIntegral,
    RLinearForm,
    Dr,
    Tensor,
    TensorForm,
    _check_args,
    _raw,
    d,
    pullback,
)
from .poly import Poly, integrate_simplex

Form = Union[TensorForm, RLinearForm]


def face_map(k: int, j: int, A: ChartAlgebroid) -> ChartMorphism:
    """dsigma_j^k x id_A : T R^k x A -> T R^(k+1) x A.

    sigma_0^k(t) = (1 - sum t, t_1..t_k); sigma_j^k inserts 0 at slot j.
    For k = 0 the source is A itself and the base point is sigma_0^0 = 1,
    sigma_1^0 = 0.
    """
    if k < 0 or not 0 <= j <= k + 1 or (k == 0 and j > 1):
        raise BadFaceIndex(f"no face sigma_{j}^{k}")
    key = ("face", k, j)
    hit = A._cache.get(key)
    if hit is not None:
        return hit
    src = prolong(k, A)
    tgt = prolong(k + 1, A)
    S = src.space
    snames = param_names(src) if k else ()
    tnames = param_names(tgt)
    ts = [Poly.var(n, S) for n in snames]
    one, zero = Poly.const(1, S), Poly.zero(S)
    if k == 0:
        images = [one if j == 0 else zero]
    elif j == 0:
        first = one
        for t in ts:
            first = first - t
        images = [first] + ts
    else:
        images = ts[:j - 1] + [zero] + ts[j - 1:]
    base = dict(zip(tnames, images))
    # constant Jacobian on the t-frames, identity on A's frame
    r_src, r_tgt = src.rank, tgt.rank
    fiber = [[zero] * r_src for _ in range(r_tgt)]
    for s in range(k):
        if j == 0:
            fiber[0][s] = Poly.const(-1, S)
            fiber[s + 1][s] = one
        else:
            fiber[s if s + 1 < j else s + 1][s] = one
    for a in range(A.rank):
        fiber[k + 1 + a][k + a] = one
    base_map = [base[v] if v in base else Poly.var(v, S) for v in tgt.space.names]
    phi = ChartMorphism(src, tgt, base_map, fiber, name=f"dsigma_{j}^{k}")
    A._cache[key] = phi
    return phi


def _zero_below(A: ChartAlgebroid, degree: int) -> TensorForm:
    return _raw(A, max(degree, -1), {})


def fiber_integrate(k: int, w: Form, _quiet: bool = False) -> Form:
    """Integrate the t-slots of a form on prolong(k, A) over the standard
    k-simplex, producing a form of degree n - k on A.

    ``k = 0`` is the identity (the 0-simplex is a point and prolong(0, A) is A).
    """
    if k == 0:
        return w
    P = w.owner
    kk, A = prolongation_of(P)
    if kk != k:
        raise NotProlongation(f"{P.label} is a prolongation of order {kk}, not {k}")
    n = w.degree
    if n < k:
        if not _quiet:
            warnings.warn(DegreeTooLow(f"degree {n} < {k}: fiber integral is the zero form"),
                          stacklevel=2)
        zero = _zero_below(A, n - k)
        return zero if isinstance(w, TensorForm) else Tensor(zero, label="0")
    if isinstance(w, RLinearForm):
        return FiberIntegral(k, w)
    tn = param_names(P)
    prefix = tuple(range(k))
    comps = {}
    for idx, p in w.components.items():
        if idx[:k] != prefix:
            continue
        q = integrate_simplex(p, tn).embed(A.space)
        if q:
            comps[tuple(i - k for i in idx[k:])] = q
    return _raw(A, n - k, comps)


@dataclass
class StokesReport:
    """The three sides of the Stokes identity and their residual
    ``integral_of_d + sign_d_of_integral - face_sum``."""

    k: int
    degree: int
    integral_of_d: object
    d_of_integral: object
    face_sum: object
    residual: object

    @property
    def ok(self) -> bool:
        r = self.residual
        return r.is_zero() if isinstance(r, (TensorForm, Poly)) else not r

    def to_dict(self) -> dict:
        return {"k": self.k, "degree": self.degree,
                "integral_of_d": str(self.integral_of_d),
                "d_of_integral": str(self.d_of_integral),
                "face_sum": str(self.face_sum),
                "residual": str(self.residual),
                "ok": self.ok}


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def stokes_residual(k: int, w: Form, sections: Sequence[Section] | None = None) -> StokesReport:
    """Compute both sides of the Stokes identity for a form on prolong(k, A).

    Tensor forms give a residual tensor form.  R-linear forms are evaluated on
    ``sections`` (sections of A, n - k + 1 of them) and give a residual
    polynomial."""
    if k < 1:
        raise ValueError("Stokes identity needs k >= 1")
    P = w.owner
    kk, A = prolongation_of(P)
    if kk != k:
        raise NotProlongation(f"{P.label} is a prolongation of order {kk}, not {k}")
    if isinstance(w, TensorForm):
        return _stokes_tensor(k, A, w)
    if sections is None:
        raise ArityMismatch("R-linear Stokes check needs a tuple of sections of A")
    return _stokes_rlinear(k, A, w, tuple(sections))


def _stokes_tensor(k: int, A: ChartAlgebroid, w: TensorForm) -> StokesReport:
    n = w.degree
    p1 = fiber_integrate(k, d(w), _quiet=True)
    integral = fiber_integrate(k, w, _quiet=True)
    # below degree k - 1 every side is the zero form of degree -1
    p2 = d(integral) if n >= k else _zero_below(A, n - k + 1)
    if _sign(k + 1) < 0:
        p2 = -p2
    p3 = _zero_below(A, n - k + 1)
    for j in range(k + 1):
        term = fiber_integrate(k - 1, pullback(face_map(k - 1, j, A), w), _quiet=True)
        p3 = p3 + term if j % 2 == 0 else p3 - term
    return StokesReport(k, n, p1, p2, p3, p1 + p2 - p3)


def face_term(k: int, j: int, w: RLinearForm, sections: Tuple[Section, ...]) -> Poly:
    """(int_{k-1} . (dsigma_j^{k-1} x id)^* w)(a_1..a_m): evaluate w on the
    face images of d/dt^1..d/dt^(k-1) followed by the sections, restrict to
    the face and integrate over the (k-1)-simplex."""
    P = w.owner
    _, A = prolongation_of(P)
    phi = face_map(k - 1, j, A)
    src = phi.source
    images = []
    for s in range(k - 1):
        col = (Poly.const(row[s].constant_value(), P.space) for row in phi.fiber)
        images.append(Section(P, tuple(col)))
    args = tuple(images) + tuple(include(a, P) for a in sections)
    restricted = phi.pull_function(w._eval(args))
    if k - 1 == 0:
        return restricted.embed(A.space)
    return integrate_simplex(restricted, param_names(src)).embed(A.space)


def _stokes_rlinear(k: int, A: ChartAlgebroid, w: RLinearForm,
                    sections: Tuple[Section, ...]) -> StokesReport:
    n = w.degree
    _check_args(A, n - k + 1, sections)
    p1 = fiber_integrate(k, Dr(w), _quiet=True)._eval(sections)
    integral = fiber_integrate(k, w, _quiet=True)
    p2 = Dr(integral)._eval(sections)
    if _sign(k + 1) < 0:
        p2 = -p2
    p3 = Poly.zero(A.space)
    for j in range(k + 1):
        t = face_term(k, j, w, sections)
        p3 = p3 + t if j % 2 == 0 else p3 - t
    return StokesReport(k, n, p1, p2, p3, p1 + p2 - p3)
