"""Differential forms on chart algebroids.

Two representations live here:

* :class:`TensorForm` -- a C^infinity-multilinear alternating form stored by
  its components on increasing frame multi-indices;
* :class:`RLinearForm` -- an R-multilinear alternating form given as a lazy
  combinator tree (tensor leaves, sums, function multiples, wedges, cube
  averages, the differential) that is only ever evaluated on sections.

Wedge products use the shuffle convention without factorial normalisation:
``(w ^ n)(a_1..a_{p+q}) = sum over (p,q)-shuffles of sign * w(...) * n(...)``.
"""
from __future__ import annotations

from itertools import combinations
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .algebroid import (
    ChartAlgebroid,
    ChartMorphism,
    Section,
    anchor_apply,
    bracket,
    frame_derivation,
    include,
    param_frames,
    param_names,
    prolongation_of,
    same_algebroid,
)
from .errors import (
    AlgebroidMismatch,
    ArityMismatch,
    BadAverageSet,
    InvalidAlgebroid,
    NotProlongation,
    ShapeError,
    TargetMismatch,
)
from .poly import PARAM, Poly, integrate_cube, integrate_simplex

Index = Tuple[int, ...]


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def _normalize(idx: Sequence[int]):
    if len(set(idx)) != len(idx):
        return None, 0
    return tuple(sorted(idx)), perm_sign(idx)


def det(matrix: Sequence[Sequence[Poly]], space) -> Poly:
    """Determinant of a square matrix of polynomials (Laplace expansion with
    memoised minors)."""
    n = len(matrix)
    one = Poly.const(1, space)
    zero = Poly.zero(space)
    memo: Dict[Tuple[int, ...], Poly] = {}

    def rec(cols: Tuple[int, ...]) -> Poly:
        row = n - len(cols)
        if row == n:
            return one
        hit = memo.get(cols)
        if hit is not None:
            return hit
        acc = zero
        for pos, c in enumerate(cols):
            e = matrix[row][c]
            if not e:
                continue
            sub = rec(cols[:pos] + cols[pos + 1:])
            if not sub:
                continue
            acc = acc + e * sub if pos % 2 == 0 else acc - e * sub
        memo[cols] = acc
        return acc

    return rec(tuple(range(n)))


class TensorForm:
    """A section of Lambda^n A^*: components on increasing frame multi-indices.

    Degree -1 is allowed for the zero form produced by lowering the degree of
    a 0-form (fiber integration, chain operators)."""

    __slots__ = ("owner", "degree", "components", "name")

    def __init__(self, owner: ChartAlgebroid, degree: int,
                 components: Mapping[Sequence[int], object] | None = None, name: str = ""):
        if degree < -1:
            raise ValueError("form degree must be >= -1")
        self.owner = owner
        self.degree = degree
        self.name = name
        comps: Dict[Index, Poly] = {}
        for idx, p in (components or {}).items():
            idx = tuple(idx)
            if degree < 0:
                raise ValueError("a degree -1 form has no components")
            if len(idx) != degree or any(not 0 <= i < owner.rank for i in idx):
                raise ShapeError(f"bad multi-index {idx} for a {degree}-form of rank {owner.rank}")
            if not isinstance(p, Poly):
                p = Poly.const(p, owner.space)
            p = p.embed(owner.space)
            key, sign = _normalize(idx)
            if key is None:
                if p:
                    raise ShapeError(f"repeated frame index {idx} with nonzero coefficient")
                continue
            q = comps.get(key, Poly.zero(owner.space)) + (p if sign > 0 else -p)
            if q:
                comps[key] = q
            else:
                comps.pop(key, None)
        self.components = comps

    @classmethod
    def from_frames(cls, owner: ChartAlgebroid, comps: Mapping[Sequence[str], object],
                    degree: int | None = None, name: str = "") -> "TensorForm":
        """Build from ``{("e1", "e2"): coefficient}``."""
        if degree is None:
            if not comps:
                raise ValueError("degree required for an empty component map")
            degree = len(next(iter(comps)))
        return cls(owner, degree,
                   {tuple(owner.frame_index(f) for f in k): v for k, v in comps.items()}, name=name)

    @classmethod
    def function(cls, owner: ChartAlgebroid, f, name: str = "") -> "TensorForm":
        return cls(owner, 0, {(): f}, name=name)

    @classmethod
    def zero(cls, owner: ChartAlgebroid, degree: int) -> "TensorForm":
        return cls(owner, degree)

    def component(self, idx: Sequence[int]) -> Poly:
        key, sign = _normalize(tuple(idx))
        if key is None:
            return Poly.zero(self.owner.space)
        p = self.components.get(key)
        if p is None:
            return Poly.zero(self.owner.space)
        return p if sign > 0 else -p

    def is_zero(self) -> bool:
        return not self.components

    def _same(self, other: "TensorForm"):
        if not isinstance(other, TensorForm):
            raise TypeError("expected a TensorForm")
        if not same_algebroid(self.owner, other.owner):
            raise AlgebroidMismatch("forms live on different algebroids")
        if self.degree != other.degree:
            raise ShapeError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: "TensorForm") -> "TensorForm":
        self._same(other)
        out = dict(self.components)
        for k, p in other.components.items():
            q = out[k] + p if k in out else p
            if q:
                out[k] = q
            else:
                out.pop(k, None)
        return _raw(self.owner, self.degree, out)

    def __neg__(self) -> "TensorForm":
        return _raw(self.owner, self.degree, {k: -p for k, p in self.components.items()})

    def __sub__(self, other: "TensorForm") -> "TensorForm":
        return self + (-other)

    def __rmul__(self, f) -> "TensorForm":
        if not isinstance(f, Poly):
            f = Poly.const(f, self.owner.space)
        f = f.embed(self.owner.space)
        out = {}
        for k, p in self.components.items():
            q = f * p
            if q:
                out[k] = q
        return _raw(self.owner, self.degree, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorForm):
            return NotImplemented
        return (same_algebroid(self.owner, other.owner) and self.degree == other.degree
                and self.components == other.components)

    __hash__ = None

    def __str__(self) -> str:
        if self.degree == 0:
            return "{() = %s}" % self.component(())
        fr = self.owner.frames
        body = "; ".join(f"({','.join(fr[i] for i in k)}) = {p}"
                         for k, p in sorted(self.components.items()))
        return "{%s}" % body

    def __repr__(self) -> str:
        return f"TensorForm(degree={self.degree}, {self})"


def _raw(owner, degree, comps) -> TensorForm:
    f = TensorForm.__new__(TensorForm)
    f.owner, f.degree, f.components, f.name = owner, degree, comps, ""
    return f


def _check_args(owner: ChartAlgebroid, degree: int, args: Sequence[Section]):
    if len(args) != degree:
        raise ArityMismatch(f"form of degree {degree} given {len(args)} arguments")
    for a in args:
        if not same_algebroid(a.owner, owner):
            raise AlgebroidMismatch(f"argument is a section of {a.owner.label}, "
                                    f"form lives on {owner.label}")


def _eval_tensor(w: TensorForm, args: Sequence[Section]) -> Poly:
    space = w.owner.space
    if w.degree <= 0:
        return w.components.get((), Poly.zero(space))
    acc = Poly.zero(space)
    for idx, p in w.components.items():
        m = [[a.coeffs[j] for j in idx] for a in args]
        dt = det(m, space)
        if dt:
            acc = acc + p * dt
    return acc


def evaluate(w: TensorForm, *args: Section) -> Poly:
    """w(a_1, ..., a_n): full alternating contraction with the sections."""
    _check_args(w.owner, max(w.degree, 0), args)
    return _eval_tensor(w, args)


def d(w: TensorForm) -> TensorForm:
    """Algebroid exterior differential in frame form."""
    A = w.owner
    n = w.degree
    if n < 0 or not w.components:
        return _raw(A, n + 1, {})
    r = A.rank
    comps = w.components
    out: Dict[Index, Poly] = {}
    for K in combinations(range(r), n + 1):
        acc = Poly.zero(A.space)
        for i in range(n + 1):
            p = comps.get(K[:i] + K[i + 1:])
            if p:
                t = frame_derivation(A, K[i], p)
                if t:
                    acc = acc + t if i % 2 == 0 else acc - t
        for i in range(n + 1):
            row = A._struct_nz[K[i]]
            for j in range(i + 1, n + 1):
                sc = row[K[j]]
                if not sc:
                    continue
                rest = K[:i] + K[i + 1:j] + K[j + 1:]
                for c, s in sc:
                    if c in rest:
                        continue
                    key, sign = _normalize((c,) + rest)
                    p = comps.get(key)
                    if p:
                        t = s * p
                        if (i + j + (0 if sign > 0 else 1)) % 2 == 0:
                            acc = acc + t
                        else:
                            acc = acc - t
        if acc:
            out[K] = acc
    return _raw(A, n + 1, out)


def wedge(w: TensorForm, v: TensorForm) -> TensorForm:
    """Exterior product, shuffle convention."""
    if not same_algebroid(w.owner, v.owner):
        raise AlgebroidMismatch("cannot wedge forms on different algebroids")
    p, q = w.degree, v.degree
    if p < 0 or q < 0:
        return _raw(w.owner, max(p + q, -1), {})
    out: Dict[Index, Poly] = {}
    for I, a in w.components.items():
        for J, b in v.components.items():
            if set(I) & set(J):
                continue
            key, sign = _normalize(I + J)
            t = a * b
            if sign < 0:
                t = -t
            q2 = out[key] + t if key in out else t
            if q2:
                out[key] = q2
            else:
                out.pop(key, None)
    return _raw(w.owner, p + q, out)


def pullback(phi: ChartMorphism, v: TensorForm) -> TensorForm:
    """Phi^* v: components sum_J det(Phi[J, I]) (v_J o F)."""
    if not same_algebroid(v.owner, phi.target):
        raise TargetMismatch(f"form lives on {v.owner.label}, morphism targets {phi.target.label}")
    A = phi.source
    n = v.degree
    if n < 0:
        return _raw(A, n, {})
    pulled = {}
    for J, p in v.components.items():
        q = phi.pull_function(p)
        if q:
            pulled[J] = q
    if n == 0:
        q = pulled.get(())
        return _raw(A, 0, {(): q} if q else {})
    out: Dict[Index, Poly] = {}
    fib = phi.fiber
    for I in combinations(range(A.rank), n):
        acc = Poly.zero(A.space)
        for J, q in pulled.items():
            m = [[fib[b][a] for a in I] for b in J]
            dt = det(m, A.space)
            if dt:
                acc = acc + dt * q
        if acc:
            out[I] = acc
    return _raw(A, n, out)


# ---------------------------------------------------------------------------
# R-linear forms

class RLinearForm:
    """Base class of R-multilinear alternating forms (lazy combinator trees)."""

    owner: ChartAlgebroid
    degree: int

    def _eval(self, args: Tuple[Section, ...]) -> Poly:
        raise NotImplementedError

    def __call__(self, *args: Section) -> Poly:
        return r_eval(self, *args)

    def __add__(self, other: "RLinearForm") -> "RLinearForm":
        return Sum(self, other)

    def __rmul__(self, f) -> "RLinearForm":
        return ScalarMul(f, self)

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_text()})"


class Tensor(RLinearForm):
    def __init__(self, form: TensorForm, label: str | None = None):
        self.form = form
        self.owner = form.owner
        self.degree = form.degree
        self.label = label or form.name or "_"

    def _eval(self, args):
        if self.degree < 0:
            return Poly.zero(self.owner.space)
        return _eval_tensor(self.form, args)

    def to_text(self):
        return f"tensor({self.label})"


class Sum(RLinearForm):
    def __init__(self, left: RLinearForm, right: RLinearForm):
        if not same_algebroid(left.owner, right.owner):
            raise AlgebroidMismatch("summands live on different algebroids")
        if left.degree != right.degree:
            raise ShapeError(f"cannot add degrees {left.degree} and {right.degree}")
        self.left, self.right = left, right
        self.owner, self.degree = left.owner, left.degree

    def _eval(self, args):
        return self.left._eval(args) + self.right._eval(args)

    def to_text(self):
        return f"sum({self.left.to_text()}, {self.right.to_text()})"


class ScalarMul(RLinearForm):
    def __init__(self, coeff, form: RLinearForm):
        if not isinstance(coeff, Poly):
            coeff = Poly.const(coeff, form.owner.space)
        self.coeff = coeff.embed(form.owner.space)
        self.form = form
        self.owner, self.degree = form.owner, form.degree

    def _eval(self, args):
        v = self.form._eval(args)
        return self.coeff * v if v else v

    def to_text(self):
        return f"scale({self.coeff}, {self.form.to_text()})"


class Wedge(RLinearForm):
    def __init__(self, left: RLinearForm, right: RLinearForm):
        if not same_algebroid(left.owner, right.owner):
            raise AlgebroidMismatch("factors live on different algebroids")
        self.left, self.right = left, right
        self.owner, self.degree = left.owner, left.degree + right.degree

    def _eval(self, args):
        p = self.left.degree
        n = len(args)
        acc = Poly.zero(self.owner.space)
        for S in combinations(range(n), p):
            rest = tuple(i for i in range(n) if i not in S)
            lv = self.left._eval(tuple(args[i] for i in S))
            if not lv:
                continue
            rv = self.right._eval(tuple(args[i] for i in rest))
            if not rv:
                continue
            t = lv * rv
            acc = acc + t if perm_sign(S + rest) > 0 else acc - t
        return acc

    def to_text(self):
        return f"wedge({self.left.to_text()}, {self.right.to_text()})"


class CubeAvg(RLinearForm):
    """Average of the inner form's values over the unit cube in ``avg_vars``.

    The value is constant in those variables, so the form is R-linear but in
    general not C^infinity-linear (nonlocal)."""

    def __init__(self, form: RLinearForm, avg_vars: Iterable[str]):
        avg_vars = tuple(avg_vars)
        space = form.owner.space
        for v in avg_vars:
            if v not in space:
                raise BadAverageSet(f"{v!r} is not a variable of {form.owner.label}")
            if space.kind(v) == PARAM:
                raise BadAverageSet(f"cannot average over simplex parameter {v!r}")
        if len(set(avg_vars)) != len(avg_vars):
            raise BadAverageSet(f"repeated variable in {avg_vars}")
        self.form = form
        self.avg_vars = tuple(sorted(avg_vars, key=space.index))
        self.owner, self.degree = form.owner, form.degree

    def _eval(self, args):
        v = self.form._eval(args)
        if not self.avg_vars or not v:
            return v
        return integrate_cube(v, self.avg_vars).embed(self.owner.space)

    def to_text(self):
        return f"avg({{{','.join(self.avg_vars)}}}, {self.form.to_text()})"


class Dr(RLinearForm):
    """The differential d_{A,R} applied lazily; evaluation follows the
    classical invariant formula with anchors and brackets."""

    def __init__(self, form: RLinearForm):
        if not form.owner.is_valid():
            raise InvalidAlgebroid(f"{form.owner.label} fails the algebroid axioms")
        self.form = form
        self.owner, self.degree = form.owner, form.degree + 1

    def _eval(self, args):
        inner = self.form
        space = self.owner.space
        acc = Poly.zero(space)
        if inner.degree < 0:
            return acc
        n = len(args)
        for i in range(n):
            v = inner._eval(args[:i] + args[i + 1:])
            if v:
                t = anchor_apply(args[i], v)
                if t:
                    acc = acc + t if i % 2 == 0 else acc - t
        for i in range(n):
            for j in range(i + 1, n):
                br = bracket(args[i], args[j])
                if br.is_zero():
                    continue
                rest = args[:i] + args[i + 1:j] + args[j + 1:]
                v = inner._eval((br,) + rest)
                if v:
                    acc = acc + v if (i + j) % 2 == 0 else acc - v
        return acc

    def to_text(self):
        return f"d({self.form.to_text()})"


class FiberIntegral(RLinearForm):
    """Integration over the standard k-simplex of the t-slots of a form on
    T R^k x A; the result is a form on A of degree n - k."""

    def __init__(self, k: int, form: RLinearForm):
        kk, A = prolongation_of(form.owner)
        if kk != k:
            raise NotProlongation(f"{form.owner.label} is a prolongation of order {kk}, not {k}")
        if form.degree < k:
            raise ValueError("use fiber_integrate for forms of degree below k")
        self.k, self.form = k, form
        self.owner, self.degree = A, form.degree - k
        P = form.owner
        self._tframes = tuple(param_frames(P))
        self._tnames = param_names(P)

    def _eval(self, args):
        P = self.form.owner
        secs = self._tframes + tuple(include(a, P) for a in args)
        v = self.form._eval(secs)
        if not v:
            return Poly.zero(self.owner.space)
        return integrate_simplex(v, self._tnames).embed(self.owner.space)

    def to_text(self):
        return f"fiber({self.k}, {self.form.to_text()})"


class Precompose(RLinearForm):
    """Pullback of an R-linear form along a base-preserving morphism:
    (Phi^* w)(a_1..a_n) = w(Phi a_1, ..., Phi a_n)."""

    def __init__(self, phi: ChartMorphism, form: RLinearForm, label: str | None = None):
        if not same_algebroid(form.owner, phi.target):
            raise TargetMismatch("form does not live on the morphism's target")
        if not phi.is_base_preserving():
            raise ShapeError("R-linear pullback is defined only for base-preserving morphisms")
        self.phi, self.form = phi, form
        self.owner, self.degree = phi.source, form.degree
        self.label = label or phi.name or "_"

    def _eval(self, args):
        return self.form._eval(tuple(self.phi.apply(a) for a in args))

    def to_text(self):
        return f"pullback({self.label}, {self.form.to_text()})"


def r_eval(w: RLinearForm, *args: Section) -> Poly:
    """Evaluate an R-linear form on sections of its owner."""
    _check_args(w.owner, max(w.degree, 0), args)
    return w._eval(tuple(args))


def r_d(w: RLinearForm) -> RLinearForm:
    return Dr(w)


def r_pullback(phi: ChartMorphism, w: RLinearForm) -> RLinearForm:
    return Precompose(phi, w)


def make_integrated(mu: TensorForm, avg_vars: Iterable[str]) -> RLinearForm:
    """The nonlocal form a |-> integral of mu(a...) over the unit cube in ``avg_vars``."""
    return CubeAvg(Tensor(mu), avg_vars)
