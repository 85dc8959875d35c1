"""Lie algebroids presented on a single polynomial chart with a global frame.

An algebroid of rank ``r`` over variables ``v_1..v_m`` is stored as

* an anchor matrix ``anchor[a][j]``: the coefficient of d/dv_j in rho(e_a);
* structure functions ``structure[a][b][c]`` with ``[e_a, e_b] = sum_c
  structure[a][b][c] e_c`` (antisymmetric in ``a, b``).

Brackets of arbitrary sections are the Leibniz extension of the frame
brackets.  Axioms are checked as polynomial identities by :func:`validate`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Mapping, Optional, Sequence, Tuple

from .errors import (
    AlgebroidMismatch,
    ChainMismatch,
    NotProlongation,
    ShapeError,
    VarClash,
    VarSpaceMismatch,
)
from .poly import BASE, EMPTY, PARAM, Poly, VarSpace

PolyLike = object


def _as_poly(value, space: VarSpace) -> Poly:
    if isinstance(value, Poly):
        return value.embed(space)
    return Poly.const(value, space)


class ChartAlgebroid:
    """A Lie algebroid (A, rho, [.,.]) on one chart with a fixed frame."""

    __slots__ = ("space", "frames", "anchor", "structure", "prolongation", "name",
                 "_struct_nz", "_anchor_nz", "_cache", "_key")

    def __init__(self, space: VarSpace, frames: Sequence[str], anchor, structure,
                 prolongation: Optional[Tuple[int, "ChartAlgebroid"]] = None, name: str = ""):
        frames = tuple(frames)
        r, m = len(frames), len(space)
        if len(set(frames)) != r:
            raise ShapeError(f"duplicate frame names in {frames}")
        if len(anchor) != r or any(len(row) != m for row in anchor):
            raise ShapeError(f"anchor must be {r}x{m}")
        if len(structure) != r or any(len(row) != r or any(len(c) != r for c in row)
                                      for row in structure):
            raise ShapeError(f"structure must be {r}x{r}x{r}")
        self.space = space
        self.frames = frames
        self.anchor = tuple(tuple(_as_poly(p, space) for p in row) for row in anchor)
        st = tuple(tuple(tuple(_as_poly(p, space) for p in c) for c in row) for row in structure)
        for a in range(r):
            if any(st[a][a]):
                raise ShapeError(f"bracket [{frames[a]},{frames[a]}] must vanish (antisymmetry)")
            for b in range(a + 1, r):
                if any(st[a][b][c] + st[b][a][c] for c in range(r)):
                    raise ShapeError(f"structure functions not antisymmetric at "
                                     f"({frames[a]},{frames[b]})")
        self.structure = st
        self.prolongation = prolongation
        self.name = name
        self._struct_nz = [[[(c, st[a][b][c]) for c in range(r) if st[a][b][c]]
                            for b in range(r)] for a in range(r)]
        self._anchor_nz = [[(j, space.names[j], p) for j, p in enumerate(row) if p]
                           for row in self.anchor]
        self._cache = {}
        self._key = None

    @classmethod
    def build(cls, space: VarSpace, frames: Sequence[str],
              anchor: Mapping[str, Mapping[str, PolyLike]] = (),
              brackets: Mapping[Tuple[str, str], Mapping[str, PolyLike]] = (),
              name: str = "") -> "ChartAlgebroid":
        """Construct from named data.

        ``anchor`` maps a frame name to ``{variable: coefficient}``;
        ``brackets`` maps a frame pair to ``{frame: coefficient}``.  Pairs not
        listed (in either order) bracket to zero.
        """
        frames = tuple(frames)
        r, m = len(frames), len(space)
        fidx = {f: i for i, f in enumerate(frames)}
        zero = Poly.zero(space)
        anc = [[zero] * m for _ in range(r)]
        for f, vf in dict(anchor).items():
            if f not in fidx:
                raise ShapeError(f"unknown frame {f!r} in anchor")
            for v, p in vf.items():
                anc[fidx[f]][space.index(v)] = _as_poly(p, space)
        st = [[[zero] * r for _ in range(r)] for _ in range(r)]
        seen = set()
        for (f, g), rhs in dict(brackets).items():
            if f not in fidx or g not in fidx:
                raise ShapeError(f"unknown frame in bracket [{f},{g}]")
            a, b = fidx[f], fidx[g]
            coeffs = [zero] * r
            for h, p in rhs.items():
                if h not in fidx:
                    raise ShapeError(f"unknown frame {h!r} in bracket [{f},{g}]")
                coeffs[fidx[h]] = _as_poly(p, space)
            if a == b:
                if any(coeffs):
                    raise ShapeError(f"bracket [{f},{f}] must vanish (antisymmetry)")
                continue
            if (min(a, b), max(a, b)) in seen:
                raise ShapeError(f"bracket [{f},{g}] given twice")
            seen.add((min(a, b), max(a, b)))
            st[a][b] = coeffs
            st[b][a] = [-c for c in coeffs]
        return cls(space, frames, anc, st, name=name)

    # queries ------------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.frames)

    @property
    def dim(self) -> int:
        return len(self.space)

    @property
    def base_vars(self) -> Tuple[str, ...]:
        return self.space.names_of_kind(BASE)

    @property
    def param_vars(self) -> Tuple[str, ...]:
        return self.space.names_of_kind(PARAM)

    def frame_index(self, name: str) -> int:
        try:
            return self.frames.index(name)
        except ValueError:
            raise ShapeError(f"{self.label} has no frame {name!r}") from None

    @property
    def label(self) -> str:
        return self.name or f"<algebroid rank {self.rank} over {self.space.names}>"

    def is_point(self) -> bool:
        return self.dim == 0

    def _structural_key(self):
        if self._key is None:
            self._key = (self.space, self.frames, self.anchor, self.structure, self.prolongation)
        return self._key

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ChartAlgebroid):
            return NotImplemented
        return self._structural_key() == other._structural_key()

    def __hash__(self) -> int:
        return hash((self.space, self.frames))

    def __repr__(self) -> str:
        return f"ChartAlgebroid({self.label})"

    # sections -----------------------------------------------------------
    def zero_section(self) -> "Section":
        z = Poly.zero(self.space)
        return Section(self, (z,) * self.rank)

    def frame_section(self, which) -> "Section":
        i = which if isinstance(which, int) else self.frame_index(which)
        coeffs = [Poly.zero(self.space)] * self.rank
        coeffs[i] = Poly.const(1, self.space)
        return Section(self, tuple(coeffs))

    def section(self, coeffs) -> "Section":
        """Section from a ``{frame: coefficient}`` map or a coefficient sequence."""
        if isinstance(coeffs, Mapping):
            out = [Poly.zero(self.space)] * self.rank
            for f, p in coeffs.items():
                out[self.frame_index(f)] = _as_poly(p, self.space)
            return Section(self, tuple(out))
        coeffs = tuple(coeffs)
        if len(coeffs) != self.rank:
            raise ShapeError(f"expected {self.rank} coefficients, got {len(coeffs)}")
        return Section(self, tuple(_as_poly(p, self.space) for p in coeffs))

    def is_valid(self) -> bool:
        ok = self._cache.get("valid")
        if ok is None:
            ok = validate(self).ok
            self._cache["valid"] = ok
        return ok


def same_algebroid(a: ChartAlgebroid, b: ChartAlgebroid) -> bool:
    return a is b or a == b


@dataclass(frozen=True, eq=False)
class Section:
    """An element of Gamma(A): coefficients on the owner's frame."""

    owner: ChartAlgebroid
    coeffs: Tuple[Poly, ...]

    def _check(self, other: "Section"):
        if not same_algebroid(self.owner, other.owner):
            raise AlgebroidMismatch("sections belong to different algebroids")

    def __add__(self, other: "Section") -> "Section":
        self._check(other)
        return Section(self.owner, tuple(p + q for p, q in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Section") -> "Section":
        self._check(other)
        return Section(self.owner, tuple(p - q for p, q in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Section":
        return Section(self.owner, tuple(-p for p in self.coeffs))

    def __rmul__(self, f) -> "Section":
        f = _as_poly(f, self.owner.space)
        return Section(self.owner, tuple(f * p for p in self.coeffs))

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return same_algebroid(self.owner, other.owner) and self.coeffs == other.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        parts = []
        for f, p in zip(self.owner.frames, self.coeffs):
            if not p:
                continue
            if p == 1:
                parts.append(f)
            elif p == -1:
                parts.append(f"-{f}")
            elif len(p.terms) == 1:
                parts.append(f"{p}*{f}")
            else:
                parts.append(f"({p})*{f}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def __repr__(self) -> str:
        return f"Section({self})"


# ---------------------------------------------------------------------------
# anchor and bracket

def derivation(field: Sequence[Poly], p: Poly) -> Poly:
    """Apply the vector field with components ``field`` (aligned with
    ``p.space``) to ``p``."""
    out = Poly.zero(p.space)
    names = p.space.names
    for j, v in enumerate(field):
        if v:
            dp = p.partial(names[j])
            if dp:
                out = out + v * dp
    return out


def vector_field(a: Section) -> Tuple[Poly, ...]:
    """rho(a) as a list of components along the owner's variables."""
    A = a.owner
    comps = [Poly.zero(A.space)] * A.dim
    for alpha, f in enumerate(a.coeffs):
        if not f:
            continue
        for j, _, rho in A._anchor_nz[alpha]:
            comps[j] = comps[j] + f * rho
    return tuple(comps)


def anchor_apply(a: Section, p: Poly) -> Poly:
    """rho(a)(p): the anchor of ``a`` acting as a derivation on ``p``."""
    A = a.owner
    if not isinstance(p, Poly):
        p = Poly.const(p, A.space)
    try:
        p = p.embed(A.space)
    except VarSpaceMismatch as exc:
        raise VarSpaceMismatch(f"function is not defined on the base of {A.label}: {exc}") from None
    return derivation(vector_field(a), p)


def frame_derivation(A: ChartAlgebroid, alpha: int, p: Poly) -> Poly:
    """rho(e_alpha)(p) for ``p`` over ``A.space``."""
    out = Poly.zero(A.space)
    for _, name, rho in A._anchor_nz[alpha]:
        dp = p.partial(name)
        if dp:
            out = out + rho * dp
    return out


def bracket(a: Section, b: Section) -> Section:
    """Leibniz extension of the frame bracket:
    [a,b]^c = sum f^a g^b C^c_ab + rho(a)(g^c) - rho(b)(f^c)."""
    if not same_algebroid(a.owner, b.owner):
        raise AlgebroidMismatch("cannot bracket sections of different algebroids")
    A = a.owner
    r = A.rank
    out = [Poly.zero(A.space)] * r
    f, g = a.coeffs, b.coeffs
    for al in range(r):
        if not f[al]:
            continue
        row = A._struct_nz[al]
        for be in range(r):
            if not g[be] or not row[be]:
                continue
            fg = f[al] * g[be]
            for c, s in row[be]:
                out[c] = out[c] + fg * s
    va, vb = vector_field(a), vector_field(b)
    for c in range(r):
        if g[c]:
            out[c] = out[c] + derivation(va, g[c])
        if f[c]:
            out[c] = out[c] - derivation(vb, f[c])
    return Section(A, tuple(out))


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Violation:
    kind: str
    indices: Tuple[str, ...]
    residual: object

    def __str__(self) -> str:
        return f"{self.kind} violation at ({', '.join(self.indices)}): residual {self.residual}"


@dataclass
class Report:
    """Collected polynomial identities that failed; empty means valid."""

    subject: str
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: valid"
        return "\n".join([f"{self.subject}: {len(self.violations)} violation(s)"]
                         + [f"  {v}" for v in self.violations])


def validate(A: ChartAlgebroid) -> Report:
    """Check anchor compatibility with brackets and the frame Jacobi identity."""
    report = Report(A.label)
    r, names = A.rank, A.space.names
    for a, b in combinations(range(r), 2):
        for j in range(A.dim):
            lhs = Poly.zero(A.space)
            for c, s in A._struct_nz[a][b]:
                lhs = lhs + s * A.anchor[c][j]
            rhs = frame_derivation(A, a, A.anchor[b][j]) - frame_derivation(A, b, A.anchor[a][j])
            res = lhs - rhs
            if res:
                report.violations.append(
                    Violation("anchor", (A.frames[a], A.frames[b], names[j]), res))
    frames = [A.frame_section(i) for i in range(r)]
    for a, b, c in combinations(range(r), 3):
        ea, eb, ec = frames[a], frames[b], frames[c]
        jac = (bracket(ea, bracket(eb, ec)) + bracket(eb, bracket(ec, ea))
               + bracket(ec, bracket(ea, eb)))
        if not jac.is_zero():
            report.violations.append(
                Violation("jacobi", (A.frames[a], A.frames[b], A.frames[c]), jac))
    return report


# ---------------------------------------------------------------------------
# standard algebroids and constructions

def tangent(*names: str, kind: str = BASE, name: str = "") -> ChartAlgebroid:
    """The tangent algebroid of R^m with frame d/dv named ``d<v>``."""
    space = VarSpace(names, (kind,) * len(names))
    frames = [f"d{v}" for v in names]
    anchor = {f: {v: 1} for f, v in zip(frames, names)}
    return ChartAlgebroid.build(space, frames, anchor, name=name or f"T({','.join(names)})")


def point(frames: Sequence[str], brackets: Mapping[Tuple[str, str], Mapping[str, PolyLike]] = (),
          name: str = "") -> ChartAlgebroid:
    """A Lie algebra viewed as an algebroid over a point."""
    return ChartAlgebroid.build(EMPTY, frames, {}, brackets, name=name)


def rename_vars(A: ChartAlgebroid, mapping: Mapping[str, str]) -> ChartAlgebroid:
    """Copy of ``A`` with base/parameter variables renamed."""
    names = [mapping.get(n, n) for n in A.space.names]
    space = VarSpace(names, A.space.kinds)
    subst = {old: Poly.var(new, space) for old, new in zip(A.space.names, names)}

    def ren(p: Poly) -> Poly:
        return p.compose(subst, space)

    anchor = [[ren(p) for p in row] for row in A.anchor]
    st = [[[ren(p) for p in c] for c in row] for row in A.structure]
    return ChartAlgebroid(space, A.frames, anchor, st, name=A.name)


def rename_frames(A: ChartAlgebroid, mapping: Mapping[str, str], name: str = "") -> ChartAlgebroid:
    """Copy of ``A`` with frame elements renamed; the data is unchanged."""
    frames = [mapping.get(f, f) for f in A.frames]
    return ChartAlgebroid(A.space, frames, A.anchor, A.structure, name=name or A.name)


def product(A: ChartAlgebroid, B: ChartAlgebroid, name: str = "") -> ChartAlgebroid:
    """Cartesian product A x B over the product of the bases.

    Anchor is block diagonal; frame brackets are those of A and B, and mixed
    frame pairs commute.  Mixed anchor terms on general sections come from
    the Leibniz extension."""
    if set(A.space.names) & set(B.space.names):
        raise VarClash(f"base variables {sorted(set(A.space.names) & set(B.space.names))} "
                       f"shared by {A.label} and {B.label}; rename first")
    if set(A.frames) & set(B.frames):
        raise VarClash(f"frame names {sorted(set(A.frames) & set(B.frames))} "
                       f"shared by {A.label} and {B.label}")
    space = A.space.concat(B.space)
    ra, rb, ma = A.rank, B.rank, A.dim
    m = len(space)
    zero = Poly.zero(space)
    anchor = []
    for a in range(ra):
        anchor.append([p.embed(space) for p in A.anchor[a]] + [zero] * B.dim)
    for b in range(rb):
        anchor.append([zero] * ma + [p.embed(space) for p in B.anchor[b]])
    assert all(len(row) == m for row in anchor)
    r = ra + rb
    st = [[[zero] * r for _ in range(r)] for _ in range(r)]
    for a in range(ra):
        for b in range(ra):
            for c in range(ra):
                st[a][b][c] = A.structure[a][b][c].embed(space)
    for a in range(rb):
        for b in range(rb):
            for c in range(rb):
                st[ra + a][ra + b][ra + c] = B.structure[a][b][c].embed(space)
    return ChartAlgebroid(space, A.frames + B.frames, anchor, st,
                          name=name or f"{A.label} x {B.label}")


def fresh_param_names(A: ChartAlgebroid, k: int) -> Tuple[str, ...]:
    """First ``k`` names among t1, t2, ... unused by ``A`` (as variables or frames)."""
    out, i = [], 1
    while len(out) < k:
        n = f"t{i}"
        if n not in A.space and f"d{n}" not in A.frames:
            out.append(n)
        i += 1
    return tuple(out)


def prolong(k: int, A: ChartAlgebroid, names: Sequence[str] | None = None) -> ChartAlgebroid:
    """The product T R^k x A with its distinguished t-frame first.

    ``prolong(0, A)`` is ``A`` itself.  Results are cached per instance so
    repeated calls return the identical object."""
    if k < 0:
        raise ValueError("prolongation order must be non-negative")
    if k == 0:
        return A
    names = tuple(names) if names is not None else fresh_param_names(A, k)
    if len(names) != k:
        raise ValueError(f"need {k} parameter names, got {names}")
    key = ("prolong", names)
    hit = A._cache.get(key)
    if hit is not None:
        return hit
    P = product(tangent(*names, kind=PARAM), A)
    P = ChartAlgebroid(P.space, P.frames, P.anchor, P.structure, prolongation=(k, A),
                       name=f"prolong({k}, {A.label})")
    A._cache[key] = P
    return P


def prolongation_of(P: ChartAlgebroid) -> Tuple[int, ChartAlgebroid]:
    if P.prolongation is None:
        raise NotProlongation(f"{P.label} is not tagged as a prolongation T R^k x A")
    return P.prolongation


def param_frames(P: ChartAlgebroid) -> List[Section]:
    """The sections d/dt^1 .. d/dt^k of a tagged prolongation."""
    k, _ = prolongation_of(P)
    return [P.frame_section(i) for i in range(k)]


def param_names(P: ChartAlgebroid) -> Tuple[str, ...]:
    k, _ = prolongation_of(P)
    return P.space.names[:k]


def include(a: Section, P: ChartAlgebroid) -> Section:
    """Section (0, a) of T R^k x A for a section ``a`` of A."""
    k, A = prolongation_of(P)
    if not same_algebroid(a.owner, A):
        raise AlgebroidMismatch(f"section of {a.owner.label} does not belong to {A.label}")
    zero = Poly.zero(P.space)
    return Section(P, (zero,) * k + tuple(p.embed(P.space) for p in a.coeffs))


# ---------------------------------------------------------------------------
# morphisms

class ChartMorphism:
    """Lie algebroid homomorphism Phi: A -> B over a polynomial base map F.

    ``base_map[j]`` is F^j (the j-th target variable) as a polynomial in the
    source variables; ``fiber[b][a]`` is Phi^b_a, so Phi(e_a) = sum_b
    Phi^b_a (eps_b o F)."""

    __slots__ = ("source", "target", "base_map", "fiber", "name", "_subst", "_cache")

    def __init__(self, source: ChartAlgebroid, target: ChartAlgebroid,
                 base_map: Sequence[PolyLike], fiber: Sequence[Sequence[PolyLike]], name: str = ""):
        if len(base_map) != target.dim:
            raise ShapeError(f"base map needs {target.dim} components, got {len(base_map)}")
        if len(fiber) != target.rank or any(len(row) != source.rank for row in fiber):
            raise ShapeError(f"fiber matrix must be {target.rank}x{source.rank}")
        self.source = source
        self.target = target
        self.base_map = tuple(_as_poly(p, source.space) for p in base_map)
        self.fiber = tuple(tuple(_as_poly(p, source.space) for p in row) for row in fiber)
        self.name = name
        self._subst = dict(zip(target.space.names, self.base_map))
        self._cache = {}

    @classmethod
    def build(cls, source: ChartAlgebroid, target: ChartAlgebroid,
              base: Mapping[str, PolyLike] | None = None,
              fiber: Mapping[str, Mapping[str, PolyLike]] = (), name: str = "") -> "ChartMorphism":
        """Named construction.  Target variables missing from ``base`` map to the
        same-named source variable; source frames missing from ``fiber`` map
        to zero."""
        base = dict(base or {})
        bm = []
        for v in target.space.names:
            if v in base:
                bm.append(_as_poly(base[v], source.space))
            elif v in source.space:
                bm.append(Poly.var(v, source.space))
            else:
                raise ShapeError(f"no image given for target variable {v!r}")
        extra = set(base) - set(target.space.names)
        if extra:
            raise ShapeError(f"unknown target variables {sorted(extra)}")
        zero = Poly.zero(source.space)
        mat = [[zero] * source.rank for _ in range(target.rank)]
        for f, img in dict(fiber).items():
            a = source.frame_index(f)
            for g, p in img.items():
                mat[target.frame_index(g)][a] = _as_poly(p, source.space)
        return cls(source, target, bm, mat, name=name)

    def pull_function(self, p: Poly) -> Poly:
        """p o F for a function ``p`` on the target base."""
        return p.embed(self.target.space).compose(self._subst, self.source.space)

    def fiber_apply(self, a: Section) -> Tuple[Poly, ...]:
        """Coefficients of Phi o a on the target frame, as functions on the source base."""
        if not same_algebroid(a.owner, self.source):
            raise AlgebroidMismatch("section does not belong to the morphism's source")
        out = []
        for row in self.fiber:
            acc = Poly.zero(self.source.space)
            for phi, f in zip(row, a.coeffs):
                if phi and f:
                    acc = acc + phi * f
            out.append(acc)
        return tuple(out)

    def apply(self, a: Section) -> Section:
        """Phi o a as a section of the target; needs a base-preserving morphism."""
        if not self.is_base_preserving():
            raise ShapeError("Phi o a is a section of the target only over the identity base map")
        return Section(self.target, self.fiber_apply(a))

    def is_base_preserving(self) -> bool:
        hit = self._cache.get("bp")
        if hit is None:
            hit = (self.source.space == self.target.space and
                   all(p == Poly.var(v, self.source.space)
                       for v, p in zip(self.target.space.names, self.base_map)))
            self._cache["bp"] = hit
        return hit

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChartMorphism):
            return NotImplemented
        return (same_algebroid(self.source, other.source) and same_algebroid(self.target, other.target)
                and self.base_map == other.base_map and self.fiber == other.fiber)

    __hash__ = None

    def __repr__(self) -> str:
        return f"ChartMorphism({self.name or '?'}: {self.source.label} -> {self.target.label})"


def identity(A: ChartAlgebroid) -> ChartMorphism:
    one, zero = Poly.const(1, A.space), Poly.zero(A.space)
    fiber = [[one if i == j else zero for j in range(A.rank)] for i in range(A.rank)]
    return ChartMorphism(A, A, [Poly.var(v, A.space) for v in A.space.names], fiber,
                         name=f"id_{A.name}" if A.name else "id")


def validate_morphism(phi: ChartMorphism) -> Report:
    """Check the anchor condition and the frame form of the bracket condition."""
    A, B = phi.source, phi.target
    report = Report(phi.name or repr(phi))
    F = phi.base_map
    # anchor: sum_b Phi^b_a (rho_B^j_b o F) = rho_A(e_a)(F^j)
    rhoB_F = [[phi.pull_function(p) for p in row] for row in B.anchor]
    for a in range(A.rank):
        for j in range(B.dim):
            lhs = Poly.zero(A.space)
            for b in range(B.rank):
                if phi.fiber[b][a] and rhoB_F[b][j]:
                    lhs = lhs + phi.fiber[b][a] * rhoB_F[b][j]
            res = lhs - frame_derivation(A, a, F[j])
            if res:
                report.violations.append(
                    Violation("anchor", (A.frames[a], B.space.names[j]), res))
    # bracket on frames
    cB_F = {}
    for k in range(B.rank):
        for l in range(B.rank):
            for d, s in B._struct_nz[k][l]:
                cB_F[(k, l, d)] = phi.pull_function(s)
    for a, b in combinations(range(A.rank), 2):
        for d in range(B.rank):
            lhs = Poly.zero(A.space)
            for c, s in A._struct_nz[a][b]:
                if phi.fiber[d][c]:
                    lhs = lhs + s * phi.fiber[d][c]
            rhs = frame_derivation(A, a, phi.fiber[d][b]) - frame_derivation(A, b, phi.fiber[d][a])
            for (k, l, dd), s in cB_F.items():
                if dd == d and phi.fiber[k][a] and phi.fiber[l][b]:
                    rhs = rhs + phi.fiber[k][a] * phi.fiber[l][b] * s
            res = lhs - rhs
            if res:
                report.violations.append(
                    Violation("bracket", (A.frames[a], A.frames[b], B.frames[d]), res))
    return report


def compose_morphisms(phi: ChartMorphism, psi: ChartMorphism) -> ChartMorphism:
    """phi o psi for psi: A -> B and phi: B -> C."""
    if not same_algebroid(psi.target, phi.source):
        raise ChainMismatch(f"cannot compose: {psi!r} does not land in the source of {phi!r}")
    A, C = psi.source, phi.target
    base = [psi.pull_function(p) for p in phi.base_map]
    fiber = []
    for g in range(C.rank):
        row = []
        for a in range(A.rank):
            acc = Poly.zero(A.space)
            for b in range(phi.source.rank):
                if phi.fiber[g][b] and psi.fiber[b][a]:
                    acc = acc + psi.pull_function(phi.fiber[g][b]) * psi.fiber[b][a]
            row.append(acc)
        fiber.append(row)
    name = f"{phi.name}.{psi.name}" if phi.name and psi.name else ""
    return ChartMorphism(A, C, base, fiber, name=name)


# ---------------------------------------------------------------------------
# identification of T R^k x A with the inverse image pr2^(A)

@dataclass(frozen=True)
class PsiDifference:
    """Difference between the inverse-image bracket of Psi(a), Psi(b) and
    Psi([a, b]), split into its vector-field part and its pr2^*A part."""

    vector_field: Tuple[Poly, ...]
    fiber: Tuple[Poly, ...]

    def is_zero(self) -> bool:
        return not any(self.vector_field) and not any(self.fiber)


def _psi(a: Section, k: int, A: ChartAlgebroid):
    """Psi(u, w) = (u + rho_A(w), w) as (vector field on R^k x M, pr2^*A coefficients)."""
    P = a.owner
    u, w = a.coeffs[:k], a.coeffs[k:]
    vf = [Poly.zero(P.space)] * P.dim
    for i in range(k):
        vf[i] = u[i]
    for al, f in enumerate(w):
        if not f:
            continue
        for j, _, rho in A._anchor_nz[al]:
            pos = P.space.index(A.space.names[j])
            vf[pos] = vf[pos] + f * rho.embed(P.space)
    return tuple(vf), tuple(w)


def psi_check(k: int, A: ChartAlgebroid, a: Section, b: Section) -> PsiDifference:
    """Compare the inverse-image bracket (with the explicit decomposition of
    the pr2^*A parts over the frame of A) against the product bracket
    transported by Psi.  Zero difference means Psi preserves brackets."""
    P = a.owner
    if P.prolongation is None:
        raise NotProlongation(f"{P.label} is not a tagged prolongation")
    kk, inner = P.prolongation
    if kk != k or not same_algebroid(inner, A):
        raise NotProlongation(f"{P.label} is not prolong({k}, {A.label})")
    if not same_algebroid(b.owner, P):
        raise AlgebroidMismatch("sections belong to different algebroids")
    X, fs = _psi(a, k, A)
    Y, gs = _psi(b, k, A)
    zero = Poly.zero(P.space)
    # vector field bracket [X, Y]
    XY = tuple(derivation(X, Y[i]) - derivation(Y, X[i]) for i in range(P.dim))
    # sum_{p,q} f^p g^q ([e_p, e_q]_A o pr2) + sum_q X(g^q) e_q - sum_p Y(f^p) e_p
    r = A.rank
    zeta = [zero] * r
    for p in range(r):
        if not fs[p]:
            continue
        for q in range(r):
            if not gs[q]:
                continue
            for c, s in A._struct_nz[p][q]:
                zeta[c] = zeta[c] + fs[p] * gs[q] * s.embed(P.space)
    for q in range(r):
        zeta[q] = zeta[q] + derivation(X, gs[q]) - derivation(Y, fs[q])
    Z, zs = _psi(bracket(a, b), k, A)
    return PsiDifference(tuple(x - y for x, y in zip(XY, Z)),
                         tuple(x - y for x, y in zip(zeta, zs)))
