"""Exact sparse multivariate polynomials with rational coefficients.

A :class:`Poly` is a map from exponent vectors to nonzero rationals over an
ordered :class:`VarSpace`. Variables are tagged either as base coordinates
(``"x"`` kind) or simplex parameters (``"t"`` kind).  Polynomials over
different spaces combine by embedding both into the union of the spaces;
a name present in both spaces with different kinds is an error.

Coefficients are stored as ``int`` when integral and as
:class:`fractions.Fraction` otherwise, which keeps the common integer case
fast while staying exact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from operator import add
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

from .errors import (
    EmptyIntegrationSet,
    IncompleteSubstitution,
    UnknownVariable,
    VarSpaceMismatch,
)

Rat = Fraction
Number = Union[int, Fraction]
Exps = Tuple[int, ...]

BASE = "x"
PARAM = "t"


def _norm(c: Number) -> Number:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def as_rat(value) -> Number:
    """Coerce ints, Fractions and strings like ``"3/2"`` to an exact rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return _norm(value)
    if isinstance(value, str):
        return _norm(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rat(c: Number) -> str:
    c = _norm(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


class VarSpace:
    """Ordered, immutable list of uniquely named, kind-tagged variables."""

    __slots__ = ("names", "kinds", "_index", "_hash")

    def __init__(self, names: Iterable[str] = (), kinds: Iterable[str] | None = None):
        names = tuple(names)
        kinds = tuple(kinds) if kinds is not None else (BASE,) * len(names)
        if len(kinds) != len(names):
            raise ValueError("names and kinds differ in length")
        if len(set(names)) != len(names):
            raise VarSpaceMismatch(f"duplicate variable names in {names}")
        for k in kinds:
            if k not in (BASE, PARAM):
                raise ValueError(f"unknown variable kind {k!r}")
        self.names = names
        self.kinds = kinds
        self._index = {n: i for i, n in enumerate(names)}
        self._hash = hash((names, kinds))

    @classmethod
    def base(cls, *names: str) -> "VarSpace":
        return cls(names, (BASE,) * len(names))

    @classmethod
    def params(cls, *names: str) -> "VarSpace":
        return cls(names, (PARAM,) * len(names))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, VarSpace):
            return NotImplemented
        return self.names == other.names and self.kinds == other.kinds

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}:{k}" for n, k in zip(self.names, self.kinds))
        return f"VarSpace({inner})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def kind(self, name: str) -> str:
        return self.kinds[self.index(name)]

    def names_of_kind(self, kind: str) -> Tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k == kind)

    def union(self, other: "VarSpace") -> "VarSpace":
        """Variables of ``self`` followed by the new ones of ``other``."""
        if self is other or self == other:
            return self
        names = list(self.names)
        kinds = list(self.kinds)
        for n, k in zip(other.names, other.kinds):
            i = self._index.get(n)
            if i is None:
                names.append(n)
                kinds.append(k)
            elif self.kinds[i] != k:
                raise VarSpaceMismatch(f"variable {n!r} is tagged {self.kinds[i]!r} and {k!r}")
        if len(names) == len(self.names):
            return self
        return VarSpace(names, kinds)

    def without(self, names: Iterable[str]) -> "VarSpace":
        drop = set(names)
        keep = [(n, k) for n, k in zip(self.names, self.kinds) if n not in drop]
        return VarSpace([n for n, _ in keep], [k for _, k in keep])

    def concat(self, other: "VarSpace") -> "VarSpace":
        """Disjoint concatenation; any shared name is an error."""
        shared = set(self.names) & set(other.names)
        if shared:
            raise VarSpaceMismatch(f"variables {sorted(shared)} occur in both spaces")
        return VarSpace(self.names + other.names, self.kinds + other.kinds)


EMPTY = VarSpace()


class Poly:
    """Immutable polynomial over a :class:`VarSpace`.

    ``terms`` maps exponent tuples (aligned with ``space``) to nonzero
    coefficients. Treat both attributes as read-only.
    """

    __slots__ = ("space", "terms", "_hash")

    def __init__(self, space: VarSpace, terms: Dict[Exps, Number] | None = None):
        self.space = space
        self.terms = terms if terms is not None else {}
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, space: VarSpace = EMPTY) -> "Poly":
        return cls(space, {})

    @classmethod
    def const(cls, c, space: VarSpace = EMPTY) -> "Poly":
        c = as_rat(c)
        if c == 0:
            return cls(space, {})
        return cls(space, {(0,) * len(space): c})

    @classmethod
    def var(cls, name: str, space: VarSpace) -> "Poly":
        i = space.index(name)
        e = [0] * len(space)
        e[i] = 1
        return cls(space, {tuple(e): 1})

    @classmethod
    def from_terms(cls, space: VarSpace, terms: Mapping[Exps, object]) -> "Poly":
        out = {}
        n = len(space)
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {space!r}")
            c = as_rat(c)
            if c:
                out[e] = _norm(out.get(e, 0) + c)
                if not out[e]:
                    del out[e]
        return cls(space, out)

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Number:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def variables(self) -> Tuple[str, ...]:
        """Names of variables that actually occur, in space order."""
        used = [False] * len(self.space)
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used[i] = True
        return tuple(n for n, u in zip(self.space.names, used) if u)

    def coefficient(self, exps: Mapping[str, int]) -> Fraction:
        e = [0] * len(self.space)
        for name, x in exps.items():
            e[self.space.index(name)] = x
        return Fraction(self.terms.get(tuple(e), 0))

    # space handling -----------------------------------------------------
    def embed(self, space: VarSpace) -> "Poly":
        """Re-express over ``space``; every occurring variable must exist there."""
        if space is self.space or space == self.space:
            return self if space is self.space else Poly(space, self.terms)
        src = self.space
        used = [i for i, n in enumerate(src.names) if any(e[i] for e in self.terms)]
        pos = []
        for i in used:
            name = src.names[i]
            if name not in space:
                raise VarSpaceMismatch(f"variable {name!r} does not exist in {space!r}")
            j = space.index(name)
            if space.kinds[j] != src.kinds[i]:
                raise VarSpaceMismatch(f"variable {name!r} changes kind")
            pos.append((i, j))
        n = len(space)
        out = {}
        for e, c in self.terms.items():
            f = [0] * n
            for i, j in pos:
                f[j] = e[i]
            out[tuple(f)] = c
        return Poly(space, out)

    def _aligned(self, other: "Poly"):
        if other.space is self.space or other.space == self.space:
            return self.space, self.terms, other.terms
        u = self.space.union(other.space)
        return u, self.embed(u).terms, other.embed(u).terms

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(other, self.space)
        return NotImplemented

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms and (other.space is self.space):
            return self
        space, a, b = self._aligned(other)
        if not b:
            return Poly(space, a)
        if not a:
            return Poly(space, b)
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = _norm(v + c)
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly(space, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.space, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = as_rat(c)
        if c == 0:
            return Poly(self.space, {})
        if c == 1:
            return self
        return Poly(self.space, {e: _norm(v * c) for e, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        space, a, b = self._aligned(other)
        if not a or not b:
            return Poly(space, {})
        if len(b) > len(a):
            a, b = b, a
        out: Dict[Exps, Number] = {}
        get = out.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(map(add, e1, e2))
                v = get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly(space, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(1, self.space)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Poly.const(other, self.space)
        if not isinstance(other, Poly):
            return NotImplemented
        if other.space is self.space or other.space == self.space:
            return self.terms == other.terms
        try:
            _, a, b = self._aligned(other)
        except VarSpaceMismatch:
            return False
        return a == b

    def __hash__(self) -> int:
        if self._hash is None:
            names = self.space.names
            self._hash = hash(frozenset(
                (tuple((names[i], x) for i, x in enumerate(e) if x), c)
                for e, c in self.terms.items()
            ))
        return self._hash

    # calculus -----------------------------------------------------------
    def partial(self, var: str) -> "Poly":
        return partial(self, var)

    def compose(self, subst: Mapping[str, "Poly"], space: VarSpace | None = None) -> "Poly":
        return compose(self, subst, space)

    def substitute(self, subst: Mapping[str, object]) -> "Poly":
        return substitute(self, subst)

    def integrate_simplex(self, tvars: Sequence[str]) -> "Poly":
        return integrate_simplex(self, tvars)

    def integrate_cube(self, vars: Iterable[str]) -> "Poly":
        return integrate_cube(self, vars)

    # text ---------------------------------------------------------------
    def sorted_terms(self):
        """Terms in graded lexicographic order, leading term first."""
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.space.names
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if x == 1 else f"{names[i]}^{x}" for i, x in enumerate(e) if x
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = format_rat(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_rat(a)}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


def partial(p: Poly, var: str) -> Poly:
    """Formal partial derivative of ``p`` with respect to ``var``."""
    i = p.space.index(var)
    out = {}
    for e, c in p.terms.items():
        x = e[i]
        if x:
            f = list(e)
            f[i] = x - 1
            out[tuple(f)] = c * x
    return Poly(p.space, out)


def compose(p: Poly, subst: Mapping[str, Poly], space: VarSpace | None = None) -> Poly:
    """Simultaneously substitute a polynomial for each occurring variable of ``p``.

    The result lives over ``space`` when given, otherwise over the union of
    the images' spaces.
    """
    occurring = p.variables()
    missing = [v for v in occurring if v not in subst]
    if missing:
        raise IncompleteSubstitution(f"no image for {missing}")
    images = {}
    for name, img in subst.items():
        if not isinstance(img, Poly):
            img = Poly.const(img, space or EMPTY)
        images[name] = img
    if space is None:
        space = EMPTY
        for v in occurring:
            space = space.union(images[v].space)
        if not occurring:
            for img in images.values():
                space = space.union(img.space)
    slots = [(p.space.index(v), images[v].embed(space)) for v in occurring]
    powers = [[Poly.const(1, space), img] for _, img in slots]

    def power(k: int, n: int) -> Poly:
        cache = powers[k]
        while len(cache) <= n:
            cache.append(cache[-1] * cache[1])
        return cache[n]

    result: Dict[Exps, Number] = {}
    zero_e = (0,) * len(space)
    for e, c in p.terms.items():
        term = None
        for k, (i, _) in enumerate(slots):
            if e[i]:
                f = power(k, e[i])
                term = f if term is None else term * f
        if term is None:
            v = _norm(result.get(zero_e, 0) + c)
            if v:
                result[zero_e] = v
            else:
                result.pop(zero_e, None)
            continue
        for f, d in term.terms.items():
            v = _norm(result.get(f, 0) + c * d)
            if v:
                result[f] = v
            else:
                result.pop(f, None)
    return Poly(space, result)


def substitute(p: Poly, subst: Mapping[str, object]) -> Poly:
    """Replace some variables, keeping the others; result stays over ``p.space``
    (extended by any new variables the images bring in)."""
    space = p.space
    images = {}
    for name, img in subst.items():
        if not isinstance(img, Poly):
            img = Poly.const(img, space)
        images[name] = img
        space = space.union(img.space)
    full = {n: Poly.var(n, space) for n in p.space.names if n not in images}
    full.update(images)
    return compose(p, full, space)


@lru_cache(maxsize=None)
def simplex_moment(exps: Tuple[int, ...]) -> Fraction:
    """Integral of ``t1^a1 ... tk^ak`` over the standard k-simplex."""
    k = len(exps)
    num = 1
    for a in exps:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(k + sum(exps)))


def integrate_simplex(p: Poly, tvars: Sequence[str]) -> Poly:
    """Exact integral over the standard simplex in ``tvars``; those variables are
    removed from the result's space."""
    tvars = tuple(tvars)
    if not tvars:
        raise EmptyIntegrationSet("simplex integration needs at least one variable; "
                                  "use basepoint substitution for the 0-simplex")
    if len(set(tvars)) != len(tvars):
        raise ValueError(f"repeated integration variable in {tvars}")
    idx = [p.space.index(v) for v in tvars]
    space = p.space.without(tvars)
    keep = [i for i in range(len(p.space)) if i not in set(idx)]
    out: Dict[Exps, Number] = {}
    for e, c in p.terms.items():
        m = simplex_moment(tuple(e[i] for i in idx))
        f = tuple(e[i] for i in keep)
        v = _norm(out.get(f, 0) + c * m)
        if v:
            out[f] = v
        else:
            out.pop(f, None)
    return Poly(space, out)


def integrate_cube(p: Poly, vars: Iterable[str]) -> Poly:
    """Exact integral over the unit cube in ``vars``; those variables are removed."""
    vars = tuple(vars)
    if not vars:
        return p
    idx = {p.space.index(v) for v in vars}
    space = p.space.without(vars)
    keep = [i for i in range(len(p.space)) if i not in idx]
    out: Dict[Exps, Number] = {}
    for e, c in p.terms.items():
        w = Fraction(1)
        for i in idx:
            w /= e[i] + 1
        f = tuple(e[i] for i in keep)
        v = _norm(out.get(f, 0) + c * w)
        if v:
            out[f] = v
        else:
            out.pop(f, None)
    return Poly(space, out)
