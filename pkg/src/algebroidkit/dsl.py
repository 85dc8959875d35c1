"""The ``.lad`` declaration language: lexer, recursive-descent parser, resolver
and canonical serializer.

    # comments run to end of line
    algebroid C { base x, y; frame e1, e2;
                  anchor e1 = dx; anchor e2 = x^2*dx + dy;
                  bracket [e1, e2] = 2*x*e1; }
    algebroid P = prolong(1, C);
    form w on P degree 1 { (dt1) = t1*x; }
    morphism rho : C -> tangent(x, y) { e1 -> dx; e2 -> x^2*dx + dy; }
    homotopy H : prolong(1, C) -> C over { x' = x } { ... }
    rform nu = avg({x}, tensor(w));

Every diagnostic carries a line:column span.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import algebroid as alg
from .algebroid import ChartAlgebroid, ChartMorphism, Section
from .errors import AlgebroidKitError
from .forms import (
    CubeAvg,
    Dr,
    FiberIntegral,
    Precompose,
    RLinearForm,
    ScalarMul,
    Sum,
    Tensor,
    TensorForm,
    Wedge,
)
from .poly import Poly, VarSpace


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class DSLError(AlgebroidKitError):
    """Lexical, syntax or semantic error located in the source text."""

    def __init__(self, message: str, span: Span, expected: Sequence[str] = ()):
        self.message = message
        self.span = span
        self.expected = tuple(expected)
        super().__init__(self.render())

    def render(self, filename: str = "<input>") -> str:
        text = f"{filename}:{self.span}: error: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        return text


# -- lexer -----------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str          # IDENT, INT, PUNCT, EOF
    text: str
    span: Span


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>\#[^\n]*) |
    (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*'*) |
    (?P<INT>[0-9]+) |
    (?P<PUNCT>->|[{}()\[\],;=+\-*/^:])
""", re.VERBOSE)


def tokenize(text: str) -> List[Token]:
    out: List[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            sp = Span(line, col, line, col + 1)
            raise DSLError(f"unexpected character {text[pos]!r}", sp)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, Span(line, col, line, col + len(s))))
            col += len(s)
        pos = m.end()
    out.append(Token("EOF", "", Span(line, col, line, col)))
    return out


# -- AST ---------------------------------------------------------------------

@dataclass
class Expr:
    """Arithmetic expression node: op in num, name, add, sub, mul, div, neg, pow."""
    op: str
    args: tuple
    span: Span


@dataclass
class AlgExpr:
    """ref | prolong | product | tangent"""
    op: str
    args: tuple
    span: Span


@dataclass
class RExpr:
    op: str
    args: tuple
    span: Span


@dataclass
class AlgebroidBlock:
    name: str
    span: Span
    base: List[Tuple[str, Span]]
    frames: List[Tuple[str, Span]]
    anchors: List[Tuple[str, Span, Expr]]
    brackets: List[Tuple[str, str, Span, Expr]]


@dataclass
class AlgebroidAlias:
    name: str
    span: Span
    expr: AlgExpr


@dataclass
class FormDecl:
    name: str
    span: Span
    on: AlgExpr
    degree: int
    degree_span: Span
    comps: List[Tuple[List[str], Span, Expr]]


@dataclass
class MorphismDecl:
    kind: str          # "morphism" or "homotopy"
    name: str
    span: Span
    source: AlgExpr
    target: AlgExpr
    over: List[Tuple[str, Span, Expr]]
    fiber: List[Tuple[str, Span, Expr]]


@dataclass
class RFormDecl:
    name: str
    span: Span
    expr: RExpr


Decl = Union[AlgebroidBlock, AlgebroidAlias, FormDecl, MorphismDecl, RFormDecl]


# -- parser ------------------------------------------------------------------

class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _fail(self, expected: Sequence[str]):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise DSLError(f"unexpected {found}", t.span, expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("PUNCT", "IDENT") and self.tok.text == text

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self._fail([repr(text)])
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "IDENT":
            self._fail([what])
        t = self.tok
        self.i += 1
        return t

    def integer(self) -> Token:
        if self.tok.kind != "INT":
            self._fail(["integer"])
        t = self.tok
        self.i += 1
        return t

    def ident_list(self, what: str) -> List[Tuple[str, Span]]:
        out = [self.ident(what)]
        while self.at(","):
            self.i += 1
            out.append(self.ident(what))
        return [(t.text, t.span) for t in out]

    # file
    def parse_file(self) -> List[Decl]:
        decls = []
        while self.tok.kind != "EOF":
            t = self.tok
            if self.at("algebroid"):
                decls.append(self.algebroid())
            elif self.at("form"):
                decls.append(self.form())
            elif self.at("morphism") or self.at("homotopy"):
                decls.append(self.morphism())
            elif self.at("rform"):
                decls.append(self.rform())
            else:
                raise DSLError(f"unexpected {t.text!r}", t.span,
                               ["'algebroid'", "'form'", "'rform'", "'morphism'", "'homotopy'"])
        return decls

    def algebroid(self) -> Decl:
        self.eat("algebroid")
        name = self.ident("algebroid name")
        if self.at("="):
            self.i += 1
            e = self.alg_expr()
            self.eat(";")
            return AlgebroidAlias(name.text, name.span, e)
        if not self.at("{"):
            self._fail(["'{'", "'='"])
        self.i += 1
        block = AlgebroidBlock(name.text, name.span, [], [], [], [])
        while not self.at("}"):
            if self.at("base") or self.at("frame"):
                kw = self.tok.text
                self.i += 1
                names = self.ident_list("variable name" if kw == "base" else "frame name")
                (block.base if kw == "base" else block.frames).extend(names)
                if not self.at(";"):
                    self._fail(["','", "';'"])
            elif self.at("anchor"):
                self.i += 1
                f = self.ident("frame name")
                self.eat("=")
                block.anchors.append((f.text, f.span, self.expr()))
            elif self.at("bracket"):
                start = self.eat("bracket")
                self.eat("[")
                a = self.ident("frame name")
                self.eat(",")
                b = self.ident("frame name")
                self.eat("]")
                self.eat("=")
                block.brackets.append((a.text, b.text, start.span, self.expr()))
            else:
                self._fail(["'base'", "'frame'", "'anchor'", "'bracket'", "'}'"])
            self.eat(";")
        self.eat("}")
        return block

    def alg_expr(self) -> AlgExpr:
        t = self.ident("algebroid expression")
        if t.text == "prolong" and self.at("("):
            self.i += 1
            k = self.integer()
            self.eat(",")
            inner = self.alg_expr()
            self.eat(")")
            return AlgExpr("prolong", (int(k.text), inner), t.span)
        if t.text == "product" and self.at("("):
            self.i += 1
            a = self.alg_expr()
            self.eat(",")
            b = self.alg_expr()
            self.eat(")")
            return AlgExpr("product", (a, b), t.span)
        if t.text == "tangent" and self.at("("):
            self.i += 1
            names = self.ident_list("variable name")
            self.eat(")")
            return AlgExpr("tangent", tuple(names), t.span)
        return AlgExpr("ref", (t.text,), t.span)

    def form(self) -> FormDecl:
        self.eat("form")
        name = self.ident("form name")
        self.eat("on")
        on = self.alg_expr()
        self.eat("degree")
        deg = self.integer()
        self.eat("{")
        comps = []
        while not self.at("}"):
            lp = self.eat("(")
            frames = []
            if not self.at(")"):
                frames = [n for n, _ in self.ident_list("frame name")]
            self.eat(")")
            self.eat("=")
            comps.append((frames, lp.span, self.expr()))
            self.eat(";")
        self.eat("}")
        return FormDecl(name.text, name.span, on, int(deg.text), deg.span, comps)

    def morphism(self) -> MorphismDecl:
        kw = self.ident()
        name = self.ident(f"{kw.text} name")
        self.eat(":")
        src = self.alg_expr()
        self.eat("->")
        tgt = self.alg_expr()
        over = []
        if self.at("over"):
            self.i += 1
            self.eat("{")
            while not self.at("}"):
                v = self.ident("target variable")
                self.eat("=")
                over.append((v.text.rstrip("'"), v.span, self.expr()))
                if not self.at("}"):
                    self.eat(";")
            self.eat("}")
        self.eat("{")
        fiber = []
        while not self.at("}"):
            f = self.ident("source frame")
            self.eat("->")
            fiber.append((f.text, f.span, self.expr()))
            self.eat(";")
        self.eat("}")
        return MorphismDecl(kw.text, name.text, name.span, src, tgt, over, fiber)

    def rform(self) -> RFormDecl:
        self.eat("rform")
        name = self.ident("rform name")
        self.eat("=")
        e = self.r_expr()
        self.eat(";")
        return RFormDecl(name.text, name.span, e)

    def r_expr(self) -> RExpr:
        t = self.ident("R-linear expression")
        if not self.at("("):
            return RExpr("ref", (t.text,), t.span)
        self.i += 1
        op = t.text
        if op == "tensor":
            args = (self.ident("form name").text,)
        elif op in ("sum", "wedge"):
            a = self.r_expr()
            self.eat(",")
            args = (a, self.r_expr())
        elif op == "d":
            args = (self.r_expr(),)
        elif op == "scale":
            c = self.expr()
            self.eat(",")
            args = (c, self.r_expr())
        elif op == "avg":
            self.eat("{")
            names = [] if self.at("}") else self.ident_list("variable name")
            self.eat("}")
            self.eat(",")
            args = (tuple(names), self.r_expr())
        elif op == "fiber":
            k = int(self.integer().text)
            self.eat(",")
            args = (k, self.r_expr())
        elif op == "pullback":
            m = self.ident("morphism name")
            self.eat(",")
            args = (m.text, self.r_expr())
        else:
            raise DSLError(f"unknown R-linear operation {op!r}", t.span,
                           ["tensor", "sum", "scale", "wedge", "d", "avg", "fiber", "pullback"])
        self.eat(")")
        return RExpr(op, args, t.span)

    # arithmetic
    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok
            self.i += 1
            right = self.term()
            left = Expr("add" if op.text == "+" else "sub", (left, right), op.span)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.tok
            self.i += 1
            right = self.unary()
            left = Expr("mul" if op.text == "*" else "div", (left, right), op.span)
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            t = self.tok
            self.i += 1
            return Expr("neg", (self.unary(),), t.span)
        if self.at("+"):
            self.i += 1
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at("^"):
            t = self.tok
            self.i += 1
            n = self.integer()
            return Expr("pow", (base, int(n.text)), t.span)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return Expr("num", (int(t.text),), t.span)
        if t.kind == "IDENT":
            self.i += 1
            return Expr("name", (t.text,), t.span)
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.eat(")")
            return e
        self._fail(["number", "identifier", "'('", "'-'"])


def parse(text: str) -> List[Decl]:
    """Parse source text into declarations (no name resolution)."""
    return Parser(text).parse_file()


# -- linear combinations -------------------------------------------------------

def _combo(e: Expr, space: VarSpace, basis: Dict[str, int]) -> Dict[Optional[int], Poly]:
    """Evaluate to {None: scalar part, i: coefficient of basis element i}."""
    op = e.op
    if op == "num":
        return {None: Poly.const(e.args[0], space)}
    if op == "name":
        n = e.args[0]
        if n in basis:
            return {basis[n]: Poly.const(1, space)}
        if n in space:
            return {None: Poly.var(n, space)}
        what = "frame element or variable" if basis else "variable"
        raise DSLError(f"unknown {what} {n!r}", e.span)
    if op == "neg":
        return {k: -p for k, p in _combo(e.args[0], space, basis).items()}
    if op in ("add", "sub"):
        a = _combo(e.args[0], space, basis)
        b = _combo(e.args[1], space, basis)
        out = dict(a)
        for k, p in b.items():
            q = out.get(k, Poly.zero(space))
            out[k] = q + p if op == "add" else q - p
        return out
    if op == "mul":
        a = _combo(e.args[0], space, basis)
        b = _combo(e.args[1], space, basis)
        if set(a) <= {None}:
            s, other = a.get(None, Poly.zero(space)), b
        elif set(b) <= {None}:
            s, other = b.get(None, Poly.zero(space)), a
        else:
            raise DSLError("product of two frame elements is not linear", e.span)
        return {k: s * p for k, p in other.items()}
    if op == "div":
        a = _combo(e.args[0], space, basis)
        b = _combo(e.args[1], space, basis)
        den = b.get(None, Poly.zero(space))
        if set(b) - {None} or not den.is_constant() or not den:
            raise DSLError("division only by a nonzero number", e.span)
        inv = Fraction(1) / Fraction(den.constant_value())
        return {k: p.scale(inv) for k, p in a.items()}
    if op == "pow":
        a = _combo(e.args[0], space, basis)
        if set(a) - {None}:
            raise DSLError("power of a frame element is not linear", e.span)
        return {None: a.get(None, Poly.zero(space)) ** e.args[1]}
    raise AssertionError(op)


def eval_poly(e: Expr, space: VarSpace) -> Poly:
    return _combo(e, space, {}).get(None, Poly.zero(space))


def eval_linear(e: Expr, space: VarSpace, basis: Sequence[str]) -> List[Poly]:
    """Coefficients of a linear combination of ``basis`` with polynomial coefficients."""
    idx = {n: i for i, n in enumerate(basis)}
    c = _combo(e, space, idx)
    if c.get(None):
        raise DSLError(f"term without a frame element (expected a combination of "
                       f"{', '.join(basis) or 'nothing'})", e.span)
    return [c.get(i, Poly.zero(space)) for i in range(len(basis))]


def parse_section(text: str, A: ChartAlgebroid) -> Section:
    """Parse ``"x*e1 - e2"`` into a section of A."""
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p._fail(["end of input"])
    return Section(A, tuple(eval_linear(e, A.space, A.frames)))


def parse_poly(text: str, space: VarSpace) -> Poly:
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p._fail(["end of input"])
    return eval_poly(e, space)


# -- resolution --------------------------------------------------------------

@dataclass
class Entry:
    name: str
    kind: str          # algebroid, form, rform, morphism, homotopy
    value: object
    decl: Decl

    @property
    def span(self) -> Span:
        return self.decl.span


@dataclass
class SpecFile:
    entries: List[Entry] = field(default_factory=list)
    index: Dict[str, Entry] = field(default_factory=dict)

    def get(self, name: str, kind: str | Tuple[str, ...] | None = None) -> Entry:
        e = self.index.get(name)
        if e is None:
            raise KeyError(name)
        kinds = (kind,) if isinstance(kind, str) else kind
        if kinds and e.kind not in kinds:
            raise KeyError(f"{name} is a {e.kind}, not a {' or '.join(kinds)}")
        return e

    def __getitem__(self, name: str):
        return self.index[name].value

    def names(self, kind: str | None = None) -> List[str]:
        return [e.name for e in self.entries if kind is None or e.kind == kind]

    def structurally_equal(self, other: "SpecFile") -> bool:
        if [(e.name, e.kind) for e in self.entries] != [(e.name, e.kind) for e in other.entries]:
            return False
        for a, b in zip(self.entries, other.entries):
            if a.kind == "rform":
                if a.value.to_text() != b.value.to_text() or a.value.owner != b.value.owner:
                    return False
            elif a.kind == "algebroid":
                if a.value != b.value or a.value.prolongation != b.value.prolongation:
                    return False
            elif a.value != b.value:
                return False
        return True


class Resolver:
    def __init__(self):
        self.spec = SpecFile()

    def bind(self, name: str, kind: str, value, decl: Decl):
        prev = self.spec.index.get(name)
        if prev is not None:
            raise DSLError(f"name already bound: {name!r} (first bound at {prev.span})", decl.span)
        e = Entry(name, kind, value, decl)
        self.spec.entries.append(e)
        self.spec.index[name] = e

    def lookup(self, name: str, kind: str, span: Span):
        e = self.spec.index.get(name)
        if e is None:
            raise DSLError(f"unknown {kind} {name!r}", span)
        if e.kind != kind and not (kind == "morphism" and e.kind == "homotopy"):
            raise DSLError(f"{name!r} is a {e.kind}, not a {kind}", span)
        return e.value

    def algebroid_expr(self, e: AlgExpr) -> ChartAlgebroid:
        try:
            if e.op == "ref":
                return self.lookup(e.args[0], "algebroid", e.span)
            if e.op == "prolong":
                return alg.prolong(e.args[0], self.algebroid_expr(e.args[1]))
            if e.op == "product":
                return alg.product(self.algebroid_expr(e.args[0]), self.algebroid_expr(e.args[1]))
            names = [n for n, _ in e.args]
            if len(set(names)) != len(names):
                raise DSLError("repeated variable in tangent(...)", e.span)
            return alg.tangent(*names)
        except DSLError:
            raise
        except AlgebroidKitError as exc:
            raise DSLError(str(exc), e.span) from None

    def block(self, b: AlgebroidBlock) -> ChartAlgebroid:
        seen: Dict[str, Span] = {}
        for n, sp in b.base + b.frames:
            if n in seen:
                raise DSLError(f"{n!r} declared twice in {b.name}", sp)
            seen[n] = sp
        space = VarSpace.base(*[n for n, _ in b.base])
        frames = [n for n, _ in b.frames]
        fidx = {f: i for i, f in enumerate(frames)}
        dnames = ["d" + v for v in space.names]
        anchor = [[Poly.zero(space)] * len(space) for _ in frames]
        given = set()
        for f, sp, e in b.anchors:
            if f not in fidx:
                raise DSLError(f"unknown frame element {f!r}", sp)
            if f in given:
                raise DSLError(f"anchor of {f!r} given twice", sp)
            given.add(f)
            anchor[fidx[f]] = eval_linear(e, space, dnames)
        r = len(frames)
        struct = [[[Poly.zero(space)] * r for _ in range(r)] for _ in range(r)]
        pairs = set()
        for f, g, sp, e in b.brackets:
            for n in (f, g):
                if n not in fidx:
                    raise DSLError(f"unknown frame element {n!r}", sp)
            coeffs = eval_linear(e, space, frames)
            if f == g:
                if any(coeffs):
                    raise DSLError(f"antisymmetry violation: [{f},{f}] must be 0", sp)
                continue
            if frozenset((f, g)) in pairs:
                raise DSLError(f"bracket [{f},{g}] given twice", sp)
            pairs.add(frozenset((f, g)))
            a, c = fidx[f], fidx[g]
            struct[a][c] = coeffs
            struct[c][a] = [-p for p in coeffs]
        return ChartAlgebroid(space, frames, anchor, struct, name=b.name)

    def form(self, f: FormDecl) -> TensorForm:
        A = self.algebroid_expr(f.on)
        if f.degree > A.rank:
            raise DSLError(f"degree {f.degree} exceeds the rank {A.rank} of {A.label}", f.degree_span)
        comps = {}
        for frames, sp, e in f.comps:
            if len(frames) != f.degree:
                raise DSLError(f"degree mismatch: component has {len(frames)} slots, "
                               f"form has degree {f.degree}", sp)
            for fr in frames:
                if fr not in A.frames:
                    raise DSLError(f"unknown frame element {fr!r} of {A.label}", sp)
            if len(set(frames)) != len(frames):
                raise DSLError("repeated frame element in component", sp)
            key = tuple(A.frame_index(fr) for fr in frames)
            srt = tuple(sorted(key))
            if srt in {tuple(sorted(k)) for k in comps}:
                raise DSLError("component given twice", sp)
            comps[key] = eval_poly(e, A.space)
        return TensorForm(A, f.degree, comps, name=f.name)

    def morphism(self, m: MorphismDecl) -> ChartMorphism:
        A = self.algebroid_expr(m.source)
        B = self.algebroid_expr(m.target)
        if m.kind == "homotopy":
            if A.prolongation is None or A.prolongation[0] != 1:
                raise DSLError("a homotopy needs a source of the form prolong(1, A)", m.source.span)
        base = {}
        for v, sp, e in m.over:
            if v not in B.space:
                raise DSLError(f"{v!r} is not a variable of {B.label}", sp)
            if v in base:
                raise DSLError(f"image of {v!r} given twice", sp)
            base[v] = eval_poly(e, A.space)
        for v in B.space.names:
            if v not in base and v not in A.space:
                raise DSLError(f"no image for target variable {v!r} and the source has no "
                               f"variable of that name", m.span)
        fiber = {}
        for f, sp, e in m.fiber:
            if f not in A.frames:
                raise DSLError(f"unknown frame element {f!r} of {A.label}", sp)
            if f in fiber:
                raise DSLError(f"image of {f!r} given twice", sp)
            fiber[f] = dict(zip(B.frames, eval_linear(e, A.space, B.frames)))
        return ChartMorphism.build(A, B, base, fiber, name=m.name)

    def r_expr(self, e: RExpr) -> RLinearForm:
        try:
            op, args = e.op, e.args
            if op == "ref":
                return self.lookup(args[0], "rform", e.span)
            if op == "tensor":
                return Tensor(self.lookup(args[0], "form", e.span), label=args[0])
            if op == "sum":
                return Sum(self.r_expr(args[0]), self.r_expr(args[1]))
            if op == "wedge":
                return Wedge(self.r_expr(args[0]), self.r_expr(args[1]))
            if op == "d":
                return Dr(self.r_expr(args[0]))
            if op == "scale":
                inner = self.r_expr(args[1])
                return ScalarMul(eval_poly(args[0], inner.owner.space), inner)
            if op == "avg":
                return CubeAvg(self.r_expr(args[1]), [n for n, _ in args[0]])
            if op == "fiber":
                inner = self.r_expr(args[1])
                if inner.degree < args[0]:
                    raise DSLError(f"degree {inner.degree} is below the simplex dimension {args[0]}",
                                   e.span)
                return FiberIntegral(args[0], inner)
            if op == "pullback":
                phi = self.lookup(args[0], "morphism", e.span)
                return Precompose(phi, self.r_expr(args[1]), label=args[0])
        except DSLError:
            raise
        except (AlgebroidKitError, ValueError) as exc:
            raise DSLError(str(exc), e.span) from None
        raise AssertionError(e.op)

    def run(self, decls: Sequence[Decl]) -> SpecFile:
        for d in decls:
            if isinstance(d, AlgebroidBlock):
                self.bind(d.name, "algebroid", self.block(d), d)
            elif isinstance(d, AlgebroidAlias):
                self.bind(d.name, "algebroid", self.algebroid_expr(d.expr), d)
            elif isinstance(d, FormDecl):
                self.bind(d.name, "form", self.form(d), d)
            elif isinstance(d, MorphismDecl):
                self.bind(d.name, d.kind, self.morphism(d), d)
            else:
                self.bind(d.name, "rform", self.r_expr(d.expr), d)
        return self.spec


def load(text: str) -> SpecFile:
    """Parse and resolve; entities are built but not validated."""
    return Resolver().run(parse(text))


# -- serialization -------------------------------------------------------------

def combo_text(coeffs: Sequence[Poly], names: Sequence[str]) -> str:
    parts = []
    for p, n in zip(coeffs, names):
        if not p:
            continue
        if p == 1:
            parts.append(n)
        elif p == -1:
            parts.append(f"-{n}")
        elif len(p.terms) == 1:
            parts.append(f"{p}*{n}")
        else:
            parts.append(f"({p})*{n}")
    if not parts:
        return "0"
    out = parts[0]
    for s in parts[1:]:
        out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
    return out


def alg_expr_text(e: AlgExpr) -> str:
    if e.op == "ref":
        return e.args[0]
    if e.op == "prolong":
        return f"prolong({e.args[0]}, {alg_expr_text(e.args[1])})"
    if e.op == "product":
        return f"product({alg_expr_text(e.args[0])}, {alg_expr_text(e.args[1])})"
    return f"tangent({', '.join(n for n, _ in e.args)})"


def _algebroid_text(name: str, A: ChartAlgebroid) -> str:
    lines = [f"algebroid {name} {{"]
    if A.space.names:
        lines.append(f"  base {', '.join(A.space.names)};")
    if A.frames:
        lines.append(f"  frame {', '.join(A.frames)};")
    dn = ["d" + v for v in A.space.names]
    for f, row in zip(A.frames, A.anchor):
        if any(row):
            lines.append(f"  anchor {f} = {combo_text(row, dn)};")
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            col = A.structure[a][b]
            if any(col):
                lines.append(f"  bracket [{A.frames[a]}, {A.frames[b]}] = {combo_text(col, A.frames)};")
    lines.append("}")
    return "\n".join(lines)


def _form_text(name: str, on: AlgExpr, w: TensorForm) -> str:
    fr = w.owner.frames
    lines = [f"form {name} on {alg_expr_text(on)} degree {w.degree} {{"]
    for idx, p in sorted(w.components.items()):
        lines.append(f"  ({', '.join(fr[i] for i in idx)}) = {p};")
    lines.append("}")
    return "\n".join(lines)


def _morphism_text(kind: str, name: str, d: MorphismDecl, phi: ChartMorphism) -> str:
    A, B = phi.source, phi.target
    head = f"{kind} {name} : {alg_expr_text(d.source)} -> {alg_expr_text(d.target)}"
    over = []
    for v, p in zip(B.space.names, phi.base_map):
        if v in A.space and p == Poly.var(v, A.space):
            continue
        over.append(f"{v}' = {p}")
    if over:
        head += " over { " + "; ".join(over) + " }"
    lines = [head + " {"]
    for a, f in enumerate(A.frames):
        col = [row[a] for row in phi.fiber]
        if any(col):
            lines.append(f"  {f} -> {combo_text(col, B.frames)};")
    lines.append("}")
    return "\n".join(lines)


def serialize(spec: SpecFile) -> str:
    """Canonical text; ``load(serialize(s))`` is structurally equal to ``s``."""
    out = []
    for e in spec.entries:
        d = e.decl
        if e.kind == "algebroid":
            if isinstance(d, AlgebroidBlock):
                out.append(_algebroid_text(e.name, e.value))
            else:
                out.append(f"algebroid {e.name} = {alg_expr_text(d.expr)};")
        elif e.kind == "form":
            out.append(_form_text(e.name, d.on, e.value))
        elif e.kind in ("morphism", "homotopy"):
            out.append(_morphism_text(e.kind, e.name, d, e.value))
        else:
            out.append(f"rform {e.name} = {e.value.to_text()};")
    return "\n\n".join(out) + "\n"
