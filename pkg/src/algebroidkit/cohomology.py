"""Chevalley-Eilenberg cohomology of algebroids over a point.

Over a point the anchor vanishes and d is given by the structure constants
alone, so every cochain space is finite dimensional and H^n is computed by
exact elimination.  Over a positive-dimensional base only :func:`is_closed`
is offered.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import List, Optional, Tuple

from .algebroid import ChartAlgebroid, prolong
from .errors import InvalidAlgebroid, NotClosed, NotPointAlgebroid
from .forms import TensorForm, _raw, d
from .linalg import Matrix, matmul, rank, solve
from .poly import Poly, format_rat


def _require_point(g: ChartAlgebroid):
    if not g.is_point():
        raise NotPointAlgebroid(f"{g.label} has base variables {g.space.names}")
    if not g.is_valid():
        raise InvalidAlgebroid(f"{g.label} fails the Jacobi identity")


def basis(g: ChartAlgebroid, n: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(g.rank), n)) if 0 <= n <= g.rank else []


def ce_matrix(g: ChartAlgebroid, n: int) -> Matrix:
    """Matrix of d: Lambda^n g* -> Lambda^(n+1) g*, columns indexed by basis(g, n)."""
    _require_point(g)
    rows, cols = basis(g, n + 1), basis(g, n)
    pos = {idx: i for i, idx in enumerate(rows)}
    out = [[Fraction(0)] * len(cols) for _ in rows]
    for j, idx in enumerate(cols):
        dw = d(_raw(g, n, {idx: Poly.const(1, g.space)}))
        for jdx, p in dw.components.items():
            out[pos[jdx]][j] = Fraction(p.constant_value())
    return out


class BettiVector(tuple):
    """(b_0, ..., b_r)."""

    @property
    def euler_characteristic(self) -> int:
        return sum(b if i % 2 == 0 else -b for i, b in enumerate(self))

    def __str__(self) -> str:
        return " ".join(str(b) for b in self)


@dataclass
class CEComplex:
    g: ChartAlgebroid
    matrices: List[Matrix]

    @classmethod
    def of(cls, g: ChartAlgebroid) -> "CEComplex":
        _require_point(g)
        return cls(g, [ce_matrix(g, n) for n in range(g.rank + 1)])

    @property
    def rank(self) -> int:
        return self.g.rank

    def dims(self) -> List[int]:
        return [comb(self.rank, n) for n in range(self.rank + 1)]

    def is_complex(self) -> bool:
        """d_(n+1) d_n = 0 for every n."""
        for n in range(self.rank):
            prod = matmul(self.matrices[n + 1], self.matrices[n])
            if any(v for row in prod for v in row):
                return False
        return True

    def ranks(self) -> List[int]:
        return [rank(m) if m and m[0] else 0 for m in self.matrices]

    def betti(self) -> BettiVector:
        rk = self.ranks()
        dims = self.dims()
        out = []
        for n in range(self.rank + 1):
            kernel = dims[n] - rk[n]
            image = rk[n - 1] if n else 0
            out.append(kernel - image)
        return BettiVector(out)

    def to_json(self) -> list:
        return [[[format_rat(v) for v in row] for row in m] for m in self.matrices]


def betti(g: ChartAlgebroid) -> BettiVector:
    return CEComplex.of(g).betti()


def is_closed(w: TensorForm) -> bool:
    return d(w).is_zero()


def exactness_witness(g: ChartAlgebroid, w: TensorForm) -> Optional[TensorForm]:
    """xi with d xi = w, or None when w is closed but not exact."""
    _require_point(g)
    if w.owner != g:
        raise InvalidAlgebroid(f"form lives on {w.owner.label}, not {g.label}")
    if not is_closed(w):
        raise NotClosed("d w is not zero")
    n = w.degree
    if w.is_zero():
        return TensorForm.zero(g, max(n - 1, -1)) if n >= 1 else _raw(g, -1, {})
    if n == 0:
        return None
    rows, cols = basis(g, n), basis(g, n - 1)
    b = [Fraction(w.component(idx).constant_value()) for idx in rows]
    x = solve(ce_matrix(g, n - 1), b)
    if x is None:
        return None
    comps = {idx: Poly.const(v, g.space) for idx, v in zip(cols, x) if v}
    return _raw(g, n - 1, comps)


def _weight_basis(k: int, P: ChartAlgebroid, n: int, weight: int):
    out = []
    for idx in basis(P, n):
        room = weight - sum(1 for i in idx if i < k)
        for total in range(room + 1):
            for cut in combinations(range(total + k - 1), k - 1):
                # stars and bars: exponent vectors of the t-variables summing to total
                edges = (-1,) + cut + (total + k - 1,)
                out.append((idx, tuple(edges[i + 1] - edges[i] - 1 for i in range(k))))
    return out


def truncated_prolong_betti(k: int, g: ChartAlgebroid, weight: int) -> BettiVector:
    """Betti numbers of the weight <= ``weight`` part of the complex of
    prolong(k, g) with polynomial coefficients, g over a point.

    A form t^alpha dt_I ^ e_J has weight |alpha| + |I|.  d preserves weight
    (d/dt lowers the exponent and adds a dt), so the truncation is a
    subcomplex; every positive weight is acyclic and the answer is betti(g).
    """
    _require_point(g)
    if k < 1 or weight < 0:
        raise ValueError("need k >= 1 and weight >= 0")
    P = prolong(k, g)
    bases = [_weight_basis(k, P, n, weight) for n in range(P.rank + 2)]
    ranks = []
    for n in range(P.rank + 1):
        pos = {key: i for i, key in enumerate(bases[n + 1])}
        m = [[Fraction(0)] * len(bases[n]) for _ in bases[n + 1]]
        for j, (idx, exps) in enumerate(bases[n]):
            dw = d(_raw(P, n, {idx: Poly(P.space, {exps: 1})}))
            for jdx, p in dw.components.items():
                for e, c in p.terms.items():
                    m[pos[jdx, e]][j] = Fraction(c)
        ranks.append(rank(m) if m and m[0] else 0)
    return BettiVector(len(bases[n]) - ranks[n] - (ranks[n - 1] if n else 0)
                       for n in range(P.rank + 1))
