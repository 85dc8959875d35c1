"""Seeded random polynomials, sections and forms for randomized identity checks.

Every generator takes an explicit :class:`random.Random`; nothing here
touches global random state.
"""
from __future__ import annotations

import hashlib
import random
from fractions import Fraction
from typing import Sequence

from .algebroid import ChartAlgebroid, Section
from .forms import CubeAvg, Dr, RLinearForm, ScalarMul, Sum, Tensor, TensorForm, Wedge
from .poly import BASE, Poly, VarSpace


def trial_rng(seed: int, *labels) -> random.Random:
    """Independent deterministic stream for one trial."""
    h = hashlib.sha256(repr((seed,) + labels).encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def random_coeff(rng: random.Random, bound: int = 3):
    c = rng.randint(-bound, bound) or 1
    if rng.random() < 0.2:
        return Fraction(c, rng.randint(2, 4))
    return c


def random_poly(rng: random.Random, space: VarSpace, max_degree: int = 3, max_terms: int = 3,
                vars: Sequence[str] | None = None) -> Poly:
    names = list(vars) if vars is not None else list(space.names)
    idx = [space.index(v) for v in names]
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = [0] * len(space)
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            if idx:
                e[rng.choice(idx)] += 1
        terms[tuple(e)] = random_coeff(rng)
    return Poly.from_terms(space, terms)


def random_section(rng: random.Random, A: ChartAlgebroid, max_degree: int = 2,
                   density: float = 0.7) -> Section:
    coeffs = []
    for _ in range(A.rank):
        if rng.random() < density:
            coeffs.append(random_poly(rng, A.space, max_degree, 2))
        else:
            coeffs.append(Poly.zero(A.space))
    return Section(A, tuple(coeffs))


def random_tensor_form(rng: random.Random, A: ChartAlgebroid, degree: int, max_degree: int = 3,
                       density: float = 0.6, max_terms: int = 3) -> TensorForm:
    from itertools import combinations
    comps = {}
    for idx in combinations(range(A.rank), degree):
        if rng.random() < density:
            comps[idx] = random_poly(rng, A.space, max_degree, max_terms)
    return TensorForm(A, degree, comps)


def random_rform(rng: random.Random, A: ChartAlgebroid, degree: int, depth: int,
                 max_degree: int = 2) -> RLinearForm:
    """Random combinator tree of the given degree and at most ``depth`` levels."""
    avg_pool = [v for v, k in zip(A.space.names, A.space.kinds) if k == BASE]
    if depth <= 0:
        return Tensor(random_tensor_form(rng, A, degree, max_degree, density=0.7, max_terms=2),
                      label="leaf")
    choices = ["sum", "scale", "tensor"]
    if avg_pool:
        choices.append("avg")
    if degree >= 1:
        choices.append("d")
        choices.append("wedge")
    kind = rng.choice(choices)
    sub = depth - 1
    if kind == "tensor":
        return random_rform(rng, A, degree, 0, max_degree)
    if kind == "sum":
        return Sum(random_rform(rng, A, degree, sub, max_degree),
                   random_rform(rng, A, degree, sub, max_degree))
    if kind == "scale":
        return ScalarMul(random_poly(rng, A.space, 1, 2), random_rform(rng, A, degree, sub, max_degree))
    if kind == "avg":
        k = rng.randint(1, len(avg_pool))
        return CubeAvg(random_rform(rng, A, degree, sub, max_degree), rng.sample(avg_pool, k))
    if kind == "d":
        return Dr(random_rform(rng, A, degree - 1, sub, max_degree))
    p = rng.randint(0, degree)
    return Wedge(random_rform(rng, A, p, sub, max_degree),
                 random_rform(rng, A, degree - p, sub, max_degree))


def tree_kinds(w: RLinearForm) -> set:
    """Node class names occurring in a combinator tree."""
    out = {type(w).__name__}
    for attr in ("form", "left", "right"):
        child = getattr(w, attr, None)
        if isinstance(child, RLinearForm):
            out |= tree_kinds(child)
    return out
