"""Independent reference implementations used only by the tests.

Nothing here calls the library's integration, elimination or bracket code;
polynomials are plain ``{exponent tuple: Fraction}`` dicts.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


# -- dict polynomials ----------------------------------------------------------

def padd(p, q):
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, 0) + c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def pmul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def ppow(p, n, nvars):
    out = {(0,) * nvars: Fraction(1)}
    for _ in range(n):
        out = pmul(out, p)
    return out


# -- iterated integration over the standard simplex ------------------------------

def iterated_simplex_integral(exps):
    """int over {t_i >= 0, sum t_i <= 1} of prod t_i^a_i, integrating the last
    variable first: t_k from 0 to 1 - t_1 - ... - t_(k-1), and so on."""
    k = len(exps)
    # polynomial in t_1..t_k
    p = {tuple(exps): Fraction(1)}
    for var in reversed(range(k)):
        # upper bound u = 1 - sum_{i<var} t_i, as a polynomial
        u = {(0,) * k: Fraction(1)}
        for i in range(var):
            e = [0] * k
            e[i] = 1
            u = padd(u, {tuple(e): Fraction(-1)})
        out = {}
        for e, c in p.items():
            a = e[var]
            rest = list(e)
            rest[var] = 0
            # antiderivative t^(a+1)/(a+1) at t = u minus at 0
            term = pmul({tuple(rest): c / (a + 1)}, ppow(u, a + 1, k))
            out = padd(out, term)
        p = out
    return p.get((0,) * k, Fraction(0))


# -- Chevalley-Eilenberg complex from structure constants --------------------------

def ce_differential(struct, n):
    """Matrix of d on n-cochains of a Lie algebra given by struct[a][b][c] =
    c^c_ab (numbers), using the invariant formula on basis tuples."""
    r = len(struct)
    rows = list(combinations(range(r), n + 1))
    cols = list(combinations(range(r), n))
    col_of = {c: i for i, c in enumerate(cols)}
    mat = [[Fraction(0)] * len(cols) for _ in rows]
    for ri, args in enumerate(rows):
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                sign = (-1) ** (i + j)
                rest = [args[m] for m in range(n + 1) if m not in (i, j)]
                for c in range(r):
                    coef = struct[args[i]][args[j]][c]
                    if not coef:
                        continue
                    seq = [c] + rest
                    if len(set(seq)) < len(seq):
                        continue
                    # sort seq, tracking the permutation sign
                    s = 1
                    seq = list(seq)
                    for x in range(len(seq)):
                        for y in range(len(seq) - 1 - x):
                            if seq[y] > seq[y + 1]:
                                seq[y], seq[y + 1] = seq[y + 1], seq[y]
                                s = -s
                    mat[ri][col_of[tuple(seq)]] += sign * s * Fraction(coef)
    return mat


def naive_rank(mat):
    """Rank by fraction-free integer-scaled elimination with column-major pivoting."""
    m = [[Fraction(v) for v in row] for row in mat]
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    used = [False] * rows
    for c in range(cols):
        pivot = None
        for r in range(rows):
            if not used[r] and m[r][c] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        used[pivot] = True
        rank += 1
        for r in range(rows):
            if r != pivot and m[r][c] != 0:
                f = m[r][c] / m[pivot][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[pivot])]
    return rank


def naive_betti(struct):
    r = len(struct)
    mats = [ce_differential(struct, n) for n in range(r + 1)]
    ranks = [naive_rank(mt) if mt else 0 for mt in mats]
    from math import comb
    return tuple(comb(r, n) - ranks[n] - (ranks[n - 1] if n else 0) for n in range(r + 1))


# -- Cartesian product bracket, componentwise --------------------------------------

def product_bracket(A, B, P, sigma, eta):
    """Bracket in A x B computed from the two-component formula: the A part is
    the A-bracket in A's variables plus B's anchor acting on the A-coefficients
    through B's variables, and symmetrically.  ``sigma``/``eta`` are coefficient
    tuples over P's frame (A frames first)."""
    from algebroidkit.poly import Poly

    ra = A.rank
    space = P.space
    s1, s2 = sigma[:ra], sigma[ra:]
    e1, e2 = eta[:ra], eta[ra:]

    def field(alg, coeffs):
        vf = {}
        for al, f in enumerate(coeffs):
            for j, v in enumerate(alg.space.names):
                rho = alg.anchor[al][j].embed(space)
                if rho and f:
                    vf[v] = vf.get(v, Poly.zero(space)) + f * rho
        return vf

    def apply(vf, p):
        acc = Poly.zero(space)
        for v, c in vf.items():
            acc = acc + c * p.partial(v)
        return acc

    def inner(alg, f, g, X_f, X_g):
        out = []
        for c in range(alg.rank):
            acc = Poly.zero(space)
            for a in range(alg.rank):
                for b in range(alg.rank):
                    s = alg.structure[a][b][c].embed(space)
                    if s and f[a] and g[b]:
                        acc = acc + f[a] * g[b] * s
            acc = acc + apply(X_f, g[c]) - apply(X_g, f[c])
            out.append(acc)
        return out

    XA_s, XA_e = field(A, s1), field(A, e1)
    XB_s, XB_e = field(B, s2), field(B, e2)
    first = inner(A, s1, e1, XA_s, XA_e)
    first = [p + apply(XB_s, e1[c]) - apply(XB_e, s1[c]) for c, p in enumerate(first)]
    second = inner(B, s2, e2, XB_s, XB_e)
    second = [p + apply(XA_s, e2[c]) - apply(XA_e, s2[c]) for c, p in enumerate(second)]
    return tuple(first + second)
