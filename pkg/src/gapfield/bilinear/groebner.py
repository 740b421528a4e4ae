"""Buchberger's algorithm over Q or F_p for tiny zero-dimensional systems.

Polynomials are ``dict[exponent_tuple, coeff]``. The monomial order is
graded reverse lexicographic. Only what distinct-point counting needs is
provided: reduced bases, normal forms, standard monomials, univariate
minimal polynomials and the Seidenberg radical.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable

from ..errors import ResourceError
from ..exact.poly import UniPoly

Poly = dict


class Field:
    def __init__(self, p: int | None):
        self.p = p

    def norm(self, c):
        return Fraction(c) if self.p is None else int(c) % self.p

    def inv(self, c):
        return 1 / c if self.p is None else pow(c, -1, self.p)

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p


def _key(m: tuple[int, ...]):
    # grevlex: total degree first, then the reversed exponents compared negatively
    return (sum(m), tuple(-x for x in reversed(m)))


def clean(f: Poly, F: Field) -> Poly:
    out = {}
    for m, c in f.items():
        c = F.norm(c)
        if c:
            out[m] = c
    return out


def lead(f: Poly) -> tuple[int, ...]:
    return max(f, key=_key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mdiv(b, a):
    return tuple(y - x for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_scaled(f: Poly, g: Poly, c, shift, F: Field) -> Poly:
    out = dict(f)
    for m, v in g.items():
        mm = tuple(x + y for x, y in zip(m, shift))
        nv = F.sub(out.get(mm, 0), F.mul(c, v))
        if nv:
            out[mm] = nv
        else:
            out.pop(mm, None)
    return out


def normal_form(f: Poly, G: list[Poly], F: Field) -> Poly:
    f = dict(f)
    rem: Poly = {}
    leads = [(lead(g), g) for g in G]
    while f:
        m = lead(f)
        c = f[m]
        for lm, g in leads:
            if _divides(lm, m):
                f = _sub_scaled(f, g, F.mul(c, F.inv(g[lm])), _mdiv(m, lm), F)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def _monic(f: Poly, F: Field) -> Poly:
    c = F.inv(f[lead(f)])
    return {m: F.mul(v, c) for m, v in f.items()}


def groebner(polys: Iterable[Poly], F: Field, max_pairs: int = 20000) -> list[Poly]:
    """Reduced Gröbner basis; ``[{0...0: 1}]`` for the unit ideal."""
    G = [_monic(g, F) for g in (clean(f, F) for f in polys) if g]
    if not G:
        return []
    pairs = [(i, j) for i in range(len(G)) for j in range(i)]
    done = 0
    while pairs:
        i, j = pairs.pop(0)
        done += 1
        if done > max_pairs:
            raise ResourceError("Gröbner basis computation exceeded its pair budget")
        li, lj = lead(G[i]), lead(G[j])
        l = _lcm(li, lj)
        if all(min(x, y) == 0 for x, y in zip(li, lj)):
            continue
        s = _sub_scaled(
            {tuple(x + y for x, y in zip(m, _mdiv(l, li))): v for m, v in G[i].items()},
            G[j],
            1,
            _mdiv(l, lj),
            F,
        )
        r = normal_form(s, G, F)
        if r:
            G.append(_monic(r, F))
            k = len(G) - 1
            pairs.extend((k, t) for t in range(k))
    # minimise and interreduce
    kept: list[Poly] = []
    for g in sorted(G, key=lambda g: _key(lead(g))):
        if not any(_divides(lead(h), lead(g)) for h in kept):
            kept.append(g)
    G = kept
    out = []
    for i, g in enumerate(G):
        r = normal_form(g, G[:i] + G[i + 1 :], F)
        out.append(_monic(r, F))
    return sorted(out, key=lambda g: _key(lead(g)))


def is_unit(G: list[Poly]) -> bool:
    return any(len(g) == 1 and not any(lead(g)) for g in G)


def is_zero_dimensional(G: list[Poly], nvars: int) -> bool:
    if is_unit(G):
        return True
    pure = set()
    for g in G:
        m = lead(g)
        nz = [i for i, x in enumerate(m) if x]
        if len(nz) == 1:
            pure.add(nz[0])
    return len(pure) == nvars


def standard_monomials(G: list[Poly], nvars: int, limit: int = 100000) -> list[tuple[int, ...]]:
    if is_unit(G):
        return []
    leads = [lead(g) for g in G]
    bound = [0] * nvars
    for m in leads:
        nz = [i for i, x in enumerate(m) if x]
        if len(nz) == 1:
            bound[nz[0]] = m[nz[0]]
    box = 1
    for b in bound:
        box *= b
    if box > limit:
        raise ResourceError("quotient ring too large to enumerate")
    return [m for m in iproduct(*(range(b) for b in bound)) if not any(_divides(l, m) for l in leads)]


def minimal_polynomial(G: list[Poly], var: int, nvars: int, F: Field) -> UniPoly:
    """Monic generator of ``I ∩ k[x_var]`` for a zero-dimensional ideal."""
    basis = standard_monomials(G, nvars)
    index = {m: i for i, m in enumerate(basis)}
    rows: list[list] = []
    power: Poly = {(0,) * nvars: F.norm(1)}
    xv = tuple(int(i == var) for i in range(nvars))
    for k in range(len(basis) + 1):
        nf = normal_form(power, G, F)
        vec = [F.norm(0)] * len(basis)
        for m, c in nf.items():
            vec[index[m]] = c
        rows.append(vec)
        dep = _dependency(rows, F)
        if dep is not None:
            return UniPoly(dep, F.p).monic()
        power = {tuple(a + b for a, b in zip(m, xv)): c for m, c in power.items()}
    raise AssertionError("minimal polynomial search did not terminate")


def _dependency(rows: list[list], F: Field):
    """Coefficients ``c`` with ``c[-1] = 1`` and ``sum c_k rows[k] = 0``, if any."""
    n = len(rows)
    cols = len(rows[0])
    # solve sum_{k<n-1} c_k rows[k] = -rows[n-1]
    a = [[rows[k][i] for k in range(n - 1)] + [F.sub(0, rows[n - 1][i])] for i in range(cols)]
    piv_cols = []
    r = 0
    for c in range(n - 1):
        piv = next((i for i in range(r, cols) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = F.inv(a[r][c])
        a[r] = [F.mul(x, inv) for x in a[r]]
        for i in range(cols):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    if any(a[i][n - 1] for i in range(r, cols)):
        return None
    coeffs = [F.norm(0)] * (n - 1)
    for i, c in enumerate(piv_cols):
        coeffs[c] = a[i][n - 1]
    return coeffs + [F.norm(1)]


def _embed(f: UniPoly, var: int, nvars: int) -> Poly:
    return {tuple(k if i == var else 0 for i in range(nvars)): c for k, c in enumerate(f.coeffs) if c}


def radical_basis(G: list[Poly], nvars: int, F: Field) -> list[Poly]:
    """Gröbner basis of the radical (zero-dimensional ideals over a perfect field)."""
    extra = []
    for v in range(nvars):
        mp = minimal_polynomial(G, v, nvars, F)
        rad = mp.radical()
        if rad.degree < mp.degree:
            extra.append(_embed(rad, v, nvars))
    return groebner(G + extra, F) if extra else G


def count_distinct_points(polys: list[Poly], nvars: int, p: int | None) -> int | None:
    """Distinct common zeros over the algebraic closure, or None when infinite."""
    F = Field(p)
    G = groebner(polys, F)
    if not G:
        return 1 if nvars == 0 else None
    if is_unit(G):
        return 0
    if not is_zero_dimensional(G, nvars):
        return None
    return len(standard_monomials(radical_basis(G, nvars, F), nvars))
