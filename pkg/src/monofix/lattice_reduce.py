"""Integer lattices: Smith/Hermite normal forms and reduction of an action to a faithful one.

When a group contains elements acting by pure scalings x_i -> a_i x_i, the
power products x^lam fixed by all of them generate the fixed field of that
scalar subgroup; on those power products the group acts monomially with the
scalar part removed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from . import intmat
from .certificate import CertificateStep
from .errors import NotRootOfUnity, RecursionCapExceeded
from .monomial_action import MonomialAutomorphism, MonomialGroup, group_closure
from .ratfunc import RationalFunction, SubstitutionMap

ROOT_ORDER_BOUND = 64
RECURSION_CAP = 4


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Return (U, D, V) with U*A*V = D, U and V unimodular, d1 | d2 | ... ."""
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, r)) for r in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row dst += k * row src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):  # col dst += k * col src
        for r in d:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(i, t, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(j, t, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


# ---------------------------------------------------------------------------
# Hermite normal form of a full-rank lattice given by basis columns


def hermite_columns(cols: Sequence[Sequence[int]]) -> list:
    """Upper-triangular column HNF: column j is zero below row j, positive pivot,
    entries right of each pivot reduced into [0, pivot)."""
    n = len(cols[0])
    c = [list(map(int, col)) for col in cols]
    k = len(c)
    if k != n:
        raise ValueError("full-rank square lattice basis expected")
    for r in range(n - 1, -1, -1):
        active = list(range(r + 1))
        while True:
            nz = [j for j in active if c[j][r]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda j: abs(c[j][r]))
            for j in nz:
                if j != p:
                    q = c[j][r] // c[p][r]
                    c[j] = [x - q * y for x, y in zip(c[j], c[p])]
        nz = [j for j in active if c[j][r]]
        if not nz:
            raise ValueError("basis is not full rank")
        p = nz[0]
        c[p], c[r] = c[r], c[p]
        if c[r][r] < 0:
            c[r] = [-x for x in c[r]]
    for j in range(n):
        for i in range(j - 1, -1, -1):
            q = c[j][i] // c[i][i]
            if q:
                c[j] = [x - q * y for x, y in zip(c[j], c[i])]
    return [tuple(col) for col in c]


def canonical_basis(cols) -> list:
    """HNF columns, with unit vectors (untouched variables) moved to the front."""
    h = hermite_columns(cols)
    unit = [col for col in h if sorted(map(abs, col)) == [0] * (len(col) - 1) + [1]]
    rest = [col for col in h if col not in unit]
    return unit + rest


# ---------------------------------------------------------------------------
# scalar kernel lattice


@dataclass(frozen=True)
class KernelLattice:
    basis: tuple  # n x n, columns are exponent vectors
    index: int

    @property
    def columns(self) -> list:
        return [intmat.column(self.basis, j) for j in range(len(self.basis))]


def _factor_small(m: int) -> dict:
    out, p = {}, 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _cyclic_generator(values, orders, field):
    """An element generating the cyclic group spanned by `values`."""
    m = 1
    for o in orders:
        m = m * o // gcd(m, o)
    g = field.one()
    for p, e in _factor_small(m).items():
        pe = p ** e
        best = next(v for v, o in zip(values, orders) if o % pe == 0)
        o = next(o for v, o in zip(values, orders) if v is best)
        g = g * best ** (o // pe)
    return g, m


def scalar_kernel_lattice(h0) -> KernelLattice:
    """Lattice {lam : prod_i a_i(tau)^lam_i = 1 for all tau} of fixed power products."""
    elems = list(h0.elements if isinstance(h0, MonomialGroup) else h0)
    if not elems:
        raise ValueError("empty scalar group")
    n = elems[0].n
    field = elems[0].field
    for t in elems:
        if not t.is_scalar():
            raise ValueError("scalar_kernel_lattice needs elements with identity matrix")
    gens = [t for t in elems if not t.is_identity()]
    if not gens:
        return KernelLattice(intmat.identity(n), 1)
    values, orders = [], []
    for t in gens:
        for c in t.coeffs:
            o = c.multiplicative_order(ROOT_ORDER_BOUND)
            if o is None:
                raise NotRootOfUnity(f"coefficient {c} is not a root of unity of order <= {ROOT_ORDER_BOUND}")
            values.append(c)
            orders.append(o)
    zeta, m = _cyclic_generator(values, orders, field)
    powers = [field.one()]
    for _ in range(m - 1):
        powers.append(powers[-1] * zeta)
    logs = {p.key(): k for k, p in enumerate(powers)}
    e = [[logs[c.key()] for c in t.coeffs] for t in gens]
    u, d, v = smith_normal_form(e)
    factors = []
    for i in range(n):
        di = d[i][i] if i < len(d) else 0
        factors.append(m // gcd(di, m))
    cols = [tuple(v[r][j] * factors[j] for r in range(n)) for j in range(n)]
    basis_cols = canonical_basis(cols)
    basis = intmat.from_columns(basis_cols)
    return KernelLattice(basis, abs(intmat.det(basis)))


# ---------------------------------------------------------------------------
# reduction to a faithful action


def induced_automorphism(s: MonomialAutomorphism, basis) -> MonomialAutomorphism:
    """Action of s on the power products z_j = x^{basis column j}."""
    binv = intmat.inverse_rational(basis)
    n = len(basis)
    cols = [intmat.column(basis, j) for j in range(n)]
    new_cols, coeffs = [], []
    for b in cols:
        c, mb = s.on_exponent(b)
        coords = [sum(binv[i][k] * mb[k] for k in range(n)) for i in range(n)]
        if any(x.denominator != 1 for x in coords):
            raise ValueError("lattice is not stable under the group")
        new_cols.append(tuple(int(x) for x in coords))
        coeffs.append(c)
    return MonomialAutomorphism(intmat.from_columns(new_cols), tuple(coeffs))


def power_product_map(basis, field) -> SubstitutionMap:
    """z_j -> x^{basis column j}."""
    n = len(basis)
    return SubstitutionMap([RationalFunction.monomial(field.one(), intmat.column(basis, j), n, field) for j in range(n)])


def reduce_to_faithful(g: MonomialGroup):
    """Return (map z -> power products, induced faithful group, Lemma2_8 step or None)."""
    n, field = g.n, g.field
    total = intmat.identity(n)
    cur = g
    kernel_total = 1
    depth = 0
    while True:
        h0 = cur.scalar_subgroup()
        if len(h0) == 1:
            break
        depth += 1
        if depth > RECURSION_CAP:
            raise RecursionCapExceeded("faithful reduction did not terminate within the depth cap")
        kl = scalar_kernel_lattice(h0)
        gens = [induced_automorphism(s, kl.basis) for s in cur.generators]
        gens = [s for s in gens if not s.is_identity()]
        kernel_total *= len(h0)
        cur = group_closure(gens, n, field)
        total = intmat.matmul(total, kl.basis)
    if kernel_total == 1:
        return SubstitutionMap([RationalFunction.var(k, n, field) for k in range(n)]), g, None
    smap = power_product_map(total, field)
    index = abs(intmat.det(total))
    h_all = g.scalar_subgroup()
    step = CertificateStep("Lemma2_8", smap, index, payload={
        "lattice": [list(r) for r in total], "index": index, "kernel_order": kernel_total,
        "scalars": [t.images() for t in h_all]})
    zs = smap.images
    step.check("power products fixed by the scalar subgroup", all(t(z) == z for t in h_all for z in zs))
    step.check("lattice index equals the scalar subgroup order", index == kernel_total)
    step.check("induced action is faithful", cur.is_faithful())
    step.check("induced group order times index equals group order", len(cur) * index == len(g))
    return smap, cur, step


# ---------------------------------------------------------------------------
# integer linear algebra


def integer_kernel(rows, ncols: int) -> list:
    """Saturated integer basis (list of vectors) of {v in Z^ncols : rows v = 0}."""
    if not rows:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    u, d, v = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    return [tuple(v[r][c] for r in range(ncols)) for c in range(rank, ncols)]


def integer_solve(a, b):
    """Some integer x with a x = b, or None when no integer solution exists."""
    m = len(a)
    n = len(a[0]) if m else 0
    u, d, v = smith_normal_form(a)
    ub = [sum(u[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        di = d[i][i] if i < n else 0
        if di == 0:
            if ub[i] != 0:
                return None
            continue
        if ub[i] % di:
            return None
        y[i] = ub[i] // di
    return [sum(v[r][c] * y[c] for c in range(n)) for r in range(n)]
