"""Coefficient normalization by diagonal scalings x_j -> d_j x_j.

Conjugating by D = diag(d) changes the log-coefficients of a generator with
matrix M by -(M^T - I) log d.  Rational parts are handled one prime at a time:
an integral reduction through the Smith form, then (when square roots may be
adjoined) removal of the residue with 2-power roots of that prime.  Parts in
<i> are reduced through the Smith form of the coboundary map: directions it
kills up to torsion are cleared with 2-power roots of unity, and the rest is
brought to a lexicographically least representative inside <i>.  In strict
mode nothing is adjoined and only the reductions available in the field are
used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import intmat
from .certificate import CertificateStep
from .classes import representative
from .coeff_field import FieldElement, TowerField
from .errors import RelationViolated
from .lattice_reduce import smith_normal_form
from .monomial_action import MonomialAutomorphism, MonomialGroup, compose, group_closure, verify_relations
from .ratfunc import RationalFunction, SubstitutionMap

SMALL_PRIMES_UPTO = 1000


@dataclass
class Normalization:
    scaling: tuple  # d_j: the new coordinates are y_j = d_j x_j
    group: MonomialGroup
    step: CertificateStep
    key: tuple | None  # hashable description of the normalized coefficients

    @property
    def substitution(self) -> SubstitutionMap:
        return self.step.substitution


def coboundary_matrix(mats) -> list:
    """Stacked rows of (M^T - I) for every generator matrix M."""
    n = len(mats[0])
    rows = []
    for m in mats:
        for j in range(n):
            rows.append([m[i][j] - (i == j) for i in range(n)])
    return rows


# ---------------------------------------------------------------------------
# splitting coefficients into i-power and rational parts


def _i_bit(field: TowerField):
    k = field._index.get(field.rational(-1).key())
    return None if k is None else 1 << k


def split_coefficient(c: FieldElement):
    """(k, q) with c = i^k q and q a positive rational, or None."""
    bit = _i_bit(c.field)
    keys = set(c.c)
    if keys == {0}:
        k, q = 0, c.c[0]
    elif bit is not None and keys == {bit}:
        k, q = 1, c.c[bit]
    else:
        return None
    if q < 0:
        k, q = k + 2, -q
    return k % 4, q


def _trial_factor(n: int, out: dict, sign: int):
    p = 2
    while p <= SMALL_PRIMES_UPTO and p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + sign
            n //= p
        p += 1 if p == 2 else 2
    return n


def _coprime_base(nums):
    base = []
    for n in nums:
        stack = [n]
        while stack:
            x = stack.pop()
            if x == 1:
                continue
            for idx, b in enumerate(base):
                g = gcd(x, b)
                if g > 1:
                    base.pop(idx)
                    stack.extend([g, b // g, x // g] if g != b else [b, x // b])
                    break
            else:
                base.append(x)
    return sorted(set(b for b in base if b > 1))


def factor_rationals(qs) -> list:
    """Per rational, a dict atom -> exponent over a common multiplicatively independent base."""
    parts, leftovers = [], []
    for q in qs:
        d = {}
        ln = _trial_factor(int(q.numerator), d, 1)
        ld = _trial_factor(int(q.denominator), d, -1)
        parts.append((d, ln, ld))
        leftovers += [x for x in (ln, ld) if x > 1]
    base = _coprime_base(leftovers)
    out = []
    for d, ln, ld in parts:
        d = dict(d)
        for x, sign in ((ln, 1), (ld, -1)):
            for b in base:
                while x % b == 0:
                    d[b] = d.get(b, 0) + sign
                    x //= b
        out.append({p: e for p, e in d.items() if e})
    return out


# ---------------------------------------------------------------------------
# reductions


def _solve_rational(rows, rhs):
    """Some rational x with rows x = rhs, or None."""
    ncols = len(rows[0])
    a = [[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv, r = [], 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
    if any(row[-1] for row in a[r:]):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv):
        x[c] = a[i][-1]
    return x


@lru_cache(maxsize=None)
def _snf(rows: tuple):
    return smith_normal_form([list(r) for r in rows])


def integral_reduction(rows, e):
    """(delta, r) with e = rows delta + r and r a canonical residue of the coset."""
    u, d, v = _snf(tuple(map(tuple, rows)))
    m, n = len(rows), len(rows[0])
    w = [sum(u[i][k] * e[k] for k in range(m)) for i in range(m)]
    eta = [0] * n
    for i in range(min(m, n)):
        if d[i][i]:
            eta[i] = w[i] // d[i][i]
            w[i] -= d[i][i] * eta[i]
    uinv = intmat.inverse_unimodular(u)
    r = [sum(uinv[i][k] * w[k] for k in range(m)) for i in range(m)]
    delta = [sum(v[i][k] * eta[k] for k in range(n)) for i in range(n)]
    return delta, r


@lru_cache(maxsize=None)
def canonical_torsion(rows: tuple, t: tuple, modulus: int, even: bool):
    """Lexicographically least (t - rows delta) mod modulus over delta in (Z/modulus)^n.

    With `even`, only results with every entry even are admitted."""
    n = len(rows[0])
    best = None
    for delta in itertools.product(range(modulus), repeat=n):
        res = tuple((x - sum(a * b for a, b in zip(row, delta))) % modulus for x, row in zip(t, rows))
        if even and any(x % 2 for x in res):
            continue
        if best is None or res < best[0]:
            best = (res, delta)
    return best


# ---------------------------------------------------------------------------


def _root(field: TowerField, atom: int, exp: Fraction) -> FieldElement:
    """atom ** exp for exp with 2-power denominator."""
    den = exp.denominator
    base = field.rational(atom)
    while den > 1:
        if den % 2:
            raise ValueError("only 2-power roots are supported")
        base = field.sqrt(base, allow_grow=True)
        den //= 2
    return base ** exp.numerator


def _scaling_group(gens, d, field):
    n = len(d)
    dmap = MonomialAutomorphism(intmat.identity(n), tuple(d))
    dinv = dmap.inverse()
    return [compose(compose(dinv, g), dmap) for g in gens]


def normalize_coefficients(group: MonomialGroup, label: str, *, strict: bool = False) -> Normalization:
    """Scale the variables so the coefficients of the class generators become canonical.

    The step's substitution lists the new coordinates y_j = d_j x_j as functions of x."""
    rep = representative(label)
    field, n = group.field, group.n
    gens = [group.element_with_matrix(m) for m in rep.generator_matrices]
    if not verify_relations(MonomialGroup(group.elements, gens), rep.relation_words):
        raise RelationViolated(f"coefficients violate the defining relations of {label}")
    rows = coboundary_matrix(rep.generator_matrices)
    coeffs = [c for g in gens for c in g.coeffs]
    split = [split_coefficient(c) for c in coeffs]
    d = [field.one()] * n
    if all(s is not None for s in split):
        d = _scaling(rows, split, field, strict, n)
    new_gens = _scaling_group(gens, d, field)
    new_group = group_closure(new_gens, n, field)
    smap = SubstitutionMap([RationalFunction.monomial(d[j], tuple(int(i == j) for i in range(n)), n, field)
                            for j in range(n)])
    step = CertificateStep("Normalize", smap, 1, payload={
        "label": label, "scaling": list(d), "before": [g.images() for g in gens],
        "after": [g.images() for g in new_gens]})
    step.check("relations hold before scaling", True)
    step.check("relations hold after scaling", verify_relations(MonomialGroup(new_group.elements, new_gens),
                                                                rep.relation_words))
    step.check("scaled group has the same order", len(new_group) == len(group))
    key = None
    nsplit = [split_coefficient(c) for g in new_gens for c in g.coeffs]
    if all(s is not None for s in nsplit):
        key = (label, tuple((k, str(q)) for k, q in nsplit))
    return Normalization(tuple(d), new_group, step, key)


def _scaling(rows, split, field, strict, n):
    d = [field.one()] * n
    ks = [s[0] for s in split]
    qs = [s[1] for s in split]
    for atom, vec in _atom_vectors(qs).items():
        delta, resid = integral_reduction(rows, vec)
        exps = [Fraction(x) for x in delta]
        if not strict and any(resid):
            extra = _solve_rational(rows, resid)
            if extra is not None and all(_two_power(x.denominator) for x in extra):
                exps = [a + b for a, b in zip(exps, extra)]
        for j in range(n):
            if exps[j]:
                d[j] = d[j] * _root(field, atom, exps[j])
    if strict and _i_bit(field) is None:
        # only signs occur; scale by -1 where that helps
        _, delta = canonical_torsion(tuple(map(tuple, rows)), tuple(k // 2 for k in ks), 2, False)
        turns = [Fraction(x, 2) for x in delta]
    elif strict:
        _, delta = canonical_torsion(tuple(map(tuple, rows)), tuple(ks), 4, False)
        turns = [Fraction(x, 4) for x in delta]
    else:
        _, turns = torsion_reduction(rows, ks)
    for j in range(n):
        if turns[j] % 1:
            d[j] = d[j] * _root_of_unity(field, turns[j] % 1)
    return d


def torsion_reduction(rows, ks):
    """Canonical i-exponents of the coefficients and the scaling (in turns) reaching them.

    Rows below the rank of the coboundary map are cleared with roots of unity
    of any 2-power order; the rest is reduced by 8th roots to a lex-least form
    that stays in <i>."""
    u, d, v = _snf(tuple(map(tuple, rows)))
    m, n = len(rows), len(rows[0])
    w = [Fraction(sum(u[i][k] * ks[k] for k in range(m)), 4) for i in range(m)]
    eta = [Fraction(0)] * n
    for i in range(min(m, n)):
        if d[i][i]:
            eta[i] = w[i] / d[i][i]
            w[i] = Fraction(0)
    uinv = intmat.inverse_unimodular(u)
    r = [sum(uinv[i][k] * w[k] for k in range(m)) % 1 for i in range(m)]
    full = [sum(v[i][k] * eta[k] for k in range(n)) for i in range(n)]
    if any(not _two_power(x.denominator) for x in full) or any((x * 4).denominator != 1 for x in r):
        full, r = [Fraction(0)] * n, [Fraction(k, 4) for k in ks]
    res, delta = canonical_torsion(tuple(map(tuple, rows)), tuple(int(x * 8) % 8 for x in r), 8, True)
    turns = [a + Fraction(b, 8) for a, b in zip(full, delta)]
    return tuple(x // 2 for x in res), turns


def _root_of_unity(field, turn: Fraction):
    return field.zeta(turn.denominator) ** turn.numerator


def _two_power(m: int) -> bool:
    return m & (m - 1) == 0


def _atom_vectors(qs) -> dict:
    facs = factor_rationals(qs)
    atoms = sorted({p for f in facs for p in f})
    return {p: [f.get(p, 0) for f in facs] for p in atoms}
