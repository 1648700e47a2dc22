"""Sparse multivariate polynomials and reduced rational functions over a TowerField.

Polynomials are dicts {exponent tuple: FieldElement}.  Rational functions are
kept as coprime (num, den) pairs whose denominator has lex-leading coefficient 1,
so structural equality is field equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from gmpy2 import mpq

from .coeff_field import FieldElement, TowerField
from .errors import DivisionByZero, IndeterminateForm, ParseError, SamplerExhausted
from .grammar import Parser

Poly = dict  # {tuple[int, ...]: FieldElement}

# ---------------------------------------------------------------------------
# raw polynomial kernels on dicts


def p_add(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            s = v + c
            if s.c:
                out[e] = s
            else:
                del out[e]
    return out


def p_neg(a: Poly) -> Poly:
    return {e: -c for e, c in a.items()}


def p_sub(a: Poly, b: Poly) -> Poly:
    return p_add(a, p_neg(b))


def p_scale(a: Poly, c: FieldElement) -> Poly:
    if not c.c:
        return {}
    if c.is_one():
        return a
    return {e: v * c for e, v in a.items()}


def p_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ca * cb
            w = out.get(e)
            out[e] = v if w is None else w + v
    return {e: c for e, c in out.items() if c.c}


def p_mul_mono(a: Poly, exp: tuple, c: FieldElement | None = None) -> Poly:
    if c is None:
        return {tuple(x + y for x, y in zip(e, exp)): v for e, v in a.items()}
    return {tuple(x + y for x, y in zip(e, exp)): v * c for e, v in a.items()}


def p_pow(a: Poly, n: int, one: Poly) -> Poly:
    result = one
    base = a
    while n:
        if n & 1:
            result = p_mul(result, base)
        n >>= 1
        if n:
            base = p_mul(base, base)
    return result


def p_lead(a: Poly):
    e = max(a)
    return e, a[e]


def p_deg(a: Poly, v: int) -> int:
    return max((e[v] for e in a), default=-1)


def p_min_exps(a: Poly, n: int) -> tuple:
    it = iter(a)
    m = list(next(it))
    for e in it:
        for k in range(n):
            if e[k] < m[k]:
                m[k] = e[k]
    return tuple(m)


def p_shift_down(a: Poly, m: tuple) -> Poly:
    if not any(m):
        return a
    return {tuple(x - y for x, y in zip(e, m)): c for e, c in a.items()}


def p_coeffs_in(a: Poly, v: int) -> dict:
    """View a as a polynomial in x_v: {degree: coefficient poly with x_v removed}."""
    out: dict = {}
    for e, c in a.items():
        d = e[v]
        e2 = e[:v] + (0,) + e[v + 1:]
        out.setdefault(d, {})[e2] = c
    return out


def p_vars(a: Poly) -> set:
    s = set()
    for e in a:
        for k, x in enumerate(e):
            if x:
                s.add(k)
    return s


def p_is_const(a: Poly) -> bool:
    return len(a) <= 1 and all(not any(e) for e in a)


def p_divexact(a: Poly, b: Poly) -> Poly:
    """Exact quotient a/b; raises ArithmeticError when b does not divide a."""
    if not b:
        raise DivisionByZero("polynomial division by zero")
    if len(b) == 1:
        (eb, cb), = b.items()
        inv = cb.inv()
        out = {}
        for e, c in a.items():
            q = tuple(x - y for x, y in zip(e, eb))
            if min(q, default=0) < 0:
                raise ArithmeticError("inexact division")
            out[q] = c * inv
        return out
    eb, cb = p_lead(b)
    inv = cb.inv()
    rem = dict(a)
    quo: dict = {}
    while rem:
        er, cr = p_lead(rem)
        q = tuple(x - y for x, y in zip(er, eb))
        if min(q) < 0:
            raise ArithmeticError("inexact division")
        cq = cr * inv
        quo[q] = cq
        rem = p_sub(rem, p_mul_mono(b, q, cq))
    return quo


def p_divides(b: Poly, a: Poly):
    try:
        return p_divexact(a, b)
    except ArithmeticError:
        return None


def p_derivative(a: Poly, v: int) -> Poly:
    out = {}
    for e, c in a.items():
        if e[v]:
            e2 = e[:v] + (e[v] - 1,) + e[v + 1:]
            out[e2] = c * e[v]
    return out


def p_eval(a: Poly, point: Sequence[FieldElement], zero: FieldElement) -> FieldElement:
    n = len(point)
    powers = [dict() for _ in range(n)]
    total = zero
    for e, c in a.items():
        term = c
        for k in range(n):
            d = e[k]
            if d:
                pk = powers[k]
                if d not in pk:
                    pk[d] = point[k] ** d
                term = term * pk[d]
        total = total + term
    return total


# ---------------------------------------------------------------------------
# gcd

_GCD_RNG = random.Random(0x5EED)


def _uni_gcd_degree(a: list, b: list, zero) -> int:
    """Degree of the gcd of two dense univariate coefficient lists (low to high)."""
    a = _strip(a)
    b = _strip(b)
    while b:
        a = _uni_rem(a, b)
        a, b = b, a
    return len(a) - 1


def _strip(a):
    while a and not a[-1].c:
        a = a[:-1]
    return a


def _uni_rem(a, b):
    a = list(a)
    inv = b[-1].inv()
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        q = a[-1] * inv
        shift = len(a) - 1 - db
        for k in range(db + 1):
            a[shift + k] = a[shift + k] - q * b[k]
        a = _strip(a)
    return a


def _specialize(a: Poly, v: int, point: list, zero) -> list:
    """Dense univariate coefficients in x_v after substituting the other variables."""
    coeffs = p_coeffs_in(a, v)
    d = max(coeffs)
    out = [zero] * (d + 1)
    for k, c in coeffs.items():
        out[k] = p_eval(c, point, zero)
    return out


def _gcd_degree_bound(a: Poly, b: Poly, v: int, n: int, field: TowerField):
    """Upper bound on deg_v gcd(a, b) from a random specialization (None if unlucky)."""
    zero = field.zero()
    for _ in range(4):
        point = [field.rational(_GCD_RNG.randint(-97, 97)) for _ in range(n)]
        ua = _specialize(a, v, point, zero)
        ub = _specialize(b, v, point, zero)
        if not ua[-1].c or not ub[-1].c:
            continue
        return _uni_gcd_degree(ua, ub, zero)
    return None


def p_content(a: Poly, v: int, n: int, field: TowerField) -> Poly:
    """gcd of the coefficients of a viewed as a polynomial in x_v."""
    coeffs = sorted(p_coeffs_in(a, v).values(), key=len)
    g = coeffs[0]
    for c in coeffs[1:]:
        if p_is_const(g):
            break
        g = p_gcd(g, c, n, field)
    return p_monic(g) if g else g


def p_monic(a: Poly) -> Poly:
    if not a:
        return a
    _, c = p_lead(a)
    return p_scale(a, c.inv()) if not c.is_one() else a


def _prem(a: Poly, b: Poly, v: int) -> Poly:
    db = p_deg(b, v)
    cb = p_coeffs_in(b, v)
    lcb = cb[db]
    r = a
    while r and p_deg(r, v) >= db:
        dr = p_deg(r, v)
        lcr = p_coeffs_in(r, v)[dr]
        shift = tuple(dr - db if k == v else 0 for k in range(len(next(iter(a)))))
        r = p_sub(p_mul(r, lcb), p_mul_mono(p_mul(b, lcr), shift))
    return r


def _prs_gcd(a: Poly, b: Poly, v: int, n: int, field: TowerField) -> Poly:
    """gcd of two polynomials primitive in x_v, by the primitive remainder sequence."""
    if p_deg(a, v) < p_deg(b, v):
        a, b = b, a
    while True:
        r = _prem(a, b, v)
        if not r:
            return b
        if p_deg(r, v) == 0:
            return {(0,) * n: field.one()}
        a, b = b, p_divexact(r, p_content(r, v, n, field))


def p_gcd(a: Poly, b: Poly, n: int, field: TowerField) -> Poly:
    """Monic (lex-leading coefficient 1) gcd of two polynomials."""
    if not a:
        return p_monic(b)
    if not b:
        return p_monic(a)
    one = {(0,) * n: field.one()}
    ma, mb = p_min_exps(a, n), p_min_exps(b, n)
    mono = tuple(min(x, y) for x, y in zip(ma, mb))
    a, b = p_shift_down(a, ma), p_shift_down(b, mb)
    g = _gcd_no_mono(a, b, n, field, one)
    return p_mul_mono(g, mono) if any(mono) else g


def _gcd_no_mono(a: Poly, b: Poly, n: int, field: TowerField, one: Poly) -> Poly:
    if p_is_const(a) or p_is_const(b):
        return one
    if len(a) == 1 or len(b) == 1:
        return one  # after stripping monomial content
    if a == b:
        return p_monic(a)
    va, vb = p_vars(a), p_vars(b)
    for v in sorted(va - vb):
        return p_gcd(p_content(a, v, n, field), b, n, field)
    for v in sorted(vb - va):
        return p_gcd(a, p_content(b, v, n, field), n, field)
    # quick exact-division test
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    if p_divides(small, big) is not None:
        return p_monic(small)
    bounds = {}
    for v in sorted(va):
        d = _gcd_degree_bound(a, b, v, n, field)
        bounds[v] = d
        if d == 0:
            return p_gcd(p_content(a, v, n, field), p_content(b, v, n, field), n, field)
    v = min(sorted(va), key=lambda k: (bounds[k] is None, p_deg(a, k) + p_deg(b, k)))
    ca, cb = p_content(a, v, n, field), p_content(b, v, n, field)
    pa, pb = p_divexact(a, ca), p_divexact(b, cb)
    gc = p_gcd(ca, cb, n, field)
    gp = _primitive_gcd(pa, pb, v, n, field)
    return p_monic(p_mul(gc, gp))


def _primitive_gcd(a: Poly, b: Poly, v: int, n: int, field: TowerField) -> Poly:
    """gcd of two polynomials primitive in x_v: dense evaluation/interpolation in the
    other variables (Brown's scheme over Q), checked by exact division; the
    primitive remainder sequence is the fallback."""
    others = sorted((p_vars(a) | p_vars(b)) - {v})
    if not others:
        g = _uni_gcd_monic(_dense(a, v, field), _dense(b, v, field))
        return {tuple(k if j == v else 0 for j in range(n)): c for k, c in enumerate(g) if c.c}
    gam = p_gcd(_lead_in(a, v), _lead_in(b, v), n, field)
    for attempt in range(3):
        g = _interp_gcd(a, b, v, others, gam, n, field, 3 + 41 * attempt)
        if g is None:
            continue
        g = p_divexact(g, p_content(g, v, n, field))
        if p_divides(g, a) is not None and p_divides(g, b) is not None:
            return g
    g = _prs_gcd(a, b, v, n, field)
    return p_divexact(g, p_content(g, v, n, field))


def _lead_in(a: Poly, v: int) -> Poly:
    cs = p_coeffs_in(a, v)
    return cs[max(cs)]


def _dense(a: Poly, v: int, field: TowerField) -> list:
    d = p_deg(a, v)
    out = [field.zero()] * (d + 1)
    for e, c in a.items():
        out[e[v]] = c
    return out


def _uni_gcd_monic(a: list, b: list) -> list:
    a, b = _strip(a), _strip(b)
    while b:
        a, b = b, _uni_rem(a, b)
    inv = a[-1].inv()
    return [c * inv for c in a]


def _eval_var(a: Poly, w: int, c) -> Poly:
    """a with x_w set to the field element c."""
    out: dict = {}
    pw: dict = {}
    for e, coeff in a.items():
        d = e[w]
        if d:
            if d not in pw:
                pw[d] = c ** d
            coeff = coeff * pw[d]
            e = e[:w] + (0,) + e[w + 1:]
        prev = out.get(e)
        out[e] = coeff if prev is None else prev + coeff
    return {e: x for e, x in out.items() if x.c}


def _interp_gcd(a, b, v, ws, gam, n, field, start):
    """gcd of a and b scaled to have leading coefficient gam in x_v, or None."""
    if not ws:
        g = _uni_gcd_monic(_dense(a, v, field), _dense(b, v, field))
        (_, gc), = gam.items()
        return {tuple(k if j == v else 0 for j in range(n)): gc * c for k, c in enumerate(g) if c.c}
    w, rest = ws[-1], ws[:-1]
    bound = min(p_deg(a, w), p_deg(b, w)) + p_deg(gam, w)
    dva, dvb = p_deg(a, v), p_deg(b, v)
    pts, vals, dv = [], [], None
    c = start
    while len(pts) <= bound:
        c += 1
        if c > start + 4 * bound + 40:
            return None
        x = field.rational(c)
        ac, bc, gc = _eval_var(a, w, x), _eval_var(b, w, x), _eval_var(gam, w, x)
        if not gc or p_deg(ac, v) != dva or p_deg(bc, v) != dvb:
            continue
        g = _interp_gcd(ac, bc, v, rest, gc, n, field, start)
        if g is None:
            return None
        d = p_deg(g, v)
        if dv is None or d < dv:
            dv, pts, vals = d, [x], [g]
        elif d == dv:
            pts.append(x)
            vals.append(g)
    return _newton(pts, vals, w, field)


def _newton(pts, vals, w, field) -> Poly:
    """Polynomial in x_w (coefficients polys) taking value vals[i] at x_w = pts[i]."""
    keys = set()
    for g in vals:
        keys.update(g)
    zero = field.zero()
    out: dict = {}
    m = len(pts)
    for key in keys:
        ys = [g.get(key, zero) for g in vals]
        # divided differences
        coef = list(ys)
        for j in range(1, m):
            for i in range(m - 1, j - 1, -1):
                coef[i] = (coef[i] - coef[i - 1]) / (pts[i] - pts[i - j])
        # expand Newton form to monomial basis
        poly = [zero] * m
        poly[0] = coef[m - 1]
        deg = 0
        for i in range(m - 2, -1, -1):
            # poly = poly * (t - pts[i]) + coef[i]
            new = [zero] * m
            for k in range(deg + 1):
                new[k + 1] = new[k + 1] + poly[k]
                new[k] = new[k] - poly[k] * pts[i]
            new[0] = new[0] + coef[i]
            poly = new
            deg += 1
        for k, x in enumerate(poly):
            if x.c:
                e = key[:w] + (k,) + key[w + 1:]
                out[e] = x
    return out


# ---------------------------------------------------------------------------
# public types


class Polynomial:
    """Immutable sparse polynomial; thin wrapper over the dict kernels."""

    __slots__ = ("terms", "nvars", "field")

    def __init__(self, terms: Poly, nvars: int, field: TowerField):
        self.terms = {e: c for e, c in terms.items() if c.c}
        self.nvars = nvars
        self.field = field

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, o):
        return Polynomial(p_add(self.terms, o.terms), self.nvars, self.field)

    def __sub__(self, o):
        return Polynomial(p_sub(self.terms, o.terms), self.nvars, self.field)

    def __mul__(self, o):
        return Polynomial(p_mul(self.terms, o.terms), self.nvars, self.field)

    def __neg__(self):
        return Polynomial(p_neg(self.terms), self.nvars, self.field)

    def degree(self, v: int | None = None) -> int:
        if v is None:
            return max((sum(e) for e in self.terms), default=-1)
        return p_deg(self.terms, v)

    def gcd(self, o: "Polynomial") -> "Polynomial":
        return Polynomial(p_gcd(self.terms, o.terms, self.nvars, self.field), self.nvars, self.field)

    def __str__(self):
        return format_poly(self.terms, self.nvars, self.field)

    __repr__ = __str__


def _normalize(num: Poly, den: Poly, n: int, field: TowerField, coprime: bool = False):
    if not den:
        raise DivisionByZero("rational function with zero denominator")
    if not num:
        return {}, {(0,) * n: field.one()}
    if not coprime:
        g = p_gcd(num, den, n, field)
        if not p_is_const(g):
            num = p_divexact(num, g)
            den = p_divexact(den, g)
    else:
        mn, md = p_min_exps(num, n), p_min_exps(den, n)
        mono = tuple(min(x, y) for x, y in zip(mn, md))
        if any(mono):
            num, den = p_shift_down(num, mono), p_shift_down(den, mono)
    _, lc = p_lead(den)
    if not lc.is_one():
        inv = lc.inv()
        num = p_scale(num, inv)
        den = p_scale(den, inv)
    return num, den


class RationalFunction:
    """Reduced quotient num/den in K(x1..xn).  Immutable."""

    __slots__ = ("num", "den", "nvars", "field", "_hash")

    def __init__(self, num: Poly, den: Poly | None, nvars: int, field: TowerField, *, reduced: bool = False, coprime: bool = False):
        if den is None:
            den = {(0,) * nvars: field.one()}
        if not reduced:
            num, den = _normalize(num, den, nvars, field, coprime)
        self.num = num
        self.den = den
        self.nvars = nvars
        self.field = field
        self._hash = None

    # constructors --------------------------------------------------------------
    @classmethod
    def const(cls, c, nvars: int, field: TowerField) -> "RationalFunction":
        c = field(c)
        return cls({(0,) * nvars: c} if c.c else {}, None, nvars, field, reduced=True)

    @classmethod
    def var(cls, k: int, nvars: int, field: TowerField) -> "RationalFunction":
        e = tuple(1 if j == k else 0 for j in range(nvars))
        return cls({e: field.one()}, None, nvars, field, reduced=True)

    @classmethod
    def monomial(cls, coeff, exps: Sequence[int], nvars: int, field: TowerField) -> "RationalFunction":
        """coeff * prod x_k^exps[k], negative exponents allowed."""
        c = field(coeff)
        if c.is_zero():
            return cls.const(c, nvars, field)
        pos = tuple(max(x, 0) for x in exps)
        neg = tuple(max(-x, 0) for x in exps)
        return cls({pos: c}, {neg: field.one()}, nvars, field, reduced=True)

    def _lift(self, o):
        if isinstance(o, RationalFunction):
            if o.nvars != self.nvars:
                raise ValueError("mixing rational functions in different numbers of variables")
            return o
        return RationalFunction.const(o, self.nvars, self.field)

    # predicates ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return p_is_const(self.num) and p_is_const(self.den)

    def const_value(self) -> FieldElement:
        if not self.is_const():
            raise ValueError("not a constant")
        if not self.num:
            return self.field.zero()
        return next(iter(self.num.values())) / next(iter(self.den.values()))

    def is_poly(self) -> bool:
        return p_is_const(self.den)

    def numerator(self) -> Polynomial:
        return Polynomial(self.num, self.nvars, self.field)

    def denominator(self) -> Polynomial:
        return Polynomial(self.den, self.nvars, self.field)

    def size(self) -> int:
        return len(self.num) + len(self.den)

    def variables(self) -> set:
        return p_vars(self.num) | p_vars(self.den)

    # arithmetic ------------------------------------------------------------------
    def __add__(self, o):
        o = self._lift(o)
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return RationalFunction(p_add(self.num, o.num), self.den, self.nvars, self.field)
        if p_is_const(o.den):
            num = p_add(self.num, p_mul(o.num, self.den))
            return RationalFunction(num, self.den, self.nvars, self.field, coprime=True)
        if p_is_const(self.den):
            return o + self
        n = self.nvars
        g = p_gcd(self.den, o.den, n, self.field)
        if p_is_const(g):
            num = p_add(p_mul(self.num, o.den), p_mul(o.num, self.den))
            return RationalFunction(num, p_mul(self.den, o.den), n, self.field, coprime=True)
        d1 = p_divexact(self.den, g)
        d2 = p_divexact(o.den, g)
        num = p_add(p_mul(self.num, d2), p_mul(o.num, d1))
        return RationalFunction(num, p_mul(p_mul(d1, d2), g), n, self.field)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(p_neg(self.num), self.den, self.nvars, self.field, reduced=True)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if not self.num or not o.num:
            return RationalFunction({}, None, self.nvars, self.field, reduced=True)
        n = self.nvars
        if p_is_const(o.num) and p_is_const(o.den):
            c = o.const_value()
            return RationalFunction(p_scale(self.num, c), self.den, n, self.field, reduced=True)
        if p_is_const(self.num) and p_is_const(self.den):
            return o * self
        g1 = p_gcd(self.num, o.den, n, self.field)
        g2 = p_gcd(o.num, self.den, n, self.field)
        a, d = self.num, o.den
        if not p_is_const(g1):
            a, d = p_divexact(a, g1), p_divexact(d, g1)
        b, c = o.num, self.den
        if not p_is_const(g2):
            b, c = p_divexact(b, g2), p_divexact(c, g2)
        return RationalFunction(p_mul(a, b), p_mul(c, d), n, self.field, coprime=True)

    __rmul__ = __mul__

    def inv(self) -> "RationalFunction":
        if not self.num:
            raise DivisionByZero("inverse of the zero rational function")
        return RationalFunction(self.den, self.num, self.nvars, self.field, coprime=True)

    def __truediv__(self, o):
        return self * self._lift(o).inv()

    def __rtruediv__(self, o):
        return self.inv() * o

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        one = {(0,) * self.nvars: self.field.one()}
        return RationalFunction(p_pow(self.num, k, one), p_pow(self.den, k, one), self.nvars, self.field, coprime=True)

    def scale(self, c) -> "RationalFunction":
        c = self.field(c)
        if not c.c:
            return RationalFunction({}, None, self.nvars, self.field, reduced=True)
        return RationalFunction(p_scale(self.num, c), self.den, self.nvars, self.field, reduced=True)

    # calculus / evaluation ----------------------------------------------------------
    def derivative(self, v: int) -> "RationalFunction":
        dn = p_derivative(self.num, v)
        dd = p_derivative(self.den, v)
        num = p_sub(p_mul(dn, self.den), p_mul(self.num, dd))
        return RationalFunction(num, p_mul(self.den, self.den), self.nvars, self.field)

    def evaluate(self, point: Sequence[FieldElement]) -> FieldElement:
        zero = self.field.zero()
        d = p_eval(self.den, point, zero)
        if not d.c:
            raise DivisionByZero("denominator vanishes at the point")
        return p_eval(self.num, point, zero) / d

    # comparison ----------------------------------------------------------------------
    def __eq__(self, o):
        if not isinstance(o, RationalFunction):
            try:
                o = self._lift(o)
            except Exception:
                return NotImplemented
        return self.nvars == o.nvars and self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def __str__(self):
        return format_rf(self)

    def __repr__(self):
        return f"RationalFunction({format_rf(self)})"


# ---------------------------------------------------------------------------
# substitution


@dataclass
class SubstitutionMap:
    """Images of x1..xn (rational functions in `images[0].nvars` variables).

    `coeff_auto` names a level k whose square root is negated on coefficients.
    `inverse`, when present, is a map certified to undo this one.
    """

    images: list
    coeff_auto: int | None = None
    inverse: "SubstitutionMap | None" = None
    birational: bool = False
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def nvars_in(self) -> int:
        return len(self.images)

    @property
    def nvars_out(self) -> int:
        return self.images[0].nvars

    def __post_init__(self):
        for img in self.images:
            if not img.den:
                raise IndeterminateForm("substitution image with zero denominator")
        if self.coeff_auto is not None:
            field = self.images[0].field
            bit = 1 << self.coeff_auto
            for r in field.radicands[self.coeff_auto + 1:]:
                if any(s & bit for s in r.c):
                    raise ValueError("coefficient automorphism does not extend to the tower")

    def attach_inverse(self, inv: "SubstitutionMap") -> "SubstitutionMap":
        """Attach `inv` after checking both round trips on every variable."""
        n_in, n_out = self.nvars_in, self.nvars_out
        field = self.images[0].field
        for k in range(n_out):
            x = RationalFunction.var(k, n_out, field)
            if rf_substitute(rf_substitute(x, inv), self) != x:
                raise ValueError("attached inverse does not round-trip")
        for k in range(n_in):
            x = RationalFunction.var(k, n_in, field)
            if rf_substitute(rf_substitute(x, self), inv) != x:
                raise ValueError("attached inverse does not round-trip")
        self.inverse = inv
        self.birational = True
        return self


def _map_coeff(c: FieldElement, auto):
    return c if auto is None else c.flip(auto)


def _monomial_image(img: RationalFunction):
    """(coeff, exponent vector) if img is a Laurent monomial, else None."""
    if len(img.num) == 1 and len(img.den) == 1:
        (en, cn), = img.num.items()
        (ed, cd), = img.den.items()
        return cn / cd, tuple(a - b for a, b in zip(en, ed))
    return None


def rf_substitute(f: RationalFunction, m: SubstitutionMap) -> RationalFunction:
    """f(images), with coefficients passed through m.coeff_auto; normalized."""
    if f.nvars != m.nvars_in:
        raise ValueError("substitution arity mismatch")
    nout = m.nvars_out
    field = f.field
    auto = m.coeff_auto
    monos = [_monomial_image(img) for img in m.images]
    if all(x is not None for x in monos):
        return _substitute_monomial(f, monos, nout, field, auto)
    one = {(0,) * nout: field.one()}
    maxdeg = [max(p_deg(f.num, k), p_deg(f.den, k), 0) for k in range(f.nvars)]
    cache: dict = {}

    def power(k, d, which):
        key = (k, d, which)
        if key not in cache:
            base = m.images[k].num if which == 0 else m.images[k].den
            cache[key] = one if d == 0 else p_mul(power(k, d - 1, which), base)
        return cache[key]

    def image(poly):
        out: dict = {}
        for e, c in poly.items():
            term = {(0,) * nout: _map_coeff(c, auto)}
            for k, d in enumerate(e):
                if d:
                    term = p_mul(term, power(k, d, 0))
                if maxdeg[k] - d:
                    term = p_mul(term, power(k, maxdeg[k] - d, 1))
            out = p_add(out, term)
        return out

    num, den = image(f.num), image(f.den)
    if not den:
        raise IndeterminateForm("substituted denominator vanishes identically")
    return RationalFunction(num, den, nout, field)


def _substitute_monomial(f, monos, nout, field, auto):
    def image(poly):
        out = {}
        for e, c in poly.items():
            coeff = _map_coeff(c, auto)
            exp = [0] * nout
            for k, d in enumerate(e):
                if d:
                    ck, ek = monos[k]
                    coeff = coeff * (ck ** d)
                    for j in range(nout):
                        exp[j] += ek[j] * d
            t = tuple(exp)
            w = out.get(t)
            out[t] = coeff if w is None else w + coeff
        return {e: c for e, c in out.items() if c.c}

    num, den = image(f.num), image(f.den)
    if not den:
        raise IndeterminateForm("substituted denominator vanishes identically")
    allexp = list(num) + list(den)
    low = tuple(min(e[j] for e in allexp) for j in range(nout))
    num = p_shift_down(num, low)
    den = p_shift_down(den, low)
    square = len(monos) == nout and _unimodular([mono[1] for mono in monos])
    return RationalFunction(num, den, nout, field, coprime=square)


def _unimodular(cols) -> bool:
    n = len(cols)
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    return abs(_int_det(mat)) == 1


def _int_det(mat) -> int:
    n = len(mat)
    if n == 0:
        return 1
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    total = 0
    for j in range(n):
        if mat[0][j]:
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            total += (-1) ** j * mat[0][j] * _int_det(minor)
    return total


# ---------------------------------------------------------------------------
# public operations


def rf_transfer(f: RationalFunction, phi, field: TowerField) -> RationalFunction:
    """Image of f under a coefficient field map phi into `field`."""
    num = {e: phi(c) for e, c in f.num.items()}
    den = {e: phi(c) for e, c in f.den.items()}
    # an injective field map keeps num, den coprime and the denominator normalized
    return RationalFunction(num, den, f.nvars, field, reduced=True)


def rf_arith(op: str, f: RationalFunction, g: RationalFunction | None = None) -> RationalFunction:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "inv":
        return f.inv()
    if op == "neg":
        return -f
    raise ValueError(f"unknown operation {op!r}")


def rf_equal(f: RationalFunction, g: RationalFunction) -> bool:
    """Exact equality by cross-multiplication (does not trust normal forms)."""
    if f.nvars != g.nvars:
        raise ValueError("different numbers of variables")
    return not p_sub(p_mul(f.num, g.den), p_mul(g.num, f.den))


@dataclass
class PointSampler:
    """Seeded source of rational points with bounded numerators and denominators."""

    seed: int = 0
    bound: int = 10_000
    retries: int = 20

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def draw(self, n: int, field: TowerField) -> list:
        return [field.rational(mpq(self.rng.randint(-self.bound, self.bound), self.rng.randint(1, self.bound))) for _ in range(n)]


def _rank(rows: list) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col].c), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inv()
        for r in range(len(rows)):
            if r != rank and rows[r][col].c:
                f = rows[r][col] * inv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def jacobian_rank(fs: Sequence[RationalFunction], sampler: PointSampler | None = None) -> int:
    """Max observed rank of the exact Jacobian of fs over up to `sampler.retries` points."""
    if not fs:
        raise ValueError("empty family")
    sampler = sampler or PointSampler()
    n = fs[0].nvars
    field = fs[0].field
    zero = field.zero()
    parts = []
    for f in fs:
        parts.append((f.num, f.den, [p_derivative(f.num, v) for v in range(n)], [p_derivative(f.den, v) for v in range(n)]))
    full = min(len(fs), n)
    best = None
    for _ in range(sampler.retries):
        pt = sampler.draw(n, field)
        rows = []
        ok = True
        for num, den, dn, dd in parts:
            q = p_eval(den, pt, zero)
            if not q.c:
                ok = False
                break
            p = p_eval(num, pt, zero)
            q2 = q * q
            rows.append([(p_eval(dn[v], pt, zero) * q - p * p_eval(dd[v], pt, zero)) / q2 for v in range(n)])
        if not ok:
            continue
        r = _rank(rows)
        best = r if best is None else max(best, r)
        if best == full:
            return best
    if best is None:
        raise SamplerExhausted(f"no point avoiding all denominators in {sampler.retries} draws")
    return best


# ---------------------------------------------------------------------------
# text


def _fmt_coeff(c: FieldElement) -> str:
    s = str(c)
    if len(c.c) > 1:
        return f"({s})"
    return s


def format_poly(a: Poly, n: int, field: TowerField, names: Sequence[str] | None = None) -> str:
    if not a:
        return "0"
    names = names or [f"x{k + 1}" for k in range(n)]
    parts = []
    for e in sorted(a, reverse=True):
        c = a[e]
        mono = "*".join(names[k] + (f"^{d}" if d > 1 else "") for k, d in enumerate(e) if d)
        if not mono:
            parts.append(_fmt_coeff(c))
        elif c.is_one():
            parts.append(mono)
        elif (-c).is_one():
            parts.append("-" + mono)
        else:
            parts.append(_fmt_coeff(c) + "*" + mono)
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def format_rf(f: RationalFunction, names: Sequence[str] | None = None) -> str:
    num = format_poly(f.num, f.nvars, f.field, names)
    if p_is_const(f.den) and next(iter(f.den.values())).is_one():
        return num
    return f"({num})/({format_poly(f.den, f.nvars, f.field, names)})"


class _RFContext:
    def __init__(self, nvars, field, names):
        self.nvars = nvars
        self.field = field
        self.names = {nm: k for k, nm in enumerate(names)}

    def number(self, n):
        return RationalFunction.const(n, self.nvars, self.field)

    def name(self, s):
        if s in self.names:
            return RationalFunction.var(self.names[s], self.nvars, self.field)
        if s in ("i", "I"):
            return RationalFunction.const(self.field.i, self.nvars, self.field)
        raise KeyError(s)

    def sqrt(self, v):
        if not v.is_const():
            raise ParseError("sqrt of a non-constant expression")
        c = v.const_value()
        if c.is_zero():
            return v
        root = self.field.sqrt(c)
        if root is None:
            root = self.field.adjoin_sqrt(c)
        return RationalFunction.const(root, self.nvars, self.field)


def parse_rf(text: str, nvars: int, field: TowerField, names: Sequence[str] | None = None) -> RationalFunction:
    names = list(names or [f"x{k + 1}" for k in range(nvars)])
    return Parser(text, _RFContext(nvars, field, names)).parse()


class Ring:
    """Convenience factory bound to (field, nvars)."""

    def __init__(self, field: TowerField, nvars: int, names: Sequence[str] | None = None):
        self.field = field
        self.nvars = nvars
        self.names = list(names) if names else [f"x{k + 1}" for k in range(nvars)]

    def var(self, k: int) -> RationalFunction:
        return RationalFunction.var(k, self.nvars, self.field)

    def gens(self) -> list:
        return [self.var(k) for k in range(self.nvars)]

    def const(self, c) -> RationalFunction:
        return RationalFunction.const(c, self.nvars, self.field)

    def monomial(self, coeff, exps) -> RationalFunction:
        return RationalFunction.monomial(coeff, exps, self.nvars, self.field)

    def parse(self, text: str) -> RationalFunction:
        return parse_rf(text, self.nvars, self.field, self.names)

    def format(self, f: RationalFunction) -> str:
        return format_rf(f, self.names)

    def subs(self, images: Sequence[RationalFunction]) -> SubstitutionMap:
        return SubstitutionMap(list(images))
