"""Exact arithmetic in a growable tower of quadratic extensions of Q.

A tower with k adjunctions has basis {e_S : S subset of {0..k-1}}, encoded as
bitmasks, with e_S the product of the square roots s_j (j in S).  An element
is a sparse dict {bitmask: mpq}; zero is the empty dict.  Every stored radicand
is checked to be a non-square at the level where it is adjoined, so the basis
is linearly independent and the dict form is canonical.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import gmpy2
from gmpy2 import mpq, mpz

from .errors import DivisionByZero, ParseError, StrictFieldError, ZeroRadicand
from .grammar import Parser

_ONE = mpq(1)


def _to_mpq(x):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _squarefree_split(n: int, bound: int = 10_000):
    """n > 0 -> (m, f) with n = m^2 * f; f is squarefree up to trial division."""
    m, f = 1, 1
    p = 2
    while p * p <= n and p <= bound:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            m *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    if n > 1:
        if gmpy2.is_square(n):
            m *= int(gmpy2.isqrt(n))
        else:
            f *= n
    return m, f


class TowerField:
    """Iterated quadratic extension of Q, grown on demand by `adjoin_sqrt`.

    `adjoin_i` pre-adjoins sqrt(-1).  A `frozen` tower never grows: asking for a
    square root it lacks raises StrictFieldError.
    """

    def __init__(self, adjoin_i: bool = True, frozen: bool = False):
        self.radicands: list[FieldElement] = []
        self._index: dict[tuple, int] = {}
        self._bprod: dict[tuple[int, int], dict[int, mpq]] = {}
        self._zeta: dict[int, FieldElement] = {}
        self.frozen = False
        if adjoin_i:
            self._append(self.rational(-1))
        self.frozen = frozen

    # construction helpers -------------------------------------------------
    @property
    def degree(self) -> int:
        return 1 << len(self.radicands)

    def zero(self) -> FieldElement:
        return FieldElement(self, {})

    def one(self) -> FieldElement:
        return FieldElement(self, {0: _ONE})

    def rational(self, q) -> FieldElement:
        q = _to_mpq(q)
        return FieldElement(self, {0: q} if q else {})

    def __call__(self, x) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValueError("element belongs to another tower")
            return x
        if isinstance(x, str):
            return self.parse(x)
        return self.rational(x)

    def gen(self, k: int) -> FieldElement:
        """The square root adjoined at level k."""
        return FieldElement(self, {1 << k: _ONE})

    @property
    def i(self) -> FieldElement:
        return self.sqrt(self.rational(-1), allow_grow=True)

    # basis multiplication ---------------------------------------------------
    def _basis_product(self, s: int, t: int) -> dict[int, mpq]:
        if not s & t:
            return {s | t: _ONE}
        key = (s, t) if s < t else (t, s)
        hit = self._bprod.get(key)
        if hit is not None:
            return hit
        k = (s & t).bit_length() - 1
        bit = 1 << k
        res = self._mul_dicts(self._basis_product(s ^ bit, t ^ bit), self.radicands[k].c)
        self._bprod[key] = res
        return res

    def _mul_dicts(self, a: dict, b: dict) -> dict:
        out: dict[int, mpq] = {}
        for s, p in a.items():
            for t, q in b.items():
                pq = p * q
                if not s & t:
                    u = s | t
                    out[u] = out.get(u, 0) + pq
                else:
                    for u, w in self._basis_product(s, t).items():
                        out[u] = out.get(u, 0) + pq * w
        return {k: v for k, v in out.items() if v}

    # square roots -------------------------------------------------------------
    def _sqrt_in(self, x: dict, level: int):
        """A square root of x inside the first `level` adjunctions, or None."""
        if not x:
            return {}
        if level == 0:
            q = x.get(0, 0)
            if q < 0:
                return None
            n, d = q.numerator, q.denominator
            if gmpy2.is_square(n) and gmpy2.is_square(d):
                return {0: mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))}
            return None
        bit = 1 << (level - 1)
        a = {s: q for s, q in x.items() if not s & bit}
        b = {s ^ bit: q for s, q in x.items() if s & bit}
        r = self.radicands[level - 1].c
        if not b:
            root = self._sqrt_in(a, level - 1)
            if root is not None:
                return root
            root = self._sqrt_in(self._mul_dicts(a, _inv_dict(self, r)), level - 1)
            if root is not None:
                return {s | bit: q for s, q in root.items()}
            return None
        norm = _sub_dicts(self._mul_dicts(a, a), self._mul_dicts(self._mul_dicts(b, b), r))
        n = self._sqrt_in(norm, level - 1)
        if n is None:
            return None
        for sign in (1, -1):
            half = {s: q / 2 for s, q in _add_dicts(a, {s: sign * q for s, q in n.items()}).items()}
            c = self._sqrt_in(half, level - 1)
            if c:
                d = self._mul_dicts(b, _inv_dict(self, {s: 2 * q for s, q in c.items()}))
                return _add_dicts(c, {s | bit: q for s, q in d.items()})
        return None

    def sqrt(self, v: FieldElement, allow_grow: bool = False):
        """Square root of v in the current tower (None if absent), optionally adjoining it."""
        v = self(v)
        k = self._index.get(v.key())
        if k is not None:
            return self.gen(k)
        root = self._sqrt_in(v.c, len(self.radicands))
        if root is not None:
            return FieldElement(self, root)
        return self.adjoin_sqrt(v) if allow_grow else None

    def is_square(self, v) -> bool:
        return self.sqrt(v) is not None

    def adjoin_sqrt(self, radicand) -> FieldElement:
        """Return s with s*s == radicand, adjoining a new level only when needed."""
        v = self(radicand)
        if v.is_zero():
            raise ZeroRadicand("cannot adjoin the square root of 0")
        root = self.sqrt(v)
        if root is not None:
            return root
        if v.is_rational():
            q = v.c[0]
            n = abs(q.numerator) * q.denominator
            m, f = _squarefree_split(int(n))
            scale = self.rational(mpq(m, q.denominator))
            base = self.sqrt(self.rational(f))
            if base is None:
                base = self._append(self.rational(f))
            if q < 0:
                base = base * self.i
            return scale * base
        # strip the rational square content of the coefficients
        nums = [int(q.numerator) for q in v.c.values()]
        dens = [int(q.denominator) for q in v.c.values()]
        g = 0
        for x in nums:
            g = gcd(g, x)
        lcm = 1
        for d in dens:
            lcm = lcm * d // gcd(lcm, d)
        m, _ = _squarefree_split(g)
        scale = mpq(m, lcm)
        reduced = v * self.rational(1 / (scale * scale))
        return self._append(reduced) * self.rational(scale)

    def _append(self, r: FieldElement) -> FieldElement:
        if self.frozen:
            raise StrictFieldError(f"sqrt({self.format(r)}) is not in the strict field")
        self.radicands.append(r)
        k = len(self.radicands) - 1
        self._index[r.key()] = k
        return self.gen(k)

    def zeta(self, m: int) -> FieldElement:
        """A primitive m-th root of unity for m a power of two (m >= 2)."""
        if m & (m - 1) or m < 1:
            raise ValueError("only 2-power roots of unity are constructed")
        if m <= 2:
            return self.rational(-1 if m == 2 else 1)
        if m not in self._zeta:
            self._zeta[m] = self.sqrt(self.zeta(m // 2), allow_grow=not self.frozen)
            if self._zeta[m] is None:
                raise StrictFieldError(f"no primitive {m}-th root of unity in the strict field")
        return self._zeta[m]

    # text ---------------------------------------------------------------------
    def parse(self, text: str) -> FieldElement:
        return Parser(text, _CoeffContext(self)).parse()

    def format(self, v: FieldElement) -> str:
        if not v.c:
            return "0"
        parts = []
        for s in sorted(v.c, reverse=True):
            q = v.c[s]
            roots = [f"sqrt({self.format(self.radicands[k])})" for k in reversed(range(s.bit_length())) if s >> k & 1]
            parts.append(_format_term(q, roots))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"TowerField(degree={self.degree}, radicands=[{', '.join(self.format(r) for r in self.radicands)}])"


def _format_term(q, roots):
    if not roots:
        return _fmt_q(q, alone=True)
    if q == 1:
        return "*".join(roots)
    if q == -1:
        return "-" + "*".join(roots)
    return _fmt_q(q, alone=False) + "*" + "*".join(roots)


def _fmt_q(q, alone):
    if q.denominator == 1:
        return str(q.numerator)
    body = f"{q.numerator}/{q.denominator}"
    if alone:
        return body
    return f"-({-q.numerator}/{q.denominator})" if q < 0 else f"({body})"


def _add_dicts(a, b):
    out = dict(a)
    for s, q in b.items():
        out[s] = out.get(s, 0) + q
    return {k: v for k, v in out.items() if v}


def _sub_dicts(a, b):
    return _add_dicts(a, {s: -q for s, q in b.items()})


def _inv_dict(field, x):
    if not x:
        raise DivisionByZero("inverse of 0 in the coefficient field")
    if len(x) == 1 and 0 in x:
        return {0: 1 / x[0]}
    top = max(x).bit_length() - 1
    bit = 1 << top
    a = {s: q for s, q in x.items() if not s & bit}
    b = {s ^ bit: q for s, q in x.items() if s & bit}
    r = field.radicands[top].c
    norm = _sub_dicts(field._mul_dicts(a, a), field._mul_dicts(field._mul_dicts(b, b), r))
    conj = _add_dicts(a, {s | bit: -q for s, q in b.items()})
    return field._mul_dicts(conj, _inv_dict(field, norm))


class _CoeffContext:
    def __init__(self, field):
        self.field = field

    def number(self, n):
        return self.field.rational(n)

    def name(self, s):
        if s in ("i", "I"):
            return self.field.i
        raise KeyError(s)

    def sqrt(self, v):
        if not isinstance(v, FieldElement):
            raise ParseError("sqrt of a non-constant")
        if v.is_zero():
            return v
        root = self.field.sqrt(v)
        return root if root is not None else self.field.adjoin_sqrt(v)


class FieldElement:
    """Immutable element of a TowerField."""

    __slots__ = ("field", "c", "_hash")

    def __init__(self, field: TowerField, coeffs: dict):
        self.field = field
        self.c = coeffs
        self._hash = None

    # coercion ------------------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("mixing elements of different towers")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(_ONE) or type(other) is type(mpz(0)):
            return self.field.rational(other)
        return NotImplemented

    # predicates ----------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return len(self.c) == 1 and self.c.get(0) == 1

    def is_rational(self) -> bool:
        return not self.c or (len(self.c) == 1 and 0 in self.c)

    def to_rational(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.c.get(0, mpq(0))

    def key(self):
        return tuple(sorted(self.c.items()))

    def sort_key(self):
        return tuple((s, q.numerator, q.denominator) for s, q in sorted(self.c.items()))

    def level(self) -> int:
        """Number of adjunctions this element actually uses."""
        return max(self.c, default=0).bit_length()

    # arithmetic ----------------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, _add_dicts(self.c, other.c))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, {s: -q for s, q in self.c.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, _sub_dicts(self.c, other.c))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.c, other.c
        if not a or not b:
            return FieldElement(self.field, {})
        if len(b) == 1 and 0 in b:
            q = b[0]
            return FieldElement(self.field, {s: p * q for s, p in a.items()})
        if len(a) == 1 and 0 in a:
            q = a[0]
            return FieldElement(self.field, {s: p * q for s, p in b.items()})
        return FieldElement(self.field, self.field._mul_dicts(a, b))

    __rmul__ = __mul__

    def inv(self) -> FieldElement:
        return FieldElement(self.field, _inv_dict(self.field, self.c))

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def flip(self, k: int) -> FieldElement:
        """Image under the automorphism s_k -> -s_k (caller checks it extends)."""
        bit = 1 << k
        return FieldElement(self.field, {s: (-q if s & bit else q) for s, q in self.c.items()})

    def multiplicative_order(self, bound: int = 64):
        """Smallest k <= bound with self**k == 1, else None."""
        p = self
        for k in range(1, bound + 1):
            if p.is_one():
                return k
            p = p * self
        return None

    # comparison / display --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.c == other.c
        lifted = self._lift(other)
        if lifted is NotImplemented:
            return NotImplemented
        return self.c == lifted.c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.c.items()))
        return self._hash

    def __bool__(self):
        return bool(self.c)

    def __str__(self):
        return self.field.format(self)

    def __repr__(self):
        return f"FieldElement({self.field.format(self)})"


def arith(op: str, a: FieldElement, b: FieldElement | None = None) -> FieldElement:
    """Dispatch form of the field operations: add, mul, inv, neg (plus sub, div)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "inv":
        return a.inv()
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")


def embedding(src: TowerField, dst: TowerField):
    """Field map src -> dst sending each adjoined root to a square root of the image of its radicand.

    sqrt(-1) at level 0 of src goes to dst.i, so rationals and i are fixed."""
    roots = []
    for r in src.radicands:
        roots.append(dst.adjoin_sqrt(_image(r, roots, dst, {})))
    cache: dict = {}

    def phi(x: FieldElement) -> FieldElement:
        return _image(x, roots, dst, cache)
    return phi


def _image(x, roots, dst, cache):
    out = dst.zero()
    for s, q in x.c.items():
        b = cache.get(s)
        if b is None:
            b = dst.one()
            for k in range(s.bit_length()):
                if s >> k & 1:
                    b = b * roots[k]
            cache[s] = b
        out = out + b * dst.rational(q)
    return out


def adjoin_sqrt(field: TowerField, radicand) -> FieldElement:
    return field.adjoin_sqrt(radicand)


def is_square(field: TowerField, v) -> bool:
    return field.is_square(v)
