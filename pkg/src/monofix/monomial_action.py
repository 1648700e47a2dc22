"""Monomial automorphisms of K(x1..xn), finite groups of them, and their exponent matrices.

Convention: sigma(x_j) = coeffs[j] * prod_i x_i ** mat[i][j], i.e. column j of
`mat` is the exponent vector of sigma(x_j).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from . import intmat
from .coeff_field import FieldElement, TowerField
from .errors import (ClosureBoundExceeded, NotTwoGroup, NotUnimodular, OrderBoundExceeded,
                     ParseError)
from .ratfunc import RationalFunction, SubstitutionMap, rf_substitute

ORDER_BOUND = 64
CLOSURE_BOUND = 1024


@dataclass(frozen=True)
class MonomialAutomorphism:
    mat: tuple
    coeffs: tuple

    def __post_init__(self):
        n = len(self.mat)
        if any(len(r) != n for r in self.mat) or len(self.coeffs) != n:
            raise ValueError("matrix must be square and match the coefficient count")
        if abs(intmat.det(self.mat)) != 1:
            raise NotUnimodular(f"exponent matrix {list(map(list, self.mat))} has determinant {intmat.det(self.mat)}")
        if any(c.is_zero() for c in self.coeffs):
            raise ValueError("coefficients must be nonzero")

    @classmethod
    def make(cls, mat, coeffs, field: TowerField) -> "MonomialAutomorphism":
        return cls(intmat.mat(mat), tuple(field(c) for c in coeffs))

    @classmethod
    def identity(cls, n: int, field: TowerField) -> "MonomialAutomorphism":
        return cls(intmat.identity(n), tuple(field.one() for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.mat)

    @property
    def field(self) -> TowerField:
        return self.coeffs[0].field

    def key(self):
        return (self.mat, tuple(c.key() for c in self.coeffs))

    def is_identity(self) -> bool:
        return self.mat == intmat.identity(self.n) and all(c.is_one() for c in self.coeffs)

    def is_scalar(self) -> bool:
        return self.mat == intmat.identity(self.n)

    def is_pure(self) -> bool:
        return all(c.is_one() for c in self.coeffs)

    def coeff_power(self, lam: Sequence[int]) -> FieldElement:
        """prod_i coeffs[i] ** lam[i]."""
        out = self.field.one()
        for c, e in zip(self.coeffs, lam):
            if e:
                out = out * c ** e
        return out

    def on_exponent(self, lam: Sequence[int]):
        """sigma(x^lam) = coeff * x^(mat lam); returns (coeff, mat lam)."""
        return self.coeff_power(lam), intmat.matvec(self.mat, lam)

    def images(self, nvars: int | None = None) -> list:
        n = self.n
        return [RationalFunction.monomial(self.coeffs[j], intmat.column(self.mat, j), n, self.field) for j in range(n)]

    def substitution(self) -> SubstitutionMap:
        return SubstitutionMap(self.images())

    def __call__(self, f: RationalFunction) -> RationalFunction:
        return apply(self, f)

    def __mul__(self, other: "MonomialAutomorphism") -> "MonomialAutomorphism":
        return compose(self, other)

    def inverse(self) -> "MonomialAutomorphism":
        inv = intmat.inverse_unimodular(self.mat)
        coeffs = []
        for j in range(self.n):
            col = intmat.column(inv, j)
            coeffs.append(self.coeff_power([-x for x in col]))
        return MonomialAutomorphism(inv, tuple(coeffs))

    def __pow__(self, k: int) -> "MonomialAutomorphism":
        if k < 0:
            return self.inverse() ** (-k)
        out = MonomialAutomorphism.identity(self.n, self.field)
        base = self
        while k:
            if k & 1:
                out = compose(out, base)
            base = compose(base, base)
            k >>= 1
        return out

    def describe(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{k + 1}" for k in range(self.n)]
        parts = [_fmt_mono(self.coeffs[j], intmat.column(self.mat, j), names) for j in range(self.n)]
        return "(" + ", ".join(parts) + ")"

    def __str__(self):
        return self.describe()


def _fmt_mono(c, exps, names):
    num = "*".join(n + (f"^{e}" if e > 1 else "") for n, e in zip(names, exps) if e > 0)
    den = "*".join(n + (f"^{-e}" if e < -1 else "") for n, e in zip(names, exps) if e < 0)
    cs = str(c)
    if len(c.c) > 1:
        cs = f"({cs})"
    if not num:
        num = cs
    elif not c.is_one():
        num = ("-" + num) if (-c).is_one() else f"{cs}*{num}"
    if den:
        return f"{num}/({den})" if "*" in den else f"{num}/{den}"
    return num


def apply(s: MonomialAutomorphism, f: RationalFunction) -> RationalFunction:
    return rf_substitute(f, s.substitution())


def compose(s: MonomialAutomorphism, t: MonomialAutomorphism) -> MonomialAutomorphism:
    """(s o t)(x_j) = s(t(x_j))."""
    if s.n != t.n:
        raise ValueError("dimension mismatch")
    m = intmat.matmul(s.mat, t.mat)
    coeffs = tuple(t.coeffs[j] * s.coeff_power(intmat.column(t.mat, j)) for j in range(t.n))
    return MonomialAutomorphism(m, coeffs)


def order(s: MonomialAutomorphism, bound: int = ORDER_BOUND) -> int:
    p = s
    for k in range(1, bound + 1):
        if p.is_identity():
            return k
        p = compose(p, s)
    raise OrderBoundExceeded(f"order of {s} exceeds {bound}")


@dataclass
class MonomialGroup:
    elements: list
    generators: list

    @property
    def n(self) -> int:
        return self.generators[0].n if self.generators else self.elements[0].n

    @property
    def field(self) -> TowerField:
        return self.elements[0].field

    @property
    def rho_image(self) -> set:
        return {g.mat for g in self.elements}

    def __len__(self):
        return len(self.elements)

    def is_faithful(self) -> bool:
        return len(self.rho_image) == len(self.elements)

    def scalar_subgroup(self) -> list:
        return [g for g in self.elements if g.is_scalar()]

    def element_with_matrix(self, m) -> MonomialAutomorphism:
        for g in self.elements:
            if g.mat == m:
                return g
        raise KeyError("no element with that matrix")

    def is_pure(self) -> bool:
        return all(g.is_pure() for g in self.elements)


def group_closure(gens: Sequence[MonomialAutomorphism], n: int | None = None, field: TowerField | None = None) -> MonomialGroup:
    gens = list(gens)
    if not gens:
        if n is None or field is None:
            raise ValueError("empty generator list needs n and field")
        return MonomialGroup([MonomialAutomorphism.identity(n, field)], [])
    ident = MonomialAutomorphism.identity(gens[0].n, gens[0].field)
    for g in gens:
        order(g)
    seen = {ident.key(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                e = compose(g, h)
                k = e.key()
                if k not in seen:
                    seen[k] = e
                    nxt.append(e)
                    if len(seen) > CLOSURE_BOUND:
                        raise ClosureBoundExceeded(f"closure exceeds {CLOSURE_BOUND} elements")
        frontier = nxt
    size = len(seen)
    if size & (size - 1):
        raise NotTwoGroup(f"closure has order {size}, not a power of 2")
    elems = sorted(seen.values(), key=_elem_sort_key)
    return MonomialGroup(elems, gens)


def _elem_sort_key(g: MonomialAutomorphism):
    return (not g.is_identity(), g.mat, tuple(c.sort_key() for c in g.coeffs))


def evaluate_word(group: MonomialGroup, word) -> MonomialAutomorphism:
    """word: sequence of (generator index, exponent) pairs, composed left to right."""
    g0 = group.generators[0] if group.generators else group.elements[0]
    out = MonomialAutomorphism.identity(g0.n, g0.field)
    for idx, e in word:
        out = compose(out, group.generators[idx] ** e)
    return out


def verify_relations(group: MonomialGroup, relations) -> bool:
    """True iff every relation word evaluates to the identity (matrix and coefficients)."""
    return all(evaluate_word(group, w).is_identity() for w in relations)


# ---------------------------------------------------------------------------
# action specification documents


def parse_action_spec(doc, field: TowerField) -> list:
    """Parse `{"n": 3, "generators": [{"matrix": ..., "coeffs": [...]}]}` (text or dict)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "generators" not in doc:
        raise ParseError("action spec must be an object with a 'generators' list")
    n = doc.get("n", 3)
    gens = []
    for gi, g in enumerate(doc["generators"]):
        m = g.get("matrix")
        if not isinstance(m, list) or len(m) != n or any(not isinstance(r, list) or len(r) != n for r in m):
            raise ParseError(f"generator {gi}: matrix must be {n}x{n}")
        coeffs = g.get("coeffs", ["1"] * n)
        if len(coeffs) != n:
            raise ParseError(f"generator {gi}: expected {n} coefficients")
        try:
            cs = [field.parse(str(c)) for c in coeffs]
        except ParseError as exc:
            raise ParseError(f"generator {gi}: coefficient: {exc}", exc.line, exc.col) from None
        if any(c.is_zero() for c in cs):
            raise ParseError(f"generator {gi}: coefficients must be nonzero")
        gens.append(MonomialAutomorphism(intmat.mat(m), tuple(cs)))
    return gens


def action_spec(gens: Sequence[MonomialAutomorphism]) -> dict:
    return {
        "n": gens[0].n if gens else 3,
        "generators": [{"matrix": [list(r) for r in g.mat], "coeffs": [str(c) for c in g.coeffs]} for g in gens],
    }
