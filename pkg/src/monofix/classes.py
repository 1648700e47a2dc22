"""The 36 conjugacy classes of finite 2-subgroups of GL3(Z), with representatives.

Representatives are written as monomial actions: the image of x_j is a
Laurent monomial, whose exponent vector is column j of the matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from . import intmat

GROUP_ORDERS = {"C2": 2, "C4": 4, "C2xC2": 4, "C4xC2": 8, "C2xC2xC2": 8, "D4": 8, "D4xC2": 16}

# relation words as ((generator, exponent), ...) per abstract group and generator count
_RELATIONS = {
    "C2": [((0, 2),)],
    "C4": [((0, 4),)],
    "C2xC2": [((0, 2),), ((1, 2),), ((0, 1), (1, 1), (0, -1), (1, -1))],
    "C4xC2": [((0, 4),), ((1, 2),), ((0, 1), (1, 1), (0, -1), (1, -1))],
    "C2xC2xC2": [((0, 2),), ((1, 2),), ((2, 2),), ((0, 1), (1, 1), (0, -1), (1, -1)),
                 ((0, 1), (2, 1), (0, -1), (2, -1)), ((1, 1), (2, 1), (1, -1), (2, -1))],
    "D4": [((0, 4),), ((1, 2),), ((0, 1), (1, 1), (0, 1), (1, 1))],
    "D4xC2": [((0, 4),), ((1, 2),), ((2, 2),), ((0, 1), (1, 1), (0, 1), (1, 1)),
              ((0, 1), (2, 1), (0, -1), (2, -1)), ((1, 1), (2, 1), (1, -1), (2, -1))],
}


@dataclass(frozen=True)
class ClassId:
    label: str
    abstract_group: str

    @property
    def order(self) -> int:
        return GROUP_ORDERS[self.abstract_group]

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class ClassRepresentative:
    class_id: ClassId
    generator_matrices: tuple
    relation_words: tuple


_VAR = re.compile(r"x(\d+)(?:\^(\d+))?")


def _exponents(expr: str, n: int = 3) -> tuple:
    """Exponent vector of a Laurent monomial written like 'x2/(x1*x3)' or '1/x1'."""
    num, _, den = expr.replace(" ", "").partition("/")
    out = [0] * n
    for part, sign in ((num, 1), (den, -1)):
        for m in _VAR.finditer(part):
            out[int(m.group(1)) - 1] += sign * int(m.group(2) or 1)
    return tuple(out)


def action_matrix(*images: str) -> tuple:
    return intmat.from_columns([_exponents(s, len(images)) for s in images])


_MINUS_I = ("1/x1", "1/x2", "1/x3")

_TABLE = [
    ("W1(173)", "C2", [("x1", "1/x2", "1/x3")]),
    ("W2(173)", "C2", [("1/x1", "x2", "x3")]),
    ("W3(173)", "C2", [("1/x1", "x3", "x2")]),
    ("W4(173)", "C2", [("x1", "1/x3", "1/x2")]),
    ("W5(173)", "C2", [_MINUS_I]),
    ("W1(174)", "C4", [("x1", "x3", "1/x2")]),
    ("W2(174)", "C4", [("1/x1", "x3", "1/x2")]),
    ("W3(174)", "C4", [("x1", "x3", "x1/x2")]),
    ("W4(174)", "C4", [("1/x1", "x3", "x1/x2")]),
    ("W5(174)", "C2xC2", [("x1", "1/x2", "1/x3"), _MINUS_I]),
    ("W6(174)", "C2xC2", [("x1", "1/x2", "1/x3"), ("1/x1", "1/x2", "x3")]),
    ("W7(174)", "C2xC2", [("x1", "1/x2", "1/x3"), ("x1", "x2", "1/x3")]),
    ("W8(174)", "C2xC2", [("x1", "1/x3", "1/x2"), _MINUS_I]),
    ("W9(174)", "C2xC2", [("x1", "1/x2", "1/x3"), ("x1", "x3", "x2")]),
    ("W10(174)", "C2xC2", [("1/x1", "x2", "x3"), ("x1", "x3", "x2")]),
    ("W11(174)", "C2xC2", [("1/x1", "x3", "x2"), ("x1", "1/x2", "1/x3")]),
    ("W12(174)", "C2xC2", [("1/x1", "x3", "x2"), ("x2/(x1*x3)", "1/x3", "1/x2")]),
    ("W13(174)", "C2xC2", [("1/x1", "x3", "x2"), ("x1*x3/x2", "x3", "x2")]),
    ("W14(174)", "C2xC2", [("1/x1", "x3", "x2"), ("1/x1", "x1/x3", "1/(x1*x2)")]),
    ("W15(174)", "C2xC2", [("1/x1", "x3", "x2"), ("x1", "x3/x1", "x1*x2")]),
    ("W1(187)", "C4xC2", [("x1", "x3", "1/x2"), _MINUS_I]),
    ("W2(187)", "C4xC2", [("x1", "x3", "x1/x2"), _MINUS_I]),
    ("W3(187)", "C2xC2xC2", [("x1", "1/x2", "1/x3"), ("1/x1", "1/x2", "x3"), _MINUS_I]),
    ("W4(187)", "C2xC2xC2", [("x1", "1/x2", "1/x3"), ("1/x1", "1/x3", "1/x2"), _MINUS_I]),
    ("W5(187)", "C2xC2xC2", [("1/x1", "x3", "x2"), ("x2/(x1*x3)", "1/x3", "1/x2"), _MINUS_I]),
    ("W6(187)", "C2xC2xC2", [("1/x1", "x3", "x2"), ("1/x1", "x1/x3", "1/(x1*x2)"), _MINUS_I]),
    ("W7(187)", "D4", [("x1", "x3", "1/x2"), ("1/x1", "x3", "x2")]),
    ("W8(187)", "D4", [("x1", "x3", "1/x2"), ("x1", "1/x3", "1/x2")]),
    ("W9(187)", "D4", [("1/x1", "1/x3", "x2"), ("1/x1", "x3", "x2")]),
    ("W10(187)", "D4", [("1/x1", "1/x3", "x2"), ("x1", "1/x3", "1/x2")]),
    ("W11(187)", "D4", [("x1", "x3", "x1/x2"), ("1/x1", "1/x3", "1/x2")]),
    ("W12(187)", "D4", [("x1", "x3", "x1/x2"), ("x1", "x3", "x2")]),
    ("W13(187)", "D4", [("1/x1", "1/x3", "x2/x1"), ("1/x1", "1/x3", "1/x2")]),
    ("W14(187)", "D4", [("1/x1", "1/x3", "x2/x1"), ("x1", "x3", "x2")]),
    ("W1(194)", "D4xC2", [("x1", "x3", "1/x2"), ("1/x1", "x3", "x2"), _MINUS_I]),
    ("W2(195)", "D4xC2", [("x1", "x3", "x1/x2"), ("1/x1", "1/x3", "1/x2"), _MINUS_I]),
]


@lru_cache(maxsize=None)
def representatives() -> tuple:
    out = []
    for label, grp, gens in _TABLE:
        mats = tuple(action_matrix(*g) for g in gens)
        out.append(ClassRepresentative(ClassId(label, grp), mats, tuple(_RELATIONS[grp])))
    return tuple(out)


def representative(label: str) -> ClassRepresentative:
    for r in representatives():
        if r.class_id.label == label:
            return r
    raise KeyError(f"unknown class label {label!r}")


def class_labels() -> list:
    return [r.class_id.label for r in representatives()]


def matrix_closure(mats) -> list:
    """All products of the given integer matrices (a finite group), identity first."""
    n = len(mats[0])
    ident = intmat.identity(n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in mats:
                b = intmat.matmul(g, a)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
        if len(seen) > 64:
            raise ValueError("matrix group is not finite of small order")
    return [ident] + sorted(seen - {ident})


@lru_cache(maxsize=None)
def representative_group(label: str) -> tuple:
    return tuple(matrix_closure(representative(label).generator_matrices))
