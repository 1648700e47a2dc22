"""Coefficient assignments compatible with a class's relations, in log-linear form.

A monomial action with generator matrices M_k is determined by the 3k
coefficients.  Tracking their exponents symbolically, every relation word
becomes a linear condition R e = 0 on the exponent vector e.  Rational
solutions are products t^v over the integer kernel of R; root-of-unity
solutions of order dividing 4 are the solutions of R e = 0 mod 4.
"""

from __future__ import annotations

import random
from math import gcd
from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from . import intmat
from .classes import representative
from .coeff_field import TowerField
from .lattice_reduce import integer_kernel, smith_normal_form
from .monomial_action import MonomialAutomorphism

TORSION = 4


def _compose_logs(ms, ls, mt, lt):
    n = len(mt)
    return [[lt[j][c] + sum(mt[i][j] * ls[i][c] for i in range(n)) for c in range(len(lt[j]))] for j in range(n)]


def _power_logs(m, l, e, n, width):
    if e < 0:
        inv = intmat.inverse_unimodular(m)
        l = [[-sum(inv[i][j] * l[i][c] for i in range(n)) for c in range(width)] for j in range(n)]
        m, e = inv, -e
    pm, pl = intmat.identity(n), [[0] * width for _ in range(n)]
    for _ in range(e):
        pl = _compose_logs(pm, pl, m, l)
        pm = intmat.matmul(pm, m)
    return pm, pl


def relation_rows(mats, words) -> list:
    """Rows of R: the symbolic coefficient exponents of every relation word."""
    n, k = len(mats[0]), len(mats)
    width = n * k
    logs = [[[int(c == n * a + j) for c in range(width)] for j in range(n)] for a in range(k)]
    rows = []
    for w in words:
        cm, cl = intmat.identity(n), [[0] * width for _ in range(n)]
        for idx, e in w:
            pm, pl = _power_logs(mats[idx], logs[idx], e, n, width)
            cl = _compose_logs(cm, cl, pm, pl)
            cm = intmat.matmul(cm, pm)
        rows.extend(cl)
    return rows


@dataclass(frozen=True)
class CocycleSpace:
    mats: tuple
    kernel: tuple  # integer basis of rational solutions
    torsion_basis: tuple  # generators of the solutions mod TORSION

    @property
    def width(self) -> int:
        return len(self.mats) * len(self.mats[0])


@lru_cache(maxsize=None)
def cocycle_space(label: str) -> CocycleSpace:
    rep = representative(label)
    rows = relation_rows(rep.generator_matrices, rep.relation_words)
    width = len(rows[0])
    kernel = integer_kernel(rows, width)
    _, d, v = smith_normal_form(rows)
    tors = []
    for j in range(width):
        dj = d[j][j] if j < len(d) else 0
        step = TORSION // gcd(dj, TORSION)
        if step < TORSION:
            tors.append(tuple(v[r][j] * step % TORSION for r in range(width)))
    return CocycleSpace(rep.generator_matrices, tuple(kernel), tuple(tors))


def _small_rational(rng: random.Random, height: int):
    while True:
        p = rng.randint(-height, height)
        if p:
            return mpq(p, rng.randint(1, height))


def draw_coefficients(label: str, rng: random.Random, field: TowerField, height: int = 9) -> list:
    """Random generators with the class's matrices and compatible coefficients."""
    space = cocycle_space(label)
    width = space.width
    e = [0] * width
    for t in space.torsion_basis:
        k = rng.randrange(TORSION)
        e = [(x + k * y) % TORSION for x, y in zip(e, t)]
    params = [_small_rational(rng, height) for _ in space.kernel]
    zeta = field.i
    values = []
    for c in range(width):
        q = mpq(1)
        for t, vec in zip(params, space.kernel):
            if vec[c]:
                q *= t ** vec[c]
        values.append(field.rational(q) * zeta ** e[c])
    n = len(space.mats[0])
    return [MonomialAutomorphism(m, tuple(values[n * a:n * a + n])) for a, m in enumerate(space.mats)]
