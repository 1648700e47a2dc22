"""Identify the GL3(Z)-conjugacy class of a finite 2-group of integer matrices.

For a candidate class, each representative generator R_k is matched with a
group element g_k of the same type.  The matrices P with g_k P = P R_k form a
lattice; a unimodular P in it is a conjugator.  The lattice is LLL-reduced and
small combinations are searched for determinant +-1.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

from . import intmat
from .classes import ClassId, matrix_closure, representative_group, representatives
from .errors import ClassNotIdentified
from .lattice_reduce import smith_normal_form

SEARCH_L1 = 6


def element_type(m) -> tuple:
    n = len(m)
    order, p = 1, m
    while p != intmat.identity(n):
        p = intmat.matmul(p, m)
        order += 1
    return (order, intmat.trace(m), intmat.det(m), intmat.rank(intmat.sub_identity(m, 1)),
            intmat.rank(intmat.sub_identity(m, -1)))


def group_signature(mats) -> tuple:
    return tuple(sorted(Counter(element_type(m) for m in mats).items()))


def _intertwiner_kernel(pairs, n):
    """Integer basis of {P : g P = P R for all (g, R) in pairs}, P flattened row-major."""
    rows = []
    for g, r in pairs:
        for i in range(n):
            for j in range(n):
                # (gP - PR)_{ij} = sum_k g_ik P_kj - sum_k P_ik R_kj
                row = [0] * (n * n)
                for k in range(n):
                    row[k * n + j] += g[i][k]
                    row[i * n + k] -= r[k][j]
                rows.append(row)
    u, d, v = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(d), n * n)) if d[i][i])
    return [[v[r][c] for r in range(n * n)] for c in range(rank, n * n)]


def lll(basis, delta=Fraction(3, 4)):
    """Exact LLL reduction of a list of integer vectors."""
    b = [list(v) for v in basis]
    k = len(b)
    if k <= 1:
        return b

    def dot(x, y):
        return sum(p * q for p, q in zip(x, y))

    def gso():
        bs, mu = [], [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    bs, mu = gso()
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
                bs, mu = gso()
        if dot(bs[i], bs[i]) >= (delta - mu[i][i - 1] ** 2) * dot(bs[i - 1], bs[i - 1]):
            i += 1
        else:
            b[i], b[i - 1] = b[i - 1], b[i]
            bs, mu = gso()
            i = max(i - 1, 1)
    return b


def _small_combinations(d, max_l1):
    """Integer coefficient vectors of length d ordered by L1 norm (1..max_l1), up to sign."""
    for l1 in range(1, max_l1 + 1):
        for support in range(1, min(d, l1) + 1):
            for idx in itertools.combinations(range(d), support):
                for parts in _compositions(l1, support):
                    for signs in itertools.product((1, -1), repeat=support - 1):
                        c = [0] * d
                        c[idx[0]] = parts[0]
                        for t in range(1, support):
                            c[idx[t]] = parts[t] * signs[t - 1]
                        yield c


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _find_unimodular(basis, n):
    if not basis:
        return None
    red = lll(basis)
    for c in _small_combinations(len(red), SEARCH_L1):
        flat = [sum(ci * v[t] for ci, v in zip(c, red)) for t in range(n * n)]
        p = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
        if abs(intmat.det(p)) == 1:
            return p
    return None


def conjugator_to(mats, label):
    """A unimodular P with P^-1 <mats> P equal to the representative group of `label`, or None."""
    rep = next(r for r in representatives() if r.class_id.label == label)
    return conjugator_between(mats, rep.generator_matrices, representative_group(label))


def conjugator_between(mats, gens, rep_group=None):
    """A unimodular P with P^-1 <mats> P = <gens> as sets of matrices, or None."""
    rep_group = rep_group or matrix_closure(list(gens))
    n = len(gens[0])
    group = matrix_closure(list(mats))
    if group_signature(group) != group_signature(rep_group):
        return None
    types = {m: element_type(m) for m in group}
    cands = [[g for g in group if types[g] == element_type(r)] for r in gens]
    target = set(rep_group)
    for choice in itertools.product(*cands):
        # cheap consistency filter on pairwise products
        if any(element_type(intmat.matmul(choice[a], choice[b])) != element_type(intmat.matmul(gens[a], gens[b]))
               for a in range(len(gens)) for b in range(a + 1, len(gens))):
            continue
        if len(matrix_closure(list(choice))) != len(group):
            continue
        basis = _intertwiner_kernel(list(zip(choice, gens)), n)
        p = _find_unimodular(basis, n)
        if p is None:
            continue
        pinv = intmat.inverse_unimodular(p)
        conj = {intmat.matmul(intmat.matmul(pinv, g), p) for g in group}
        if conj == target:
            return p
    return None


def identify_matrices(mats):
    """(ClassId, conj) with conj^-1 <mats> conj equal to the stored representative group."""
    group = matrix_closure(list(mats))
    sig = group_signature(group)
    tried = []
    for rep in representatives():
        label = rep.class_id.label
        if group_signature(representative_group(label)) != sig:
            continue
        tried.append(label)
        p = conjugator_to(mats, label)
        if p is not None:
            return rep.class_id, p
    raise ClassNotIdentified(
        f"no conjugator found (order {len(group)}, element types {dict(sig)}, candidates {tried})")


def conjugate_matrices(mats, u):
    """u^-1 M u for each M."""
    uinv = intmat.inverse_unimodular(u)
    return [intmat.matmul(intmat.matmul(uinv, m), u) for m in mats]


__all__ = ["ClassId", "identify_matrices", "conjugator_to", "conjugator_between", "group_signature", "element_type", "lll",
           "conjugate_matrices"]
