"""Recursive construction of generators of K(x)^G for a finite group G of monomial automorphisms.

The solver works in a local ring and tries, in order: the trivial group,
passing to power products fixed by the scalar elements, a single variable,
splitting off a stable sublattice whose complement is permuted up to
inversion, and quotienting by a central involution with two inverted
directions.  Every move emits certificate steps and returns generators as
rational functions of the local variables.
"""

from __future__ import annotations

import itertools
import random

from . import intmat
from .certificate import CertificateStep
from .classes import matrix_closure
from .classify import conjugator_between
from .descent_engines import involution_orbit_invariant, involution_uv, linearize_invariants
from .errors import ConstructionFailed, DivisionByZero, MonofixError, StrictFieldError
from .lattice_reduce import induced_automorphism, integer_kernel, integer_solve, reduce_to_faithful
from .monomial_action import MonomialAutomorphism, MonomialGroup, group_closure
from .ratfunc import RationalFunction, SubstitutionMap, rf_equal, rf_substitute

MAX_DEPTH = 8
MONO_EXP_BOUND = 2
DETECT_POINTS = 3
MAX_COMPLEMENTS = 24
MAX_COMPLETIONS = 6

# finite 2-subgroups of GL2(Z) up to conjugacy, by generators
_ROT = ((0, -1), (1, 0))
_SWAP = ((0, 1), (1, 0))
_NEG = ((-1, 0), (0, -1))
_DIAG = ((1, 0), (0, -1))
PLANE_CLASSES = ([_NEG], [_DIAG], [_SWAP], [_ROT], [_NEG, _DIAG], [_NEG, _SWAP], [_ROT, _SWAP])


def _var(k, n, field):
    return RationalFunction.var(k, n, field)


def _subst(fs, images):
    m = SubstitutionMap(list(images))
    return [rf_substitute(f, m) for f in fs]


def embed(f: RationalFunction, idx, n: int) -> RationalFunction:
    """f, written in len(idx) variables, as a function of variables `idx` of an n-variable ring."""
    def move(poly):
        out = {}
        for e, c in poly.items():
            t = [0] * n
            for k, d in zip(idx, e):
                t[k] = d
            out[tuple(t)] = c
        return out
    return RationalFunction(move(f.num), move(f.den), n, f.field, reduced=True)


def monomial_map(basis_cols, coeffs, n_out, field):
    """Images p_j = coeffs[j] * x^{basis_cols[j]}."""
    return [RationalFunction.monomial(c, col, n_out, field) for c, col in zip(coeffs, basis_cols)]


# ---------------------------------------------------------------------------
# variable changes


def variable_change(new_coords, actions, *, inverse=None, sources=None, note=""):
    """VariableChange step from the old ring to coordinates `new_coords` (old-ring functions).

    actions: list of (old images, claimed images in the new ring).  `inverse`
    expresses the old variables in the new ring; with `sources`, it instead
    expresses those old-ring functions (a generating set of a subfield)."""
    new_coords = list(new_coords)
    n_old = new_coords[0].nvars
    n_new = len(new_coords)
    step = CertificateStep("VariableChange", SubstitutionMap(new_coords), 1, payload={
        "nvars_old": n_old, "nvars_new": n_new, "new_coords": new_coords,
        "inverse": list(inverse) if inverse is not None else None,
        "sources": list(sources) if sources is not None else None,
        "actions": [{"old": list(o), "new": list(c)} for o, c in actions]}, note=note)
    check_variable_change(step)
    if not step.ok:
        raise ConstructionFailed(f"variable change failed its checks: {step.hypotheses_checked}")
    return step


def check_variable_change(step: CertificateStep):
    p = step.payload
    coords = p["new_coords"]
    field = coords[0].field
    n_old = p["nvars_old"]
    if p["inverse"] is not None:
        targets = p["sources"] if p["sources"] is not None else [_var(k, n_old, field) for k in range(n_old)]
        back = _subst(p["inverse"], coords)
        step.check("inverse recovers the old coordinates", len(back) == len(targets) and
                   all(rf_equal(a, b) for a, b in zip(back, targets)))
    ok = True
    for act in p["actions"]:
        lhs = _subst(coords, act["old"])
        rhs = _subst(act["new"], coords)
        ok = ok and all(rf_equal(a, b) for a, b in zip(lhs, rhs))
    step.check("claimed action on the new coordinates is equivariant", ok)


# ---------------------------------------------------------------------------
# helpers on lattices


def _restrict(g: MonomialAutomorphism, cols):
    """Action of g on x^{cols[j]} for a g-stable saturated sublattice, as a len(cols)-variable automorphism."""
    r = len(cols)
    amat = [[cols[j][i] for j in range(r)] for i in range(len(cols[0]))]
    new_cols, coeffs = [], []
    for b in cols:
        c, mb = g.on_exponent(b)
        x = integer_solve(amat, list(mb))
        if x is None:
            raise ValueError("sublattice is not stable")
        new_cols.append(tuple(x))
        coeffs.append(c)
    return MonomialAutomorphism(intmat.from_columns(new_cols), tuple(coeffs))


def _saturate(vectors, n):
    ann = integer_kernel([list(v) for v in vectors], n)
    if not ann:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    return integer_kernel([list(a) for a in ann], n)


def _span_key(cols):
    """Row-reduced echelon form of the span, as a hashable key."""
    from fractions import Fraction
    m = [[Fraction(x) for x in c] for c in cols]
    rk, ncols = 0, len(m[0])
    for c in range(ncols):
        p = next((r for r in range(rk, len(m)) if m[r][c]), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        piv = m[rk][c]
        m[rk] = [x / piv for x in m[rk]]
        for r in range(len(m)):
            if r != rk and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rk])]
        rk += 1
    return tuple(tuple(r) for r in m[:rk])


def stable_sublattices(mats, n):
    """Saturated sublattices of rank 1..n-1 stable under the integer matrices `mats`."""
    found, out = set(), []

    def add(vecs):
        vecs = [v for v in vecs if any(v)]
        if not vecs:
            return
        s = _saturate(vecs, n)
        if not 0 < len(s) < n:
            return
        if any(_restrict_ok(m, s) is False for m in mats):
            return
        key = _span_key(s)
        if key not in found:
            found.add(key)
            out.append(s)

    chis = list(itertools.product((1, -1), repeat=len(mats)))
    lines, planes = [], []
    for chi in chis:
        rows = [list(r) for m, c in zip(mats, chi) for r in intmat.sub_identity(m, c)]
        ker = integer_kernel(rows, n)
        if len(ker) == 1:
            lines.append([ker[0]])
        elif 1 < len(ker) < n:
            planes.append(list(ker))
            lines.extend([v] for v in ker)
            for v, w in itertools.combinations(ker, 2):
                lines.append([tuple(a + b for a, b in zip(v, w))])
                lines.append([tuple(a - b for a, b in zip(v, w))])
        # annihilators of eigenvectors of the transposes are stable hyperplanes
        rows_t = [list(r) for m, c in zip(mats, chi) for r in intmat.sub_identity(intmat.transpose(m), c)]
        for mu in _small_kernel_vectors(integer_kernel(rows_t, n)):
            planes.append(integer_kernel([list(mu)], n))
    for p in planes:
        add(p)
    for l in lines:
        add(l)
    for l1, l2 in itertools.combinations([l[0] for l in lines], 2):
        add([l1, l2])
    return out


def _small_kernel_vectors(ker):
    if len(ker) == 1:
        return list(ker)
    out = list(ker)
    for v, w in itertools.combinations(ker, 2):
        out.append(tuple(a + b for a, b in zip(v, w)))
        out.append(tuple(a - b for a, b in zip(v, w)))
    return out


def _restrict_ok(m, cols):
    amat = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))]
    return all(integer_solve(amat, list(intmat.matvec(m, b))) is not None for b in cols)


# ---------------------------------------------------------------------------
# the solver


class Solver:
    """Builds generators and certificate steps for a monomial group.

    `seed` drives averaging retries and evaluation points."""

    def __init__(self, seed: int = 0, max_depth: int = MAX_DEPTH):
        self.seed = seed
        self.max_depth = max_depth
        self.rng = random.Random(seed)
        self.trail: list = []

    def solve(self, group: MonomialGroup, depth: int = 0):
        """Return (generators as rational functions in group.n variables, steps)."""
        n, field = group.n, group.field
        if len(group) == 1:
            return [_var(k, n, field) for k in range(n)], []
        if depth > self.max_depth:
            raise ConstructionFailed("recursion depth exceeded")
        if len(group.scalar_subgroup()) > 1:
            return self._scalar_reduction(group, depth)
        if n == 1:
            return self._one_variable(group)
        if n == 2:
            got = self._standard_plane(group, depth)
            if got is not None:
                return got
        errors = []
        for move in (self._product, self._peel, self._central_involution, self._cayley):
            try:
                got = move(group, depth)
            except StrictFieldError:
                raise
            except MonofixError as exc:
                errors.append(f"{move.__name__}: {exc}")
                continue
            if got is not None:
                return got
        self.trail.append((n, len(group), errors))
        raise ConstructionFailed(
            f"no construction for a {n}-variable group of order {len(group)}" + (f" ({'; '.join(errors)})" if errors else ""))

    # -- moves -------------------------------------------------------------------------------
    def _standard_plane(self, group, depth):
        """Conjugate a plane group to its standard generators, or None if already standard."""
        n, field = group.n, group.field
        mats = sorted(group.rho_image)
        for gens in PLANE_CLASSES:
            target = matrix_closure(gens)
            if len(target) != len(mats):
                continue
            if set(target) == set(mats):
                return None
            p = conjugator_between(mats, gens, target)
            if p is None:
                continue
            cols = [intmat.column(p, j) for j in range(n)]
            pinv = intmat.inverse_unimodular(p)
            pmap = monomial_map(cols, [field.one()] * n, n, field)
            inv = monomial_map([intmat.column(pinv, k) for k in range(n)], [field.one()] * n, n, field)
            new_gens = [induced_automorphism(g, p) for g in group.generators]
            vc = variable_change(pmap, [(g.images(), h.images()) for g, h in zip(group.generators, new_gens)],
                                 inverse=inv, note="standard basis for a plane group")
            sub = group_closure([h for h in new_gens if not h.is_identity()], n, field)
            sg, ss = self.solve(sub, depth + 1)
            return _subst(sg, pmap), [vc] + ss
        return None

    def _scalar_reduction(self, group, depth):
        smap, g2, step = reduce_to_faithful(group)
        gens, steps = self.solve(g2, depth + 1)
        return [rf_substitute(f, smap) for f in gens], [step] + steps

    def _one_variable(self, group):
        field = group.field
        elems = [g.substitution() for g in group.elements]
        if len(elems) != 2:
            raise ConstructionFailed("a faithful one-variable monomial group has order at most 2")
        f, step = involution_orbit_invariant([], 0, elems)
        return [f], [step]

    def _product(self, group, depth):
        """Z^n = S + T with G = G|S x G|T: solve the two factors separately."""
        n, field = group.n, group.field
        gens = [g for g in group.generators if not g.is_identity()] or group.elements[1:]
        mats = [g.mat for g in gens]
        cands = stable_sublattices(mats, n)
        for s_cols in cands:
            for t_cols in cands:
                if len(s_cols) + len(t_cols) != n or len(s_cols) > len(t_cols):
                    continue
                basis = intmat.from_columns(list(s_cols) + list(t_cols))
                if abs(intmat.det(basis)) != 1:
                    continue
                gs = group_closure([h for h in (_restrict(g, s_cols) for g in gens) if not h.is_identity()], len(s_cols), field)
                gt = group_closure([h for h in (_restrict(g, t_cols) for g in gens) if not h.is_identity()], len(t_cols), field)
                if len(gs) * len(gt) != len(group) or len(gs) == 1 or len(gt) == 1:
                    continue
                r = len(s_cols)
                cols = list(s_cols) + list(t_cols)
                pmap = monomial_map(cols, [field.one()] * n, n, field)
                binv = intmat.inverse_unimodular(basis)
                inv = monomial_map([intmat.column(binv, k) for k in range(n)], [field.one()] * n, n, field)
                pgens = [induced_automorphism(g, basis) for g in gens]
                steps = []
                if basis != intmat.identity(n):
                    steps.append(variable_change(pmap, [(g.images(), h.images()) for g, h in zip(gens, pgens)],
                                                 inverse=inv, note="split into independent factors"))
                sg, ss = self.solve(gs, depth + 1)
                tg, ts = self.solve(gt, depth + 1)
                gens_p = [embed(f, list(range(r)), n) for f in sg] + [embed(f, list(range(r, n)), n) for f in tg]
                return _subst(gens_p, pmap), steps + ss + ts
        return None

    def _peel(self, group, depth):
        n, field = group.n, group.field
        gens = [g for g in group.generators if not g.is_identity()] or group.elements[1:]
        mats = [g.mat for g in gens]
        cands = stable_sublattices(mats, n)
        cands.sort(key=lambda s: -len(s))
        last = None
        for s in cands:
            try:
                sub = group_closure([_restrict(g, s) for g in gens], len(s), field)
            except MonofixError as exc:
                last = exc
                continue
            if len(sub) != len(group):
                continue
            for comp in self._complements(s, mats, n):
                try:
                    got = self._peel_with(group, gens, s, comp, sub, depth)
                except StrictFieldError:
                    raise
                except MonofixError as exc:
                    last = exc
                    continue
                if got is not None:
                    return got
        if last is not None:
            raise last
        return None

    def _complements(self, s, mats, n):
        """Vectors f with [S|f] unimodular, whose classes are permuted up to sign by every matrix."""
        r = len(s)
        m = n - r
        vecs = [v for v in itertools.product((-1, 0, 1), repeat=n) if any(v)]
        count = 0
        for fs in itertools.combinations(vecs, m):
            b0 = intmat.from_columns(list(s) + list(fs))
            if abs(intmat.det(b0)) != 1:
                continue
            inv = intmat.inverse_unimodular(b0)
            perms = []
            ok = True
            for mt in mats:
                perm = []
                for i in range(m):
                    img = intmat.matvec(inv, intmat.matvec(mt, fs[i]))
                    tail = img[r:]
                    nz = [(k, x) for k, x in enumerate(tail) if x]
                    if len(nz) != 1 or abs(nz[0][1]) != 1:
                        ok = False
                        break
                    perm.append((nz[0][0], nz[0][1], img[:r]))
                if not ok:
                    break
                perms.append(perm)
            if not ok:
                continue
            cayley = self._cayley_orbits(perms, m)
            kappa = self._lift_complement(s, fs, mats, perms, cayley)
            if kappa is None:
                continue
            vs = [tuple(f[t] + sum(s[j][t] * kappa[i][j] for j in range(r)) for t in range(n)) for i, f in enumerate(fs)]
            yield vs, cayley
            count += 1
            if count >= MAX_COMPLEMENTS:
                return

    @staticmethod
    def _lift_complement(s, fs, mats, perms, cayley):
        """kappa with M(f_i + S kappa_i) = chi (f_pi(i) + S kappa_pi(i)) on the orbits that get inverted.

        Other orbits keep kappa = 0: their action is already linear over K(S)."""
        r, m = len(s), len(fs)
        rows, rhs = [], []
        for mt, perm in zip(mats, perms):
            # restricted matrix A (r x r) with M S = S A
            amat = [[s[j][t] for j in range(r)] for t in range(len(s[0]))]
            acols = [integer_solve(amat, list(intmat.matvec(mt, b))) for b in s]
            for i in range(m):
                pi, chi, delta = perm[i]
                if not cayley[i]:
                    continue
                for row in range(r):
                    line = [0] * (r * m)
                    for j in range(r):
                        line[i * r + j] += acols[j][row]
                    line[pi * r + row] -= chi
                    rows.append(line)
                    rhs.append(-delta[row])
        if not rows:
            return [[0] * r for _ in range(m)]
        x = integer_solve(rows, rhs)
        if x is None:
            return None
        return [x[i * r:(i + 1) * r] for i in range(m)]

    def _peel_with(self, group, gens, s, comp, sub, depth):
        n, field = group.n, group.field
        vs, cayley = comp
        r, m = len(s), len(vs)
        basis = intmat.from_columns(list(s) + list(vs))
        induced = {g.key(): induced_automorphism(g, basis) for g in group.elements}

        def quotient(h):
            """(pi, chi, coefficient) per complement coordinate of an induced element."""
            out = []
            for i in range(m):
                col = intmat.column(h.mat, r + i)
                k = next(t for t in range(m) if col[r + t])
                out.append((k, col[r + k], h.coeffs[r + i]))
            return out

        # coefficients c_i with sigma(c_i p_i) = (c_pi p_pi)^chi; each c_i = lam_i * c^eps_i per orbit
        lmaps = []
        for g in gens:
            h = induced[g.key()]
            lmaps.append(SubstitutionMap([RationalFunction.monomial(h.coeffs[j], intmat.column(h.mat, j)[:r], r, field)
                                          for j in range(r)]))
        consts = self._complement_constants([quotient(induced[g.key()]) for g in gens], lmaps, m, r, field, cayley)
        if consts is None:
            return None
        ss = [RationalFunction.monomial(field.one(), col, n, field) for col in s]
        lift = SubstitutionMap(ss)
        qs = [rf_substitute(consts[i], lift) * RationalFunction.monomial(field.one(), vs[i], n, field) for i in range(m)]
        zs = [(1 - q) / (1 + q) if cay else q for q, cay in zip(qs, cayley)]
        new_coords = ss + zs
        # inverse: p_j in the new ring, then x = p^{basis^-1}
        w = [_var(k, n, field) for k in range(n)]
        ps = w[:r] + [((1 - w[r + i]) / (1 + w[r + i]) if cayley[i] else w[r + i]) / embed(consts[i], list(range(r)), n)
                      for i in range(m)]
        binv = intmat.inverse_unimodular(basis)
        inverse = []
        for k in range(n):
            f = RationalFunction.const(1, n, field)
            for j in range(n):
                if binv[j][k]:
                    f = f * ps[j] ** binv[j][k]
            inverse.append(f)

        def w_images(g):
            h = induced[g.key()]
            imgs = [RationalFunction.monomial(h.coeffs[j], intmat.column(h.mat, j)[:r] + (0,) * m, n, field) for j in range(r)]
            for i, (k, chi, _) in enumerate(quotient(h)):
                if cayley[i]:
                    imgs.append(w[r + k] * chi)
                else:
                    imgs.append(RationalFunction.monomial(h.coeffs[r + i], intmat.column(h.mat, r + i), n, field))
            return imgs

        actions = [(g.images(), w_images(g)) for g in gens]
        vc = variable_change(new_coords, actions, inverse=inverse, note=f"split off a rank {r} stable sublattice")
        elems = [SubstitutionMap(w_images(g)) for g in group.elements]
        zinv, lin = linearize_invariants(list(range(r)), list(range(r, n)), elems, seed=self.seed)
        sub_gens, sub_steps = self.solve(sub, depth + 1)
        gens_w = [embed(f, list(range(r)), n) for f in sub_gens] + zinv
        return _subst(gens_w, new_coords), [vc, lin] + sub_steps

    @staticmethod
    def _cayley_orbits(quots, m):
        neg = [False] * m
        for q in quots:
            for i, (k, chi, _) in enumerate(q):
                if chi == -1:
                    neg[i] = neg[k] = True
        # propagate over orbits
        changed = True
        while changed:
            changed = False
            for q in quots:
                for i, (k, _, _) in enumerate(q):
                    if neg[i] != neg[k]:
                        neg[i] = neg[k] = True
                        changed = True
        return neg

    def _complement_constants(self, quots, lmaps, m, r, field, mask):
        """Functions c_i on the stable part with sigma(c_i) * a = c_k^chi for every (k, chi, a) = quots[g][i],
        i in `mask`; None when no candidate works.

        Constants are tried first, then Moebius factors (s_j - rho)/(s_j + rho) on each orbit root."""
        one = RationalFunction.const(1, r, field)
        roots = [one]
        rhos = [field.one()]
        iu = field.sqrt(field.rational(-1))
        if iu is not None:
            rhos.append(iu)
        for j in range(r):
            sj = _var(j, r, field)
            for rho in rhos:
                roots.append((sj - rho) / (sj + rho))
        for root in roots:
            got = self._propagate_constants(root, quots, lmaps, m, field, mask)
            if got is not None:
                return got
        return None

    @staticmethod
    def _propagate_constants(root, quots, lmaps, m, field, mask):
        r = root.nvars
        one = RationalFunction.const(1, r, field)
        val = [None] * m
        for start in range(m):
            if not mask[start]:
                val[start] = one
                continue
            if val[start] is not None:
                continue
            # c_i = f_i * k^e_i with an unknown constant k per orbit
            part = {start: (root, 1)}
            stack, pending = [start], []
            while stack:
                i = stack.pop()
                f, e = part[i]
                for q, lm in zip(quots, lmaps):
                    k, chi, a = q[i]
                    nf = (rf_substitute(f, lm) * a) ** chi
                    ne = e * chi
                    if k not in part:
                        part[k] = (nf, ne)
                        stack.append(k)
                    else:
                        pending.append((part[k], (nf, ne)))
            kval = None
            for (f1, e1), (f2, e2) in pending:
                if e1 == e2:
                    continue
                ratio = f2 / f1 if e1 - e2 == 2 else f1 / f2
                if not ratio.is_const():
                    return None
                kval = field.sqrt(ratio.const_value(), allow_grow=not field.frozen)
                if kval is None:
                    raise StrictFieldError("complement constant needs a square root outside the strict field")
                break
            kval = kval or field.one()
            for i, (f, e) in part.items():
                val[i] = f * (kval ** e)
        for q, lm in zip(quots, lmaps):
            for i, (k, chi, a) in enumerate(q):
                if mask[i] and not rf_equal(rf_substitute(val[i], lm) * a, val[k] ** chi):
                    return None
        return val

    # -- central involution ----------------------------------------------------------------------
    def _cayley(self, group, depth):
        """y_j = (1 - x_j)/(1 + x_j) on coordinates permuted by the group up to sign and inversion.

        Accepted only when the transformed group gains scalar elements."""
        n, field = group.n, group.field
        one = field.one()
        gens = [g for g in group.generators if not g.is_identity()]

        def signed_perm(g, j):
            col = intmat.column(g.mat, j)
            nz = [k for k in range(n) if col[k]]
            return len(nz) == 1 and abs(col[nz[0]]) == 1 and g.coeffs[j] in (one, -one)

        ok = [j for j in range(n) if all(signed_perm(g, j) for g in gens)]
        # closed sets: unions of orbits whose rows involve no other coordinates
        orbits, seen = [], set()
        for j in ok:
            if j in seen:
                continue
            orb, stack = {j}, [j]
            while stack:
                a = stack.pop()
                for g in gens:
                    b = next(k for k in range(n) if g.mat[k][a])
                    if b not in orb:
                        orb.add(b)
                        stack.append(b)
            seen |= orb
            if orb <= set(ok) and all(not g.mat[r][c] for g in gens for r in orb for c in range(n) if c not in orb):
                orbits.append(sorted(orb))
        pv = [_var(k, n, field) for k in range(n)]
        for size in range(len(orbits), 0, -1):
            for chosen in itertools.combinations(orbits, size):
                subset = sorted(j for o in chosen for j in o)
                new_gens = [self._cayley_image(g, subset) for g in gens]
                try:
                    sub = group_closure(new_gens, n, field)
                except MonofixError:
                    continue
                if len(sub) != len(group) or len(sub.scalar_subgroup()) == 1:
                    continue
                coords = [(1 - pv[k]) / (1 + pv[k]) if k in subset else pv[k] for k in range(n)]
                vc = variable_change(coords, [(g.images(), h.images()) for g, h in zip(gens, new_gens)],
                                     inverse=coords, note="Cayley transform of sign-inverted coordinates")
                sg, ss = self.solve(sub, depth + 1)
                return _subst(sg, coords), [vc] + ss
        return None

    @staticmethod
    def _cayley_image(g, subset):
        one = g.field.one()
        n = g.n
        mat = [list(r) for r in g.mat]
        coeffs = list(g.coeffs)
        for j in subset:
            k = next(r for r in range(n) if mat[r][j])
            inv, neg = mat[k][j] == -1, coeffs[j] != one
            # x_j -> c x_k^s becomes y_j -> s y_k^c
            mat[k][j] = -1 if neg else 1
            coeffs[j] = -one if inv else one
        return MonomialAutomorphism(intmat.mat(mat), tuple(coeffs))

    def _central_involution(self, group, depth):
        n, field = group.n, group.field
        keys = None
        last = None
        for nu in group.elements:
            if nu.is_identity() or not (nu * nu).is_identity():
                continue
            if keys is None:
                keys = [g for g in group.elements]
            if any((nu * g).key() != (g * nu).key() for g in group.generators):
                continue
            try:
                got = self._involution_with(group, nu, depth)
            except StrictFieldError:
                raise
            except MonofixError as exc:
                last = exc
                continue
            if got is not None:
                return got
        if last is not None:
            raise last
        return None

    def _involution_with(self, group, nu, depth):
        n, field = group.n, group.field
        ep = integer_kernel([list(r) for r in intmat.sub_identity(nu.mat, 1)], n)
        em = integer_kernel([list(r) for r in intmat.sub_identity(nu.mat, -1)], n)
        if len(em) < 2 or len(ep) + len(em) != n:
            return None
        cols = list(ep) + list(em)
        choices = [cols]
        if abs(intmat.det(intmat.from_columns(cols))) != 1:
            # non-split: any completion of the fixed part works, nu then acts by x -> a(p0)/x
            small = sorted(itertools.product((-1, 0, 1), repeat=n), key=lambda c: (sum(map(abs, c)), [-x for x in c]))
            choices = [list(ep) + list(c) for c in itertools.combinations(small, 2)
                       if abs(intmat.det(intmat.from_columns(list(ep) + list(c)))) == 1][:MAX_COMPLETIONS]
        last = None
        for cols in choices:
            try:
                got = self._involution_basis(group, nu, cols, depth)
            except StrictFieldError:
                raise
            except MonofixError as exc:
                last = exc
                continue
            if got is not None:
                return got
        if last is not None:
            raise last
        return None

    def _involution_basis(self, group, nu, cols, depth):
        n, field = group.n, group.field
        basis = intmat.from_columns(cols)
        steps = []
        pmap = monomial_map(cols, [field.one()] * n, n, field)
        pgroup_elems = [induced_automorphism(g, basis) for g in group.elements]
        pgens = [induced_automorphism(g, basis) for g in group.generators]
        nu_p = induced_automorphism(nu, basis)
        if basis != intmat.identity(n):
            binv = intmat.inverse_unimodular(basis)
            inv = monomial_map([intmat.column(binv, k) for k in range(n)], [field.one()] * n, n, field)
            steps.append(variable_change(pmap, [(g.images(), h.images()) for g, h in zip(group.generators, pgens)],
                                         inverse=inv, note="adapted basis for the central involution"))
        x, y = n - 2, n - 1
        a = RationalFunction.monomial(nu_p.coeffs[x], intmat.column(nu_p.mat, x)[:n - 2] + (0, 0), n, field)
        b = RationalFunction.monomial(nu_p.coeffs[y], intmat.column(nu_p.mat, y)[:n - 2] + (0, 0), n, field)
        pv = [_var(k, n, field) for k in range(n)]
        u, v, _, thm = involution_uv(x, y, a, b)
        carried = []
        if n == 3:
            c0img = nu_p.images()[0]
            if c0img != pv[0] and (not a.is_const() or not b.is_const()):
                return None
            if c0img == pv[0]:
                carried = [(pv[0], None)]
            elif c0img == -pv[0]:
                dx, dy = pv[x] - a / pv[x], pv[y] - b / pv[y]
                carried = [(pv[0] * dx, dx), (pv[0] * dy, dy), (pv[0] * dx * dy, dx * dy)]
            else:
                cc = nu_p.coeffs[0]
                root = field.sqrt(cc, allow_grow=not field.frozen)
                if root is None:
                    raise StrictFieldError("central involution needs a square root outside the strict field")
                yy = (1 - pv[0] / root) / (1 + pv[0] / root)
                dx = pv[x] - a / pv[x]
                carried = [(yy * dx, dx, root)]
        else:
            carried = [None]
        target = len(group) // 2
        pts = self._points(n, field)
        for car in carried:
            c0 = None if car is None else car[0]
            for coords, back in self._candidate_coords(c0, u, v, field, n):
                got = self._monomial_quotient(coords, pgens, pts, field)
                if got is None:
                    continue
                qgroup = group_closure([h for h in got if not h.is_identity()], len(coords), field)
                if len(qgroup) != target:
                    continue
                pre = list(steps)
                if car is not None and car[1] is not None:
                    pre.append(self._carried_step(car, n, field, nu_p, x, y, a, b))
                pre.append(thm)
                k = len(coords)
                wk = [_var(j, k, field) for j in range(k)]
                sources = ([c0] if c0 is not None else []) + [u, v]
                vc = variable_change(coords, [(h.images(), [hh for hh in got_h.images()]) for h, got_h in zip(pgens, got)],
                                     inverse=back(wk), sources=sources, note="monomial coordinates on the quotient")
                sub_gens, sub_steps = self.solve(qgroup, depth + 1)
                gens_p = _subst(sub_gens, coords)
                return _subst(gens_p, pmap), pre + [vc] + sub_steps
        return None

    @staticmethod
    def _carried_step(car, n, field, nu_p, x, y, a, b):
        """Variable change replacing p0 by the nu-fixed carried coordinate."""
        pv = [_var(k, n, field) for k in range(n)]
        c0, factor = car[0], car[1]
        if len(car) == 3:
            root = car[2]
            # p0 = root * (1 - yy)/(1 + yy), yy = c0 / factor
            w = [_var(k, n, field) for k in range(n)]
            f = w[x] - a / w[x]
            yy = w[0] / f
            p0 = (1 - yy) / (1 + yy) * root
        else:
            w = [_var(k, n, field) for k in range(n)]
            p0 = w[0] / factor  # factor involves only the untouched coordinates
        new = [c0] + pv[1:]
        claim = [w[0]] + [a / w[x] if k == x else b / w[y] if k == y else w[k] for k in range(1, n)]
        return variable_change(new, [(nu_p.images(), claim)], inverse=[p0] + w[1:],
                               note="coordinate fixed by the central involution")

    def _candidate_coords(self, c0, u, v, field, n):
        """(coords, back) pairs: coords are functions of (c0, u, v); back(w) returns (c0, u, v) in w."""
        i = field.sqrt(field.rational(-1), allow_grow=False)
        kappas = [field.one()]
        if i is not None:
            kappas.append(i)
        has0 = c0 is not None
        off = 1 if has0 else 0

        def pack(first, second, inv2):
            coords = ([c0] if has0 else []) + [first, second]

            def back(w):
                head = [w[0]] if has0 else []
                return head + list(inv2(w[off], w[off + 1], w[0] if has0 else None))
            return coords, back

        out = [pack(u, v, lambda p, q, z: (p, q)),
               pack(v, u, lambda p, q, z: (q, p))]
        for k in kappas:
            out.append(pack(u + v * k, u - v * k, lambda p, q, z, k=k: ((p + q) / 2, (p - q) / (k * 2))))
        out.append(pack(u / v, v, lambda p, q, z: (p * q, q)))
        out.append(pack(u / v, u, lambda p, q, z: (q, q / p)))
        out.append(pack(u * v, v, lambda p, q, z: (p / q, q)))
        out.append(pack(u * v, u, lambda p, q, z: (q, p / q)))
        if has0:
            for k in kappas:
                out.append(pack(u + c0 * v * k, u - c0 * v * k, lambda p, q, z, k=k: ((p + q) / 2, (p - q) / (z * k * 2))))
                out.append(pack(u + v * k / c0, u - v * k / c0, lambda p, q, z, k=k: ((p + q) / 2, (p - q) * z / (k * 2))))
            out.append(pack(u * c0, v * c0, lambda p, q, z: (p / z, q / z)))
            out.append(pack(u * c0, v, lambda p, q, z: (p / z, q)))
            out.append(pack(u, v * c0, lambda p, q, z: (p, q / z)))
        return out

    def _points(self, n, field):
        rng = random.Random(self.rng.randrange(1 << 30))
        return [[field.rational(rng.randint(2, 97)) / rng.randint(1, 13) for _ in range(n)] for _ in range(DETECT_POINTS + 2)]

    def _monomial_quotient(self, coords, pgens, pts, field):
        """Monomial automorphisms h of the coordinate ring with g(coords_j) = h(coords)_j, or None."""
        k = len(coords)
        vals = []
        for pt in pts:
            try:
                row = [c.evaluate(pt) for c in coords]
            except DivisionByZero:
                continue
            if any(x.is_zero() for x in row):
                continue
            vals.append((pt, row))
            if len(vals) == DETECT_POINTS:
                break
        if len(vals) < DETECT_POINTS:
            return None
        exps = list(itertools.product(range(-MONO_EXP_BOUND, MONO_EXP_BOUND + 1), repeat=k))
        out = []
        for g in pgens:
            gimg = g.images()
            gvals = []
            for pt, row in vals:
                try:
                    gp = [im.evaluate(pt) for im in gimg]
                    gvals.append([c.evaluate(gp) for c in coords])
                except DivisionByZero:
                    return None
            cols, coeffs = [], []
            for j in range(k):
                hit = None
                for e in exps:
                    def mono(row, e=e):
                        out_ = field.one()
                        for x, d in zip(row, e):
                            if d:
                                out_ = out_ * x ** d
                        return out_
                    c = gvals[0][j] / mono(vals[0][1])
                    if all(gvals[t][j] == c * mono(vals[t][1]) for t in range(1, len(vals))):
                        hit = (e, c)
                        break
                if hit is None:
                    return None
                cols.append(hit[0])
                coeffs.append(hit[1])
            if abs(intmat.det(intmat.from_columns(cols))) != 1:
                return None
            h = MonomialAutomorphism(intmat.from_columns(cols), tuple(coeffs))
            # exact confirmation
            lhs = _subst(coords, gimg)
            rhs = _subst(h.images(), coords)
            if not all(rf_equal(a, b) for a, b in zip(lhs, rhs)):
                return None
            out.append(h)
        return out


def solve_group(group: MonomialGroup, seed: int = 0):
    """Generators of K(x)^G and the certificate steps producing them."""
    return Solver(seed).solve(group)
