"""Post-hoc checks of a RationalityReport that recompute everything from the report's data.

Generation of the whole fixed field is certified through the degree chain:
each step states the degree of the field extension it descends, the product
must equal |G|, and the generators must be invariant and independent.
"""

from __future__ import annotations

from itertools import combinations

from .classes import representative
from .errors import MonofixError, StepInvalid
from .monomial_action import MonomialAutomorphism, MonomialGroup, group_closure, verify_relations
from .ratfunc import (PointSampler, RationalFunction, SubstitutionMap, jacobian_rank, p_deg, rf_equal,
                      rf_substitute)

# steps that already replayed cleanly; recipe steps are shared between reports
_REPLAYED: dict = {}


def check_invariance(r, g: MonomialGroup) -> bool:
    """Every generator is fixed by every element of the closure of g."""
    elems = g.elements if isinstance(g, MonomialGroup) else group_closure(list(g)).elements
    return all(s(f) == f for s in elems for f in r.generators)


def check_transcendence(r, seed: int = 0) -> bool:
    """The generators are algebraically independent: Jacobian rank 3 at a sampled point."""
    if len(r.generators) != 3:
        return False
    return jacobian_rank(r.generators, PointSampler(seed)) == 3


def validate_certificate(r, g: MonomialGroup) -> bool:
    """Replay every step and the degree accounting; raises StepInvalid on the first failure."""
    for idx, step in enumerate(r.certificate):
        if _REPLAYED.get(id(step)) is step:
            continue
        if step.degree_factor < 1:
            raise StepInvalid(idx, "degree factor must be positive")
        check = _CHECKS.get(step.kind)
        if check is None:
            raise StepInvalid(idx, f"unknown step kind {step.kind!r}")
        try:
            reason = check(step)
        except MonofixError as exc:
            reason = f"{type(exc).__name__}: {exc}"
        except (AttributeError, IndexError, KeyError, TypeError, ValueError) as exc:
            reason = f"malformed payload: {exc}"
        if reason:
            raise StepInvalid(idx, f"{step.kind}: {reason}")
        _REPLAYED[id(step)] = step
    if r.verdict == "Rational":
        prod = 1
        for s in r.certificate:
            prod *= s.degree_factor
        order = len(g) if isinstance(g, MonomialGroup) else len(group_closure(list(g)))
        if prod != order:
            raise StepInvalid(len(r.certificate), f"degree product {prod} differs from |G| = {order}")
    return True


def verify_report(r, g: MonomialGroup, seed: int = 0) -> dict:
    """All outcomes as a name -> bool mapping (failure reasons go into r.notes).

    Invariance and independence only apply to reports that claim generators."""
    out = {}
    if r.verdict == "Rational":
        out["invariance"] = check_invariance(r, g)
        try:
            out["transcendence"] = check_transcendence(r, seed)
        except MonofixError as exc:
            r.notes.append(f"transcendence: {exc}")
            out["transcendence"] = False
    try:
        out["certificate"] = validate_certificate(r, g)
    except StepInvalid as exc:
        r.notes.append(str(exc))
        out["certificate"] = False
    return out


# ---------------------------------------------------------------------------
# per-kind replays: each returns None when fine, else a reason


def _subst(fs, images, auto=None):
    m = SubstitutionMap(list(images), coeff_auto=auto)
    return [rf_substitute(f, m) for f in fs]


def _var(k, n, field):
    return RationalFunction.var(k, n, field)


def _fixed(fs, maps) -> bool:
    return all(rf_substitute(f, m) == f for m in maps for f in fs)


def _equivariant(coords, old, new) -> bool:
    return all(rf_equal(a, b) for a, b in zip(_subst(coords, old), _subst(new, coords)))


def _replay_variable_change(step):
    p = step.payload
    if step.degree_factor != 1:
        return "a change of variables has degree 1"
    coords = p["new_coords"]
    if list(step.substitution.images) != list(coords):
        return "substitution differs from the recorded coordinates"
    field, n_old = coords[0].field, coords[0].nvars
    if p["inverse"] is not None:
        targets = p["sources"] if p["sources"] is not None else [_var(k, n_old, field) for k in range(n_old)]
        back = _subst(p["inverse"], coords)
        if len(back) != len(targets) or not all(rf_equal(a, b) for a, b in zip(back, targets)):
            return "inverse does not recover the old coordinates"
    for act in p["actions"]:
        if not _equivariant(coords, act["old"], act["new"]):
            return "action on the new coordinates is not the claimed one"
    return None


def _as_automorphism(images):
    """MonomialAutomorphism from Laurent-monomial images."""
    n = len(images)
    cols, coeffs = [], []
    for img in images:
        if len(img.num) != 1 or len(img.den) != 1:
            raise ValueError("image is not a monomial")
        (en, cn), = img.num.items()
        (ed, cd), = img.den.items()
        cols.append(tuple(a - b for a, b in zip(en, ed)))
        coeffs.append(cn / cd)
    mat = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    return MonomialAutomorphism(mat, tuple(coeffs))


def _replay_normalize(step):
    p = step.payload
    if step.degree_factor != 1:
        return "a scaling has degree 1"
    coords = list(step.substitution.images)
    for j, (c, d) in enumerate(zip(coords, p["scaling"])):
        if c != RationalFunction.monomial(d, tuple(int(i == j) for i in range(len(coords))), len(coords), d.field):
            return "substitution is not the recorded diagonal scaling"
    for old, new in zip(p["before"], p["after"]):
        if not _equivariant(coords, old, new):
            return "scaled generators are not the conjugates of the originals"
    rep = representative(p["label"])
    before = [_as_automorphism(x) for x in p["before"]]
    after = [_as_automorphism(x) for x in p["after"]]
    if [a.mat for a in after] != list(rep.generator_matrices):
        return "generators are not in the representative's matrix form"
    gb, ga = group_closure(before), group_closure(after)
    if not verify_relations(MonomialGroup(ga.elements, after), rep.relation_words):
        return "relations fail after scaling"
    if len(ga) != len(gb) or len(ga) != rep.class_id.order:
        return "group order changed"
    return None


def _replay_lemma(step):
    p = step.payload
    lat = p["lattice"]
    n = len(lat)
    det = _det(lat)
    if abs(det) != p["index"] or p["index"] != step.degree_factor:
        return "lattice index does not match the degree factor"
    images = step.substitution.images
    field = images[0].field
    for j in range(n):
        if images[j] != RationalFunction.monomial(field.one(), [lat[i][j] for i in range(n)], n, field):
            return "substitution is not the power products of the lattice"
    if p["kernel_order"] != p["index"]:
        return "index differs from the scalar kernel order"
    scalars = [SubstitutionMap(list(s)) for s in p["scalars"]]
    if not _fixed(images, scalars):
        return "power products are not fixed by the scalar subgroup"
    return None


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def _maps(p, key="elements"):
    autos = p.get("coeff_autos") or [None] * len(p[key])
    return [SubstitutionMap(list(imgs), coeff_auto=a) for imgs, a in zip(p[key], autos)]


def _replay_averaging(step):
    p = step.payload
    elems = _maps(p)
    zs = p["z"]
    if not _fixed(zs, elems):
        return "averaged functions are not fixed"
    for s in elems:
        for j in p["L"]:
            if s.images[j].variables() & set(p["x"]):
                return "the group does not preserve L"
    restr = {tuple(s.images[j] for j in p["L"]) + (s.coeff_auto,) for s in elems}
    if len(restr) != len(elems):
        return "the group does not act faithfully on L"
    # z is linear in x over L: its Jacobian in x is the linear part and must be invertible
    jac = [[z.derivative(x) for x in p["x"]] for z in zs]
    if any(f.variables() & set(p["x"]) for row in jac for f in row):
        return "averaged functions are not affine in x"
    if _rf_det(jac).is_zero():
        return "linear part is singular"
    if step.degree_factor != 1:
        return "a linearization does not change the degree"
    return None


def _rf_det(m):
    if len(m) == 1:
        return m[0][0]
    out = None
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        t = m[0][j] * _rf_det(minor)
        t = t if j % 2 == 0 else -t
        out = t if out is None else out + t
    return out


def _replay_univariate(step):
    p = step.payload
    elems = _maps(p)
    f, x, n = p["f"], p["x"], p["nvars"]
    field = f.field
    for s in elems:
        for j in range(n):
            if j != x and s.images[j] != _var(j, n, field):
                return "the group moves a variable other than x"
    if not _fixed([f], elems):
        return "f is not fixed"
    deg = max(p_deg(f.num, x), p_deg(f.den, x))
    if deg != step.degree_factor or deg != len(elems):
        return f"Luroth degree {deg} differs from the group order {len(elems)}"
    return None


def _uv_identities(xv, yv, a, b, u, v):
    return [
        (xv + a / xv, (-b * u * u + a * v * v + 1) / v),
        (yv + b / yv, (b * u * u - a * v * v + 1) / u),
        (xv * yv + a * b / (xv * yv), (-b * u * u - a * v * v + 1) / (u * v)),
    ]


def _replay_uv(step, b_of):
    p = step.payload
    n, x, y = p["nvars"], p["x"], p["y"]
    a = p["a"]
    field = a.field
    xv, yv = _var(x, n, field), _var(y, n, field)
    b = b_of(p, xv)
    if a.is_zero() or b.is_zero():
        return "a and b must be nonzero"
    if (a.variables() | b.variables()) & {x, y} and step.kind == "Thm2_3":
        return "a, b involve x or y"
    sigma = SubstitutionMap(list(p["sigma"]))
    if sigma.images[x] != a / xv or not rf_equal(sigma.images[y], b / yv):
        return "sigma is not x -> a/x, y -> b/y"
    if not _fixed([a, b], [sigma]):
        return "a, b are not fixed by sigma"
    u, v = p["u"], p["v"]
    if not _fixed([u, v], [sigma]):
        return "u, v are not fixed"
    for lhs, rhs in _uv_identities(xv, yv, a, b, u, v):
        if not rf_equal(lhs, rhs):
            return "a reconstruction identity fails"
    if step.degree_factor != 2:
        return "an involution descends a degree 2 extension"
    return None


def _replay_thm23(step):
    return _replay_uv(step, lambda p, xv: p["b"])


def _replay_thm24(step):
    def b_of(p, xv):
        if (p["a"] * p["b1"]).is_zero():
            return xv * 0
        return p["b1"] * (xv + p["a"] / xv) + p["b2"]
    return _replay_uv(step, b_of)


def _replay_conic(step):
    from .descent_engines import conic_parametrization
    p = step.payload
    n, field = p["nvars"], p["alpha"].field
    alpha, b, c = p["alpha"], p["b"], p["c"]
    a = alpha * alpha
    xv = _var(p["x"], n, field)
    sigma = SubstitutionMap(list(p["sigma"]), coeff_auto=p.get("coeff_auto"))
    s, t = p["s"], p["t"]
    if a.is_zero() or b.is_zero():
        return "a and b must be nonzero"
    if rf_substitute(alpha, sigma) != -alpha:
        return "sigma does not negate alpha"
    if not (s * s - t * t / a - (xv * xv - c) * b * 4).is_zero():
        return "s, t, x do not satisfy the quadric"
    s0, t0, x0 = p["direction"]
    if not (s0 * s0 - t0 * t0 / a - b * x0 * x0 * 4).is_zero():
        return "direction is not isotropic"
    if not _fixed(list(p["generators"]) + [s, t, xv], [sigma]):
        return "generators are not fixed"
    m, nn = n, n + 1
    _, q = conic_parametrization(step, m, nn, n + 2)
    if not q.is_zero():
        return "parametrization does not lie on the quadric"
    return None


def _replay_obstruction(step):
    p = step.payload
    vals = p["values"]
    field = vals[0].field
    if any(v.is_zero() for v in vals):
        return "a_i must be nonzero"
    rank = 0
    for size in range(len(vals), 0, -1):
        # rank = largest size of a subset with no square subproduct
        for sub in combinations(vals, size):
            ok = True
            for k in range(1, size + 1):
                for part in combinations(sub, k):
                    prod = field.one()
                    for v in part:
                        prod = prod * v
                    if field.is_square(prod):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                rank = size
                break
        if rank:
            break
    degree = 2 ** rank
    if degree != p["degree"]:
        return f"recomputed degree {degree} differs from {p['degree']}"
    if p["verdict"] != ("Rational" if degree <= 4 else "NotRetractRational"):
        return "verdict does not follow from the degree"
    return None


_CHECKS = {
    "VariableChange": _replay_variable_change,
    "Normalize": _replay_normalize,
    "Lemma2_8": _replay_lemma,
    "Thm2_1": _replay_averaging,
    "Thm2_2": _replay_univariate,
    "Thm2_3": _replay_thm23,
    "Thm2_4": _replay_thm24,
    "ConicDescent": _replay_conic,
    "ObstructionCheck": _replay_obstruction,
}

__all__ = ["check_invariance", "check_transcendence", "validate_certificate", "verify_report"]
