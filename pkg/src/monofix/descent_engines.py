"""Constructive descent primitives.

Each engine works in a local ring K(t_1..t_n) and takes the acting group as a
list of SubstitutionMaps (the whole group, identity included).  It returns new
invariant functions together with a CertificateStep whose payload is enough
for the verifier to redo every check.
"""

from __future__ import annotations

import random
from typing import Sequence

from .certificate import CertificateStep
from .coeff_field import TowerField
from .errors import (AveragingDegenerate, HypothesisFailed, IdentityCheckFailed, NoInvariantFound,
                     NoPointFound)
from .ratfunc import (PointSampler, RationalFunction, SubstitutionMap, p_deg, p_vars, rf_equal,
                      rf_substitute)

__all__ = [
    "CertificateStep", "linearize_invariants", "univariate_descent", "involution_uv",
    "twisted_involution_uv", "conic_descent", "rationality_obstruction", "uv_formulas",
    "affine_parts", "field_det", "is_identity_map", "involution_orbit_invariant", "luroth_degree",
]

AVERAGING_RETRIES = 10


# ---------------------------------------------------------------------------
# helpers


def _var(k, n, field):
    return RationalFunction.var(k, n, field)


def is_identity_map(m: SubstitutionMap) -> bool:
    n = m.nvars_in
    field = m.images[0].field
    return m.coeff_auto is None and all(img == _var(k, n, field) for k, img in enumerate(m.images))


def _involves(f: RationalFunction, idx) -> bool:
    vs = p_vars(f.num) | p_vars(f.den)
    return any(k in vs for k in idx)


def affine_parts(img: RationalFunction, x_idx: Sequence[int]):
    """Write img = sum_j A_j x_j + B with A_j, B free of the x variables, or return None."""
    if _involves(RationalFunction(img.den, None, img.nvars, img.field, reduced=True), x_idx):
        return None
    n, field = img.nvars, img.field
    parts = {j: {} for j in x_idx}
    const = {}
    xs = set(x_idx)
    for e, c in img.num.items():
        hit = [k for k in xs if e[k]]
        if not hit:
            const[e] = c
            continue
        if len(hit) > 1 or e[hit[0]] != 1:
            return None
        j = hit[0]
        e2 = tuple(0 if k == j else v for k, v in enumerate(e))
        parts[j][e2] = c
    a = [RationalFunction(parts[j], dict(img.den), n, field) if parts[j] else RationalFunction.const(0, n, field) for j in x_idx]
    b = RationalFunction(const, dict(img.den), n, field) if const else RationalFunction.const(0, n, field)
    return a, b


def field_det(rows):
    """Determinant of a square matrix of field elements."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return None
    field = m[0][0].field
    det = field.one()
    for c in range(n):
        p = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
        if p is None:
            return field.zero()
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inv()
        for r in range(c + 1, n):
            if not m[r][c].is_zero():
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def _rf_det(rows) -> RationalFunction:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _rf_det(minor)
        term = term if j % 2 == 0 else -term
        total = term if total is None else total + term
    return total if total is not None else rows[0][0] * 0


def _fixed_by_all(fs, elements) -> bool:
    return all(rf_substitute(f, s) == f for s in elements for f in fs)


# ---------------------------------------------------------------------------
# averaging over a group acting affinely on x over L


def _averaging_candidates(l_idx, n, field, rng):
    one = RationalFunction.const(1, n, field)
    mons = [one]
    for k in l_idx:
        v = _var(k, n, field)
        mons += [v, v.inv()]
    for k in l_idx:
        v = _var(k, n, field)
        mons += [v ** 2, v ** -2, v ** 3, v ** -3]
    for a in range(len(l_idx)):
        for b in range(a + 1, len(l_idx)):
            va, vb = _var(l_idx[a], n, field), _var(l_idx[b], n, field)
            mons += [va * vb, va / vb]
    structured = [m for m in mons]
    rnd = []
    for _ in range(AVERAGING_RETRIES):
        c = RationalFunction.const(0, n, field)
        for m in mons:
            c = c + m * rng.randint(-3, 3)
        if c.is_zero():
            c = one
        rnd.append(c)
    return structured, rnd


def linearize_invariants(l_idx: Sequence[int], x_idx: Sequence[int], elements: Sequence[SubstitutionMap],
                         seed: int = 0):
    """Fixed z_1..z_k with L(x) = L(z), for a group acting on L = K(l vars) faithfully
    and affinely on the x variables over L.  Averaging with retries."""
    elements = list(elements)
    n = elements[0].nvars_in
    field = elements[0].images[0].field
    l_idx, x_idx = list(l_idx), list(x_idx)
    k = len(x_idx)
    step = CertificateStep("Thm2_1", None, 1, payload={
        "nvars": n, "L": l_idx, "x": x_idx, "elements": [m.images for m in elements],
        "coeff_autos": [m.coeff_auto for m in elements], "seed": seed})
    stable = all(not _involves(s.images[j], x_idx) for s in elements for j in l_idx)
    step.check("sigma(L) is contained in L", stable)
    aff = []
    for s in elements:
        rows = []
        for j in x_idx:
            p = affine_parts(s.images[j], x_idx)
            rows.append(p)
        aff.append(rows)
    is_aff = all(p is not None for rows in aff for p in rows)
    step.check("action on x is affine over L", is_aff)
    restr = {tuple(s.images[j] for j in l_idx) + (s.coeff_auto,) for s in elements}
    step.check("restriction to L is faithful", len(restr) == len(elements))
    if not step.ok:
        raise HypothesisFailed(f"averaging hypotheses failed: {step.hypotheses_checked}")
    rng = random.Random(seed)
    structured, rnd = _averaging_candidates(l_idx, n, field, rng)
    xs = [_var(j, n, field) for j in x_idx]

    def attempt(cmat):
        zs = []
        for r in range(k):
            z = RationalFunction.const(0, n, field)
            for s in elements:
                for c in range(k):
                    if not cmat[r][c].is_zero():
                        z = z + rf_substitute(cmat[r][c], s) * rf_substitute(xs[c], s)
            zs.append(z)
        # linear part of z in x must be invertible over L
        lin = []
        for z in zs:
            p = affine_parts(z, x_idx)
            if p is None:
                return None
            lin.append(p[0])
        det = _rf_det(lin)
        if det is None or det.is_zero():
            return None
        return zs, det

    tries = []
    for c in structured:
        tries.append([[c if r == cc else RationalFunction.const(0, n, field) for cc in range(k)] for r in range(k)])
    for t in range(AVERAGING_RETRIES):
        tries.append([[rnd[(t + r * k + cc) % len(rnd)] if (r == cc or rng.random() < 0.5) else RationalFunction.const(0, n, field)
                       for cc in range(k)] for r in range(k)])
    for cmat in tries:
        got = attempt(cmat)
        if got is None:
            continue
        zs, det = got
        step.payload.update({"C": [[str(x) for x in row] for row in cmat], "z": zs, "det": det})
        step.check("averaged functions are fixed by the group", _fixed_by_all(zs, elements))
        step.check("averaged linear system is invertible over L", not det.is_zero())
        return zs, step
    raise AveragingDegenerate(f"no invertible averaged system after {len(tries)} attempts")


# ---------------------------------------------------------------------------
# one variable over a fixed field


def _solve_nullspace(rows, ncols, zero):
    """Nullspace basis of a matrix with RationalFunction entries (Gaussian elimination)."""
    m = [list(r) for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inv()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = zero + 1
        for i, c in enumerate(piv):
            v[c] = -m[i][f]
        basis.append(v)
    return basis


def univariate_descent(l_idx: Sequence[int], x: int, elements: Sequence[SubstitutionMap]):
    """Minimal-degree invariant polynomial f in x when L = K(l vars) is fixed pointwise
    and sigma(x) = a x + b.  Then L(x)^G = L(f)."""
    elements = list(elements)
    n = elements[0].nvars_in
    field = elements[0].images[0].field
    step = CertificateStep("Thm2_2", None, len(elements), payload={
        "nvars": n, "L": list(l_idx), "x": x, "elements": [m.images for m in elements]})
    fixes_l = all(s.images[j] == _var(j, n, field) and s.coeff_auto is None for s in elements for j in l_idx)
    step.check("group fixes L pointwise", fixes_l)
    ab = [affine_parts(s.images[x], [x]) for s in elements]
    step.check("sigma(x) = a x + b with a nonzero", all(p is not None and not p[0][0].is_zero() for p in ab))
    if not step.ok:
        raise HypothesisFailed(f"univariate descent hypotheses failed: {step.hypotheses_checked}")
    zero = RationalFunction.const(0, n, field)
    xv = _var(x, n, field)
    for d in range(1, len(elements) + 1):
        # unknowns c_1..c_d; invariance sum_k c_k((a x+b)^k - x^k) = 0 coefficientwise
        rows = []
        for (a, b), s in zip([(p[0][0], p[1]) for p in ab], elements):
            if is_identity_map(s):
                continue
            cols = []
            for k in range(1, d + 1):
                diff = (xv * a + b) ** k - xv ** k
                cols.append(_coeffs_in_x(diff, x, d))
            for deg in range(d + 1):
                rows.append([cols[k][deg] for k in range(d)])
        basis = _solve_nullspace(rows, d, zero) if rows else [[zero + (1 if k == d - 1 else 0) for k in range(d)]]
        basis = [v for v in basis if not v[d - 1].is_zero()]
        if basis:
            v = basis[0]
            lead = v[d - 1]
            f = zero
            for k in range(d):
                f = f + (v[k] / lead) * xv ** (k + 1)
            step.degree_factor = d
            step.payload["f"] = f
            step.check("f is fixed by the group", _fixed_by_all([f], elements))
            step.check("degree of f equals the group order", d == len(elements))
            return f, step
    raise NoInvariantFound("no invariant polynomial up to degree |G|")


def luroth_degree(f: RationalFunction, x: int) -> int:
    """[L(x) : L(f)] for f in L(x) reduced: the larger of the x-degrees of numerator and denominator."""
    return max(p_deg(f.num, x), p_deg(f.den, x))


def involution_orbit_invariant(l_idx: Sequence[int], x: int, elements: Sequence[SubstitutionMap]):
    """f with L(x)^G = L(f) for G of order 2 fixing L and acting on x by a Moebius map.

    f is x + sigma(x) (or x * sigma(x) when the sum is constant); it is certified
    by invariance plus Luroth degree 2, so L(f) is the whole fixed field."""
    elements = list(elements)
    n = elements[0].nvars_in
    field = elements[0].images[0].field
    step = CertificateStep("Thm2_2", None, 2, payload={
        "nvars": n, "L": list(l_idx), "x": x, "elements": [m.images for m in elements]})
    step.check("group has order 2", len(elements) == 2)
    fixes_l = all(s.images[j] == _var(j, n, field) and s.coeff_auto is None for s in elements for j in range(n) if j != x)
    step.check("group fixes L pointwise", fixes_l)
    if not step.ok:
        raise HypothesisFailed(f"involution descent hypotheses failed: {step.hypotheses_checked}")
    sigma = next(s for s in elements if not is_identity_map(s))
    xv = _var(x, n, field)
    sx = rf_substitute(xv, sigma)
    f = xv + sx
    if luroth_degree(f, x) != 2:
        f = xv * sx
    step.payload["f"] = f
    step.check("f is fixed by the group", _fixed_by_all([f], elements))
    step.check("Luroth degree of f equals the group order", luroth_degree(f, x) == 2)
    if not step.ok:
        raise NoInvariantFound("orbit sum and product both fail to generate")
    return f, step


def _coeffs_in_x(f: RationalFunction, x: int, d: int):
    """Coefficients (in L) of a polynomial-in-x rational function, degrees 0..d."""
    n, field = f.nvars, f.field
    out = [{} for _ in range(d + 1)]
    for e, c in f.num.items():
        k = e[x]
        e2 = tuple(0 if j == x else v for j, v in enumerate(e))
        out[k][e2] = c
    return [RationalFunction(o, dict(f.den), n, field) if o else RationalFunction.const(0, n, field) for o in out]


# ---------------------------------------------------------------------------
# the involution x -> a/x, y -> b/y


def uv_formulas(xv, yv, a, b):
    w = xv * yv - a * b / (xv * yv)
    return (xv - a / xv) / w, (yv - b / yv) / w


def _uv_identities(xv, yv, a, b, u, v):
    """Reconstruction identities as (name, lhs, rhs) triples."""
    return [
        ("x + a/x = (-b u^2 + a v^2 + 1)/v", xv + a / xv, (-b * u * u + a * v * v + 1) / v),
        ("y + b/y = (b u^2 - a v^2 + 1)/u", yv + b / yv, (b * u * u - a * v * v + 1) / u),
        ("xy + ab/(xy) = (-b u^2 - a v^2 + 1)/(u v)", xv * yv + a * b / (xv * yv), (-b * u * u - a * v * v + 1) / (u * v)),
        ("(x - a/x)/(b x/y - a y/x) = u/(b u^2 - a v^2)", (xv - a / xv) / (b * xv / yv - a * yv / xv), u / (b * u * u - a * v * v)),
    ]


def _involution_map(n, field, x, y, a, b, carried=None):
    imgs = [_var(k, n, field) for k in range(n)]
    imgs[x] = a / _var(x, n, field)
    imgs[y] = b / _var(y, n, field)
    for k, img in (carried or {}).items():
        imgs[k] = img
    return SubstitutionMap(imgs)


def involution_uv(x: int, y: int, a: RationalFunction, b: RationalFunction, *, carried=None):
    """u, v generating K(x, y)^sigma for sigma: x -> a/x, y -> b/y.

    `a`, `b` are rational functions in the other variables, fixed by sigma.
    `carried` optionally maps further variable indices to their sigma-images,
    so sigma can be described on the whole local ring."""
    n, field = a.nvars, a.field
    xv, yv = _var(x, n, field), _var(y, n, field)
    sigma = _involution_map(n, field, x, y, a, b, carried)
    step = CertificateStep("Thm2_3", None, 2, payload={
        "nvars": n, "x": x, "y": y, "a": a, "b": b, "sigma": sigma.images})
    step.check("a is nonzero", not a.is_zero())
    step.check("b is nonzero", not b.is_zero())
    step.check("a, b free of x and y", not _involves(a, [x, y]) and not _involves(b, [x, y]))
    step.check("a, b fixed by sigma", rf_substitute(a, sigma) == a and rf_substitute(b, sigma) == b)
    if not step.ok:
        raise HypothesisFailed(f"involution hypotheses failed: {step.hypotheses_checked}")
    u, v = uv_formulas(xv, yv, a, b)
    ids = _uv_identities(xv, yv, a, b, u, v)
    for name, lhs, rhs in ids:
        if not step.check(name, rf_equal(lhs, rhs)):
            raise IdentityCheckFailed(name)
    if not step.check("u, v fixed by sigma", _fixed_by_all([u, v], [sigma])):
        raise IdentityCheckFailed("u, v are not fixed")
    step.payload.update({"u": u, "v": v})
    return u, v, [(name, lhs, rhs) for name, lhs, rhs in ids], step


def twisted_involution_uv(x: int, y: int, a: RationalFunction, b1: RationalFunction, b2: RationalFunction, *,
                          carried=None):
    """Same u, v for sigma: x -> a/x, y -> (b1 (x + a/x) + b2)/y with a*b1 nonzero."""
    n, field = a.nvars, a.field
    xv, yv = _var(x, n, field), _var(y, n, field)
    step = CertificateStep("Thm2_4", None, 2, payload={
        "nvars": n, "x": x, "y": y, "a": a, "b1": b1, "b2": b2})
    step.check("a * b1 is nonzero", not (a * b1).is_zero())
    step.check("a, b1, b2 free of x and y", not any(_involves(f, [x, y]) for f in (a, b1, b2)))
    if not step.ok:
        raise HypothesisFailed(f"twisted involution hypotheses failed: {step.hypotheses_checked}")
    b = b1 * (xv + a / xv) + b2
    sigma = _involution_map(n, field, x, y, a, b, carried)
    step.check("a, b1, b2 fixed by sigma", all(rf_substitute(f, sigma) == f for f in (a, b1, b2)))
    u, v = uv_formulas(xv, yv, a, b)
    if not step.check("u, v fixed by sigma", _fixed_by_all([u, v], [sigma])):
        raise IdentityCheckFailed("u, v are not fixed by the twisted involution")
    for name, lhs, rhs in _uv_identities(xv, yv, a, b, u, v):
        if not step.check(name, rf_equal(lhs, rhs)):
            raise IdentityCheckFailed(name)
    step.payload.update({"u": u, "v": v, "sigma": sigma.images})
    return u, v, step


# ---------------------------------------------------------------------------
# the conic case: sigma(alpha) = -alpha, sigma(x) = x, sigma(y) = b(x^2 - c)/y


def _quadric(s, t, xv, a, b, c):
    return s * s - t * t / a - (xv * xv - c) * b * 4


def conic_descent(alpha: RationalFunction, x: int, y: int, b: RationalFunction, c: RationalFunction,
                  sigma: SubstitutionMap, *, direction=None, point=None, conic=None, search_height: int = 8):
    """Two generators m, n with F(alpha)(x, y)^sigma = F(m, n).

    The invariants x, s = y + sigma(y), t = alpha (y - sigma(y)) satisfy
    s^2 - t^2/a = 4 b (x^2 - c).  A direction d = (S0, T0, X0) over F with
    S0^2 - T0^2/a - 4 b X0^2 = 0 makes every line parallel to d meet that
    surface once, so the two linear forms killing d are generators.

    `point`/`conic` record the explicit solution (X, Y) of A X^2 + B Y^2 = C
    from which the caller built `direction`; when neither is supplied a small
    height search over F-constants is attempted.
    """
    n, field = alpha.nvars, alpha.field
    xv, yv = _var(x, n, field), _var(y, n, field)
    a = alpha * alpha
    step = CertificateStep("ConicDescent", None, 2, payload={
        "nvars": n, "alpha": alpha, "x": x, "y": y, "b": b, "c": c, "sigma": sigma.images,
        "coeff_auto": sigma.coeff_auto})
    step.check("a is nonzero", not a.is_zero())
    step.check("b is nonzero", not b.is_zero())
    step.check("sigma(alpha) = -alpha", rf_substitute(alpha, sigma) == -alpha)
    step.check("sigma(x) = x", rf_substitute(xv, sigma) == xv)
    step.check("sigma(y) = b (x^2 - c)/y", rf_equal(rf_substitute(yv, sigma), b * (xv * xv - c) / yv))
    step.check("b, c fixed by sigma", rf_substitute(b, sigma) == b and rf_substitute(c, sigma) == c)
    if not step.ok:
        raise HypothesisFailed(f"conic hypotheses failed: {step.hypotheses_checked}")
    sy = rf_substitute(yv, sigma)
    s = yv + sy
    t = alpha * (yv - sy)
    step.check("s, t fixed by sigma", _fixed_by_all([s, t], [sigma]))
    step.check("s^2 - t^2/a = 4 b (x^2 - c)", _quadric(s, t, xv, a, b, c).is_zero())
    if point is not None and conic is not None:
        (px, py), (ca, cb, cc) = point, conic
        step.check("supplied point lies on the conic", rf_equal(ca * px * px + cb * py * py, cc))
        step.payload["point"] = point
        step.payload["conic"] = conic
    if direction is None:
        direction = _search_direction(a, b, n, field, search_height)
        if direction is None:
            raise NoPointFound(f"no isotropic direction of height <= {search_height} for S^2 - T^2/({a}) - 4({b}) X^2")
    s0, t0, x0 = direction
    step.check("direction is isotropic", (s0 * s0 - t0 * t0 / a - b * x0 * x0 * 4).is_zero())
    step.check("direction is fixed by sigma", _fixed_by_all([s0, t0, x0], [sigma]))
    gens = _forms_killing(direction, (s, t, xv))
    step.check("generators are fixed by sigma", _fixed_by_all(gens, [sigma]))
    step.payload.update({"s": s, "t": t, "direction": list(direction), "generators": gens})
    return gens, step


def _forms_killing(d, coords):
    """Two independent linear forms in coords vanishing on the vector d."""
    s0, t0, x0 = d
    s, t, xv = coords
    if not s0.is_zero():
        return [t - s * (t0 / s0), xv - s * (x0 / s0)]
    if not t0.is_zero():
        return [s, xv - t * (x0 / t0)]
    return [s, t]


def conic_parametrization(step: CertificateStep, m_idx: int, n_idx: int, nvars: int):
    """Inverse of the projection: (s, t, x) as functions of the two generators.

    Works in a ring whose variables m_idx, n_idx stand for the generators and
    whose other variables carry F.  Returns (s, t, x) and the quadric value
    at that parametrization (identically zero when the construction is sound).
    """
    p = step.payload
    field = p["alpha"].field
    embed = _embed_fixed(p, nvars, field)
    a = embed(p["alpha"] * p["alpha"])
    b, c = embed(p["b"]), embed(p["c"])
    s0, t0, x0 = (embed(d) for d in p["direction"])
    m, nn = _var(m_idx, nvars, field), _var(n_idx, nvars, field)
    # base point with given form values, then move along d to the surface
    if not s0.is_zero():
        base = (RationalFunction.const(0, nvars, field), m, nn)
    elif not t0.is_zero():
        base = (m, RationalFunction.const(0, nvars, field), nn)
    else:
        base = (m, nn, RationalFunction.const(0, nvars, field))
    bs, bt, bx = base
    q0 = _quadric(bs, bt, bx, a, b, c)
    bil = bs * s0 * 2 - bt * t0 * 2 / a - b * bx * x0 * 8
    lam = -q0 / bil
    s, t, xv = bs + s0 * lam, bt + t0 * lam, bx + x0 * lam
    return (s, t, xv), _quadric(s, t, xv, a, b, c)


def _embed_fixed(payload, nvars, field):
    """Map functions of the step's ring, which only involve fixed variables, into a ring
    of `nvars` variables that keeps the same indices."""
    n = payload["nvars"]

    def emb(f):
        if f.nvars == nvars:
            return f
        imgs = [_var(k, nvars, field) if k < nvars else RationalFunction.const(0, nvars, field) for k in range(n)]
        return rf_substitute(f, SubstitutionMap(imgs))
    return emb


def _search_direction(a, b, n, field, height):
    """Directions (S0, 1, X0) or (S0, 0, 1) with constant small-height entries."""
    vals = []
    for p in range(-height, height + 1):
        for q in range(1, height + 1):
            vals.append(field.rational(p) / q)
    seen = set()
    cand = []
    for v in vals:
        if v.key() not in seen:
            seen.add(v.key())
            cand.append(v)
    i = field.sqrt(field.rational(-1))
    if i is not None:
        cand = cand + [v * i for v in cand if not v.is_zero()]
    one = RationalFunction.const(1, n, field)
    for x0 in cand:
        for s0 in cand:
            X = RationalFunction.const(x0, n, field)
            S = RationalFunction.const(s0, n, field)
            if (S * S - one / a - b * X * X * 4).is_zero():
                return S, one, X
    return None


# ---------------------------------------------------------------------------
# the multiquadratic obstruction for x_i -> a_i/x_i


def _square_class_rank(values, field: TowerField) -> int:
    """Dimension over F2 of the span of `values` in field^x / (field^x)^2."""
    vals = [field(v) for v in values]
    rank = 0
    basis = []
    for v in vals:
        # v is independent of the current span iff no subset product times v is a square
        dependent = False
        for mask in range(1 << len(basis)):
            p = v
            for j, b in enumerate(basis):
                if mask >> j & 1:
                    p = p * b
            if field.is_square(p):
                dependent = True
                break
        if not dependent:
            basis.append(v)
            rank += 1
    return rank


def rationality_obstruction(a1, a2, a3, strict_field: TowerField):
    """'Rational' when [K(sqrt a1, sqrt a2, sqrt a3) : K] <= 4, else 'NotRetractRational'.

    Returns (verdict, degree, step)."""
    rank = _square_class_rank([a1, a2, a3], strict_field)
    degree = 2 ** rank
    verdict = "Rational" if degree <= 4 else "NotRetractRational"
    step = CertificateStep("ObstructionCheck", None, 1, payload={
        "a": [str(strict_field(v)) for v in (a1, a2, a3)], "values": [strict_field(v) for v in (a1, a2, a3)],
        "degree": degree, "verdict": verdict,
        "frozen": strict_field.frozen})
    step.check("a_i are nonzero", all(not strict_field(v).is_zero() for v in (a1, a2, a3)))
    step.check("multiquadratic degree computed", degree in (1, 2, 4, 8))
    return verdict, degree, step
