"""From a monomial group to generators of its fixed field, with a certificate.

Stages: closure, faithful reduction, classification up to GL3(Z)
conjugation, coefficient normalization, and a recipe for the normalized
group.  Recipes depend only on the normalized coefficients, so they are
solved once in a private field and carried into each input's field.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

from . import intmat
from .certificate import CertificateStep, degree_product
from .classes import ClassId, representative
from .classify import identify_matrices
from .coeff_field import TowerField, embedding
from .config import PipelineConfig
from .descent_engines import involution_uv, linearize_invariants, rationality_obstruction
from .errors import MonofixError, NotTwoGroup, PipelineError
from .lattice_reduce import induced_automorphism, reduce_to_faithful
from .monomial_action import MonomialAutomorphism, MonomialGroup, group_closure
from .normalize import normalize_coefficients as _normalize
from .ratfunc import RationalFunction, SubstitutionMap, rf_substitute, rf_transfer
from .solver import Solver, monomial_map, variable_change

RATIONAL, NOT_RETRACT, FAILED = "Rational", "NotRetractRational", "Failed"

# branch order for x3 -> a3/x3 against a1^e1 a2^e2 K^2; (1, 1) first as in the all-ones example
OBSTRUCTION_BRANCHES = ((1, 1), (1, 0), (0, 1), (0, 0))


@dataclass
class RationalityReport:
    generators: list
    certificate: list
    verdict: str
    class_id: ClassId | None
    verification: dict = dc_field(default_factory=dict)
    seed: int = 0
    timing: dict = dc_field(default_factory=dict)
    group: MonomialGroup | None = None
    notes: list = dc_field(default_factory=list)

    @property
    def label(self) -> str:
        return self.class_id.label if self.class_id else "trivial"


# ---------------------------------------------------------------------------
# stages


def identify_class(g: MonomialGroup):
    """(ClassId, conj) with conj^-1 rho(g) conj equal to the representative matrix group."""
    return identify_matrices(sorted(g.rho_image))


def to_representative_form(g: MonomialGroup, conj):
    """Change to the power products x^{conj columns}; returns (step or None, map, group)."""
    n, field = g.n, g.field
    if conj == intmat.identity(n):
        return None, None, g
    cols = [intmat.column(conj, j) for j in range(n)]
    cinv = intmat.inverse_unimodular(conj)
    pmap = monomial_map(cols, [field.one()] * n, n, field)
    inv = monomial_map([intmat.column(cinv, k) for k in range(n)], [field.one()] * n, n, field)
    gens = [h for h in g.generators if not h.is_identity()]
    new = [induced_automorphism(h, conj) for h in gens]
    step = variable_change(pmap, [(h.images(), k.images()) for h, k in zip(gens, new)], inverse=inv,
                           note="conjugate into the representative's matrix form")
    return step, SubstitutionMap(pmap), group_closure(new, n, field)


def normalize_coefficients(g: MonomialGroup, class_id: ClassId, *, strict: bool = False):
    """(m, g2, steps): m lists the scaled coordinates y_j = d_j x_j."""
    nm = _normalize(g, class_id.label, strict=strict)
    return nm.substitution, nm.group, [nm.step]


# ---------------------------------------------------------------------------
# recipes


@dataclass
class Recipe:
    field: TowerField
    generators: list
    steps: list


_RECIPES: dict = {}


def clear_recipe_cache():
    _RECIPES.clear()


def _canonical_group(key, mats):
    """The normalized group rebuilt from its key in a fresh field."""
    field = TowerField()
    n = len(mats[0])
    vals = [field.i ** k * field.rational(q) for k, q in key[1]]
    gens = [MonomialAutomorphism(m, tuple(vals[n * a:n * a + n])) for a, m in enumerate(mats)]
    return group_closure(gens, n, field)


def recipe_for(nm_group: MonomialGroup, key, seed: int, *, use_cache: bool = True) -> Recipe:
    """Generators and steps for a normalized group, solved (or fetched) in a private field."""
    if key is None:
        gens, steps = Solver(seed).solve(nm_group)
        return Recipe(nm_group.field, gens, steps)
    ck = (key, seed)
    if use_cache and ck in _RECIPES:
        return _RECIPES[ck]
    group = _canonical_group(key, representative(key[0]).generator_matrices)
    gens, steps = Solver(seed).solve(group)
    rec = Recipe(group.field, gens, steps)
    if use_cache:
        _RECIPES[ck] = rec
    return rec


def obstruction_recipe(g: MonomialGroup, seed: int = 0):
    """x_i -> a_i/x_i without adjoining roots: (verdict, generators, steps).

    When [K(sqrt a1, sqrt a2, sqrt a3) : K] <= 4 some a_k lies in the span of the
    others mod squares; y = x_k/(b x_p^e1 x_q^e2) then satisfies sigma(y) = 1/y."""
    field, n = g.field, g.n
    sigma = next(h for h in g.elements if not h.is_identity())
    a = list(sigma.coeffs)
    verdict, _, check = rationality_obstruction(a[0], a[1], a[2], field)
    if verdict != RATIONAL:
        return verdict, [], [check]
    for k in (2, 1, 0):
        p, q = [j for j in range(3) if j != k]
        for e1, e2 in OBSTRUCTION_BRANCHES:
            b = field.sqrt(a[k] / (a[p] ** e1 * a[q] ** e2))
            if b is not None:
                return RATIONAL, *_obstruction_branch(g, sigma, a, k, p, q, e1, e2, b, seed, check)
    raise AssertionError("degree <= 4 forces a dependency mod squares")


def _obstruction_branch(g, sigma, a, k, p, q, e1, e2, b, seed, check):
    field, n = g.field, 3
    x = [RationalFunction.var(j, n, field) for j in range(n)]
    one = RationalFunction.const(1, n, field)
    y = x[k] / (x[p] ** e1 * x[q] ** e2 * b)
    z = (one - y) / (one + y)
    # new coordinates (x_p, x_q, z) and sigma on them
    coords = [x[p], x[q], z]
    zz = RationalFunction.var(2, n, field)
    yy = (one - zz) / (one + zz)
    inverse = [None] * 3
    inverse[p], inverse[q] = x[0], x[1]
    inverse[k] = yy * x[0] ** e1 * x[1] ** e2 * b
    new_sigma = [x[0].inv() * a[p], x[1].inv() * a[q], -zz]
    vc = variable_change(coords, [(sigma.images(), new_sigma)], inverse=inverse,
                         note=f"y = x{k + 1}/(b x{p + 1}^{e1} x{q + 1}^{e2}), z = (1 - y)/(1 + y)")
    vc.payload["branch"] = {"k": k + 1, "eps": [e1, e2], "b": str(b)}
    ident = SubstitutionMap([x[0], x[1], zz])
    sig = SubstitutionMap(new_sigma)
    (w,), lin = linearize_invariants([0, 1], [2], [ident, sig], seed=seed)
    u, v, _, thm = involution_uv(0, 1, RationalFunction.const(a[p], n, field), RationalFunction.const(a[q], n, field),
                                 carried={2: -zz})
    local = [u, v, w]
    return [rf_substitute(f, SubstitutionMap(coords)) for f in local], [check, vc, lin, thm]


# ---------------------------------------------------------------------------
# the pipeline


def construct_generators(g, config: PipelineConfig | None = None) -> RationalityReport:
    """Full pipeline on a group (or a list of generators); verification is run when configured."""
    config = config or PipelineConfig()
    t0 = time.perf_counter()
    ctx = _Context()
    try:
        group = g if isinstance(g, MonomialGroup) else group_closure(list(g))
        if len(group) & (len(group) - 1):
            raise NotTwoGroup(f"group order {len(group)} is not a power of 2")
        report = _run(group, config, ctx)
    except MonofixError as exc:
        raise PipelineError(ctx.label or "unclassified", len(ctx.steps), exc) from exc
    report.timing["construct_s"] = round(time.perf_counter() - t0, 4)
    if config.verify:
        from .verifier import verify_report
        t1 = time.perf_counter()
        report.verification = verify_report(report, report.group, seed=config.seed)
        report.timing["verify_s"] = round(time.perf_counter() - t1, 4)
        if report.verdict == RATIONAL and not all(report.verification.values()):
            report.verdict = FAILED
    return report


@dataclass
class _Context:
    label: str | None = None
    steps: list = dc_field(default_factory=list)


def _run(group: MonomialGroup, config: PipelineConfig, ctx: _Context):
    n, field = group.n, group.field
    steps = ctx.steps
    smap, faithful, lemma = reduce_to_faithful(group)
    if lemma is not None:
        steps.append(lemma)
    if len(faithful) == 1:
        return RationalityReport(list(smap.images), steps, RATIONAL, None, seed=config.seed, group=group)
    class_id, conj = identify_class(faithful)
    ctx.label = class_id.label
    vc, pmap, rep_group = to_representative_form(faithful, conj)
    if vc is not None:
        steps.append(vc)
    notes = []
    if class_id.label in ("W1(174)", "W2(174)", "W3(174)", "W4(174)"):
        notes.append("this class only needs sqrt(-1) in K; the construction runs in the square-root tower")

    if config.strict and class_id.label == "W5(173)":
        # the coefficients decide: no scaling by square roots is available
        verdict, local, more = obstruction_recipe(rep_group, config.seed)
        steps.extend(more)
    else:
        nm = _normalize(rep_group, class_id.label, strict=config.strict)
        steps.append(nm.step)
        if class_id.label == "W5(173)":
            _, local, more = obstruction_recipe(nm.group, config.seed)
            steps.extend(more)
        else:
            key = None if config.strict else nm.key
            rec = recipe_for(nm.group, key, config.seed, use_cache=config.cache)
            steps.extend(rec.steps)
            local = rec.generators
            if rec.field is not field:
                phi = embedding(rec.field, field)
                local = [rf_transfer(f, phi, field) for f in local]
        local = [rf_substitute(f, nm.substitution) for f in local]
        verdict = RATIONAL
    if pmap is not None:
        local = [rf_substitute(f, pmap) for f in local]
    gens = [rf_substitute(f, smap) for f in local] if lemma is not None else local
    return RationalityReport(gens, steps, verdict, class_id, seed=config.seed, group=group, notes=notes)


__all__ = ["RationalityReport", "identify_class", "normalize_coefficients", "construct_generators",
           "recipe_for", "obstruction_recipe", "to_representative_form", "clear_recipe_cache", "degree_product",
           "RATIONAL", "NOT_RETRACT", "FAILED"]


# ---------------------------------------------------------------------------
# the two conic descents, with the explicit points


def conic_site(label: str, field: TowerField | None = None):
    """The conic step of the W6(174) or W2(187) recipe on its normal form.

    Variables (t, x, y) with sigma: t -> -t, x -> x, y -> b(x^2 - c)/y and
    a = t^2.  A point (X, Y) on a X^2 + ab Y^2 = 1 gives the isotropic
    direction (X, 1, sqrt(-1) Y/2) of S^2 - T^2/a - 4b X^2.  Returns
    (generators of K(t, x, y)^sigma, step, data)."""
    from .descent_engines import conic_descent
    field = field or TowerField()
    n = 3
    t, x, y = (RationalFunction.var(k, n, field) for k in range(n))
    one = RationalFunction.const(1, n, field)
    i = RationalFunction.const(field.i, n, field)
    a = t * t
    if label == "W6(174)":
        b = (one + a) / a
        c = -(a * 2 + a * a * a * 2) / ((one + a) * (one + a))
        point = (i, one)  # a X^2 + (1 + a) Y^2 = 1
    elif label == "W2(187)":
        b = one / a
        c = (a * a - a * 4) / 4
        point = (RationalFunction.const(0, n, field), one)  # s X^2 + Y^2 = 1 since (s, -s) = 0
    else:
        raise ValueError(f"{label} has no conic step")
    conic = (a, a * b, one)
    sigma = SubstitutionMap([-t, x, b * (x * x - c) / y])
    direction = (point[0], one, i * point[1] / 2)
    gens, step = conic_descent(t, 1, 2, b, c, sigma, direction=direction, point=point, conic=conic)
    data = {"a": a, "b": b, "c": c, "sigma": sigma, "point": point, "conic": conic}
    return [a] + list(gens), step, data
