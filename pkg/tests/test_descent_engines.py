import pytest

from monofix.coeff_field import TowerField
from monofix.descent_engines import (conic_descent, conic_parametrization, involution_orbit_invariant,
                                     involution_uv, linearize_invariants, luroth_degree, rationality_obstruction,
                                     twisted_involution_uv, univariate_descent)
from monofix.errors import HypothesisFailed, NoPointFound
from monofix.ratfunc import Ring, jacobian_rank, rf_equal, rf_substitute

F = TowerField()


def ring(n):
    r = Ring(F, n)
    return r, r.gens()


def ident(r):
    return r.subs(r.gens())


def test_univariate_sign():
    r, (w, x) = ring(2)
    f, step = univariate_descent([0], 1, [ident(r), r.subs([w, -x])])
    assert f == x * x and step.degree_factor == 2


def test_univariate_affine():
    r, (w, x) = ring(2)
    f, step = univariate_descent([0], 1, [ident(r), r.subs([w, 1 - x])])
    assert f == x * x - x
    assert luroth_degree(f, 1) == 2


def test_univariate_trivial_group():
    r, (w, x) = ring(2)
    f, step = univariate_descent([0], 1, [ident(r)])
    assert f == x and step.degree_factor == 1


def test_univariate_order_four():
    r, (w, x) = ring(2)
    i = r.const(F.i)
    els = [r.subs([w, x * i ** k]) for k in range(4)]
    f, step = univariate_descent([0], 1, els)
    assert f == x ** 4


def test_linearize_sign_pair():
    r, (w, x) = ring(2)
    sigma = r.subs([-w, -x])
    (z,), step = linearize_invariants([0], [1], [ident(r), sigma])
    assert rf_substitute(z, sigma) == z
    # L(x) = L(z): z is affine in x with an L-coefficient that is nonzero
    dz = z.derivative(1)
    assert not dz.is_zero() and dz.derivative(1).is_zero()
    assert step.ok and step.degree_factor == 1


def test_linearize_rejects_unfaithful_restriction():
    r, (w, x) = ring(2)
    with pytest.raises(HypothesisFailed):
        linearize_invariants([0], [1], [ident(r), r.subs([w, -x])])


def test_orbit_invariant_moebius():
    r, (w, x) = ring(2)
    sigma = r.subs([w, (1 - x) / (1 + x)])
    f, step = involution_orbit_invariant([0], 1, [ident(r), sigma])
    assert rf_substitute(f, sigma) == f and luroth_degree(f, 1) == 2


@pytest.mark.parametrize("a,b", [(1, 1), (2, 3), (-1, 5)])
def test_involution_uv_constant(a, b):
    r, (x, y, z) = ring(3)
    u, v, ids, step = involution_uv(0, 1, r.const(a), r.const(b))
    sigma = r.subs([r.const(a) / x, r.const(b) / y, z])
    assert rf_substitute(u, sigma) == u and rf_substitute(v, sigma) == v
    assert len(ids) == 4 and all(rf_equal(lhs, rhs) for _, lhs, rhs in ids)
    assert step.degree_factor == 2
    assert jacobian_rank([u, v, z]) == 3


def test_involution_uv_rejects_zero():
    r, _ = ring(3)
    with pytest.raises(HypothesisFailed):
        involution_uv(0, 1, r.const(0), r.const(1))


def test_twisted_involution():
    r, (x, y, z) = ring(3)
    u, v, step = twisted_involution_uv(0, 1, r.const(1), r.const(1), r.const(0))
    sigma = r.subs([1 / x, (x + 1 / x) / y, z])
    assert rf_substitute(u, sigma) == u and rf_substitute(v, sigma) == v
    with pytest.raises(HypothesisFailed):
        twisted_involution_uv(0, 1, r.const(1), r.const(0), r.const(2))


def test_conic_descent_with_search():
    r, (t, x, y) = ring(3)
    a = t * t
    b, c = -1 / (a * 4), r.const(0)
    sigma = r.subs([-t, x, b * (x * x - c) / y])
    gens, step = conic_descent(t, 1, 2, b, c, sigma)
    assert step.ok and all(rf_substitute(g, sigma) == g for g in gens)
    _, quadric = conic_parametrization(step, 3, 4, 5)
    assert quadric.is_zero()


def test_conic_descent_without_point():
    r, (t, x, y) = ring(3)
    sigma = r.subs([-t, x, (x * x - 3) / y])
    with pytest.raises(NoPointFound):
        conic_descent(t, 1, 2, r.const(1), r.const(3), sigma, search_height=2)


@pytest.mark.parametrize("a,degree,verdict", [
    ((1, 4, 9), 1, "Rational"),
    ((2, 3, 6), 4, "Rational"),
    ((2, 8, 3), 4, "Rational"),
    ((2, 3, 5), 8, "NotRetractRational"),
    ((-1, 2, 3), 8, "NotRetractRational"),
])
def test_obstruction(a, degree, verdict):
    q = TowerField(adjoin_i=False, frozen=True)
    v, d, step = rationality_obstruction(*(q.rational(x) for x in a), q)
    assert (v, d) == (verdict, degree)
    assert step.kind == "ObstructionCheck" and step.ok


def test_obstruction_over_gaussian_field():
    # -1 is a square once sqrt(-1) is present
    k = TowerField(frozen=True)
    v, d, _ = rationality_obstruction(k.rational(-1), k.rational(2), k.rational(3), k)
    assert (v, d) == ("Rational", 4)
