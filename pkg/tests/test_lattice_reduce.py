import itertools
from math import gcd

from hypothesis import given, strategies as st

from monofix import intmat
from monofix.coeff_field import TowerField
from monofix.lattice_reduce import reduce_to_faithful, scalar_kernel_lattice, smith_normal_form
from monofix.monomial_action import MonomialAutomorphism, group_closure
from monofix.ratfunc import Ring, rf_substitute

F = TowerField()
R = Ring(F, 3)
x1, x2, x3 = R.gens()
I3 = intmat.identity(3)


def scalar(*cs):
    return MonomialAutomorphism(I3, tuple(F.rational(c) if isinstance(c, int) else c for c in cs))


def test_snf_examples():
    u, d, v = smith_normal_form([[1, 0], [0, 1]])
    assert [list(r) for r in d] == [[1, 0], [0, 1]]
    _, d, _ = smith_normal_form([[2, 4], [6, 8]])
    assert [d[0][0], d[1][1]] == [2, 4]
    _, d, _ = smith_normal_form([[0]])
    assert [list(r) for r in d] == [[0]]


@given(st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=m, max_size=m))))
def test_snf_properties(a):
    u, d, v = smith_normal_form(a)
    assert [list(r) for r in intmat.matmul(intmat.matmul(u, a), v)] == [list(r) for r in d]
    assert abs(intmat.det(u)) == 1 and abs(intmat.det(v)) == 1
    diag = [d[i][i] for i in range(min(len(a), len(a[0])))]
    for p, q in zip(diag, diag[1:]):
        assert (q % p == 0) if p else q == 0
    g = 0
    for row in a:
        for x in row:
            g = gcd(g, x)
    assert diag[0] == g


def test_kernel_of_sign_on_first_and_third():
    lat = scalar_kernel_lattice(group_closure([scalar(-1, 1, -1)]))
    assert lat.columns == [(0, 1, 0), (2, 0, 0), (1, 0, 1)]
    assert lat.index == 2


def test_kernel_examples():
    assert scalar_kernel_lattice(group_closure([], 3, F)).index == 1
    lat = scalar_kernel_lattice(group_closure([scalar(-1, -1, -1)]))
    assert lat.index == 2
    inv = intmat.inverse_rational(lat.basis)
    for lam in itertools.product(range(-2, 3), repeat=3):
        inside = all(sum(r[k] * lam[k] for k in range(3)).denominator == 1 for r in inv)
        assert inside == (sum(lam) % 2 == 0)


def test_faithful_is_untouched():
    g = group_closure([MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]), (F.one(),) * 3)])
    smap, g2, step = reduce_to_faithful(g)
    assert step is None and g2 is g
    assert list(smap.images) == [x1, x2, x3]


def test_pure_scalar_reduces_to_trivial():
    tau = scalar(-1, 1, -1)
    smap, g2, step = reduce_to_faithful(group_closure([tau]))
    assert len(g2) == 1 and step.degree_factor == 2 and step.ok
    assert sorted(map(str, smap.images)) == sorted(map(str, [x2, x1 ** 2, x1 * x3]))
    assert all(tau(z) == z for z in smap.images)


def test_mixed_group():
    sigma = MonomialAutomorphism(intmat.from_columns([(1, 0, 0), (0, -1, 0), (0, 0, -1)]), (F.one(),) * 3)
    tau = scalar(-1, -1, -1)
    g = group_closure([sigma, tau])
    smap, g2, step = reduce_to_faithful(g)
    assert len(g) == 4 and len(g2) == 2 and g2.is_faithful()
    assert step.payload["index"] * len(g2) == len(g)
    # the induced action is the action of g read through the power products
    zs = Ring(F, 3).gens()
    for h2 in g2.elements:
        pulled = [rf_substitute(h2(z), smap) for z in zs]
        assert any(all(h(w) == p for w, p in zip(smap.images, pulled)) for h in g.elements)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=2))
def test_power_products_are_fixed(exps):
    i = F.i
    g = group_closure([scalar(*(i ** k for k in e)) for e in exps])
    smap, g2, step = reduce_to_faithful(g)
    assert all(h(z) == z for h in g.elements for z in smap.images)
    if step is not None:
        assert step.payload["index"] == len(g)
