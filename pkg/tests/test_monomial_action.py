import pytest
from hypothesis import given, strategies as st

from monofix import intmat
from monofix.coeff_field import TowerField
from monofix.errors import NotTwoGroup, NotUnimodular, OrderBoundExceeded, ParseError
from monofix.monomial_action import (MonomialAutomorphism, action_spec, apply, compose, group_closure, order,
                                     parse_action_spec, verify_relations)
from monofix.ratfunc import Ring

F = TowerField()
R = Ring(F, 3)
x1, x2, x3 = R.gens()
MINUS_I = intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]])
CYCLE = intmat.from_columns([(0, 1, 0), (0, 0, 1), (-1, -1, -1)])  # x -> y -> z -> 1/(xyz)


def inversion(a):
    return MonomialAutomorphism(MINUS_I, tuple(F.rational(v) for v in a))


def test_apply_examples():
    s = inversion((2, 3, 5))
    assert apply(s, x1 * x2 * x3) == R.const(30) / (x1 * x2 * x3)
    ident = MonomialAutomorphism.identity(3, F)
    f = (x1 + x2 * x3) / (x1 - 7)
    assert apply(ident, f) == f
    cyc = MonomialAutomorphism(CYCLE, (F.one(), F.one(), F.rational(-1)))
    assert apply(cyc, x1) == x2
    assert apply(cyc, x3) == R.const(-1) / (x1 * x2 * x3)


def test_compose_and_order():
    s = inversion((2, 3, 5))
    assert compose(s, s).is_identity()
    ident = MonomialAutomorphism.identity(3, F)
    assert compose(s, ident) == s and compose(ident, s) == s
    assert order(ident) == 1 and order(s) == 2
    cyc = MonomialAutomorphism(CYCLE, (F.one(), F.one(), F.rational(-1)))
    assert order(cyc) == 4


def test_compose_matches_substitution():
    s = MonomialAutomorphism(CYCLE, (F.rational(2), F.i, F.rational(-1)))
    t = inversion((3, 1, 7))
    f = (x1 + 2 * x2) / (x3 + 1)
    assert apply(compose(s, t), f) == apply(s, apply(t, f))


def test_order_bound():
    with pytest.raises(OrderBoundExceeded):
        order(MonomialAutomorphism(intmat.identity(3), (F.rational(2), F.one(), F.one())))


def test_closure_sizes():
    assert len(group_closure([], 3, F)) == 1
    sigma = MonomialAutomorphism(intmat.from_columns([(1, 0, 0), (0, -1, 0), (0, 0, -1)]), (F.one(),) * 3)
    assert len(group_closure([sigma, inversion((1, 1, 1))])) == 4
    w1_187 = MonomialAutomorphism(intmat.from_columns([(1, 0, 0), (0, 0, 1), (0, -1, 0)]),
                                  (F.i, F.one(), F.rational(3)))
    assert len(group_closure([w1_187])) == 4


def test_closure_rejects_odd_order():
    three = MonomialAutomorphism(intmat.from_columns([(0, 1, 0), (0, 0, 1), (1, 0, 0)]), (F.one(),) * 3)
    with pytest.raises(NotTwoGroup):
        group_closure([three])


def test_relations():
    s = inversion((2, 3, 5))
    assert verify_relations(group_closure([s]), [((0, 2),)])
    cyc = MonomialAutomorphism(CYCLE, (F.one(), F.one(), F.rational(-1)))
    assert not verify_relations(group_closure([cyc]), [((0, 2),)])
    tau = MonomialAutomorphism(intmat.from_columns([(1, 0, 0), (0, -1, 0), (0, 0, -1)]),
                               (F.rational(-1), F.one(), F.one()))
    g = group_closure([tau, inversion((1, 1, 1))])
    assert verify_relations(g, [((0, 1), (1, 1), (0, -1), (1, -1))])


def test_not_unimodular():
    with pytest.raises(NotUnimodular):
        MonomialAutomorphism(intmat.mat([[2, 0, 0], [0, 1, 0], [0, 0, 1]]), (F.one(),) * 3)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_action_spec('{"generators": [', F)
    with pytest.raises(ParseError):
        parse_action_spec('{"generators": [{"matrix": [[1, 0], [0, 1]]}]}', F)
    with pytest.raises(ParseError):
        parse_action_spec({"generators": [{"matrix": [[-1, 0, 0], [0, -1, 0], [0, 0, -1]],
                                           "coeffs": ["1", "0", "2"]}]}, F)


signed_perms = st.permutations([0, 1, 2]).flatmap(
    lambda p: st.tuples(*[st.sampled_from([-1, 1])] * 3).map(
        lambda s: intmat.from_columns([tuple(s[j] * (i == p[j]) for i in range(3)) for j in range(3)])))
coeffs = st.tuples(*[st.sampled_from(["1", "-1", "2", "1/3", "sqrt(-1)", "sqrt(2)"])] * 3)


@given(signed_perms, coeffs)
def test_action_spec_round_trip(m, cs):
    g = MonomialAutomorphism(m, tuple(F.parse(c) for c in cs))
    back = parse_action_spec(action_spec([g]), F)
    assert back == [g]


@given(signed_perms, coeffs, signed_perms, coeffs)
def test_compose_agrees_with_substitution_randomly(m1, c1, m2, c2):
    s = MonomialAutomorphism(m1, tuple(F.parse(c) for c in c1))
    t = MonomialAutomorphism(m2, tuple(F.parse(c) for c in c2))
    f = x1 * x2 + 1 / x3
    assert apply(compose(s, t), f) == apply(s, apply(t, f))
    assert compose(s, s.inverse()).is_identity()
