import random

import pytest

from monofix import intmat
from monofix.case_pipeline import normalize_coefficients
from monofix.classes import class_labels, representative
from monofix.cocycles import draw_coefficients
from monofix.coeff_field import TowerField
from monofix.errors import RelationViolated
from monofix.monomial_action import MonomialAutomorphism, MonomialGroup, group_closure, verify_relations
from monofix.normalize import canonical_torsion, factor_rationals, integral_reduction
from monofix.ratfunc import rf_substitute


@pytest.mark.parametrize("label", class_labels())
def test_draws_satisfy_relations(label):
    rng = random.Random(label)
    rep = representative(label)
    for _ in range(3):
        field = TowerField()
        gens = draw_coefficients(label, rng, field)
        g = group_closure(gens)
        assert len(g) == rep.class_id.order
        assert verify_relations(MonomialGroup(g.elements, gens), rep.relation_words)


@pytest.mark.parametrize("label", ["W5(173)", "W3(174)", "W12(174)", "W4(187)", "W2(195)"])
def test_normalization_conjugates(label):
    rng = random.Random(1)
    field = TowerField()
    g = group_closure(draw_coefficients(label, rng, field))
    rep = representative(label)
    m, g2, (step,) = normalize_coefficients(g, rep.class_id)
    assert step.kind == "Normalize" and step.ok and len(g2) == len(g)
    # y = m(x) intertwines the two actions: h(m(x)) = m(h2(x))
    for mat in rep.generator_matrices:
        h, h2 = g.element_with_matrix(mat), g2.element_with_matrix(mat)
        for y, hy in zip(m.images, h2.images()):
            assert h(y) == rf_substitute(hy, m)


def test_inversion_becomes_pure():
    field = TowerField()
    a = tuple(field.rational(v) for v in (2, 3, 7))
    g = group_closure([MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]), a)])
    m, g2, _ = normalize_coefficients(g, representative("W5(173)").class_id)
    assert g2.is_pure()
    for j, y in enumerate(m.images):
        d = y.num[tuple(int(i == j) for i in range(3))]
        assert d * d * a[j] == field.one()


def test_strict_mode_keeps_the_field():
    field = TowerField(adjoin_i=False)
    a = tuple(field.rational(v) for v in (4, -9, 2))
    g = group_closure([MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]), a)])
    field.frozen = True
    m, g2, _ = normalize_coefficients(g, representative("W5(173)").class_id, strict=True)
    assert field.degree == 1
    coeffs = g2.element_with_matrix(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]])).coeffs
    assert coeffs[0] == field.one() and coeffs[1] == field.rational(-1)


def test_relation_violation_is_reported():
    field = TowerField()
    bad = MonomialAutomorphism(intmat.mat([[1, 0, 0], [0, -1, 0], [0, 0, -1]]), (field.i, field.one(), field.one()))
    g = group_closure([bad])
    with pytest.raises(RelationViolated):
        normalize_coefficients(g, representative("W1(173)").class_id)


def test_helpers():
    from fractions import Fraction
    facs = factor_rationals([Fraction(12, 5), Fraction(10403), Fraction(1, 101)])
    assert facs[0] == {2: 2, 3: 1, 5: -1}
    assert facs[1] == {101: 1, 103: 1} and facs[2] == {101: -1}
    delta, r = integral_reduction([[2, 0], [0, 1]], [5, 3])
    assert r == [1, 0] and delta == [2, 3]
    res, _ = canonical_torsion(((1,), (1,)), (1, 3), 4, False)
    assert res == (0, 2)
