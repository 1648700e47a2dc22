import random

import pytest

from monofix import intmat
from monofix.case_pipeline import identify_class
from monofix.classes import GROUP_ORDERS, class_labels, matrix_closure, representative, representatives
from monofix.classify import conjugate_matrices, identify_matrices
from monofix.coeff_field import TowerField
from monofix.errors import ClassNotIdentified
from monofix.monomial_action import MonomialAutomorphism, group_closure

F = TowerField()


def test_thirty_six_classes():
    labels = class_labels()
    assert len(labels) == 36 == len(set(labels))
    counts = {}
    for lab in labels:
        fam = lab.split("(")[1]
        counts[fam] = counts.get(fam, 0) + 1
    assert counts == {"173)": 5, "174)": 15, "187)": 14, "194)": 1, "195)": 1}


@pytest.mark.parametrize("rep", representatives(), ids=lambda r: r.class_id.label)
def test_representative_orders(rep):
    group = matrix_closure(list(rep.generator_matrices))
    assert len(group) == rep.class_id.order == GROUP_ORDERS[rep.class_id.abstract_group]
    assert identify_matrices(rep.generator_matrices)[0] == rep.class_id


def test_minus_identity_and_diagonal():
    minus = MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]), (F.one(),) * 3)
    assert identify_class(group_closure([minus]))[0].label == "W5(173)"
    diag = MonomialAutomorphism(intmat.mat([[1, 0, 0], [0, -1, 0], [0, 0, -1]]), (F.one(),) * 3)
    assert identify_class(group_closure([diag]))[0].label == "W1(173)"


def test_conjugated_dihedral_representative():
    rng = random.Random(187)
    rep = representative("W9(187)")
    target = set(matrix_closure(list(rep.generator_matrices)))
    for _ in range(5):
        while True:
            p = intmat.mat([[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)])
            if abs(intmat.det(p)) == 1:
                break
        mats = conjugate_matrices(rep.generator_matrices, intmat.inverse_unimodular(p))
        cid, conj = identify_matrices(mats)
        assert cid.label == "W9(187)"
        assert set(conjugate_matrices(matrix_closure(mats), conj)) == target


def test_unknown_group():
    three = intmat.from_columns([(0, 1, 0), (0, 0, 1), (1, 0, 0)])
    with pytest.raises(ClassNotIdentified):
        identify_matrices([three])
