import random

import pytest

from monofix import intmat
from monofix.case_pipeline import (FAILED, NOT_RETRACT, RATIONAL, OBSTRUCTION_BRANCHES, clear_recipe_cache,
                                   construct_generators, obstruction_recipe)
from monofix.cocycles import draw_coefficients
from monofix.coeff_field import TowerField
from monofix.config import PipelineConfig
from monofix.errors import NotTwoGroup, PipelineError, StrictFieldError
from monofix.monomial_action import MonomialAutomorphism, group_closure
from monofix.ratfunc import Ring

MINUS_I = intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]])


def inversion(field, a):
    return MonomialAutomorphism(MINUS_I, tuple(field.rational(v) for v in a))


def test_trivial_group():
    field = TowerField()
    r = construct_generators([MonomialAutomorphism.identity(3, field)])
    assert r.verdict == RATIONAL and r.label == "trivial"
    assert r.generators == Ring(field, 3).gens()
    assert r.certificate == [] and all(r.verification.values())


def test_all_ones_inversion():
    field = TowerField()
    r = construct_generators([inversion(field, (1, 1, 1))])
    assert r.verdict == RATIONAL and r.label == "W5(173)"
    kinds = [s.kind for s in r.certificate]
    assert kinds[-4:] == ["ObstructionCheck", "VariableChange", "Thm2_1", "Thm2_3"]
    assert r.certificate[-3].payload["branch"]["eps"] == list(OBSTRUCTION_BRANCHES[0])
    assert all(r.verification.values())


def test_pure_scalar_group():
    field = TowerField()
    tau = MonomialAutomorphism(intmat.identity(3), (field.rational(-1), field.one(), field.rational(-1)))
    r = construct_generators([tau])
    assert r.verdict == RATIONAL and r.label == "trivial"
    assert [s.kind for s in r.certificate] == ["Lemma2_8"]
    assert all(r.verification.values())


def test_non_faithful_with_scalars():
    field = TowerField()
    sigma = MonomialAutomorphism(intmat.mat([[1, 0, 0], [0, -1, 0], [0, 0, -1]]), (field.one(), field.rational(2),
                                                                                 field.rational(3)))
    tau = MonomialAutomorphism(intmat.identity(3), (field.rational(-1),) * 3)
    r = construct_generators([sigma, tau])
    assert r.verdict == RATIONAL
    assert r.certificate[0].kind == "Lemma2_8"
    assert all(r.verification.values())


@pytest.mark.parametrize("label", ["W1(173)", "W6(174)", "W2(187)", "W14(174)", "W1(194)"])
def test_random_draws(label):
    rng = random.Random(label)
    field = TowerField()
    r = construct_generators(draw_coefficients(label, rng, field), PipelineConfig(seed=3))
    assert r.verdict == RATIONAL and r.label == label
    assert all(r.verification.values()), r.notes
    assert r.seed == 3


def test_conjugated_input():
    # an inversion written in a skewed basis still lands in W5(173)
    field = TowerField()
    p = intmat.mat([[1, 2, 0], [0, 1, 1], [0, 0, 1]])
    pinv = intmat.inverse_unimodular(p)
    m = intmat.matmul(intmat.matmul(p, MINUS_I), pinv)
    r = construct_generators([MonomialAutomorphism(m, (field.one(),) * 3)])
    assert r.label == "W5(173)" and r.verdict == RATIONAL
    assert any(s.kind == "VariableChange" for s in r.certificate)
    assert all(r.verification.values())


def test_cache_and_fresh_runs_agree():
    rng = random.Random(5)
    field = TowerField()
    gens = draw_coefficients("W8(187)", rng, field)
    clear_recipe_cache()
    a = construct_generators(gens)
    b = construct_generators(gens)
    c = construct_generators(gens, PipelineConfig(cache=False))
    assert a.generators == b.generators == c.generators


def test_errors_are_wrapped():
    # strict mode cannot scale by the square roots this class needs
    field = TowerField()
    gens = draw_coefficients("W1(173)", random.Random(1), field)
    field.frozen = True
    with pytest.raises(PipelineError) as err:
        construct_generators(gens, PipelineConfig(strict=True))
    assert isinstance(err.value.cause, StrictFieldError)
    assert err.value.label == "W1(173)" and err.value.code == 2


def test_odd_order_is_rejected():
    field = TowerField()
    three = MonomialAutomorphism(intmat.from_columns([(0, 1, 0), (0, 0, 1), (1, 0, 0)]), (field.one(),) * 3)
    with pytest.raises(PipelineError) as err:
        construct_generators([three])
    assert isinstance(err.value.cause, NotTwoGroup)


@pytest.mark.parametrize("a,verdict", [
    ((2, 3, 6), RATIONAL), ((1, 1, 1), RATIONAL), ((2, 2, 1), RATIONAL), ((3, 5, 15), RATIONAL),
    ((2, 3, 5), NOT_RETRACT), ((-1, 2, 3), NOT_RETRACT),
])
def test_strict_inversions(a, verdict):
    field = TowerField(adjoin_i=False)
    g = inversion(field, a)
    field.frozen = True
    r = construct_generators([g], PipelineConfig(strict=True))
    assert r.verdict == verdict and field.degree == 1
    assert all(r.verification.values())
    if verdict == RATIONAL:
        assert len(r.generators) == 3


def test_obstruction_recipe_generators():
    field = TowerField(adjoin_i=False)
    g = group_closure([inversion(field, (2, 3, 6))])
    verdict, gens, steps = obstruction_recipe(g)
    assert verdict == RATIONAL
    sigma = g.elements[1]
    assert all(sigma(f) == f for f in gens)
    assert FAILED not in (verdict,)
