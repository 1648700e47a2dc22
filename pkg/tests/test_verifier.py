import dataclasses
import random

import pytest

from monofix import intmat
from monofix.case_pipeline import RationalityReport, construct_generators
from monofix.certificate import CertificateStep
from monofix.cocycles import draw_coefficients
from monofix.coeff_field import TowerField
from monofix.config import PipelineConfig
from monofix.errors import StepInvalid
from monofix.monomial_action import MonomialAutomorphism, group_closure
from monofix.ratfunc import Ring
from monofix.verifier import check_invariance, check_transcendence, validate_certificate, verify_report

F = TowerField()
R = Ring(F, 3)
x1, x2, x3 = R.gens()
INV = MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]), (F.one(),) * 3)


def report(gens, steps=(), verdict="Rational"):
    return RationalityReport(list(gens), list(steps), verdict, None)


def test_invariance_examples():
    g = group_closure([INV])
    assert check_invariance(report([x1 + 1 / x1, x2 + 1 / x2, x3 + 1 / x3]), g)
    assert not check_invariance(report([x1, x2 + 1 / x2, x3 + 1 / x3]), g)
    assert check_invariance(report(R.gens()), group_closure([], 3, F))


def test_transcendence_examples():
    assert check_transcendence(report(R.gens()))
    assert not check_transcendence(report([x1, x1 * x1, x2]))
    assert not check_transcendence(report([x1, x2]))
    w = x1 * x2 - 1 / (x1 * x2)
    assert check_transcendence(report([(x1 - 1 / x1) / w, (x2 - 1 / x2) / w, x3]))


@pytest.fixture(scope="module")
def real_report():
    gens = draw_coefficients("W3(187)", random.Random(11), TowerField())
    return construct_generators(gens, PipelineConfig(seed=1))


def test_real_report_passes(real_report):
    assert real_report.verification == {"invariance": True, "transcendence": True, "certificate": True}


def test_accounting_violation(real_report):
    r = dataclasses.replace(real_report, certificate=real_report.certificate[:-1])
    with pytest.raises(StepInvalid) as err:
        validate_certificate(r, r.group)
    assert "degree product" in err.value.reason


def test_unknown_and_tampered_steps(real_report):
    r = real_report
    last = r.certificate[-1]
    tampered = dataclasses.replace(last, degree_factor=last.degree_factor * 2)
    with pytest.raises(StepInvalid):
        validate_certificate(dataclasses.replace(r, certificate=r.certificate[:-1] + [tampered]), r.group)


def test_zero_coefficient_in_involution_step():
    field = TowerField(adjoin_i=False)
    g = MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]),
                             tuple(field.rational(v) for v in (2, 3, 6)))
    r = construct_generators([g], PipelineConfig(strict=True))
    idx = next(k for k, s in enumerate(r.certificate) if s.kind == "Thm2_3")
    step = r.certificate[idx]
    zero = Ring(field, step.payload["nvars"]).const(0)
    bad = dataclasses.replace(step, payload=dict(step.payload, a=zero))
    with pytest.raises(StepInvalid) as err:
        validate_certificate(dataclasses.replace(r, certificate=[bad]), r.group)
    assert err.value.index == 0


def test_verify_report_collects_reasons():
    g = group_closure([INV])
    r = report([x1, x2, x3], [CertificateStep("Normalize", None, 1, payload={})])
    out = verify_report(r, g)
    assert out == {"invariance": False, "transcendence": True, "certificate": False}
    assert r.notes and "Normalize" in r.notes[0]


def test_obstruction_verdict_skips_generator_checks():
    field = TowerField(adjoin_i=False)
    g = MonomialAutomorphism(intmat.mat([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]),
                             tuple(field.rational(v) for v in (2, 3, 5)))
    r = construct_generators([g], PipelineConfig(strict=True))
    assert r.verdict == "NotRetractRational"
    assert r.verification == {"certificate": True}
    flipped = dataclasses.replace(r.certificate[-1], payload=dict(r.certificate[-1].payload, degree=4))
    with pytest.raises(StepInvalid):
        validate_certificate(dataclasses.replace(r, certificate=r.certificate[:-1] + [flipped]), r.group)
