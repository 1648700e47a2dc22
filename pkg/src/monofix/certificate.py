"""Certificate steps: what was applied, through which substitution, at what degree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .ratfunc import SubstitutionMap

KINDS = ("Normalize", "Lemma2_8", "Thm2_1", "Thm2_2", "Thm2_3", "Thm2_4",
         "ConicDescent", "VariableChange", "ObstructionCheck")


@dataclass
class CertificateStep:
    """One link in the chain K(x)^G = ... = K(generators).

    `payload` carries the concrete data (actions, claimed identities, group
    elements) that the verifier replays independently of `hypotheses_checked`.
    """

    kind: str
    substitution: SubstitutionMap | None
    degree_factor: int
    hypotheses_checked: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.degree_factor < 1:
            raise ValueError("degree factor must be positive")

    def check(self, name: str, outcome: bool) -> bool:
        self.hypotheses_checked.append((name, bool(outcome)))
        return bool(outcome)

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.hypotheses_checked)


def degree_product(steps) -> int:
    out = 1
    for s in steps:
        out *= s.degree_factor
    return out
