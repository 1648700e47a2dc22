"""Run configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

SEED_ENV = "MONOFIX_SEED"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass
class PipelineConfig:
    seed: int = 0
    strict: bool = False  # no square roots are adjoined beyond those in the input
    verify: bool = True
    cache: bool = True  # reuse recipes across inputs with the same normalized coefficients


@dataclass
class SweepConfig:
    classes: list | None = None  # labels; None means all 36
    trials: int = 25
    seed: int = 0
    strict: bool = False
    workers: int = 1
    height: int = 9  # numerator/denominator bound of random coefficient parameters
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
