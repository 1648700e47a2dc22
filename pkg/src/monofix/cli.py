"""Command-line front end: single reports, the class list, and randomized sweeps."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .case_pipeline import FAILED, RATIONAL, RationalityReport, construct_generators
from .classes import class_labels, representatives
from .cocycles import draw_coefficients
from .coeff_field import FieldElement, TowerField
from .config import PipelineConfig, SweepConfig, default_seed
from .errors import MonofixError, ParseError
from .monomial_action import action_spec, group_closure, parse_action_spec
from .ratfunc import RationalFunction, SubstitutionMap, format_rf

SCHEMA = 1
NAMES = ("x1", "x2", "x3")


# ---------------------------------------------------------------------------
# serialization


def _jsonable(v):
    if isinstance(v, RationalFunction):
        return format_rf(v, _names(v.nvars))
    if isinstance(v, FieldElement):
        return str(v)
    if isinstance(v, SubstitutionMap):
        return [_jsonable(f) for f in v.images]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    return str(v)


def _names(n):
    return list(NAMES) if n == 3 else [f"x{k + 1}" for k in range(n)]


def step_document(step) -> dict:
    return {
        "kind": step.kind,
        "degree_factor": step.degree_factor,
        "substitution": _jsonable(step.substitution),
        "hypotheses_checked": [[name, ok] for name, ok in step.hypotheses_checked],
        "payload": _jsonable(step.payload),
        "note": step.note,
    }


def report_document(r: RationalityReport, *, timing: bool = True) -> dict:
    doc = {
        "schema": SCHEMA,
        "class_id": None if r.class_id is None else {"label": r.class_id.label,
                                                     "abstract_group": r.class_id.abstract_group},
        "verdict": r.verdict,
        "generators": [format_rf(f, NAMES) for f in r.generators],
        "certificate": [step_document(s) for s in r.certificate],
        "verification": dict(r.verification),
        "seed": r.seed,
        "notes": list(r.notes),
        "generation": "certified through the degree chain; [K(x):K(generators)] is not computed directly",
    }
    if r.group is not None:
        doc["input"] = action_spec(r.group.generators)
    if timing:
        doc["timing"] = dict(r.timing)
    return doc


def error_document(exc: MonofixError) -> dict:
    cause = getattr(exc, "cause", exc)
    doc = {"schema": SCHEMA, "verdict": FAILED, "error": type(cause).__name__, "message": str(exc)}
    for attr in ("label", "step", "line", "col"):
        if hasattr(exc, attr):
            doc[attr] = getattr(exc, attr)
    return doc


def exit_code(verdict: str | None, error: BaseException | None = None) -> int:
    """0 for a decided verdict with passing checks, 3 for Failed, else the error's code."""
    if error is not None:
        return getattr(error, "code", 2)
    return 3 if verdict == FAILED else 0


# ---------------------------------------------------------------------------
# single input


def run(text: str, config: PipelineConfig) -> tuple[dict, int]:
    field = TowerField(adjoin_i=not config.strict)
    try:
        gens = parse_action_spec(text, field)
        if config.strict:
            field.frozen = True
        report = construct_generators(gens, config)
    except MonofixError as exc:
        return error_document(exc), exit_code(None, exc)
    return report_document(report), exit_code(report.verdict)


def list_classes() -> list:
    return [{"label": r.class_id.label, "abstract_group": r.class_id.abstract_group, "order": r.class_id.order}
            for r in representatives()]


# ---------------------------------------------------------------------------
# sweep


def draw_seed(seed: int, label: str, trial: int) -> str:
    return f"{seed}:{label}:{trial}"


def _trial(label: str, trial: int, config: SweepConfig) -> dict:
    rng = random.Random(draw_seed(config.seed, label, trial))
    field = TowerField()
    gens = draw_coefficients(label, rng, field, height=config.height)
    if config.strict:
        field.frozen = True
    pipe = PipelineConfig(seed=config.seed, strict=config.strict, verify=True, cache=config.pipeline.cache)
    out = {"trial": trial, "draw_seed": draw_seed(config.seed, label, trial)}
    try:
        r = construct_generators(gens, pipe)
    except MonofixError as exc:
        out.update(verdict=FAILED, error=f"{type(getattr(exc, 'cause', exc)).__name__}: {exc}")
        return out
    out["verdict"] = r.verdict
    out["class"] = r.label
    out["ok"] = r.verdict != FAILED and all(r.verification.values()) and r.label == label
    if not out["ok"]:
        out["error"] = "; ".join(r.notes) or f"verdict {r.verdict}, class {r.label}"
    return out


def _class_block(label: str, config: SweepConfig) -> tuple[str, list]:
    return label, [_trial(label, t, config) for t in range(config.trials)]


def sweep(config: SweepConfig) -> dict:
    """Pass/fail counts per class; assembled in sorted order so the output is reproducible."""
    labels = config.classes or class_labels()
    unknown = [x for x in labels if x not in class_labels()]
    if unknown:
        raise ParseError(f"unknown class labels: {', '.join(unknown)}")
    results = {}
    if config.trials > 0:
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                for label, rows in pool.map(_class_block, labels, [config] * len(labels)):
                    results[label] = rows
        else:
            for label in labels:
                results[label] = _class_block(label, config)[1]
    classes = {}
    for label in sorted(results, key=class_labels().index):
        rows = results[label]
        fails = [{"trial": r["trial"], "draw_seed": r["draw_seed"], "error": r.get("error", "")}
                 for r in rows if not r.get("ok")]
        verdicts = {}
        for r in rows:
            verdicts[r["verdict"]] = verdicts.get(r["verdict"], 0) + 1
        classes[label] = {"trials": len(rows), "passes": len(rows) - len(fails), "failures": fails,
                          "verdicts": dict(sorted(verdicts.items()))}
    total = sum(c["trials"] for c in classes.values())
    passes = sum(c["passes"] for c in classes.values())
    return {"schema": SCHEMA, "seed": config.seed, "trials_per_class": config.trials, "strict_field": config.strict,
            "classes": classes, "total": {"trials": total, "passes": passes, "failures": total - passes}}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monofix", description="Generators of fixed fields of 3-dimensional monomial actions.")
    p.add_argument("--input", metavar="FILE", help="action specification (JSON); '-' reads stdin")
    p.add_argument("--seed", type=int, default=None, help="run seed (default: $MONOFIX_SEED or 0)")
    p.add_argument("--list-classes", action="store_true", help="print the 36 class labels")
    p.add_argument("--sweep", action="store_true", help="run random coefficient draws per class")
    p.add_argument("--classes", metavar="CSV", help="restrict the sweep to these labels")
    p.add_argument("--trials", type=int, default=25, help="draws per class in a sweep")
    p.add_argument("--workers", type=int, default=1, help="processes for the sweep")
    p.add_argument("--json-out", metavar="FILE", help="write the JSON document here instead of stdout")
    p.add_argument("--strict-field", action="store_true",
                   help="never adjoin square roots; enables the multiquadratic obstruction verdict")
    return p


def dump_document(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(doc, path):
    text = dump_document(doc)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    seed = args.seed if args.seed is not None else default_seed()
    if args.list_classes:
        _emit(list_classes(), args.json_out)
        return 0
    if args.sweep:
        classes = [c.strip() for c in args.classes.split(",")] if args.classes else None
        cfg = SweepConfig(classes=classes, trials=max(args.trials, 0), seed=seed, strict=args.strict_field,
                          workers=args.workers)
        try:
            doc = sweep(cfg)
        except MonofixError as exc:
            _emit(error_document(exc), args.json_out)
            return exit_code(None, exc)
        _emit(doc, args.json_out)
        return 0
    if not args.input:
        build_parser().print_usage(sys.stderr)
        return 2
    text = sys.stdin.read() if args.input == "-" else open(args.input).read()
    t0 = time.perf_counter()
    doc, code = run(text, PipelineConfig(seed=seed, strict=args.strict_field))
    if "timing" in doc:
        doc["timing"]["total_s"] = round(time.perf_counter() - t0, 4)
    _emit(doc, args.json_out)
    return code


if __name__ == "__main__":
    sys.exit(main())
