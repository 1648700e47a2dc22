"""Run the randomized sweep and print a one-line summary per class.

    python scripts/run_sweep.py --trials 25 --seed 0 --out sweep.json
"""

import argparse
import time

from monofix.cli import dump_document, sweep
from monofix.config import SweepConfig


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classes", help="comma-separated labels")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--strict-field", action="store_true")
    p.add_argument("--out", help="also write the summary document here")
    args = p.parse_args()
    classes = args.classes.split(",") if args.classes else None
    t0 = time.perf_counter()
    doc = sweep(SweepConfig(classes=classes, trials=args.trials, seed=args.seed, strict=args.strict_field,
                            workers=args.workers))
    for label, c in doc["classes"].items():
        print(f"{label:10s} {c['passes']:3d}/{c['trials']:<3d} {c['verdicts']}")
    tot = doc["total"]
    print(f"total {tot['passes']}/{tot['trials']} in {time.perf_counter() - t0:.1f}s")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dump_document(doc))


if __name__ == "__main__":
    main()
