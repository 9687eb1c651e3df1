"""Run the acceptance suite and write the JSON report.

    python3 scripts/run_acceptance.py [--seed 0] [--out report.json] [--no-determinism]
"""
import argparse
import sys

from dichotomy.acceptance import report_json, run_acceptance


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    ap.add_argument("--no-determinism", action="store_true", help="skip the second run (criterion 11)")
    ns = ap.parse_args()
    res = run_acceptance(ns.seed, echo=print, determinism=not ns.no_determinism)
    text = report_json(res, ns.seed) + "\n"
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as f:
            f.write(text)
    print(f"{sum(r.passed for r in res)}/{len(res)} criteria passed")
    return 0 if all(r.passed for r in res) else 1


if __name__ == "__main__":
    sys.exit(main())
