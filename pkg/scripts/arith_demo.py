"""Search for the arithmetic interpretation on n x n grids and stress the verifier.

    python3 scripts/arith_demo.py [--max-n 4]
"""
import argparse
import time

from dichotomy.logic import to_text
from dichotomy.probes import grid_base, mutate_witness, search_arithmetic_interpretation, \
    verify_arithmetic_interpretation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--show-formulas", action="store_true")
    ns = ap.parse_args()
    for n in range(2, ns.max_n + 1):
        t = time.perf_counter()
        res = search_arithmetic_interpretation(grid_base(n), n)
        dt = time.perf_counter() - t
        w = res.witness
        if w is None:
            print(f"n={n}: no witness after {res.candidates} candidates (exhausted={res.exhausted})")
            continue
        rejected = sum(not verify_arithmetic_interpretation(m) for _, m in mutate_witness(w))
        print(f"n={n}: witness after {res.candidates} candidates in {dt:.2f}s, params={w.parameters}, "
              f"depth={w.depth}, mutants rejected {rejected}/20")
        if ns.show_formulas:
            for k, f in sorted(w.formulas.items()):
                print(f"    {k}: {to_text(f)}")


if __name__ == "__main__":
    main()
