"""Print k_delta across sizes for a few generated families, with the trend verdict.

    python3 scripts/probe_contrast.py [--max-size 16]
"""
import argparse

from dichotomy.probes import FamilyDescriptor, dichotomy_probe
from dichotomy.typelab import parse_delta

FAMILIES = (("successor", 2), ("balanced-equivalence", "sqrt"), ("linear-order", 2), ("matching", 2),
            ("random-graph(1/2)", 2))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-size", type=int, default=16)
    ap.add_argument("--delta", default="r(x,y) :: x ; y")
    ns = ap.parse_args()
    d = parse_delta(ns.delta)
    sizes = [s for s in (4, 6, 9, 12, 16, 20, 25) if s <= ns.max_size]
    for gen, lam in FAMILIES:
        if gen == "balanced-equivalence":
            sz = [s for s in (4, 9, 16, 25) if s <= ns.max_size]
        else:
            sz = sizes
        rep = dichotomy_probe(FamilyDescriptor.generated(gen, sz, lam), d, decompose=False)
        print(f"{gen:22s} sizes={sz} k_delta={rep.k_vector} verdict={rep.verdict}")


if __name__ == "__main__":
    main()
