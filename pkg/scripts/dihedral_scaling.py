"""Time the exact search on D_2p for growing primes and compare with ceil(log2 p) + 1.

    python3 scripts/dihedral_scaling.py [--max-prime 200]
"""

import argparse
import math
import time

import sympy

from conjcover.constructions import dihedral
from conjcover.covering import gamma_cp_exact


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-prime", type=int, default=200)
    ap.add_argument("--domination-pruning", action="store_true")
    args = ap.parse_args()

    print(f"{'p':>5} {'gamma':>6} {'formula':>8} {'seconds':>8}")
    for p in sympy.primerange(3, args.max_prime + 1):
        t = time.perf_counter()
        g = gamma_cp_exact(dihedral(p), domination_pruning=args.domination_pruning).value
        dt = time.perf_counter() - t
        f = math.ceil(math.log2(p)) + 1
        print(f"{p:>5} {g:>6} {f:>8} {dt:8.3f}" + ("" if g == f else "  MISMATCH"))


if __name__ == "__main__":
    main()
