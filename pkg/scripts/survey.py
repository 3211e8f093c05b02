"""Tabulate gamma, its bounds and structural flags over the corpus as CSV.

    python3 scripts/survey.py [--max-order 200] > survey.csv
"""

import argparse
import csv
import math
import sys

from conjcover.covering import gamma_cp_exact
from conjcover.specs import build_corpus, resolve
from conjcover.structure import structure_report
from conjcover.suites import bounds


def fmt(x):
    return "infinity" if isinstance(x, float) and math.isinf(x) else x


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=200)
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["name", "order", "nilpotent", "qmnn", "gamma", "lower", "rank_plus_one", "log_bound", "witness_base_order"])
    for e in build_corpus(args.max_order):
        G = resolve(e.spec).table
        res = gamma_cp_exact(G)
        rep = structure_report(G)
        b = bounds(G, res)
        base = res.witness.base.order if res.witness else ""
        w.writerow([e.name, G.order, rep.is_nilpotent, rep.is_qmnn, fmt(res.value), fmt(b["lower"]),
                    fmt(b["rank_plus_one"]), fmt(b["upper"]), base])


if __name__ == "__main__":
    main()
