"""Run every verification suite and write one JSON report per suite.

    python3 scripts/run_suites.py --out reports/ [--max-order 200] [--skip-heavy]
"""

import argparse
import pathlib
import sys
import time

from conjcover.suites import HEAVY, SUITES, SuiteConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("reports"))
    ap.add_argument("--max-order", type=int, default=200)
    ap.add_argument("--skip-heavy", action="store_true")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    config = SuiteConfig(max_order=args.max_order, threads=args.threads)
    all_ok = True
    for name in SUITES:
        if args.skip_heavy and name in HEAVY:
            continue
        t = time.perf_counter()
        rep = run_suite(name, config)
        (args.out / f"{name}.json").write_text(rep.to_json() + "\n")
        s = rep.summary
        print(f"{name:<20} {s['passed']:>4}/{s['total']:<4} {'ok' if rep.ok else 'FAILED':<7} {time.perf_counter() - t:6.2f}s")
        all_ok &= rep.ok
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
