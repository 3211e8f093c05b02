"""Command-line entry point: ``conjcover <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from conjcover import constructions as C
from conjcover.covering import (
    LimitExceeded,
    candidate_classes,
    gamma_bruteforce_oracle,
    gamma_cp_exact,
    rank,
    rank_factorization,
    verify_witness,
)
from conjcover.perm import CycleSyntaxError, GroupTooLarge, format_cycles, parse_cycles
from conjcover.specs import GroupSpec, SpecError, build_corpus, resolve
from conjcover.structure import (
    LatticeTooLarge,
    is_maximal,
    is_nilpotent,
    is_normal,
    point_stabilizer,
    subgroup_closure,
    structure_report,
)
from conjcover.suites import (
    HEAVY,
    SUITES,
    SuiteConfig,
    SuiteError,
    bounds,
    gamma_report,
    jsonable,
    run_suite,
    witness_json,
)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--cap", type=int, default=None, help="group order cap (default: CONJCOVER_MAX_ORDER or 10000)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--domination-pruning", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="conjcover", description="Coverings of finite groups by products of conjugate subgroups.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma", parents=[common], help="exact minimal covering length")
    g.add_argument("spec")
    g.add_argument("--limit", type=int, default=None, help="per-class length limit (default r + 1)")
    g.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")

    r = sub.add_parser("rank", parents=[common], help="double-coset rank of a subgroup")
    r.add_argument("spec")
    r.add_argument("--subgroup", required=True, help="'(1 2);(1 3)' generators or 'stabilizer:<point>'")

    f = sub.add_parser("factor", parents=[common], help="produce and verify a covering")
    f.add_argument("spec")
    f.add_argument("--method", choices=("bfs", "rank", "dihedral", "solvable"), default="bfs")
    f.add_argument("--subgroup", default=None, help="subgroup for --method rank")

    x = sub.add_parser("xset", parents=[common], help="the alternating power-sum set X_n")
    x.add_argument("n", type=int)
    x.add_argument("--mod", type=int, default=None, dest="mod")

    s = sub.add_parser("suite", parents=[common], help="run a verification suite")
    s.add_argument("name", choices=SUITES + ("all",))
    s.add_argument("--max-order", type=int, default=200)
    s.add_argument("--heavy", action="store_true", help="include the large groups when name is 'all'")
    s.add_argument("--timings", action="store_true", help="include runtimes (reports stop being byte-stable)")

    v = sub.add_parser("survey", parents=[common], help="gamma and structure across the corpus")
    v.add_argument("--max-order", type=int, default=200)
    return parser


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(jsonable(payload), indent=2, ensure_ascii=False))
    else:
        print(text)


def _subgroup(G, text: str):
    text = text.strip()
    if text.startswith("stabilizer:"):
        point = int(text.split(":", 1)[1])
        return point_stabilizer(G, point - 1)
    gens = [G.index_of(parse_cycles(t, G.degree).images) for t in text.split(";") if t.strip()]
    return subgroup_closure(G, gens)


def _fmt(x) -> str:
    return "infinity" if isinstance(x, float) and math.isinf(x) else str(x)


def cmd_gamma(args) -> int:
    G = resolve(args.spec, args.cap).table
    res = gamma_cp_exact(G, limit=args.limit, threads=args.threads, domination_pruning=args.domination_pruning)
    payload = gamma_report(G, res)
    lines = [f"gamma = {_fmt(res.value)}  (order {G.order})"]
    if res.witness is not None:
        w = payload["witness"]
        lines.append(f"base  = <{', '.join(w['base_generators'])}>")
        lines.append(f"conjugators = {', '.join(w['conjugators'])}")
    b = payload["bounds"]
    lines.append(f"bounds: lower {b['lower']}, upper {b['upper']}, rank+1 {b['rank_plus_one']}")
    status = 0
    if args.oracle:
        o = gamma_bruteforce_oracle(G, maxlen=max(8, 0 if math.isinf(res.value) else int(res.value)))
        agree = o.value == res.value
        payload["oracle"] = {"gamma": o.value, "agrees": agree}
        lines.append(f"oracle = {_fmt(o.value)} ({'agrees' if agree else 'DISAGREES'})")
        status = 0 if agree else 1
    _emit(args, payload, "\n".join(lines))
    return status


def cmd_rank(args) -> int:
    G = resolve(args.spec, args.cap).table
    M = _subgroup(G, args.subgroup)
    r, reps = rank(G, M)
    normal, maximal = is_normal(G, M), is_maximal(G, M)
    payload = {
        "order": G.order,
        "subgroup_order": M.order,
        "rank": r,
        "double_coset_representatives": [format_cycles(G.elements[x]) for x in reps],
        "normal": normal,
        "maximal": maximal,
    }
    text = f"|G| = {G.order}, |M| = {M.order}, rank = {r}, normal = {normal}, maximal = {maximal}"
    _emit(args, payload, text)
    return 0


def cmd_factor(args) -> int:
    R = resolve(args.spec, args.cap)
    G = R.table
    extra: dict = {}
    if args.method == "bfs":
        res = gamma_cp_exact(G, threads=args.threads, domination_pruning=args.domination_pruning)
        w = res.witness
    elif args.method == "rank":
        if args.subgroup:
            M = _subgroup(G, args.subgroup)
        else:
            classes = candidate_classes(G)
            if not classes:
                raise SpecError("group has no non-normal maximal subgroup")
            M = classes[0][0]
        rf = rank_factorization(G, M)
        w = rf.witness
        extra = {"rank": rf.r, "k0": rf.k0, "power_sizes": rf.power_sizes, "star_holds": rf.star_holds}
    elif args.method == "dihedral":
        if R.spec.kind != "dihedral":
            raise SpecError("--method dihedral needs a dihedral spec")
        w = C.dihedral_factorization(R.spec.n)
        G = w.base.parent
    else:
        if R.frame is None:
            raise SpecError("--method solvable needs an agl1 spec")
        w = C.solvable_covering(R.frame)
    if w is None:
        _emit(args, {"method": args.method, "witness": None}, "no covering: the group is nilpotent")
        return 1
    rep = verify_witness(G, w)
    payload = {"method": args.method, "length": w.length, "valid": rep.valid, "witness": witness_json(G, w), **extra}
    wj = payload["witness"]
    text = "\n".join(
        [
            f"method {args.method}: length {w.length}, valid = {rep.valid}",
            f"base = <{', '.join(wj['base_generators'])}>",
            f"conjugators = {', '.join(wj['conjugators'])}",
        ]
    )
    _emit(args, payload, text)
    return 0 if rep.valid else 1


def cmd_xset(args) -> int:
    xs = C.x_set(args.n)
    payload: dict = {"n": args.n, "size": len(xs.values), "values": sorted(xs.values)}
    text = f"X_{args.n} = {{{', '.join(map(str, sorted(xs.values)))}}}"
    ok = True
    if args.mod is not None:
        ok = C.x_set_mod_coverage(args.n, args.mod)
        payload["mod"] = {"k": args.mod, "covers": ok}
        text += f"\n1..{args.mod} covered mod {args.mod + 1}: {ok}"
    _emit(args, payload, text)
    return 0 if ok else 1


def cmd_suite(args) -> int:
    config = SuiteConfig(
        max_order=args.max_order,
        cap=args.cap,
        threads=args.threads,
        domination_pruning=args.domination_pruning,
        timings=args.timings,
    )
    names = [n for n in SUITES if args.heavy or n not in HEAVY] if args.name == "all" else [args.name]
    reports = [run_suite(n, config) for n in names]
    if args.format == "json":
        payload = [r.to_dict(args.timings) for r in reports]
        print(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2, ensure_ascii=False))
    else:
        print("\n".join(r.to_text() for r in reports))
    return 0 if all(r.ok for r in reports) else 1


def cmd_survey(args) -> int:
    rows = []
    for e in build_corpus(args.max_order):
        G = resolve(e.spec, args.cap).table
        row = {"name": e.name, "order": G.order, "nilpotent": is_nilpotent(G)}
        try:
            res = gamma_cp_exact(G, threads=args.threads, domination_pruning=args.domination_pruning)
            row["gamma"] = res.value
            row["bounds"] = bounds(G, res)
            row["qmnn"] = structure_report(G).is_qmnn
        except LatticeTooLarge:
            row["gamma"] = None
        rows.append(row)
    header = f"{'group':<12} {'order':>6} {'nilp':>5} {'qmnn':>5} {'gamma':>9} {'lower':>9} {'rank+1':>9}"
    lines = [header, "-" * len(header)]
    for row in rows:
        b = row.get("bounds", {})
        lines.append(
            f"{row['name']:<12} {row['order']:>6} {str(row['nilpotent'])[0]:>5} {str(row.get('qmnn', '-'))[0]:>5} "
            f"{_fmt(row['gamma']):>9} {_fmt(b.get('lower', '-')):>9} {_fmt(b.get('rank_plus_one', '-')):>9}"
        )
    _emit(args, {"groups": rows}, "\n".join(lines))
    return 0


COMMANDS = {
    "gamma": cmd_gamma,
    "rank": cmd_rank,
    "factor": cmd_factor,
    "xset": cmd_xset,
    "suite": cmd_suite,
    "survey": cmd_survey,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SpecError, CycleSyntaxError, GroupTooLarge, LatticeTooLarge, LimitExceeded, SuiteError, ValueError) as exc:
        print(f"conjcover: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
