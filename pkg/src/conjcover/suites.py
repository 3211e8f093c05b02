"""Verification suites over the corpus, with deterministic JSON reports."""

from __future__ import annotations

import json
import math
import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import sympy

from conjcover import constructions as C
from conjcover.covering import (
    INFINITE,
    CoveringWitness,
    GammaResult,
    candidate_classes,
    gamma_bruteforce_oracle,
    gamma_cp_exact,
    product_of_subgroups,
    rank,
    rank_factorization,
    verify_witness,
)
from conjcover.perm import GroupTable, format_cycles
from conjcover.specs import GroupSpec, NAMED, build_corpus, resolve
from conjcover.structure import (
    conjugate_subgroup,
    is_nilpotent,
    minimal_normal_subgroups,
    normal_subgroups,
    normalizer,
    point_stabilizer,
    quotient,
    structure_report,
    subgroup_closure,
)

SUITES = (
    "dihedral-formula",
    "rank-bound",
    "lifting",
    "solvable-bounds",
    "xn-lemma",
    "qmnn-structure",
    "oracle-equivalence",
    "table1-m11",
    "wreath-smoke",
    "gamma-range",
)
HEAVY = ("table1-m11", "wreath-smoke")

# Claim strings attached to every record.
CLAIMS = {
    "dihedral": "gamma(D_2p) = ceil(log2 p) + 1 for odd primes p, realised by the explicit dihedral covering",
    "dihedral-general": "conjecture: gamma(D_2n) is infinite iff n is a power of 2, else ceil(log2 p_min) + 1",
    "every-length": "every n >= 3 is gamma of a solvable group, namely D_2p with 2^(n-2) < p < 2^(n-1)",
    "rank-two": "gamma = 3 for the rank-two and alternating-socle examples",
    "solvable-gap": "gamma(agl1(13,4)) = 4 while the solvable lower bound is 3",
    "range": "2 < gamma(G) <= 4 log2 |G| for non-nilpotent G",
    "lifting": "gamma(G) <= gamma(G/N) for every normal N",
    "sandwich": "solvable lower bound <= gamma <= constructed length <= 2n ceil(log2 p)",
    "rank-bound": "constructive covering of length <= r + 1 with B^(k+1) = B^k u (MxM)^(k+1)",
    "x-set": "X_n = [-2^(n-1)+1, 2^(n-1)] minus 0 and {1..k} lies in X_n mod (k+1)",
    "qmnn": "a qmnn group has one minimal normal subgroup and trivial centre and Frattini subgroup",
    "oracle": "exact search agrees with the brute-force oracle",
    "m11": "M11 point stabiliser has rank 2 and yields a 3-factor covering",
    "wreath": "three conjugate normalisers N_G((U_i cap T)^2) multiply to A5 wr C2",
}

BUDGETS = {  # seconds
    "dihedral-formula": 420,
    "rank-bound": 300,
    "lifting": 300,
    "solvable-bounds": 120,
    "xn-lemma": 60,
    "qmnn-structure": 120,
    "oracle-equivalence": 600,
    "table1-m11": 600,
    "wreath-smoke": 900,
    "gamma-range": 300,
}


class SuiteError(ValueError):
    pass


@dataclass
class SuiteConfig:
    max_order: int = 200
    cap: int | None = None
    threads: int = 1
    domination_pruning: bool = False
    timings: bool = False
    oracle_maxlen: int = 8


def jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "infinity"
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


@dataclass
class CheckRecord:
    criterion: int
    claim: str
    inputs: dict
    expected: object
    observed: object
    passed: bool
    runtime: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "criterion": self.criterion,
            "claim": self.claim,
            "inputs": jsonable(self.inputs),
            "expected": jsonable(self.expected),
            "observed": jsonable(self.observed),
            "passed": self.passed,
        }
        if timings:
            d["runtime"] = round(self.runtime, 4)
        return d


@dataclass
class SuiteReport:
    name: str
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def summary(self) -> dict:
        passed = sum(r.passed for r in self.records)
        return {"total": len(self.records), "passed": passed, "failed": len(self.records) - passed}

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "suite": self.name,
            "budget_seconds": BUDGETS[self.name],
            "summary": self.summary,
            "records": [r.to_dict(timings) for r in self.records],
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"suite {self.name}: {self.summary['passed']}/{self.summary['total']} passed"]
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            inputs = ", ".join(f"{k}={v}" for k, v in jsonable(r.inputs).items())
            line = f"  [{status}] ({r.criterion}) {inputs}: expected {jsonable(r.expected)}, observed {jsonable(r.observed)}"
            if not r.passed:
                line += f"  <- violates: {r.claim}"
            lines.append(line)
        return "\n".join(lines)


# -- cached γ --------------------------------------------------------------------

_GAMMA_CACHE: dict[tuple, GammaResult] = {}


def gamma_of(G: GroupTable, config: SuiteConfig, key: str | None = None) -> GammaResult:
    """γ_cp, memoised per spec key when one is given."""
    if key is None:
        return gamma_cp_exact(G, threads=config.threads, domination_pruning=config.domination_pruning)
    ck = (key, config.cap, config.domination_pruning)
    if ck not in _GAMMA_CACHE:
        _GAMMA_CACHE[ck] = gamma_of(G, config)
    return _GAMMA_CACHE[ck]


def _table(spec: GroupSpec | str, config: SuiteConfig):
    return resolve(spec, config.cap)


def _gamma_spec(spec: GroupSpec | str, config: SuiteConfig) -> GammaResult:
    if isinstance(spec, str):
        spec = GroupSpec.parse(spec)
    return gamma_of(_table(spec, config).table, config, spec.key())


def bounds(G: GroupTable, result: GammaResult | None = None) -> dict:
    """Order-bound lower limit, the log bound, and the best rank + 1."""
    if is_nilpotent(G):
        return {"lower": INFINITE, "upper": INFINITE, "rank_plus_one": INFINITE}
    classes = candidate_classes(G)
    lower = 3
    best_order = max(cls[0].order for cls in classes)
    L = 2
    while best_order**L < G.order:
        L += 1
    lower = max(lower, L)
    if result is not None and result.per_class:
        rp1 = min(c.rank + 1 for c in result.per_class)
    else:
        rp1 = min(rank(G, cls[0])[0] + 1 for cls in classes)
    return {"lower": lower, "upper": round(4 * math.log2(G.order), 6), "rank_plus_one": rp1}


def witness_json(G: GroupTable, w: CoveringWitness | None) -> dict | None:
    if w is None:
        return None
    return {
        "base_generators": [format_cycles(G.elements[g]) for g in w.base.generator_indices],
        "conjugators": [format_cycles(G.elements[g]) for g in w.conjugators],
    }


def gamma_report(G: GroupTable, result: GammaResult) -> dict:
    return jsonable(
        {"gamma": result.value, "witness": witness_json(G, result.witness), "bounds": bounds(G, result)}
    )


# -- suites ----------------------------------------------------------------------


class _Recorder:
    def __init__(self, report: SuiteReport):
        self.report = report

    def check(self, criterion: int, claim: str, inputs: dict, fn: Callable[[], tuple[object, object, bool]]):
        t = time.perf_counter()
        try:
            expected, observed, passed = fn()
        except Exception as exc:  # a crash is a failed check, named in the report
            expected, observed, passed = None, f"error: {type(exc).__name__}: {exc}", False
        self.report.records.append(
            CheckRecord(criterion, CLAIMS[claim], inputs, expected, observed, bool(passed), time.perf_counter() - t)
        )


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


DIHEDRAL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


def _suite_dihedral(rec: _Recorder, config: SuiteConfig) -> None:
    for p in DIHEDRAL_PRIMES:
        expected = _ceil_log2(p) + 1

        def one(p=p, expected=expected):
            g = _gamma_spec(GroupSpec("dihedral", n=p), config).value
            w = C.dihedral_factorization(p)
            rep = verify_witness(w.base.parent, w)
            chain = C.dihedral_chain(w)
            observed = {"gamma": g, "construction_length": w.length, "construction_valid": rep.valid}
            ok = g == expected and w.length == expected and rep.valid and all(vars(chain).values())
            return {"gamma": expected, "construction_length": expected, "construction_valid": True}, observed, ok

        rec.check(1, "dihedral", {"p": p}, one)
    for n in range(3, 33):

        def one(n=n):
            if n & (n - 1) == 0:
                expected = INFINITE
            else:
                p_min = min(q for q in sympy.primefactors(n) if q > 2)
                expected = _ceil_log2(p_min) + 1
            g = _gamma_spec(GroupSpec("dihedral", n=n), config).value
            return expected, g, g == expected

        rec.check(2, "dihedral-general", {"n": n}, one)
    for n in range(3, 9):

        def one(n=n):
            p = C.bertrand_prime(n)
            g = _gamma_spec(GroupSpec("dihedral", n=p), config).value
            return {"p": p, "gamma": n}, {"p": p, "gamma": g}, g == n and 2 ** (n - 2) < p < 2 ** (n - 1)

        rec.check(5, "every-length", {"n": n}, one)


RANK_TWO = (
    ("Sym3", GroupSpec("symmetric", n=3)),
    ("A4", "a4"),
    ("Sym4", GroupSpec("symmetric", n=4)),
    ("Alt5", GroupSpec("alternating", n=5)),
    ("Sym5", GroupSpec("symmetric", n=5)),
    ("A6deg10", "a6deg10"),
    ("AGL1(5,4)", GroupSpec("agl1", p=5, k=4)),
    ("AGL1(7,6)", GroupSpec("agl1", p=7, k=6)),
    ("AGL1(11,10)", GroupSpec("agl1", p=11, k=10)),
)


def _nonnilpotent(config: SuiteConfig, max_order: int) -> Iterator:
    for e in build_corpus(min(config.max_order, max_order)):
        G = _table(e.spec, config).table
        if not is_nilpotent(G):
            yield e, G


def _suite_gamma_range(rec: _Recorder, config: SuiteConfig) -> None:
    for name, spec in RANK_TWO:

        def one(spec=spec):
            g = _gamma_spec(spec, config).value
            return 3, g, g == 3

        rec.check(3, "rank-two", {"group": name}, one)
    for e, G in _nonnilpotent(config, 200):

        def one(e=e, G=G):
            g = _gamma_spec(e.spec, config).value
            upper = 4 * math.log2(G.order)
            return f"2 < gamma <= {upper:.4f}", g, 2 < g <= upper

        rec.check(6, "range", {"group": e.name, "order": e.order}, one)


def _suite_solvable(rec: _Recorder, config: SuiteConfig) -> None:
    def gap():
        g = _gamma_spec(GroupSpec("agl1", p=13, k=4), config).value
        lower, _ = C.solvable_bounds(13, 1, 4)
        return {"gamma": 4, "lower": 3}, {"gamma": g, "lower": lower}, g == 4 and lower == 3

    rec.check(4, "solvable-gap", {"p": 13, "k": 4}, gap)
    for e in build_corpus(config.max_order):
        if e.spec.kind != "agl1":
            continue

        def one(e=e):
            frame = _table(e.spec, config).frame
            p, n, k = frame.p, frame.n, frame.k
            lower, _ = C.solvable_bounds(p, n, k)
            g = _gamma_spec(e.spec, config).value
            w = C.solvable_covering(frame)
            valid = verify_witness(frame.G, w).valid
            cap = 2 * n * _ceil_log2(p)
            frame_ok = all(frame.check().values()) and C.frame_maximals_split(frame)
            observed = {"lower": lower, "gamma": g, "construction_length": w.length, "limit": cap}
            observed.update(construction_valid=valid, frame_invariants=frame_ok)
            ok = lower <= g <= w.length <= cap and valid and frame_ok
            return "lower <= gamma <= length <= limit; witness valid", observed, ok

        rec.check(8, "sandwich", {"group": e.name}, one)


def _suite_rank_bound(rec: _Recorder, config: SuiteConfig) -> None:
    for e, G in _nonnilpotent(config, 200):
        for i, cls in enumerate(candidate_classes(G)):

            def one(G=G, M=cls[0]):
                rf = rank_factorization(G, M)
                ok = rf.report.valid and rf.witness.length <= rf.r + 1 and all(rf.star_holds)
                observed = {"length": rf.witness.length, "valid": rf.report.valid, "star": all(rf.star_holds)}
                return {"length_at_most": rf.r + 1, "valid": True, "star": True}, observed, ok

            rec.check(9, "rank-bound", {"group": e.name, "class": i, "subgroup_order": cls[0].order}, one)


def _suite_lifting(rec: _Recorder, config: SuiteConfig) -> None:
    for e in build_corpus(min(config.max_order, 100)):
        G = _table(e.spec, config).table
        for N in normal_subgroups(G):
            if N.is_trivial() or not N.is_proper():
                continue

            def one(e=e, G=G, N=N):
                g = _gamma_spec(e.spec, config).value
                Q, _ = quotient(G, N)
                gq = gamma_of(Q, config)
                return f"gamma(G) <= gamma(G/N) = {jsonable(gq.value)}", g, g <= gq.value

            rec.check(7, "lifting", {"group": e.name, "normal_order": N.order}, one)


def _suite_xn(rec: _Recorder, config: SuiteConfig) -> None:
    for n in range(1, 17):

        def one(n=n):
            xs = C.x_set(n).values
            oracle = C.x_set_by_subsets(n)
            return {"size": 2**n - 1, "matches_oracle": True}, {"size": len(xs), "matches_oracle": xs == oracle}, (
                xs == oracle and len(xs) == 2**n - 1
            )

        rec.check(10, "x-set", {"n": n}, one)
    for n in range(1, 11):

        def one(n=n):
            bad = [k for k in range(1, 2**n) if not C.x_set_mod_coverage(n, k)]
            return [], bad, not bad

        rec.check(10, "x-set", {"n": n, "mod": "all k"}, one)


def _suite_qmnn(rec: _Recorder, config: SuiteConfig) -> None:
    for e in build_corpus(config.max_order):
        G = _table(e.spec, config).table

        def one(G=G):
            r = structure_report(G)
            if not r.is_qmnn:
                return "not qmnn", "not qmnn", True
            observed = {
                "minimal_normals": len(r.minimal_normals),
                "center": r.center.order,
                "frattini": r.frattini.order,
            }
            return {"minimal_normals": 1, "center": 1, "frattini": 1}, observed, observed == {
                "minimal_normals": 1,
                "center": 1,
                "frattini": 1,
            }

        rec.check(11, "qmnn", {"group": e.name}, one)

    def d12():
        r = structure_report(_table(GroupSpec("dihedral", n=6), config).table)
        return False, r.is_qmnn, not r.is_qmnn

    rec.check(11, "qmnn", {"group": "D12", "role": "non-example"}, d12)


def _suite_oracle(rec: _Recorder, config: SuiteConfig) -> None:
    for e, G in _nonnilpotent(config, 24):

        def one(e=e, G=G):
            g = _gamma_spec(e.spec, config).value
            o = gamma_bruteforce_oracle(G, config.oracle_maxlen).value
            return o, g, g == o

        rec.check(12, "oracle", {"group": e.name}, one)


def _suite_m11(rec: _Recorder, config: SuiteConfig) -> None:
    def one():
        G = _table("m11", config).table
        M = point_stabilizer(G, 0)
        r, _ = rank(G, M)
        rf = rank_factorization(G, M)
        observed = {"order": G.order, "rank": r, "length": rf.witness.length, "product": rf.report.product_size}
        expected = {"order": 7920, "rank": 2, "length": 3, "product": 7920}
        return expected, observed, observed == expected and rf.report.valid

    rec.check(13, "m11", {"group": "M11", "subgroup": "stabilizer:1"}, one)


def wreath_normalizers(config: SuiteConfig | None = None):
    """The three normalisers of diagonal ``(A4^{t_i})²`` in A5 wr C2, with A5's 3-factor covering."""
    config = config or SuiteConfig()
    A5 = C.alternating(5)
    U = point_stabilizer(A5, 4)
    rf = rank_factorization(A5, U)
    W = _table(NAMED["a5wrc2"](), config).table
    normalizers, conjugators = [], []
    for c in rf.witness.conjugators:
        Ui = conjugate_subgroup(A5, U, c)
        gens = [C.embed_in_block(W, A5, int(u), b) for u in Ui.generator_indices for b in (0, 1)]
        normalizers.append(normalizer(W, subgroup_closure(W, gens)))
        conjugators.append(W.mul(C.embed_in_block(W, A5, c, 0), C.embed_in_block(W, A5, c, 1)))
    return W, normalizers, conjugators


def _suite_wreath(rec: _Recorder, config: SuiteConfig) -> None:
    def one():
        W, Ns, cs = wreath_normalizers(config)
        proper = all(N.is_proper() for N in Ns)
        conj = all(conjugate_subgroup(W, Ns[0], int(W.mul(W.inv[cs[0]], c))) == N for c, N in zip(cs, Ns))
        size = product_of_subgroups(W, Ns).cardinality
        mins = [N.order for N in minimal_normal_subgroups(W)]
        observed = {"order": W.order, "factors": len(Ns), "proper": proper, "conjugate": conj, "product": size}
        observed["minimal_normals"] = mins
        expected = {"order": 7200, "factors": 3, "proper": True, "conjugate": True, "product": 7200}
        expected["minimal_normals"] = [3600]
        return expected, observed, observed == expected

    rec.check(14, "wreath", {"group": "A5wrC2", "U": "A4"}, one)


_RUNNERS = {
    "dihedral-formula": _suite_dihedral,
    "rank-bound": _suite_rank_bound,
    "lifting": _suite_lifting,
    "solvable-bounds": _suite_solvable,
    "xn-lemma": _suite_xn,
    "qmnn-structure": _suite_qmnn,
    "oracle-equivalence": _suite_oracle,
    "table1-m11": _suite_m11,
    "wreath-smoke": _suite_wreath,
    "gamma-range": _suite_gamma_range,
}


def run_suite(name: str, config: SuiteConfig | None = None) -> SuiteReport:
    if name not in _RUNNERS:
        raise SuiteError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    report = SuiteReport(name)
    _RUNNERS[name](_Recorder(report), config or SuiteConfig())
    return report
