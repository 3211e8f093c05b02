import json

import pytest

from conjcover.cli import main
from conjcover.perm import CycleSyntaxError, GroupTooLarge
from conjcover.specs import GroupSpec, SpecError, build_corpus, resolve
from conjcover.suites import SUITES, SuiteConfig, SuiteError, run_suite


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "text,order",
    [
        ("dihedral:7", 14),
        ('{"kind": "dihedral", "n": 7}', 14),
        ('{"kind": "perm", "degree": 5, "generators": ["(1 2 3 4 5)", "(1 2)"]}', 120),
        ("perm:5:(1 2 3 4 5);(1 2)", 120),
        ("agl1:13:4", 52),
        ("sym:4", 24),
        ("alt:5", 60),
        ("cyclic:9", 9),
        ("wreath:sym:3:2", 72),
        ('{"kind": "wreath", "base": {"kind": "symmetric", "n": 3}, "copies": 2, "top": {"kind": "cyclic", "n": 2}}', 72),
        ("q8", 8),
        ("a4", 12),
        ("m11", 7920),
    ],
)
def test_resolve(text, order):
    assert resolve(text).table.order == order


def test_agl1_resolves_with_frame():
    R = resolve(GroupSpec("agl1", p=13, k=4))
    assert R.frame is not None and R.frame.k == 4 and R.table.order == 52


def test_spec_round_trip():
    for e in build_corpus(200):
        assert GroupSpec.from_dict(json.loads(e.spec.key())) == e.spec


@pytest.mark.parametrize(
    "text,exc",
    [("blob:3", SpecError), ('{"n": 3}', SpecError), ('{"kind": "dihedral", "q": 1}', SpecError),
     ("agl1:7", SpecError), ("dihedral:x", SpecError), ("dihedral:2", SpecError), ("perm:3:(1 2", CycleSyntaxError),
     ("agl1:7:4", ValueError), ("{bad json", SpecError)],
)
def test_resolve_errors(text, exc):
    with pytest.raises(exc):
        resolve(text)


def test_resolve_cap():
    with pytest.raises(GroupTooLarge):
        resolve("sym:6", cap=100)
    with pytest.raises(GroupTooLarge):
        resolve("perm:6:(1 2 3 4 5 6);(1 2)", cap=100)


def test_corpus_contents():
    small = build_corpus(100)
    names = [e.name for e in small]
    assert "Sym5" not in names and all(e.order <= 100 for e in small)
    assert {"C8", "D14", "Q8", "A4"} <= set(names)
    full = build_corpus(10_000)
    m11 = next(e for e in full if e.name == "M11")
    assert resolve(m11.spec).table.order == 7920
    assert sum(e.spec.kind == "dihedral" for e in full) == 30
    assert sorted(e.name for e in full if e.spec.kind == "agl1") == sorted(
        f"AGL1({p},{k})" for p in (3, 5, 7, 11, 13) for k in range(2, p) if (p - 1) % k == 0
    )
    assert [e.name for e in build_corpus(200)] == [e.name for e in build_corpus(200)]


def test_gamma_json_schema(capsys):
    code, out, _ = run_cli(capsys, "gamma", "dihedral:7", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["gamma"] == 4
    assert set(d["witness"]) == {"base_generators", "conjugators"}
    assert len(d["witness"]["conjugators"]) == 4
    assert set(d["bounds"]) == {"lower", "upper", "rank_plus_one"}
    assert isinstance(d["bounds"]["lower"], int) and isinstance(d["bounds"]["upper"], float)
    assert d["bounds"]["lower"] <= d["gamma"] <= d["bounds"]["rank_plus_one"]


def test_gamma_witness_replays(capsys):
    """The printed witness, parsed back from cycle strings, verifies."""
    from conjcover.covering import CoveringWitness, verify_witness
    from conjcover.perm import parse_cycles
    from conjcover.structure import subgroup_closure

    _, out, _ = run_cli(capsys, "gamma", "sym:4", "--format", "json")
    d = json.loads(out)
    G = resolve("sym:4").table
    idx = lambda s: G.index_of(parse_cycles(s, 4))
    base = subgroup_closure(G, [idx(s) for s in d["witness"]["base_generators"]])
    w = CoveringWitness(base, tuple(idx(s) for s in d["witness"]["conjugators"]))
    assert verify_witness(G, w).valid and w.length == d["gamma"] == 3


def test_gamma_infinity_and_oracle(capsys):
    _, out, _ = run_cli(capsys, "gamma", "c:8", "--format", "json")
    assert json.loads(out)["gamma"] == "infinity"
    code, out, _ = run_cli(capsys, "gamma", "agl1:5:4", "--oracle", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["oracle"] == {"gamma": 3, "agrees": True}


def test_gamma_limit(capsys):
    code, _, err = run_cli(capsys, "gamma", "dihedral:7", "--limit", "3")
    assert code == 2 and "limit" in err


def test_rank_cli(capsys):
    code, out, _ = run_cli(capsys, "rank", "alt:5", "--subgroup", "stabilizer:5", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["rank"] == 2 and d["subgroup_order"] == 12 and d["maximal"]
    _, out, _ = run_cli(capsys, "rank", "sym:3", "--subgroup", "(1 2)", "--format", "json")
    assert json.loads(out)["rank"] == 2


@pytest.mark.parametrize(
    "spec,method,length",
    [("dihedral:7", "bfs", 4), ("sym:4", "rank", 3), ("dihedral:13", "dihedral", 5), ("agl1:7:2", "solvable", 6)],
)
def test_factor_cli(capsys, spec, method, length):
    code, out, _ = run_cli(capsys, "factor", spec, "--method", method, "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["valid"] and d["length"] == length


def test_factor_cli_wrong_kind(capsys):
    code, _, err = run_cli(capsys, "factor", "sym:4", "--method", "solvable")
    assert code == 2 and "agl1" in err


def test_xset_cli(capsys):
    code, out, _ = run_cli(capsys, "xset", "3", "--mod", "4", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["values"] == [-3, -2, -1, 1, 2, 3, 4] and d["mod"]["covers"]


def test_suite_cli_deterministic(capsys):
    outs = [run_cli(capsys, "suite", "xn-lemma", "--format", "json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    d = json.loads(outs[0])
    assert d["summary"]["failed"] == 0 and "runtime" not in d["records"][0]
    _, out, _ = run_cli(capsys, "suite", "xn-lemma", "--format", "json", "--timings")
    assert "runtime" in json.loads(out)["records"][0]


def test_suite_unknown():
    with pytest.raises(SuiteError):
        run_suite("nope")
    with pytest.raises(SystemExit):
        main(["suite", "nope"])


def test_suite_records_carry_claims():
    rep = run_suite("solvable-bounds", SuiteConfig(max_order=60))
    assert rep.ok and all(r.claim for r in rep.records)
    text = rep.to_text()
    assert text.startswith("suite solvable-bounds")


def test_failed_check_names_claim():
    from conjcover.suites import CheckRecord, SuiteReport

    rep = SuiteReport("lifting", [CheckRecord(7, "some claim", {"g": 1}, 1, 2, False)])
    assert not rep.ok and "violates: some claim" in rep.to_text()


def test_survey_cli(capsys):
    code, out, _ = run_cli(capsys, "survey", "--max-order", "12", "--format", "json")
    rows = json.loads(out)["groups"]
    by = {r["name"]: r for r in rows}
    assert by["D6"]["gamma"] == 3 and by["D8"]["gamma"] == "infinity" and by["D12"]["qmnn"] is False


def test_suite_names_complete():
    assert set(SUITES) == {
        "dihedral-formula", "rank-bound", "lifting", "solvable-bounds", "xn-lemma",
        "qmnn-structure", "oracle-equivalence", "table1-m11", "wreath-smoke", "gamma-range",
    }


def test_env_cap_reaches_resolve(monkeypatch):
    monkeypatch.setenv("CONJCOVER_MAX_ORDER", "30")
    with pytest.raises(GroupTooLarge):
        resolve("sym:5")
