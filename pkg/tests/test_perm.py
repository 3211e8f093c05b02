import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conjcover.perm import (
    CycleSyntaxError,
    GroupTooLarge,
    Permutation,
    compose,
    format_cycles,
    generate_group,
    order_cap,
    parse_cycles,
)

perms = st.integers(1, 9).flatmap(lambda n: st.permutations(range(n)).map(lambda p: Permutation(tuple(p))))


def same_degree_triples():
    return st.integers(1, 8).flatmap(
        lambda n: st.tuples(*[st.permutations(range(n)).map(lambda p: Permutation(tuple(p)))] * 3)
    )


def test_compose_applies_left_factor_first():
    a = parse_cycles("(1 2)", 3)
    b = parse_cycles("(2 3)", 3)
    # 1 -a-> 2 -b-> 3
    assert compose(a, b)(0) == 2
    assert format_cycles(a * b) == "(1 3 2)"


@pytest.mark.parametrize(
    "text,degree,expected",
    [("(1 2 3)", 3, (1, 2, 0)), ("(1 2)(3 4)", 4, (1, 0, 3, 2)), ("()", 2, (0, 1)), ("e", 3, (0, 1, 2)),
     ("(1,3)", 3, (2, 1, 0)), ("  (2 3) ", 3, (0, 2, 1))],
)
def test_parse_examples(text, degree, expected):
    assert parse_cycles(text, degree).images == expected


@pytest.mark.parametrize(
    "text,pos",
    [("(1 2", 0), ("(1 (2 3))", 3), ("(1 2))", 5), ("(1 9)", 3), ("(1 2 1)", 5), ("(1 x)", 3), ("", 0)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(CycleSyntaxError) as exc:
        parse_cycles(text, 5)
    assert exc.value.pos == pos


def test_format_identity():
    assert format_cycles(Permutation.identity(4)) == "()"


@given(perms)
def test_format_parse_round_trip(p):
    assert parse_cycles(format_cycles(p), p.degree) == p


@given(same_degree_triples())
def test_associativity(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)


@given(perms)
def test_inverse_and_order(p):
    assert (p * p.inverse()).is_identity()
    assert (p ** p.order()).is_identity()
    assert all(not (p**k).is_identity() for k in range(1, p.order()))
    assert p ** -1 == p.inverse()


def test_generate_order_and_bfs_layout():
    G = generate_group([parse_cycles("(1 2 3 4 5)", 5), parse_cycles("(1 2)", 5)])
    assert G.order == 120
    assert G.elements[0] == tuple(range(5))
    assert list(G.generators) == [1, 2]


def test_generate_cap():
    with pytest.raises(GroupTooLarge):
        generate_group([parse_cycles("(1 2 3 4 5 6 7)", 7), parse_cycles("(1 2)", 7)], cap=1000)


def test_env_cap(monkeypatch):
    monkeypatch.setenv("CONJCOVER_MAX_ORDER", "50")
    assert order_cap() == 50
    with pytest.raises(GroupTooLarge):
        generate_group([parse_cycles("(1 2 3 4 5)", 5), parse_cycles("(1 2)", 5)])


def test_table_products_match_composition(groups):
    for G in groups.values():
        n = G.order
        idx = np.arange(n)
        prod = np.asarray(G.mul(idx[:, None], idx[None, :]))
        for a, b in itertools.islice(itertools.product(range(n), repeat=2), 0, None, max(1, n * n // 500)):
            assert G.elements[prod[a, b]] == compose(G.perm(a), G.perm(b)).images
        assert (np.asarray(G.mul(idx, G.inv)) == 0).all()


def test_large_group_products_without_table():
    # order above the multiplication-table limit exercises the lookup path
    G = generate_group([parse_cycles("(1 2 3 4 5 6 7)", 7), parse_cycles("(1 2)", 7)])
    assert G.order == 5040
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, G.order, 200), rng.integers(0, G.order, 200)
    for x, y, z in zip(a, b, np.asarray(G.mul(a, b))):
        assert G.elements[z] == compose(G.perm(int(x)), G.perm(int(y))).images


def test_conj_and_commutator(groups):
    G = groups["S4"]
    for a in range(0, G.order, 5):
        for g in range(0, G.order, 7):
            expect = compose(compose(G.perm(g).inverse(), G.perm(a)), G.perm(g))
            assert G.elements[G.conj(a, g)] == expect.images
            comm = compose(compose(G.perm(a).inverse(), G.perm(g).inverse()), compose(G.perm(a), G.perm(g)))
            assert G.elements[G.commutator(a, g)] == comm.images


def test_index_of_and_membership(groups):
    G = groups["A4"]
    assert G.index_of(parse_cycles("(1 2 3)", 4)) in range(12)
    assert parse_cycles("(1 2)", 4) not in G
    with pytest.raises(KeyError):
        G.index_of(parse_cycles("(1 2)", 4))


def test_power_and_element_order(groups):
    G = groups["D14"]
    v = G.generators[0]
    assert G.element_order(v) == 7
    assert G.power(v, 7) == 0
    assert G.power(v, -1) == G.inv[v]
