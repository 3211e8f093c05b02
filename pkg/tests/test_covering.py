import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conjcover import constructions as C
from conjcover.covering import (
    INFINITE,
    CoveringWitness,
    LimitExceeded,
    SubsetMask,
    gamma_bruteforce_oracle,
    gamma_cp_exact,
    gamma_for_subgroup,
    product_of_subgroups,
    rank,
    rank_factorization,
    set_product,
    times_subgroup,
    verify_witness,
)
from conjcover.perm import compose
from conjcover.structure import (
    all_subgroups,
    conjugates_with_conjugators,
    maximal_subgroup_classes,
    normal_subgroups,
    point_stabilizer,
    subgroup_closure,
    sylow_subgroup,
)


def naive_product(G, A, B):
    """Elementwise product computed from the permutations themselves, not the table."""
    perms = [G.perm(i) for i in range(G.order)]
    return {G.index_of(compose(perms[a], perms[b])) for a in A for b in B}


def subsets(G):
    return st.lists(st.integers(0, G.order - 1), min_size=1, max_size=G.order).map(sorted)


S4 = C.symmetric(4)


@given(subsets(S4), subsets(S4))
def test_set_product_matches_naive(a, b):
    got = set_product(SubsetMask.from_indices(S4, a), SubsetMask.from_indices(S4, b))
    assert set(got.indices().tolist()) == naive_product(S4, a, b)


@given(subsets(S4), st.sampled_from(all_subgroups(S4)))
def test_times_subgroup_matches_naive(a, H):
    got = times_subgroup(SubsetMask.from_indices(S4, a), H)
    assert set(got.indices().tolist()) == naive_product(S4, a, H.members.tolist())


@given(subsets(S4), subsets(S4), subsets(S4))
def test_product_monotone(a, extra, c):
    A = SubsetMask.from_indices(S4, a)
    A2 = A | SubsetMask.from_indices(S4, extra)
    C_ = SubsetMask.from_indices(S4, c)
    assert set_product(A, C_) <= set_product(A2, C_)


@given(subsets(S4))
def test_identity_is_neutral(a):
    A = SubsetMask.from_indices(S4, a)
    assert set_product(A, SubsetMask.from_indices(S4, [0])) == A


def test_subgroup_fixed_point():
    for H in all_subgroups(S4):
        assert set_product(H, H) == SubsetMask.of(H)
    # a non-subgroup containing e is not fixed
    T = SubsetMask.from_indices(S4, [0, S4.generators[0]])
    assert set_product(T, T) != T


def test_sym3_product_example():
    S3 = C.symmetric(3)
    a = S3.index_of((1, 0, 2))
    b = S3.index_of((2, 1, 0))
    P = set_product(SubsetMask.from_indices(S3, [0, a]), SubsetMask.from_indices(S3, [0, b]))
    assert P.cardinality == 4
    assert {0, a, b} <= set(P.indices().tolist())
    assert sum(S3.element_order(int(i)) == 3 for i in P.indices()) == 1


def test_subset_mask_ops():
    A = SubsetMask.from_indices(S4, [0, 1, 2])
    B = SubsetMask.from_indices(S4, [2, 3])
    assert (A | B).cardinality == 4 and (A & B).cardinality == 1
    assert (A & B) < A and not A <= B
    assert SubsetMask.full(S4).is_full()
    with pytest.raises(ValueError):
        A | SubsetMask.from_indices(C.symmetric(3), [0])


@pytest.mark.parametrize(
    "G,M,r",
    [
        (C.symmetric(3), lambda G: subgroup_closure(G, [G.index_of((1, 0, 2))]), 2),
        (C.cyclic(6), lambda G: subgroup_closure(G, [G.power(G.generators[0], 2)]), 2),
        (C.alternating(5), lambda G: point_stabilizer(G, 4), 2),
        (C.dihedral(7), lambda G: subgroup_closure(G, [G.generators[1]]), 4),
    ],
)
def test_rank_examples(G, M, r):
    H = M(G)
    got, reps = rank(G, H)
    assert got == r
    # brute force: count distinct double cosets
    blocks = {frozenset(np.asarray(G.mul(G.mul(H.members[:, None], x), H.members[None, :])).ravel().tolist())
              for x in range(G.order)}
    assert len(blocks) == r and len(reps) == r


@pytest.mark.parametrize(
    "G,M",
    [
        (C.symmetric(3), lambda G: subgroup_closure(G, [G.index_of((1, 0, 2))])),
        (C.alternating(5), lambda G: point_stabilizer(G, 4)),
        (C.alternating(4), lambda G: sylow_subgroup(G, 3)),
    ],
)
def test_rank_factorization_rank_two(G, M):
    rf = rank_factorization(G, M(G))
    assert rf.witness.length == 3 and rf.r == 2 and rf.report.valid and all(rf.star_holds)


def test_rank_factorization_deep_iteration():
    # D_26 reflections have rank 7; the B^k chain needs several steps
    G = C.dihedral(13)
    M = subgroup_closure(G, [G.generators[1]])
    rf = rank_factorization(G, M)
    assert rf.r == 7 and rf.k0 > 1
    assert rf.report.valid and rf.witness.length <= rf.r + 1
    assert all(rf.star_holds)
    assert rf.power_sizes == sorted(rf.power_sizes)
    best = rank_factorization(G, M, minimize=True)
    assert best.k0 <= rf.k0 and best.report.valid


def test_rank_factorization_rejects_normal():
    A4 = C.alternating(4)
    V4 = next(N for N in normal_subgroups(A4) if N.order == 4)
    with pytest.raises(ValueError):
        rank_factorization(A4, V4)
    with pytest.raises(ValueError):
        gamma_for_subgroup(A4, V4, 5)


def test_gamma_for_subgroup_examples():
    S3 = C.symmetric(3)
    assert gamma_for_subgroup(S3, subgroup_closure(S3, [S3.index_of((1, 0, 2))]), 5).k == 3
    D14 = C.dihedral(7)
    res = gamma_for_subgroup(D14, subgroup_closure(D14, [D14.generators[1]]), 6)
    assert res.k == 4 and verify_witness(D14, res.witness).valid
    assert gamma_for_subgroup(D14, subgroup_closure(D14, [D14.generators[1]]), 3).exceeded


@pytest.mark.parametrize(
    "G,value",
    [(C.cyclic(12), INFINITE), (C.dihedral(7), 4), (C.symmetric(3), 3), (C.alternating(5), 3),
     (C.quaternion(), INFINITE), (C.dihedral(8), INFINITE), (C.agl1(13, 4).G, 4)],
)
def test_gamma_examples(G, value):
    res = gamma_cp_exact(G)
    assert res.value == value
    if value != INFINITE:
        assert verify_witness(G, res.witness).valid


def test_witness_is_lexicographically_least():
    """Among all minimal coverings rooted at the found class, no smaller conjugator sequence works."""
    G = C.dihedral(5)
    res = gamma_cp_exact(G)
    M, k = res.witness.base, res.value
    conj = [g for g, _ in conjugates_with_conjugators(G, M)]
    for seq in itertools.product(conj, repeat=k - 1):
        w = CoveringWitness(M, (0,) + seq)
        if verify_witness(G, w).valid:
            assert w.conjugators == res.witness.conjugators
            break


@pytest.mark.parametrize("n", [5, 6, 9, 10, 12])
def test_domination_and_threads_agree(n):
    G = C.dihedral(n)
    base = gamma_cp_exact(G)
    assert gamma_cp_exact(G, domination_pruning=True).value == base.value
    threaded = gamma_cp_exact(G, threads=2)
    assert threaded.value == base.value and threaded.witness == base.witness


def test_limit_exceeded():
    with pytest.raises(LimitExceeded):
        gamma_cp_exact(C.dihedral(7), limit=3)


def test_order_bound_on_witnesses():
    for G in (C.dihedral(11), C.agl1(7, 3).G, C.symmetric(4)):
        res = gamma_cp_exact(G)
        assert res.witness.base.order ** res.value >= G.order


def test_maximal_reduction_minimum_over_all_proper():
    """Searching every proper non-normal subgroup class gives the same minimum."""
    G = C.dihedral(9)
    best = min(
        gamma_for_subgroup(G, H, 8).k or math.inf
        for H in all_subgroups(G)
        if H.is_proper() and len(conjugates_with_conjugators(G, H)) > 1
    )
    assert best == gamma_cp_exact(G).value


@pytest.mark.parametrize("G", [C.symmetric(3), C.alternating(4), C.dihedral(6), C.symmetric(4), C.agl1(5, 4).G])
def test_oracle_agrees(G):
    assert gamma_bruteforce_oracle(G, 6).value == gamma_cp_exact(G).value


def test_oracle_nilpotent_is_infinite():
    assert gamma_bruteforce_oracle(C.cyclic(6), 4).value == INFINITE
    assert gamma_bruteforce_oracle(C.quaternion(), 4).value == INFINITE


def test_oracle_cutoff_raises():
    with pytest.raises(LimitExceeded):
        gamma_bruteforce_oracle(C.dihedral(7), 3)


def test_verify_witness_rules():
    S3 = C.symmetric(3)
    M = subgroup_closure(S3, [S3.index_of((1, 0, 2))])
    g13 = next(g for g, K in conjugates_with_conjugators(S3, M) if S3.index_of((2, 1, 0)) in K)
    assert verify_witness(S3, CoveringWitness(M, (0, g13, 0))).valid
    two = [CoveringWitness(M, (a, b)) for a in range(6) for b in range(6)]
    assert not any(verify_witness(S3, w).valid for w in two)
    from conjcover.structure import whole_group

    bad = verify_witness(S3, CoveringWitness(whole_group(S3), (0, 0, 0)))
    assert not bad.valid and not bad.all_proper
    with pytest.raises(IndexError):
        verify_witness(S3, CoveringWitness(M, (0, 99)))


@given(st.data())
def test_conjugating_a_witness_keeps_it_valid(data):
    G = C.dihedral(7)
    w = gamma_cp_exact(G).witness
    h = data.draw(st.integers(0, G.order - 1))
    shifted = CoveringWitness(w.base, tuple(int(G.mul(g, h)) for g in w.conjugators))
    assert verify_witness(G, shifted).valid


def test_product_of_subgroups_equals_stepwise():
    G = C.alternating(5)
    classes = maximal_subgroup_classes(G)
    fs = classes[0][:3]
    step = SubsetMask.of(fs[0])
    for K in fs[1:]:
        step = set_product(step, K)
    assert product_of_subgroups(G, fs) == step
