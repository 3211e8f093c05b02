"""Set products, double-coset rank, and exact minimal conjugate-product coverings.

A covering of length k is ``G = M^{g_1} M^{g_2} ⋯ M^{g_k}`` with M proper;
``gamma_cp_exact`` returns the least such k (``INFINITE`` for nilpotent G).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from conjcover.perm import GroupTable
from conjcover.structure import (
    LATTICE_ORDER_CAP,
    Subgroup,
    all_subgroups,
    bools_to_mask,
    conjugate_subgroup,
    conjugates_with_conjugators,
    double_coset_reps,
    is_maximal,
    is_nilpotent,
    is_normal,
    left_coset_labels,
    mask_to_bools,
    maximal_subgroup_classes,
    right_coset_labels,
)

INFINITE = math.inf
# Above this many compositions set_product falls back to coset unions when it can.
_DIRECT_PRODUCT_LIMIT = 4_000_000


class LimitExceeded(RuntimeError):
    def __init__(self, message: str, per_class=()):
        super().__init__(message)
        self.per_class = list(per_class)


# -- subsets and products --------------------------------------------------------


@dataclass(frozen=True)
class SubsetMask:
    parent: GroupTable = field(repr=False, compare=False)
    bits: int

    @classmethod
    def from_indices(cls, G: GroupTable, indices) -> SubsetMask:
        b = np.zeros(G.order, dtype=bool)
        b[np.asarray(indices, dtype=np.int64)] = True
        return cls(G, bools_to_mask(b))

    @classmethod
    def from_bools(cls, G: GroupTable, b: np.ndarray) -> SubsetMask:
        return cls(G, bools_to_mask(b))

    @classmethod
    def of(cls, H: Subgroup) -> SubsetMask:
        return cls(H.parent, H.mask)

    @classmethod
    def full(cls, G: GroupTable) -> SubsetMask:
        return cls(G, (1 << G.order) - 1)

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.cardinality

    def bools(self) -> np.ndarray:
        return mask_to_bools(self.bits, self.parent.order)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bools())

    def is_full(self) -> bool:
        return self.cardinality == self.parent.order

    def __contains__(self, i) -> bool:
        return bool(self.bits >> int(i) & 1)

    def __or__(self, other: SubsetMask) -> SubsetMask:
        _same_parent(self, other)
        return SubsetMask(self.parent, self.bits | other.bits)

    def __and__(self, other: SubsetMask) -> SubsetMask:
        _same_parent(self, other)
        return SubsetMask(self.parent, self.bits & other.bits)

    def __le__(self, other: SubsetMask) -> bool:
        _same_parent(self, other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: SubsetMask) -> bool:
        return self <= other and self.bits != other.bits


def _same_parent(a, b) -> None:
    if a.parent is not b.parent:
        raise ValueError("subsets belong to different groups")


def _as_mask(X: SubsetMask | Subgroup) -> SubsetMask:
    return SubsetMask.of(X) if isinstance(X, Subgroup) else X


def times_subgroup(S: SubsetMask, H: Subgroup) -> SubsetMask:
    """``S·H``: the union of the left cosets ``gH`` that meet S."""
    G = S.parent
    labels, reps = left_coset_labels(G, H)
    hit = np.zeros(len(reps), dtype=bool)
    hit[labels[S.indices()]] = True
    return SubsetMask.from_bools(G, hit[labels])


def set_product(A: SubsetMask | Subgroup, B: SubsetMask | Subgroup) -> SubsetMask:
    """``{ab : a ∈ A, b ∈ B}`` under left-to-right composition."""
    A, B_mask = _as_mask(A), _as_mask(B)
    _same_parent(A, B_mask)
    G = A.parent
    a_idx, b_idx = A.indices(), B_mask.indices()
    if isinstance(B, Subgroup) and len(a_idx) * len(b_idx) > _DIRECT_PRODUCT_LIMIT:
        return times_subgroup(A, B)
    out = np.zeros(G.order, dtype=bool)
    chunk = max(1, _DIRECT_PRODUCT_LIMIT // 4 // max(len(b_idx), 1))
    for lo in range(0, len(a_idx), chunk):
        out[np.asarray(G.mul(a_idx[lo : lo + chunk, None], b_idx[None, :])).ravel()] = True
    return SubsetMask.from_bools(G, out)


def right_translate(S: SubsetMask, x: int) -> SubsetMask:
    G = S.parent
    return SubsetMask.from_indices(G, G.mul(S.indices(), x))


# -- witnesses -------------------------------------------------------------------


@dataclass(frozen=True)
class CoveringWitness:
    """Base subgroup M and conjugators (g_1, …, g_k) certifying ``G = M^{g_1}⋯M^{g_k}``."""

    base: Subgroup
    conjugators: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.conjugators)

    def factors(self) -> list[Subgroup]:
        G = self.base.parent
        return [self.base if g == 0 else conjugate_subgroup(G, self.base, g) for g in self.conjugators]


@dataclass(frozen=True)
class WitnessReport:
    valid: bool
    product_size: int
    pairwise_conjugate: bool
    all_proper: bool
    length: int


def product_of_subgroups(G: GroupTable, factors: Sequence[Subgroup]) -> SubsetMask:
    state = SubsetMask.of(factors[0]) if factors else SubsetMask.from_indices(G, [0])
    for K in factors[1:]:
        state = times_subgroup(state, K)
    return state


def verify_witness(G: GroupTable, w: CoveringWitness) -> WitnessReport:
    """Expand the ordered product of the witness factors and compare with G."""
    if w.base.parent is not G:
        raise ValueError("witness base is not a subgroup of this group")
    for g in w.conjugators:
        if not 0 <= g < G.order:
            raise IndexError(f"conjugator index {g} out of range")
    factors = w.factors()
    # Every factor is M^{g_i}, so any two are conjugate by g_i^{-1} g_j.
    pairwise = all(
        conjugate_subgroup(G, factors[0], int(G.mul(G.inv[w.conjugators[0]], g))) == K
        for g, K in zip(w.conjugators, factors)
    )
    proper = all(K.is_proper() for K in factors)
    product = product_of_subgroups(G, factors)
    size = product.cardinality
    valid = w.length >= 2 and proper and pairwise and size == G.order
    return WitnessReport(valid, size, pairwise, proper, w.length)


# -- rank and the constructive rank bound ----------------------------------------


def rank(G: GroupTable, M: Subgroup) -> tuple[int, list[int]]:
    """Number of double cosets ``MxM`` and the least element of each."""
    if not M.is_proper():
        raise ValueError("rank needs a proper subgroup")
    reps = double_coset_reps(G, M)
    return len(reps), reps


@dataclass
class RankFactorization:
    witness: CoveringWitness
    k0: int
    r: int
    x: int
    m1_conjugator: int
    power_sizes: list[int]
    star_holds: list[bool]
    report: WitnessReport


def _times_double_coset(S: SubsetMask, M: Subgroup, x: int) -> SubsetMask:
    """``S·MxM`` for a right-M-invariant S, i.e. ``(S·x)·M``."""
    return times_subgroup(right_translate(S, x), M)


def _power_sequence(G: GroupTable, M: Subgroup, x: int) -> tuple[int, list[SubsetMask], list[bool]]:
    """Iterate ``B^k`` with ``B = M ∪ MxM`` until it stabilises.

    Returns k0, the powers B^1..B^{k0+1}, and for each step whether
    ``B^{k+1} = B^k ∪ (MxM)^{k+1}`` held with ``B^k ⊆ B^{k+1}``.
    """
    Mm = SubsetMask.of(M)
    D = times_subgroup(SubsetMask.from_indices(G, G.mul(M.members, x)), M)  # MxM
    B = Mm | D
    powers = [B]
    star: list[bool] = []
    D_pow = D
    while True:
        Bk = powers[-1]
        if Bk.cardinality * B.cardinality <= _DIRECT_PRODUCT_LIMIT:
            nxt = set_product(Bk, B)
        else:
            nxt = Bk | _times_double_coset(Bk, M, x)
        D_pow = _times_double_coset(D_pow, M, x)
        star.append(nxt == (Bk | D_pow) and Bk <= nxt)
        powers.append(nxt)
        if nxt == Bk:
            return len(powers) - 1, powers, star


def rank_factorization(G: GroupTable, M: Subgroup, minimize: bool = False) -> RankFactorization:
    """Covering ``(M, M^{x^{-1}}, …, M^{x^{-k0}}, M_1)`` of length ``k0 + 2 ≤ r + 1``.

    M must be maximal and non-normal. M_1 is the least-conjugator conjugate of M
    not contained in M and x the least element of ``M_1 − M``; with ``minimize``
    every double coset meeting some such ``M_1 − M`` is tried and the smallest
    k0 kept.
    """
    if is_normal(G, M):
        raise ValueError("M is normal: no conjugate lies outside it")
    if not is_maximal(G, M):
        raise ValueError("M is not a maximal subgroup")
    r, _ = rank(G, M)
    m_bools = M.bools
    choices: list[tuple[int, int]] = []
    seen_double: set[int] = set()
    labels, _ = right_coset_labels(G, M)
    for c, M1 in conjugates_with_conjugators(G, M):
        outside = M1.members[~m_bools[M1.members]]
        if outside.size == 0:
            continue
        for x in outside if minimize else outside[:1]:
            key = int(labels[G.mul(x, M.members)].min())  # identifies MxM
            if key not in seen_double:
                seen_double.add(key)
                choices.append((c, int(x)))
        if not minimize:
            break
    best = None
    for c, x in choices:
        k0, powers, star = _power_sequence(G, M, x)
        if best is None or k0 < best[0]:
            best = (k0, c, x, powers, star)
    k0, c, x, powers, star = best
    if not powers[k0 - 1].is_full():
        raise ValueError("B^k0 is a proper subgroup: M is not maximal")
    x_inv = int(G.inv[x])
    conjugators = tuple(G.power(x_inv, i) for i in range(k0 + 1)) + (c,)
    witness = CoveringWitness(M, conjugators)
    report = verify_witness(G, witness)
    return RankFactorization(
        witness=witness,
        k0=k0,
        r=r,
        x=x,
        m1_conjugator=c,
        power_sizes=[P.cardinality for P in powers],
        star_holds=star,
        report=report,
    )


# -- exact search ----------------------------------------------------------------


class _Expander:
    """Right-multiplies a state by every conjugate of M at once."""

    def __init__(self, G: GroupTable, M: Subgroup):
        pairs = conjugates_with_conjugators(G, M)
        self.conjugators = [g for g, _ in pairs]
        base_labels, reps = left_coset_labels(G, M)
        self.n_cosets = len(reps)
        everything = np.arange(G.order)
        # x·M^g = (x·g⁻¹·M)·g, so the left coset of x w.r.t. M^g is that of x·g⁻¹ w.r.t. M.
        inv = G.inv[np.array(self.conjugators)]
        self.labels = base_labels[np.asarray(G.mul(everything[None, :], inv[:, None]))]
        self.rows = np.arange(len(self.conjugators))[:, None]

    def expand(self, state: np.ndarray) -> np.ndarray:
        idx = np.flatnonzero(state)
        hit = np.zeros((len(self.conjugators), self.n_cosets), dtype=bool)
        hit[self.rows, self.labels[:, idx]] = True
        return np.take_along_axis(hit, self.labels, axis=1)


@dataclass
class SubgroupGamma:
    k: int | None
    witness: CoveringWitness | None
    states: int = 0

    @property
    def exceeded(self) -> bool:
        return self.k is None


def _dominated(sets: np.ndarray, order: list[int]) -> list[int]:
    """Keep children not contained in another kept child (ties keep the earlier one)."""
    kept: list[int] = []
    for c in order:
        row = sets[c]
        if any(not (row & ~sets[d]).any() for d in kept):
            continue
        kept = [d for d in kept if (sets[d] & ~row).any()]
        kept.append(c)
    return sorted(kept)


def gamma_for_subgroup(
    G: GroupTable, M: Subgroup, limit: int, domination_pruning: bool = False
) -> SubgroupGamma:
    """Least k ≤ limit with ``G = M·M^{g_2}⋯M^{g_k}``, or ``k=None`` if none.

    Rooting the first factor at M loses nothing: conjugating a covering by
    ``g_1⁻¹`` keeps its length. The search deepens the target length from the
    order bound ``|M|^k ≥ |G|`` upward and explores conjugators depth-first in
    index order, so the first hit is the lexicographically least conjugator
    sequence among minimal coverings. A state S at depth j is pruned when
    ``|S|·|M|^{L−j} < |G|``; failed states are memoised with their remaining
    depth. With ``domination_pruning`` a child contained in a sibling is
    skipped, which keeps k exact but may change the reported witness.
    """
    if not M.is_proper():
        raise ValueError("M must be a proper subgroup")
    if is_normal(G, M):
        raise ValueError("M is normal: every product of its conjugates is M")
    n, m = G.order, M.order
    exp = _Expander(G, M)
    dead: dict[bytes, int] = {}
    path: list[int] = []
    counter = [0]

    def dfs(state: np.ndarray, size: int, rem: int) -> bool:
        if size == n:
            return True
        if rem == 0:
            return False
        key = np.packbits(state).tobytes()
        if dead.get(key, -1) >= rem:
            return False
        counter[0] += 1
        children = exp.expand(state)
        sizes = children.sum(axis=1)
        need = -(-n // m ** (rem - 1))
        order = [c for c in range(len(sizes)) if sizes[c] > size and sizes[c] >= need]
        if domination_pruning and len(order) > 1:
            order = _dominated(children, order)
        for c in order:
            path.append(exp.conjugators[c])
            if dfs(children[c], int(sizes[c]), rem - 1):
                return True
            path.pop()
        dead[key] = rem
        return False

    start = M.bools
    L = 2
    while m**L < n:
        L += 1
    while L <= limit:
        if dfs(start, m, L - 1):
            return SubgroupGamma(L, CoveringWitness(M, (0,) + tuple(path)), counter[0])
        L += 1
    return SubgroupGamma(None, None, counter[0])


@dataclass
class ClassResult:
    representative: Subgroup
    class_size: int
    k: int | None
    witness: CoveringWitness | None
    rank: int | None


@dataclass
class GammaResult:
    value: float | int
    witness: CoveringWitness | None
    per_class: list[ClassResult] = field(default_factory=list)


def candidate_classes(G: GroupTable, cap: int = LATTICE_ORDER_CAP) -> list[list[Subgroup]]:
    """Conjugacy classes of non-normal maximal subgroups."""
    return [cls for cls in maximal_subgroup_classes(G, cap) if len(cls) > 1]


def gamma_cp_exact(
    G: GroupTable,
    limit: int | None = None,
    candidates: Sequence[Subgroup] | None = None,
    threads: int = 1,
    domination_pruning: bool = False,
    cap: int = LATTICE_ORDER_CAP,
) -> GammaResult:
    """Exact γ_cp over one representative per class of non-normal maximal subgroups.

    If ``G = A^{g_1}⋯A^{g_k}`` and ``M ⊇ A`` is maximal then ``G = M^{g_1}⋯M^{g_k}``
    too, and M cannot be normal, so these classes suffice. Without ``limit``
    each class is searched up to its rank bound r + 1, which always succeeds.
    For groups above the lattice cap pass maximal subgroups as ``candidates``.
    """
    if is_nilpotent(G):
        return GammaResult(INFINITE, None, [])
    if candidates is None:
        reps = [(cls[0], len(cls)) for cls in candidate_classes(G, cap)]
    else:
        reps = []
        for M in candidates:
            if is_normal(G, M):
                raise ValueError("candidate subgroups must be non-normal")
            reps.append((M, len(conjugates_with_conjugators(G, M))))

    def solve(item: tuple[Subgroup, int]) -> ClassResult:
        M, size = item
        r, _ = rank(G, M)
        bound = r + 1 if limit is None else limit
        res = gamma_for_subgroup(G, M, bound, domination_pruning)
        return ClassResult(M, size, res.k, res.witness, r)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            per_class = list(pool.map(solve, reps))
    else:
        per_class = [solve(item) for item in reps]
    found = [c for c in per_class if c.k is not None]
    if not found:
        raise LimitExceeded(f"no covering within limit {limit}", per_class)
    best = min(found, key=lambda c: c.k)
    if best.k <= 2:  # pragma: no cover - impossible for proper subgroups
        raise AssertionError("covering of length ≤ 2 found")
    return GammaResult(best.k, best.witness, per_class)


def gamma_bruteforce_oracle(G: GroupTable, maxlen: int, cap: int = LATTICE_ORDER_CAP) -> GammaResult:
    """Exhaustive γ_cp over every proper subgroup and every conjugate sequence.

    Breadth-first over sets reachable as products of conjugates of each proper
    subgroup, starting from all conjugates, with exact-set dedup only. Products
    are expanded element by element. If every search saturates without reaching
    G the value is INFINITE; a search cut off at ``maxlen`` raises LimitExceeded.
    """
    subs = [H for H in all_subgroups(G, cap) if H.is_proper()]
    best: tuple[int, Subgroup, tuple[int, ...]] | None = None
    unresolved = False
    full = (1 << G.order) - 1
    for A in subs:
        pairs = conjugates_with_conjugators(G, A)
        members = [K.members for _, K in pairs]
        horizon = maxlen if best is None else best[0] - 1
        if horizon < 1:
            break
        level: dict[int, tuple[int, ...]] = {}
        for g, K in pairs:
            level.setdefault(K.mask, (g,))
        seen = set(level)
        depth = 1
        hit = None
        while level and hit is None:
            for bits, p in level.items():
                if bits == full:
                    hit = p
                    break
            if hit is not None or depth == horizon:
                break
            nxt: dict[int, tuple[int, ...]] = {}
            for bits, p in level.items():
                s_idx = np.flatnonzero(mask_to_bools(bits, G.order))
                for (g, _), k_idx in zip(pairs, members):
                    prod = np.zeros(G.order, dtype=bool)
                    prod[np.asarray(G.mul(s_idx[:, None], k_idx[None, :])).ravel()] = True
                    b = bools_to_mask(prod)
                    if b not in seen:
                        seen.add(b)
                        nxt[b] = p + (g,)
            level = nxt
            depth += 1
        if hit is not None:
            if best is None or len(hit) < best[0]:
                best = (len(hit), A, hit)
        elif level:
            unresolved = True
    if best is not None:
        return GammaResult(best[0], CoveringWitness(best[1], best[2]))
    if unresolved:
        raise LimitExceeded(f"oracle found no covering within {maxlen} factors")
    return GammaResult(INFINITE, None)
