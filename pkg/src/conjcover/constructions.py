"""Named group builders and explicit coverings for dihedral and affine groups."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import sympy

from conjcover.covering import CoveringWitness, SubsetMask, product_of_subgroups, set_product
from conjcover.perm import GroupTable, GroupTooLarge, Permutation, generate_group, order_cap
from conjcover.structure import (
    Subgroup,
    conjugate_subgroup,
    coset_action,
    is_normal,
    normalizer,
    subgroup_closure,
    sylow_subgroup,
)


def _cycle(points, degree: int) -> Permutation:
    images = list(range(degree))
    for i, x in enumerate(points):
        images[x] = points[(i + 1) % len(points)]
    return Permutation(tuple(images))


def cyclic(n: int, cap: int | None = None) -> GroupTable:
    if n < 1:
        raise ValueError("n must be positive")
    return generate_group([_cycle(list(range(n)), n)] if n > 1 else [], cap=cap, degree=n)


def symmetric(n: int, cap: int | None = None) -> GroupTable:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return generate_group([], degree=1)
    gens = [_cycle(list(range(n)), n), _cycle([0, 1], n)]
    return generate_group(gens if n > 2 else gens[1:], cap=cap)


def alternating(n: int, cap: int | None = None) -> GroupTable:
    """Alt(n) from (1 2 3) and the (n or n−1)-cycle of even parity."""
    if n < 1:
        raise ValueError("n must be positive")
    if n < 3:
        return generate_group([], degree=n)
    long = list(range(n)) if n % 2 else list(range(1, n))
    return generate_group([_cycle([0, 1, 2], n), _cycle(long, n)], cap=cap)


def quaternion() -> GroupTable:
    i = _cycle([0, 1, 2, 3], 8) * _cycle([4, 5, 6, 7], 8)
    j = _cycle([0, 4, 2, 6], 8) * _cycle([1, 7, 3, 5], 8)
    return generate_group([i, j])


def dihedral(n: int, cap: int | None = None) -> GroupTable:
    """D_2n on n points: generators v = (1 2 … n) and the reflection b fixing 1."""
    if n < 3:
        raise ValueError("dihedral(n) needs n ≥ 3")
    v = Permutation(tuple((i + 1) % n for i in range(n)))
    b = Permutation(tuple((-i) % n for i in range(n)))
    return generate_group([v, b], cap=cap)


def dihedral_generators(G: GroupTable) -> tuple[int, int]:
    """Indices of the rotation v and reflection b in a table built by ``dihedral``."""
    return G.generators[0], G.generators[1]


def _odd_prime(p: int) -> None:
    if p < 3 or not sympy.isprime(p):
        raise ValueError(f"{p} is not an odd prime")


def dihedral_factorization(p: int) -> CoveringWitness:
    """``D_2p = ⟨b⟩^{v}⟨b⟩^{v²}⟨b⟩^{v⁴}⋯⟨b⟩^{v^{2^{m−1}}}⟨b⟩`` with m = ⌈log₂ p⌉."""
    _odd_prime(p)
    G = dihedral(p)
    v, b = dihedral_generators(G)
    m = (p - 1).bit_length()  # ⌈log₂ p⌉ for odd p
    conjugators = tuple(G.power(v, 2**j) for j in range(m)) + (0,)
    return CoveringWitness(subgroup_closure(G, [b]), conjugators)


@dataclass(frozen=True)
class DihedralChain:
    rotations_in_product: bool
    rotations_times_reflection: bool
    product_is_group: bool


def dihedral_chain(w: CoveringWitness) -> DihedralChain:
    """The containments behind the dihedral covering: V ⊆ B and V⟨b⟩ = G force B = G."""
    G = w.base.parent
    v, _ = dihedral_generators(G)
    V = subgroup_closure(G, [v])
    B = product_of_subgroups(G, w.factors())
    return DihedralChain(
        rotations_in_product=SubsetMask.of(V) <= B,
        rotations_times_reflection=set_product(V, w.base).is_full(),
        product_is_group=B.is_full(),
    )


# -- X_n -------------------------------------------------------------------------


@dataclass(frozen=True)
class XSet:
    n: int
    values: frozenset[int]


def x_set(n: int) -> XSet:
    """All alternating sums ``Σ (−1)^i 2^{a_i}`` over increasing exponents below n.

    Built suffix by suffix: sums whose least exponent is ≥ j are ``2^j``, or
    ``2^j − s`` for a sum s with least exponent > j, or such an s itself.
    """
    if n < 1:
        raise ValueError("n must be positive")
    suffix: set[int] = set()
    for j in range(n - 1, -1, -1):
        suffix = suffix | {2**j} | {2**j - s for s in suffix}
    expected = set(range(-(2 ** (n - 1)) + 1, 2 ** (n - 1) + 1)) - {0}
    if suffix != expected:  # pragma: no cover - would refute the closed form
        raise AssertionError(f"X_{n} differs from the closed-form interval")
    return XSet(n, frozenset(suffix))


def x_set_by_subsets(n: int) -> set[int]:
    """Reference enumeration over every non-empty subset of {0, …, n−1}."""
    out = set()
    for r in range(1, n + 1):
        for exps in itertools.combinations(range(n), r):
            out.add(sum((-1) ** i * 2**a for i, a in enumerate(exps)))
    return out


def x_set_mod_coverage(n: int, k: int) -> bool:
    """Whether every residue 1..k occurs in ``X_n mod (k+1)``."""
    if not 1 <= k < 2**n:
        raise ValueError(f"k must satisfy 1 ≤ k < 2^{n}")
    residues = {x % (k + 1) for x in x_set(n).values}
    return set(range(1, k + 1)) <= residues


# -- affine groups and the solvable construction ---------------------------------


@dataclass
class SolvableFrame:
    G: GroupTable
    p: int
    n: int
    V: Subgroup
    K: Subgroup
    basis: list[int]

    @property
    def k(self) -> int:
        return self.K.order

    def check(self) -> dict[str, bool]:
        """Frame invariants, including irreducibility checked element by element."""
        G, V, K = self.G, self.V, self.K
        k_members = K.members
        irreducible = True
        for v in V.members[1:]:
            orbit = np.asarray(G.conj(int(v), k_members))
            if subgroup_closure(G, orbit.tolist()).order != V.order:
                irreducible = False
                break
        return {
            "order_p^n": V.order == self.p**self.n,
            "V_normal": is_normal(G, V),
            "V_meet_K_trivial": (V.mask & K.mask) == 1,
            "VK_is_G": V.order * K.order == G.order,
            "irreducible": irreducible,
        }


def agl1(p: int, k: int) -> SolvableFrame:
    """V = C_p (translations) extended by the order-k multiplications, on p points."""
    _odd_prime(p)
    if k <= 1 or (p - 1) % k:
        raise ValueError(f"k must be a divisor of p−1 greater than 1, got {k}")
    a = pow(sympy.primitive_root(p), (p - 1) // k, p)
    t = Permutation(tuple((x + 1) % p for x in range(p)))
    mult = Permutation(tuple((a * x) % p for x in range(p)))
    G = generate_group([t, mult])
    ti, mi = G.generators
    V = subgroup_closure(G, [ti])
    K = subgroup_closure(G, [mi])
    return SolvableFrame(G, p, 1, V, K, [int(V.members[1])])


def central_commutator_solve(frame: SolvableFrame, v: int) -> int:
    """Some t ∈ V with ``v ∈ K·K^t``.

    Take the least non-trivial x in Z(K) and scan V for w with
    ``x⁻¹·w·x·w⁻¹ = v``; then ``v = x⁻¹·x^{w⁻¹}`` and t = w⁻¹.
    """
    G, V, K = frame.G, frame.V, frame.K
    if v not in V:
        raise ValueError("v must lie in V")
    zk = [int(z) for z in center_of(G, K).members if z != 0]
    if not zk:
        raise ValueError("Z(K) is trivial")
    x = zk[0]
    w_all = V.members
    lhs = G.mul(G.mul(G.inv[x], w_all), G.mul(x, G.inv[w_all]))
    hits = np.flatnonzero(np.asarray(lhs) == v)
    if hits.size == 0:
        raise ValueError("no w with w^x − w = v: the frame violates its hypotheses")
    t = int(G.inv[w_all[hits[0]]])
    if v not in set_product(K, conjugate_subgroup(G, K, t)):  # pragma: no cover - guaranteed by the identity above
        raise AssertionError("v not in K·K^t")
    return t


def center_of(G: GroupTable, K: Subgroup) -> Subgroup:
    """Z(K) for a subgroup K of G."""
    m = K.members
    comm = np.asarray(G.mul(m[:, None], m[None, :])) == np.asarray(G.mul(m[None, :], m[:, None]))
    return subgroup_closure(G, m[comm.all(axis=1)].tolist())


def solvable_covering(frame: SolvableFrame) -> CoveringWitness:
    """``(K, K^{t_11}, K, K^{t_12}, …)`` with ``2^j·v_i ∈ K·K^{t_ij}``, 2nm factors."""
    G = frame.G
    m = math.ceil(math.log2(frame.p))
    conjugators: list[int] = []
    for v in frame.basis:
        for j in range(m):
            t = central_commutator_solve(frame, G.power(v, 2**j))
            conjugators += [0, t]
    return CoveringWitness(frame.K, tuple(conjugators))


def solvable_bounds(p: int, n: int, k: int) -> tuple[int, float]:
    """``⌈n·log₂p / log₂k + 1⌉`` and ``2n(log₂p + 1)``.

    The lower bound is computed exactly as the least L with ``k^{L−1} ≥ p^n``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < 1 or not sympy.isprime(p):
        raise ValueError("need a prime p and n ≥ 1")
    lower = 1
    while k ** (lower - 1) < p**n:
        lower += 1
    return lower, 2 * n * (math.log2(p) + 1)


def bertrand_prime(n: int) -> int:
    """Least prime p with ``2^{n−2} < p < 2^{n−1}``."""
    if n < 3:
        raise ValueError("n must be at least 3")
    p = sympy.nextprime(2 ** (n - 2))
    assert p < 2 ** (n - 1)
    return int(p)


# -- wreath products and other actions -------------------------------------------


def wreath_product(base: GroupTable, copies: int, top: GroupTable, cap: int | None = None) -> GroupTable:
    """``base ≀ top`` acting imprimitively on ``base.degree · copies`` points.

    Block i holds points ``i·d … i·d + d − 1``; top permutes the blocks.
    """
    cap = order_cap() if cap is None else cap
    if top.degree != copies:
        raise ValueError("top group must act on `copies` points")
    if base.order**copies * top.order > cap:
        raise GroupTooLarge(f"wreath product order exceeds cap {cap}")
    d = base.degree
    gens = []
    for block in range(copies):
        for g in base.generators:
            images = list(range(d * copies))
            for x in range(d):
                images[block * d + x] = block * d + base.elements[g][x]
            gens.append(Permutation(tuple(images)))
    for s in top.generators:
        sigma = top.elements[s]
        gens.append(Permutation(tuple(sigma[i // d] * d + i % d for i in range(d * copies))))
    return generate_group(gens, cap=cap, degree=d * copies)


def embed_in_block(W: GroupTable, base: GroupTable, g: int, block: int) -> int:
    """Index in W of the base element g acting on one block only."""
    d = base.degree
    images = list(range(W.degree))
    for x in range(d):
        images[block * d + x] = block * d + base.elements[g][x]
    return W.index_of(images)


def alternating6_degree10() -> GroupTable:
    """A_6 acting on the 10 cosets of a Sylow-3 normalizer."""
    A6 = alternating(6)
    H = normalizer(A6, sylow_subgroup(A6, 3))
    Q, _ = coset_action(A6, H)
    return Q


def frame_maximals_split(frame: SolvableFrame) -> bool:
    """Every maximal M either meets V trivially and is conjugate to K, or contains V and is normal."""
    from conjcover.structure import conjugates_of, maximal_subgroups

    G, V, K = frame.G, frame.V, frame.K
    k_conjugates = {c.mask for c in conjugates_of(G, K)}
    for M, normal in maximal_subgroups(G):
        if (M.mask & V.mask) == 1:
            if M.mask not in k_conjugates:
                return False
        elif not (V <= M and normal):
            return False
    return True


def m11() -> GroupTable:
    """Mathieu group M11 on 11 points."""
    a = _cycle(list(range(11)), 11)
    b = _cycle([2, 6, 10, 7], 11) * _cycle([3, 9, 4, 5], 11)
    return generate_group([a, b])
