"""Subgroups, lattices, quotients and the structural predicates used for coverings."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
import sympy

from conjcover.perm import GroupTable, generate_group, Permutation

LATTICE_ORDER_CAP = 2_000
LATTICE_SUBGROUP_CAP = 20_000


class LatticeTooLarge(ValueError):
    """The subgroup lattice is beyond the desk-scale cap; supply subgroups explicitly."""


class NotNormal(ValueError):
    pass


def bools_to_mask(b: np.ndarray) -> int:
    return int.from_bytes(np.packbits(b, bitorder="little").tobytes(), "little")


def mask_to_bools(mask: int, n: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: GroupTable = field(repr=False)
    members: np.ndarray = field(repr=False)
    mask: int = field(repr=False)
    generator_indices: tuple[int, ...]

    @classmethod
    def from_bools(cls, G: GroupTable, bools: np.ndarray, gens: Iterable[int]) -> Subgroup:
        members = np.flatnonzero(bools).astype(np.int32)
        return cls(G, members, bools_to_mask(bools), tuple(int(g) for g in gens))

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def bools(self) -> np.ndarray:
        return mask_to_bools(self.mask, self.parent.order)

    def __contains__(self, i) -> bool:
        return bool(self.mask >> int(i) & 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup) and other.parent is self.parent and other.mask == self.mask
        )

    def __hash__(self) -> int:
        return hash(self.mask)

    def __le__(self, other: Subgroup) -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: Subgroup) -> bool:
        return self <= other and self.mask != other.mask

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_proper(self) -> bool:
        return self.order < self.parent.order

    def intersection(self, other: Subgroup) -> Subgroup:
        return subgroup_closure(self.parent, np.flatnonzero(self.bools & other.bools))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, gens={self.generator_indices})"


def whole_group(G: GroupTable) -> Subgroup:
    return Subgroup(G, np.arange(G.order, dtype=np.int32), (1 << G.order) - 1, G.generators)


def trivial_subgroup(G: GroupTable) -> Subgroup:
    return Subgroup(G, np.zeros(1, dtype=np.int32), 1, ())


def subgroup_closure(G: GroupTable, gens: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing ``gens``; members come out sorted by index."""
    gens = sorted({int(g) for g in gens} - {0})
    inside = np.zeros(G.order, dtype=bool)
    inside[0] = True
    if gens:
        g_arr = np.array(gens)
        frontier = np.array([0])
        while frontier.size:
            prods = np.asarray(G.mul(frontier[:, None], g_arr[None, :])).ravel()
            new = np.unique(prods[~inside[prods]])
            inside[new] = True
            frontier = new
    return Subgroup.from_bools(G, inside, _prune_gens(G, gens))


def _prune_gens(G: GroupTable, gens: Sequence[int]) -> list[int]:
    """Drop generators already produced by earlier ones (keeps tiny groups tidy)."""
    if len(gens) <= 1:
        return list(gens)
    kept: list[int] = []
    inside = np.zeros(G.order, dtype=bool)
    inside[0] = True
    for g in gens:
        if inside[g]:
            continue
        kept.append(g)
        inside = _join_bools(G, inside, kept, g)
    return kept


def _join_bools(G: GroupTable, inside: np.ndarray, gens: Sequence[int], g: int) -> np.ndarray:
    """Dimino's step: the group generated by the subgroup ``inside`` and ``g``.

    The result is grown as a union of right cosets ``H·x`` of the old group H.
    """
    H = np.flatnonzero(inside)
    out = inside.copy()
    reps = [0]
    all_gens = list(gens) + ([g] if g not in gens else [])
    i = 0
    while i < len(reps):
        r = reps[i]
        i += 1
        for s in all_gens:
            x = int(G.mul(r, s))
            if not out[x]:
                out[G.mul(H, x)] = True
                reps.append(x)
    return out


def join(G: GroupTable, H: Subgroup, g: int) -> Subgroup:
    """``⟨H, g⟩``."""
    if g in H:
        return H
    bools = _join_bools(G, H.bools, H.generator_indices, int(g))
    return Subgroup.from_bools(G, bools, H.generator_indices + (int(g),))


def join_subgroups(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    out = A
    for g in B.generator_indices:
        out = join(G, out, g)
    return out


def is_normal(G: GroupTable, H: Subgroup) -> bool:
    if not H.generator_indices:
        return True
    h = np.array(H.generator_indices)
    s = np.array(G.generators)
    conj = np.asarray(G.conj(h[:, None], s[None, :])).ravel()
    return bool(H.bools[conj].all())


def normalizer(G: GroupTable, H: Subgroup) -> Subgroup:
    """``{g ∈ G : H^g = H}``."""
    if not H.generator_indices or H.order == G.order:
        return whole_group(G)
    inside = H.bools
    ok = np.ones(G.order, dtype=bool)
    everything = np.arange(G.order)
    for h in H.generator_indices:
        ok &= inside[G.conj(h, everything)]
    return _subgroup_from_member_bools(G, ok)


def _subgroup_from_member_bools(G: GroupTable, bools: np.ndarray) -> Subgroup:
    """Wrap a set already known to be a subgroup, finding a small generating set."""
    members = np.flatnonzero(bools)
    gens: list[int] = []
    inside = np.zeros(G.order, dtype=bool)
    inside[0] = True
    for m in members:
        if not inside[m]:
            gens.append(int(m))
            inside = _join_bools(G, inside, gens[:-1], int(m))
    return Subgroup.from_bools(G, bools, gens)


def conjugate_subgroup(G: GroupTable, H: Subgroup, g: int) -> Subgroup:
    bools = np.zeros(G.order, dtype=bool)
    bools[G.conj(H.members, g)] = True
    gens = [int(x) for x in np.atleast_1d(G.conj(np.array(H.generator_indices, dtype=np.int64), g))]
    return Subgroup.from_bools(G, bools, gens)


def right_coset_labels(G: GroupTable, H: Subgroup) -> tuple[np.ndarray, list[int]]:
    """Label every element by its right coset ``H·g``; also return each coset's least element.

    Cosets are numbered in order of their least element.
    """
    key = ("right", H.mask)
    if key not in G._cache:
        labels = np.full(G.order, -1, dtype=np.int32)
        reps: list[int] = []
        for g in range(G.order):
            if labels[g] < 0:
                labels[G.mul(H.members, g)] = len(reps)
                reps.append(g)
        G._cache[key] = (labels, reps)
    return G._cache[key]


def left_coset_labels(G: GroupTable, H: Subgroup) -> tuple[np.ndarray, list[int]]:
    """Label every element by its left coset ``g·H``."""
    key = ("left", H.mask)
    if key not in G._cache:
        labels = np.full(G.order, -1, dtype=np.int32)
        reps: list[int] = []
        for g in range(G.order):
            if labels[g] < 0:
                labels[G.mul(g, H.members)] = len(reps)
                reps.append(g)
        G._cache[key] = (labels, reps)
    return G._cache[key]


def conjugates_with_conjugators(G: GroupTable, H: Subgroup) -> list[tuple[int, Subgroup]]:
    """Each conjugate ``H^g`` once, paired with the least-index ``g`` producing it.

    Conjugates correspond to right cosets of the normalizer, so the least
    element of each coset is the least conjugator.
    """
    key = ("conjugates", H.mask)
    if key not in G._cache:
        N = normalizer(G, H)
        _, reps = right_coset_labels(G, N)
        G._cache[key] = [(g, H if g == 0 else conjugate_subgroup(G, H, g)) for g in reps]
    return G._cache[key]


def conjugates_of(G: GroupTable, H: Subgroup) -> list[Subgroup]:
    return [K for _, K in conjugates_with_conjugators(G, H)]


def normal_closure(G: GroupTable, gens: Iterable[int]) -> Subgroup:
    gens = [int(g) for g in gens]
    H = subgroup_closure(G, gens)
    changed = True
    while changed:
        changed = False
        for s in G.generators:
            for h in list(H.generator_indices):
                c = int(G.conj(h, s))
                if c not in H:
                    H = join(G, H, c)
                    changed = True
    return H


def conjugacy_class_labels(G: GroupTable) -> np.ndarray:
    """Label each element by the least index in its conjugacy class."""
    if "classes" in G._cache:
        return G._cache["classes"]
    everything = np.arange(G.order)
    moves = [np.asarray(G.conj(everything, s)) for s in G.generators]
    labels = everything.copy()
    while True:
        new = labels.copy()
        for m in moves:
            np.minimum(new, labels[m], out=new)
            np.minimum.at(new, m, labels)
        if np.array_equal(new, labels):
            break
        labels = new
    G._cache["classes"] = labels
    return labels


def center(G: GroupTable) -> Subgroup:
    everything = np.arange(G.order)
    ok = np.ones(G.order, dtype=bool)
    for s in G.generators:
        ok &= np.asarray(G.mul(everything, s)) == np.asarray(G.mul(s, everything))
    return _subgroup_from_member_bools(G, ok)


def commutator_subgroup(G: GroupTable, H: Subgroup) -> Subgroup:
    """``[G, H]`` for normal ``H``: normal closure of generator commutators."""
    comms = {
        int(G.commutator(s, h)) for s in G.generators for h in H.generator_indices
    }
    return normal_closure(G, comms)


def lower_central_series(G: GroupTable) -> list[Subgroup]:
    series = [whole_group(G)]
    while True:
        nxt = commutator_subgroup(G, series[-1])
        if nxt == series[-1]:
            return series
        series.append(nxt)


def nilpotent_residual(G: GroupTable) -> Subgroup:
    return lower_central_series(G)[-1]


def is_nilpotent(G: GroupTable) -> bool:
    return nilpotent_residual(G).is_trivial()


def normal_subgroups(G: GroupTable) -> list[Subgroup]:
    """All normal subgroups: normal closures of classes, closed under joins."""
    if "normals" in G._cache:
        return G._cache["normals"]
    found = {1: trivial_subgroup(G)}
    for rep in np.unique(conjugacy_class_labels(G))[1:]:
        N = normal_closure(G, [int(rep)])
        found.setdefault(N.mask, N)
    queue = list(found.values())
    while queue:
        A = queue.pop()
        for B in list(found.values()):
            if A <= B or B <= A:
                continue
            J = join_subgroups(G, A, B)
            if J.mask not in found:
                found[J.mask] = J
                queue.append(J)
    out = sorted(found.values(), key=lambda N: (N.order, N.members.tolist()))
    G._cache["normals"] = out
    return out


def minimal_normal_subgroups(G: GroupTable) -> list[Subgroup]:
    """Minimal elements among normal closures of single non-identity classes."""
    closures: dict[int, Subgroup] = {}
    for rep in np.unique(conjugacy_class_labels(G))[1:]:
        N = normal_closure(G, [int(rep)])
        closures.setdefault(N.mask, N)
    cands = sorted(closures.values(), key=lambda N: (N.order, N.members.tolist()))
    return [N for N in cands if not any(K < N for K in cands)]


# -- lattice ---------------------------------------------------------------------


def cyclic_subgroups(G: GroupTable) -> tuple[list[Subgroup], np.ndarray]:
    """All cyclic subgroups, plus the id of ``⟨g⟩`` for every element ``g``."""
    if "cyclic" in G._cache:
        return G._cache["cyclic"]
    ids = np.full(G.order, -1, dtype=np.int64)
    subs: list[Subgroup] = []
    for g in range(G.order):
        if ids[g] >= 0:
            continue
        o = G.element_order(g)
        powers = [0]
        x = 0
        for _ in range(o - 1):
            x = int(G.mul(x, g))
            powers.append(x)
        bools = np.zeros(G.order, dtype=bool)
        bools[powers] = True
        subs.append(Subgroup.from_bools(G, bools, [g] if g else []))
        for k, x in enumerate(powers):
            if np.gcd(k, o) == 1:
                ids[x] = len(subs) - 1
    G._cache["cyclic"] = (subs, ids)
    return subs, ids


def subgroup_classes(
    G: GroupTable, cap: int = LATTICE_ORDER_CAP, max_subgroups: int = LATTICE_SUBGROUP_CAP
) -> list[list[Subgroup]]:
    """Every subgroup of G, grouped into conjugacy classes.

    Seeds are the cyclic subgroups; each class representative H is joined with
    one cyclic subgroup per N_G(H)-orbit. Any subgroup K is ⟨H', c⟩ for a maximal
    H' < K, and conjugating by an element of N_G(H) moves c to a canonical orbit
    member, so every class is reached.
    """
    if G.order > cap:
        raise LatticeTooLarge(
            f"order {G.order} exceeds lattice cap {cap}; use action-provided subgroups instead"
        )
    if "lattice" in G._cache:
        return G._cache["lattice"]
    cyclics, cyc_id = cyclic_subgroups(G)
    seen: set[int] = set()
    classes: list[list[Subgroup]] = []
    queue: deque[Subgroup] = deque()
    total = 0

    def add_class(H: Subgroup) -> None:
        nonlocal total
        conj = conjugates_of(G, H)
        total += len(conj)
        if total > max_subgroups:
            raise LatticeTooLarge(f"more than {max_subgroups} subgroups")
        seen.update(K.mask for K in conj)
        classes.append(conj)
        queue.append(H)

    for C in cyclics:
        if C.mask not in seen:
            add_class(C)
    while queue:
        H = queue.popleft()
        N = normalizer(G, H)
        for cid, C in enumerate(cyclics):
            if C.mask & ~H.mask == 0:
                continue
            c = C.generator_indices[0]
            orbit_ids = cyc_id[np.asarray(G.conj(c, N.members))]
            if orbit_ids.min() != cid:
                continue
            J = join(G, H, c)
            if J.mask not in seen:
                add_class(J)
    for cls in classes:
        cls.sort(key=lambda K: K.members.tolist())
    classes.sort(key=lambda cls: (cls[0].order, cls[0].members.tolist()))
    G._cache["lattice"] = classes
    return classes


def all_subgroups(G: GroupTable, cap: int = LATTICE_ORDER_CAP) -> list[Subgroup]:
    subs = [K for cls in subgroup_classes(G, cap) for K in cls]
    return sorted(subs, key=lambda K: (K.order, K.members.tolist()))


def maximal_subgroup_classes(G: GroupTable, cap: int = LATTICE_ORDER_CAP) -> list[list[Subgroup]]:
    classes = subgroup_classes(G, cap)
    proper = [K.mask for cls in classes for K in cls if K.is_proper()]
    out = []
    for cls in classes:
        H = cls[0]
        if not H.is_proper():
            continue
        if not any(m != H.mask and H.mask & ~m == 0 for m in proper):
            out.append(cls)
    return out


def maximal_subgroups(G: GroupTable, cap: int = LATTICE_ORDER_CAP) -> list[tuple[Subgroup, bool]]:
    return [
        (K, len(cls) == 1)
        for cls in maximal_subgroup_classes(G, cap)
        for K in cls
    ]


def double_coset_reps(G: GroupTable, H: Subgroup) -> list[int]:
    """Least element of each double coset ``H·x·H`` (H-orbits on right cosets of H)."""
    labels, reps = right_coset_labels(G, H)
    seen = np.zeros(len(reps), dtype=bool)
    out = []
    for r in reps:
        c = labels[r]
        if seen[c]:
            continue
        out.append(r)
        seen[labels[G.mul(r, H.members)]] = True
    return out


def is_maximal(G: GroupTable, M: Subgroup) -> bool:
    """Test ``⟨M, g⟩ = G`` for every ``g ∉ M``; one ``g`` per double coset suffices."""
    if not M.is_proper():
        return False
    return all(join(G, M, x).order == G.order for x in double_coset_reps(G, M)[1:])


# -- quotients and actions -------------------------------------------------------


def coset_action(G: GroupTable, H: Subgroup) -> tuple[GroupTable, np.ndarray]:
    """G acting on the right cosets of H by right multiplication.

    Returns the image group (degree [G:H]) and the map sending each element
    index of G to the index of its image.
    """
    labels, reps = right_coset_labels(G, H)
    reps_arr = np.array(reps)
    everything = np.arange(G.order)
    images = labels[np.asarray(G.mul(reps_arr[None, :], everything[:, None]))]
    gens = [Permutation(tuple(int(x) for x in images[s])) for s in G.generators]
    Q = generate_group(gens, cap=max(G.order, 1), degree=len(reps))
    projection = Q.lookup(images)
    return Q, projection


def quotient(G: GroupTable, N: Subgroup) -> tuple[GroupTable, np.ndarray]:
    if not is_normal(G, N):
        raise NotNormal("quotient requires a normal subgroup")
    return coset_action(G, N)


def point_stabilizer(G: GroupTable, point: int) -> Subgroup:
    if not 0 <= point < G.degree:
        raise ValueError(f"point {point} out of range")
    return _subgroup_from_member_bools(G, G.fixes(point))


def sylow_subgroup(G: GroupTable, p: int) -> Subgroup:
    """A Sylow p-subgroup, grown inside successive normalizers from a fixed seed."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    target = 1
    while G.order % (target * p) == 0:
        target *= p
    P = trivial_subgroup(G)
    while P.order < target:
        N = normalizer(G, P)
        inside = P.bools
        for g in N.members:
            g = int(g)
            if not inside[g] and inside[G.power(g, p)]:
                P = join(G, P, g)
                break
        else:  # pragma: no cover - Sylow theory guarantees an element
            raise RuntimeError("no p-element found in N(P)/P")
    return P


# -- structure report ------------------------------------------------------------


@dataclass
class StructureReport:
    lower_central_series: list[Subgroup]
    nilpotent_residual: Subgroup
    is_nilpotent: bool
    center: Subgroup
    frattini: Subgroup | None
    minimal_normals: list[Subgroup]
    is_qmnn: bool


def frattini(G: GroupTable, cap: int = LATTICE_ORDER_CAP) -> Subgroup:
    bools = np.ones(G.order, dtype=bool)
    for K, _ in maximal_subgroups(G, cap):
        bools &= K.bools
    return _subgroup_from_member_bools(G, bools)


def structure_report(G: GroupTable, cap: int = LATTICE_ORDER_CAP) -> StructureReport:
    """Collect the structural data; ``frattini`` is None above the lattice cap."""
    series = lower_central_series(G)
    residual = series[-1]
    nilpotent = residual.is_trivial()
    mins = minimal_normal_subgroups(G)
    qmnn = not nilpotent and all(is_nilpotent(quotient(G, N)[0]) for N in mins)
    return StructureReport(
        lower_central_series=series,
        nilpotent_residual=residual,
        is_nilpotent=nilpotent,
        center=center(G),
        frattini=frattini(G, cap) if G.order <= cap else None,
        minimal_normals=mins,
        is_qmnn=qmnn,
    )
