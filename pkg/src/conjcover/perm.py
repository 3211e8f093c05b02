"""Permutations, cycle notation, and enumerated group tables.

Composition is left-to-right: ``a * b`` applies ``a`` first, then ``b``.
Points are 0-based internally and 1-based in cycle notation.
"""

from __future__ import annotations

import math
import os
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

DEFAULT_ORDER_CAP = 10_000
# Full multiplication tables are built only up to this order (|G|^2 int32 entries).
TABLE_LIMIT = 2_048


class CycleSyntaxError(ValueError):
    """Malformed cycle notation; ``pos`` is the 0-based offset into the text."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


class GroupTooLarge(ValueError):
    """Closure exceeded the order cap of the desk-scale engine."""


def order_cap() -> int:
    """The default order cap, overridable through CONJCOVER_MAX_ORDER."""
    value = os.environ.get("CONJCOVER_MAX_ORDER")
    return int(value) if value else DEFAULT_ORDER_CAP


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(tuple(range(degree)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __pow__(self, k: int) -> Permutation:
        base = self if k >= 0 else self.inverse()
        result = Permutation.identity(self.degree)
        for _ in range(abs(k)):
            result = compose(result, base)
        return result

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest point, ordered by that point."""
        return _cycles(self.images)

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if not self.is_identity() else 1

    def __str__(self) -> str:
        return format_cycles(self)


def _cycles(images: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(images)
    out = []
    for start in range(len(images)):
        if seen[start] or images[start] == start:
            continue
        cycle = [start]
        seen[start] = True
        x = images[start]
        while x != start:
            seen[x] = True
            cycle.append(x)
            x = images[x]
        out.append(tuple(cycle))
    return out


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return ``a·b``: apply ``a`` first, then ``b``."""
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    bi = b.images
    return Permutation(tuple(bi[x] for x in a.images))


def format_cycles(p: Permutation | Sequence[int]) -> str:
    images = p.images if isinstance(p, Permutation) else p
    cycles = _cycles(images)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\d+)|(,)|(\S))")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse a product of disjoint cycles such as ``"(1 2 3)(4 5)"``.

    ``"e"`` and ``"()"`` denote the identity. Points may be separated by
    spaces or commas.
    """
    if degree < 1:
        raise ValueError("degree must be positive")
    if text.strip() == "e":
        return Permutation.identity(degree)
    images = list(range(degree))
    used: set[int] = set()
    cycle: list[int] | None = None
    cycle_open = 0
    pos = 0
    n_cycles = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        assert m is not None
        start = m.start(m.lastindex)
        pos = m.end()
        if m.group(1):
            if cycle is not None:
                raise CycleSyntaxError("nested '('", text, start)
            cycle, cycle_open = [], start
        elif m.group(2):
            if cycle is None:
                raise CycleSyntaxError("unmatched ')'", text, start)
            for i, x in enumerate(cycle):
                images[x] = cycle[(i + 1) % len(cycle)]
            cycle = None
            n_cycles += 1
        elif m.group(3):
            if cycle is None:
                raise CycleSyntaxError("point outside a cycle", text, start)
            point = int(m.group(3))
            if not 1 <= point <= degree:
                raise CycleSyntaxError(f"point {point} out of range 1..{degree}", text, start)
            if point - 1 in used:
                raise CycleSyntaxError(f"repeated point {point}", text, start)
            used.add(point - 1)
            cycle.append(point - 1)
        elif m.group(4):
            if cycle is None:
                raise CycleSyntaxError("',' outside a cycle", text, start)
        else:
            raise CycleSyntaxError(f"unexpected character {m.group(5)!r}", text, start)
    if cycle is not None:
        raise CycleSyntaxError("unclosed '('", text, cycle_open)
    if n_cycles == 0:
        raise CycleSyntaxError("empty expression", text, 0)
    return Permutation(tuple(images))


class GroupTable:
    """A finite permutation group with every element enumerated and indexed.

    ``elements[0]`` is the identity; the rest follow breadth-first discovery
    order from the generators. Arithmetic is done on element indices: ``mul``
    accepts broadcastable integer arrays and uses a full multiplication table
    for small groups, vectorised composition plus base-image lookup otherwise.
    """

    def __init__(self, degree: int, elements: Sequence[tuple[int, ...]], generators: Sequence[int]):
        self.degree = degree
        self.elements: tuple[tuple[int, ...], ...] = tuple(elements)
        self.index: dict[tuple[int, ...], int] = {e: i for i, e in enumerate(self.elements)}
        self.generators: tuple[int, ...] = tuple(generators)
        self.perms = np.array(self.elements, dtype=np.int32).reshape(len(self.elements), degree)
        self._cache: dict = {}
        self._build_lookup()
        inv = np.argsort(self.perms, axis=1).astype(np.int32)
        self.inv = self.lookup(inv)
        self._table = None
        if self.order <= TABLE_LIMIT:
            self._table = self._build_table()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"GroupTable(degree={self.degree}, order={self.order})"

    # -- lookup ---------------------------------------------------------------

    def _build_lookup(self) -> None:
        n, d = self.perms.shape
        base: list[int] = []
        keys = np.zeros(n, dtype=np.int64)
        distinct = 1
        while distinct < n:
            if d ** (len(base) + 1) >= 2**62:
                self._base = None
                self._row_index = {row.tobytes(): i for i, row in enumerate(self.perms)}
                return
            free = [p for p in range(d) if p not in base]
            candidates = free if len(free) <= 64 else free[:: max(1, len(free) // 64)]
            best = None
            for pt in candidates:
                count = len(np.unique(keys * d + self.perms[:, pt]))
                if best is None or count > best[1]:
                    best = (pt, count)
            if best[1] == distinct and len(candidates) < len(free):
                for pt in free:
                    count = len(np.unique(keys * d + self.perms[:, pt]))
                    if count > best[1]:
                        best = (pt, count)
                        break
            base.append(best[0])
            keys = keys * d + self.perms[:, best[0]]
            distinct = best[1]
        self._base = np.array(base, dtype=np.intp)
        self._radix = d ** np.arange(len(base) - 1, -1, -1, dtype=np.int64)
        codes = self._encode(self.perms)
        self._order_by_code = np.argsort(codes, kind="stable").astype(np.int32)
        self._sorted_codes = codes[self._order_by_code]

    def _encode(self, images: np.ndarray) -> np.ndarray:
        if len(self._base) == 0:
            return np.zeros(images.shape[:-1], dtype=np.int64)
        return images[..., self._base].astype(np.int64) @ self._radix

    def lookup(self, images: np.ndarray, check: bool = False) -> np.ndarray:
        """Indices of the permutations given as rows of ``images`` (last axis).

        Rows are assumed to be group members unless ``check`` is set, in which
        case non-members raise ``KeyError``.
        """
        images = np.asarray(images)
        if self._base is None:
            flat = images.reshape(-1, self.degree).astype(np.int32)
            try:
                out = np.array([self._row_index[r.tobytes()] for r in flat], dtype=np.int32)
            except KeyError as exc:
                raise KeyError("permutation not in group") from exc
            return out.reshape(images.shape[:-1])
        codes = self._encode(images)
        pos = np.searchsorted(self._sorted_codes, codes)
        pos = np.minimum(pos, len(self._sorted_codes) - 1)
        if not np.array_equal(self._sorted_codes[pos], codes):
            raise KeyError("permutation not in group")
        out = self._order_by_code[pos]
        if check and not np.array_equal(self.perms[out], images):
            raise KeyError("permutation not in group")
        return out

    def index_of(self, p: Permutation | Sequence[int]) -> int:
        images = tuple(p.images if isinstance(p, Permutation) else p)
        try:
            return self.index[images]
        except KeyError:
            raise KeyError(f"{format_cycles(images)} is not in the group") from None

    def __contains__(self, p) -> bool:
        images = tuple(p.images if isinstance(p, Permutation) else p)
        return images in self.index

    def perm(self, i: int) -> Permutation:
        return Permutation(self.elements[i])

    # -- arithmetic on indices ------------------------------------------------

    def _build_table(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=np.int32)
        chunk = max(1, 200_000 // max(n * self.degree, 1))
        for lo in range(0, n, chunk):
            a = np.arange(lo, min(n, lo + chunk))
            # (a·b)[x] = b[a[x]] for every b, all at once
            images = self.perms[:, self.perms[a]]  # shape (n_b, len(a), d)
            table[a, :] = self.lookup(images).T
        return table

    def mul(self, a, b):
        """Index of ``a·b`` (broadcasts over integer arrays)."""
        if self._table is not None:
            return self._table[a, b]
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        images = np.take_along_axis(self.perms[b], self.perms[a], axis=-1)
        out = self.lookup(images)
        return out if out.ndim else int(out)

    def conj(self, a, g):
        """Index of ``a^g = g⁻¹·a·g``."""
        return self.mul(self.mul(self.inv[g], a), g)

    def commutator(self, a, b):
        """Index of ``[a, b] = a⁻¹·b⁻¹·a·b``."""
        return self.mul(self.mul(self.inv[a], self.inv[b]), self.mul(a, b))

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = int(self.inv[a]), -k
        result, base = 0, int(a)
        while k:
            if k & 1:
                result = int(self.mul(result, base))
            base = int(self.mul(base, base))
            k >>= 1
        return result

    def element_order(self, i: int) -> int:
        orders = self._cache.get("orders")
        if orders is None:
            orders = self._cache["orders"] = [
                math.lcm(*(len(c) for c in _cycles(e))) if i else 1
                for i, e in enumerate(self.elements)
            ]
        return orders[i]

    def fixes(self, point: int) -> np.ndarray:
        return self.perms[:, point] == point


def generate_group(
    gens: Iterable[Permutation], cap: int | None = None, degree: int | None = None
) -> GroupTable:
    """Breadth-first closure of ``gens`` into a fully enumerated table.

    Elements appear as: identity, then in discovery order, where each element
    is expanded by right-multiplying with the generators in input order.
    """
    gens = list(gens)
    cap = order_cap() if cap is None else cap
    if gens:
        degree = gens[0].degree
        if any(g.degree != degree for g in gens):
            raise ValueError("generators have different degrees")
    elif degree is None:
        degree = 1
    identity = tuple(range(degree))
    gen_images = [g.images for g in gens]
    elements = [identity]
    index = {identity: 0}
    head = 0
    while head < len(elements):
        x = elements[head]
        head += 1
        for gi in gen_images:
            y = tuple(gi[p] for p in x)
            if y not in index:
                if len(elements) >= cap:
                    raise GroupTooLarge(f"group too large for desk-scale engine (order > {cap})")
                index[y] = len(elements)
                elements.append(y)
    return GroupTable(degree, elements, [index[g] for g in gen_images])
