"""Group specifications, their resolution to tables, and the standard corpus."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import sympy

from conjcover import constructions as C
from conjcover.perm import GroupTable, GroupTooLarge, format_cycles, generate_group, order_cap, parse_cycles

KINDS = ("perm", "dihedral", "symmetric", "alternating", "agl1", "wreath", "cyclic")
_ALIASES = {"sym": "symmetric", "alt": "alternating", "d": "dihedral", "c": "cyclic", "dih": "dihedral"}


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    n: int | None = None
    p: int | None = None
    k: int | None = None
    degree: int | None = None
    generators: tuple[str, ...] = ()
    base: GroupSpec | None = None
    copies: int | None = None
    top: GroupSpec | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown group kind {self.kind!r}; expected one of {', '.join(KINDS)}")

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v not in (None, ())}

    def key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> GroupSpec:
        d = dict(d)
        try:
            kind = d.pop("kind")
        except KeyError:
            raise SpecError("group spec needs a 'kind'") from None
        for name in ("base", "top"):
            if d.get(name) is not None:
                d[name] = cls.from_dict(d[name])
        if "generators" in d:
            d["generators"] = tuple(d["generators"])
        unknown = set(d) - {f for f in cls.__dataclass_fields__ if f != "kind"}
        if unknown:
            raise SpecError(f"unknown spec fields: {sorted(unknown)}")
        return cls(kind=_ALIASES.get(kind, kind), **d)

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        """JSON object or shorthand such as ``dihedral:7``, ``agl1:13:4``,
        ``perm:5:(1 2 3 4 5);(1 2)``, ``wreath:alt:5:2``, or a named group
        (``m11``, ``q8``, ``a4``, ``a6deg10``)."""
        text = text.strip()
        if text.startswith("{"):
            try:
                return cls.from_dict(json.loads(text))
            except json.JSONDecodeError as exc:
                raise SpecError(f"bad JSON spec: {exc}") from None
        if text.lower() in NAMED:
            return NAMED[text.lower()]()
        head, _, rest = text.partition(":")
        kind = _ALIASES.get(head.lower(), head.lower())
        if kind == "perm":
            deg, _, gens = rest.partition(":")
            return cls("perm", degree=_int(deg), generators=tuple(g.strip() for g in gens.split(";") if g.strip()))
        if kind == "wreath":
            inner, _, copies = rest.rpartition(":")
            return cls("wreath", base=cls.parse(inner), copies=_int(copies))
        parts = rest.split(":") if rest else []
        if kind == "agl1":
            if len(parts) != 2:
                raise SpecError("agl1 shorthand is agl1:<p>:<k>")
            return cls("agl1", p=_int(parts[0]), k=_int(parts[1]))
        if kind not in KINDS:
            raise SpecError(f"unknown group kind {head!r}")
        if len(parts) != 1:
            raise SpecError(f"{kind} shorthand is {kind}:<n>")
        return cls(kind, n=_int(parts[0]))


def _int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise SpecError(f"expected an integer, got {s!r}") from None


def perm_spec(G: GroupTable) -> GroupSpec:
    return GroupSpec("perm", degree=G.degree, generators=tuple(format_cycles(G.elements[g]) for g in G.generators))


@lru_cache(maxsize=None)
def _a6_degree10_spec() -> GroupSpec:
    return perm_spec(C.alternating6_degree10())


NAMED = {
    "m11": lambda: GroupSpec("perm", degree=11, generators=("(1 2 3 4 5 6 7 8 9 10 11)", "(3 7 11 8)(4 10 5 6)")),
    "q8": lambda: GroupSpec("perm", degree=8, generators=("(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)")),
    "a4": lambda: GroupSpec("perm", degree=4, generators=("(1 2 3)", "(1 2)(3 4)")),
    "a6deg10": _a6_degree10_spec,
    "a5wrc2": lambda: GroupSpec("wreath", base=GroupSpec("alternating", n=5), copies=2),
}


@dataclass
class ResolvedGroup:
    spec: GroupSpec
    table: GroupTable
    frame: C.SolvableFrame | None = None


def _need(value, name: str, kind: str) -> int:
    if value is None:
        raise SpecError(f"{kind} spec needs '{name}'")
    return value


@lru_cache(maxsize=256)
def _resolve_cached(key: str, cap: int) -> ResolvedGroup:
    return _build(GroupSpec.from_dict(json.loads(key)), cap)


def resolve(spec: GroupSpec | str, cap: int | None = None) -> ResolvedGroup:
    """Build (and memoise) the table for a spec; agl1 specs also carry their frame."""
    if isinstance(spec, str):
        spec = GroupSpec.parse(spec)
    return _resolve_cached(spec.key(), order_cap() if cap is None else cap)


def _build(spec: GroupSpec, cap: int) -> ResolvedGroup:
    kind = spec.kind
    if kind == "perm":
        deg = _need(spec.degree, "degree", kind)
        gens = [parse_cycles(g, deg) for g in spec.generators]
        return ResolvedGroup(spec, generate_group(gens, cap=cap, degree=deg))
    if kind == "agl1":
        frame = C.agl1(_need(spec.p, "p", kind), _need(spec.k, "k", kind))
        return ResolvedGroup(spec, frame.G, frame)
    if kind == "wreath":
        base = _build(_need(spec.base, "base", kind), cap).table
        copies = _need(spec.copies, "copies", kind)
        top = _build(spec.top, cap).table if spec.top else C.cyclic(copies)
        return ResolvedGroup(spec, C.wreath_product(base, copies, top, cap=cap))
    n = _need(spec.n, "n", kind)
    builder = {"dihedral": C.dihedral, "symmetric": C.symmetric, "alternating": C.alternating, "cyclic": C.cyclic}
    try:
        G = builder[kind](n, cap=cap)
    except GroupTooLarge:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    return ResolvedGroup(spec, G)


# -- corpus ----------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: GroupSpec
    order: int = field(compare=False)


_KNOWN_ORDERS = {"m11": 7920, "a6deg10": 360}


def _order_of(spec: GroupSpec) -> int:
    """Order from parameters, without building the table."""
    k = spec.kind
    if k == "dihedral":
        return 2 * spec.n
    if k == "symmetric":
        return math.factorial(spec.n)
    if k == "alternating":
        return max(1, math.factorial(spec.n) // 2)
    if k == "cyclic":
        return spec.n
    if k == "agl1":
        return spec.p * spec.k
    if k == "wreath":
        return _order_of(spec.base) ** spec.copies * (_order_of(spec.top) if spec.top else spec.copies)
    return resolve(spec).table.order


def build_corpus(max_order: int = 200) -> list[CorpusEntry]:
    """The standard test corpus in a fixed order, keeping entries of order ≤ max_order."""
    entries: list[tuple[str, GroupSpec | str]] = []
    entries += [(f"D{2 * n}", GroupSpec("dihedral", n=n)) for n in range(3, 33)]
    entries += [(f"Sym{n}", GroupSpec("symmetric", n=n)) for n in range(2, 7)]
    entries += [(f"Alt{n}", GroupSpec("alternating", n=n)) for n in range(3, 7)]
    for p in (3, 5, 7, 11, 13):
        entries += [(f"AGL1({p},{k})", GroupSpec("agl1", p=p, k=k)) for k in sympy.divisors(p - 1) if k > 1]
    entries += [(f"C{m}", GroupSpec("cyclic", n=m)) for m in range(2, 17)]
    # named entries stay lazy so the large ones are never built when filtered out
    entries += [("A4", "a4"), ("Q8", "q8"), ("A6deg10", "a6deg10"), ("A5wrC2", "a5wrc2"), ("M11", "m11")]
    out = []
    for name, spec in entries:
        if isinstance(spec, str):
            order = _KNOWN_ORDERS.get(spec)
            if order is not None and order > max_order:
                continue
            spec = NAMED[spec]()
        order = _order_of(spec)
        if order <= max_order:
            out.append(CorpusEntry(name, spec, order))
    return out
