"""Exact conjugate-product coverings of finite permutation groups."""

from conjcover.covering import (
    INFINITE,
    CoveringWitness,
    gamma_bruteforce_oracle,
    gamma_cp_exact,
    rank,
    rank_factorization,
    set_product,
    verify_witness,
)
from conjcover.perm import (
    CycleSyntaxError,
    GroupTable,
    GroupTooLarge,
    Permutation,
    compose,
    format_cycles,
    generate_group,
    parse_cycles,
)
from conjcover.specs import GroupSpec, build_corpus, resolve

__all__ = [
    "INFINITE",
    "CoveringWitness",
    "CycleSyntaxError",
    "GroupSpec",
    "GroupTable",
    "GroupTooLarge",
    "Permutation",
    "build_corpus",
    "compose",
    "format_cycles",
    "gamma_bruteforce_oracle",
    "gamma_cp_exact",
    "generate_group",
    "parse_cycles",
    "rank",
    "rank_factorization",
    "resolve",
    "set_product",
    "verify_witness",
]
