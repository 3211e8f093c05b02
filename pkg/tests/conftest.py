import os

import pytest
from hypothesis import HealthCheck, settings
from sympy.combinatorics import Permutation as SymPerm
from sympy.combinatorics import PermutationGroup

settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=15, deadline=None)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def sympy_group(G):
    """Independent sympy model of a table, built from its generators only."""
    gens = [SymPerm(list(G.elements[g])) for g in G.generators] or [SymPerm(list(range(G.degree)))]
    return PermutationGroup(gens)


def sympy_subgroup(G, H):
    gens = [SymPerm(list(G.elements[g])) for g in H.generator_indices] or [SymPerm(list(range(G.degree)))]
    return PermutationGroup(gens)


@pytest.fixture(scope="session")
def groups():
    from conjcover import constructions as C

    return {
        "S3": C.symmetric(3),
        "S4": C.symmetric(4),
        "A4": C.alternating(4),
        "A5": C.alternating(5),
        "D10": C.dihedral(5),
        "D12": C.dihedral(6),
        "D14": C.dihedral(7),
        "D16": C.dihedral(8),
        "Q8": C.quaternion(),
        "C6": C.cyclic(6),
        "AGL(5,4)": C.agl1(5, 4).G,
    }
