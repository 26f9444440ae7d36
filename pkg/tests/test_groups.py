import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchkit.abelian import (
    GroupSpec,
    GroupSubset,
    coset_structure,
    cyclic_phi_psi,
    is_subgroup,
    subgroup_generated,
    sumset,
)
from matchkit.errors import CapExceededError, PreconditionError, StructuralError
from matchkit.matchgrp import (
    brute_force_deficiency,
    build_match_graph,
    coset_free_sufficiency,
    deficiency,
    is_matched,
    max_matching,
)
from oracles import cyclic_matching_exists, hall_deficiency_cyclic, max_partial_matching_cyclic


def cyc(n, xs):
    return GroupSubset.of(GroupSpec.cyclic(n), xs)


def test_group_spec_validation():
    with pytest.raises(StructuralError):
        GroupSpec(())
    with pytest.raises(StructuralError):
        GroupSpec((0,))
    g = GroupSpec((2, 3))
    assert g.order == 6 and g.rank == 2
    with pytest.raises(StructuralError):
        g.element((2, 0))
    with pytest.raises(StructuralError):
        GroupSubset.of(g, [(0, 1), (0, 1)])
    with pytest.raises(CapExceededError):
        list(GroupSpec((1 << 21,)).elements())


def test_z6_full_example():
    a = cyc(6, range(1, 6))
    pairs = is_matched(a, a)
    assert pairs == [((x,), ((-x) % 6,)) for x in range(1, 6)]
    obstructions = coset_free_sufficiency(a, a)
    assert ((3,), cyc(6, [1, 4])) in obstructions


def test_z4_closed_sumset():
    a, b = cyc(4, [1, 3]), cyc(4, [0, 2])
    rep = deficiency(a, b)
    assert (rep.M, rep.D) == (0, 2)
    assert rep.violator == ((1,), (3,))
    assert rep.sumset_equals_a and rep.zero_in_b and rep.warnings


def test_z5_small_example():
    rep = deficiency(cyc(5, [1, 2]), cyc(5, [3, 4]))
    assert rep.M == 2 and rep.matching == (((1,), (4,)), ((2,), (3,)))


def test_structural_errors():
    with pytest.raises(StructuralError):
        build_match_graph(cyc(6, [1]), cyc(6, [1, 2]))
    with pytest.raises(StructuralError):
        build_match_graph(cyc(6, [1]), cyc(5, [1]))
    with pytest.raises(StructuralError):
        build_match_graph(cyc(6, []), cyc(6, []))


@st.composite
def cyclic_pair(draw, max_n=12, max_k=5):
    n = draw(st.integers(2, max_n))
    k = draw(st.integers(1, min(n, max_k)))
    a = draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))
    b = draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))
    return n, sorted(a), sorted(b)


@given(cyclic_pair())
def test_matching_size_is_exact(case):
    n, a, b = case
    rep = deficiency(cyc(n, a), cyc(n, b))
    assert rep.M == max_partial_matching_cyclic(n, a, b)
    assert rep.D == hall_deficiency_cyclic(n, a, b)
    assert rep.M + rep.D == len(a)
    assert (rep.M == len(a)) == cyclic_matching_exists(n, a, b)


def _all_maximum_matchings(graph):
    left = list(graph.left)
    best, found = 0, []
    for k in range(len(left), 0, -1):
        for sub in itertools.combinations(left, k):
            for img in itertools.permutations(graph.right, k):
                if all(y in graph.adjacency[x] for x, y in zip(sub, img)):
                    found.append(list(zip(sub, img)))
        if found:
            return found
    return [[]]


@given(cyclic_pair(max_n=9, max_k=4))
def test_lex_least_maximum_matching(case):
    n, a, b = case
    graph = build_match_graph(cyc(n, a), cyc(n, b))
    pairs = max_matching(graph)
    assert pairs == min(_all_maximum_matchings(graph))
    d, s = brute_force_deficiency(graph)
    assert len(pairs) == len(a) - d
    assert len(s) - len(graph.neighbourhood(s)) == d


@given(cyclic_pair(max_n=10, max_k=4))
def test_coset_free_pairs_are_matched(case):
    n, a, b = case
    if 0 in b:
        return
    if not coset_free_sufficiency(cyc(n, a), cyc(n, b)):
        assert is_matched(cyc(n, a), cyc(n, b)) is not None


def test_coset_structure_rejects_bad_sizes():
    with pytest.raises(PreconditionError):
        coset_structure(cyc(6, [1, 2, 3]), cyc(6, [0]))
    with pytest.raises(PreconditionError):
        coset_structure(cyc(6, []), cyc(6, [0]))


def test_coset_structure_examples():
    b, rep = coset_structure(cyc(6, [1, 4]), cyc(6, [0, 3]))
    assert b == cyc(6, [0, 3]) and rep == (1,)
    assert coset_structure(cyc(6, [1, 2]), cyc(6, [0, 3])) is None


def test_subgroup_helpers():
    g = GroupSpec((2, 4))
    h = subgroup_generated(g, (1, 2))
    assert h == GroupSubset.of(g, [(0, 0), (1, 2)])
    assert is_subgroup(h)
    assert sumset(h, h) == h


@pytest.mark.parametrize("p,r,psi,phi", [(2, 1, 1, 1), (2, 3, 4, 4), (3, 2, 3, 6), (5, 2, 5, 20), (7, 1, 1, 6)])
def test_cyclic_phi_psi(p, r, psi, phi):
    rep = cyclic_phi_psi(p, r)
    assert (rep.psi, rep.phi) == (psi, phi)
    # psi is the largest proper subgroup order; phi counts generators
    n = p**r
    gens = sum(1 for x in range(n) if len(subgroup_generated(GroupSpec.cyclic(n), x)) == n)
    assert gens == phi


def test_cyclic_phi_psi_rejects_composite():
    with pytest.raises(PreconditionError):
        cyclic_phi_psi(6, 1)
