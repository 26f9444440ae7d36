import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchkit.errors import CoveringBoundError, PreconditionError, StructuralError
from matchkit.gfq import FieldTower, subfield
from matchkit.subspace import (
    Subspace,
    VectorSpace,
    enumerate_subspaces,
    find_uncovered_vector,
    gaussian_binomial,
    intersect,
    is_subfield,
    kneser_bound_check,
    linear_covering,
    multiplier_space,
    product_span,
    span,
    stabilizer,
)
from oracles import all_subspaces, all_vectors, span_set


def as_set(s: Subspace) -> frozenset:
    return frozenset(s.elements())


@st.composite
def spaces_and_rows(draw, max_rows=4):
    p, n = draw(st.sampled_from([(2, 3), (2, 4), (3, 3), (5, 2), (2, 5)]))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), max_size=max_rows))
    return VectorSpace(p, n), [tuple(r) for r in rows]


@given(spaces_and_rows(), st.data())
def test_lattice_operations_match_set_model(sr, data):
    space, rows = sr
    p, n = space.q, space.n
    other = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), max_size=3))
    a, b = span(space, rows), span(space, [tuple(r) for r in other])
    sa, sb = span_set(rows, n, p), span_set([tuple(r) for r in other], n, p)
    assert as_set(a) == sa and as_set(b) == sb
    assert as_set(a & b) == sa & sb
    assert as_set(a + b) == span_set(list(sa | sb), n, p)
    assert (a & b).dim + (a + b).dim == a.dim + b.dim
    assert (a <= b) == (sa <= sb)
    for v in all_vectors(n, p)[:50]:
        assert (v in a) == (v in sa)


@given(spaces_and_rows())
def test_perp_is_the_annihilator(sr):
    space, rows = sr
    p, n = space.q, space.n
    a = span(space, rows)
    ann = {v for v in all_vectors(n, p) if all(sum(x * y for x, y in zip(v, w)) % p == 0 for w in a.basis)}
    assert as_set(a.perp()) == ann
    assert a.perp().perp() == a


def test_rref_is_canonical():
    space = VectorSpace(3, 3)
    a = span(space, [(2, 1, 0), (1, 1, 1)])
    b = span(space, [(1, 1, 1), (2, 1, 0), (0, 0, 0)])
    assert a == b
    assert a.basis == ((1, 0, 2), (0, 1, 2))


def test_rejects_bad_vectors():
    space = VectorSpace(2, 3)
    with pytest.raises(StructuralError):
        span(space, [(1, 2, 0)])
    with pytest.raises(StructuralError):
        span(space, [(1, 0)])
    with pytest.raises(StructuralError):
        intersect(span(space, [(1, 0, 0)]), span(VectorSpace(2, 4), [(1, 0, 0, 0)]))


@pytest.mark.parametrize("p,n", [(2, 3), (2, 4), (3, 3), (3, 2)])
def test_enumeration_matches_oracle(p, n):
    space = VectorSpace(p, n)
    for k in range(n + 1):
        subs = list(enumerate_subspaces(space, k))
        assert len(subs) == gaussian_binomial(n, k, p)
        assert len(set(subs)) == len(subs)
        if k:
            assert {as_set(s) for s in subs} == all_subspaces(n, p, k)


def test_gaussian_binomial_values():
    # values of the q-binomial coefficient, frozen from the product formula
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(5, 0, 7) == 1


def _closure_product(t, a, b):
    prods = [t.mul(x, y) for x in a.elements() for y in b.elements()]
    return span(t, prods)


@pytest.mark.parametrize("q,n", [(2, 4), (3, 2), (2, 3)])
def test_product_span_and_stabilizer_by_scanning(q, n):
    t = FieldTower.from_q(q, n)
    subs = [s for k in range(1, n + 1) for s in enumerate_subspaces(t, k)]
    for a, b in itertools.islice(itertools.product(subs, repeat=2), 0, None, 7):
        assert product_span(a, b) == _closure_product(t, a, b)
        w = product_span(a, b)
        scanned = [x for x in t.elements() if all(t.mul(x, y) in w for y in w.basis)]
        stab = stabilizer(w)
        assert set(stab.elements()) == set(scanned)
        assert is_subfield(stab)


def test_multiplier_space_of_subfield():
    t = FieldTower.from_q(2, 4)
    f4 = subfield(t, 2)
    assert multiplier_space(f4, f4) == f4
    assert multiplier_space(f4, Subspace.full(t)).dim == 0


def test_scale_by_zero_rejected():
    from matchkit.subspace import scale

    t = FieldTower.from_q(2, 2)
    with pytest.raises(PreconditionError):
        scale(t.zero(), Subspace.full(t))


def test_kneser_exhaustive_f16():
    t = FieldTower.from_q(2, 4)
    subs = list(enumerate_subspaces(t, 2))
    for a, b in itertools.product(subs, repeat=2):
        assert kneser_bound_check(a, b).holds


@given(st.data())
def test_find_uncovered_vector_avoids_family(data):
    p, n = data.draw(st.sampled_from([(2, 3), (3, 2), (3, 3), (2, 4)]))
    space = VectorSpace(p, n)
    m = data.draw(st.integers(1, p))
    fam = []
    for _ in range(m):
        k = data.draw(st.integers(0, n - 1))
        rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), max_size=k))
        fam.append(span(space, [tuple(r) for r in rows]))
    v = find_uncovered_vector(space, fam)
    assert all(v not in s for s in fam)


def test_find_uncovered_vector_bounds():
    space = VectorSpace(2, 2)
    lines = [span(space, [v]) for v in [(1, 0), (0, 1), (1, 1)]]
    with pytest.raises(CoveringBoundError):
        find_uncovered_vector(space, lines)
    with pytest.raises(PreconditionError):
        find_uncovered_vector(space, [Subspace.full(space)])
    assert find_uncovered_vector(space, []) == (0, 0)


@pytest.mark.parametrize("q,d", [(2, 2), (3, 2), (2, 3), (5, 2)])
def test_linear_covering(q, d):
    rep = linear_covering(q, d)
    assert len(rep.family) == q + 1
    assert rep.covers and rep.minimal
    assert all(h.dim == d - 1 for h in rep.family)
    union = set().union(*(as_set(h) for h in rep.family))
    assert union == set(all_vectors(d, q))
