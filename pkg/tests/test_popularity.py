"""Popularity tests, certificates, and the dominance check.

Differential style throughout: the two polynomial popularity tests must
agree with each other and with exhaustive election counting, on marriage
and (for the structural test) roommates instances.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popmatch.election import delta
from popmatch.gen import random_marriage, random_maximal_matching, random_roommates
from popmatch.model import Matching, parse_instance
from popmatch.oracle import classify_exhaustive, enumerate_matchings
from popmatch.popularity import (
    check_structure,
    find_witness_small,
    is_dominant,
    is_popular_structure,
    is_popular_weight,
    is_stable,
    verify_witness,
)


def test_is_stable_fig1(fig1, m1, m2):
    assert is_stable(fig1, m1) == (True, None)
    ok, edge = is_stable(fig1, m2)
    assert not ok and edge == ("a1", "b1")


def test_fig1_popular_set(fig1, m1, m2, m3):
    for m, expect in ((m1, True), (m2, True), (m3, False)):
        assert is_popular_weight(fig1, m) is expect
        assert is_popular_structure(fig1, m)[0] is expect


def test_fig1_dominant(fig1, m1, m2):
    assert not is_dominant(fig1, m1)
    assert is_dominant(fig1, m2)


def test_structure_certificate_is_checkable(fig1, m3):
    ok, cert = is_popular_structure(fig1, m3)
    assert not ok
    assert check_structure(fig1, m3, cert)


def test_witness_for_stable_matching(fig1, m1):
    w = find_witness_small(fig1, m1)
    assert w is not None
    ok, bad = verify_witness(fig1, m1, w)
    assert ok, bad


def test_no_witness_for_unpopular(fig1, m3):
    assert find_witness_small(fig1, m3) is None


def test_witness_bound_enforced(fig1, m1):
    with pytest.raises(ValueError):
        find_witness_small(fig1, m1, bound=4)


def test_verify_witness_requires_all_vertices(fig1, m1):
    with pytest.raises(ValueError):
        verify_witness(fig1, m1, {"a1": 0})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4), st.integers(1, 4))
def test_marriage_tests_agree_with_elections(seed, na, nb):
    rng = random.Random(seed)
    inst = random_marriage(rng, na, nb, rng.uniform(0.3, 1.0))
    matchings = list(enumerate_matchings(inst, cap=16))
    for m in matchings:
        truth = all(delta(inst, m, n) >= 0 for n in matchings)
        assert is_popular_weight(inst, m) is truth
        got, cert = is_popular_structure(inst, m)
        assert got is truth
        if not got:
            assert check_structure(inst, m, cert)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 6))
def test_roommates_structure_test_agrees_with_elections(seed, n):
    rng = random.Random(seed)
    inst = random_roommates(rng, n, rng.uniform(0.4, 1.0))
    matchings = list(enumerate_matchings(inst, cap=16))
    for m in matchings:
        truth = all(delta(inst, m, n_) >= 0 for n_ in matchings)
        got, cert = is_popular_structure(inst, m)
        assert got is truth
        if not got:
            assert check_structure(inst, m, cert)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4), st.integers(1, 4))
def test_stable_implies_popular_implies_witness(seed, na, nb):
    rng = random.Random(seed)
    inst = random_marriage(rng, na, nb, rng.uniform(0.3, 1.0))
    rep = classify_exhaustive(inst, cap=16)
    for s in rep.stable:
        assert s in rep.popular
    for p in rep.popular:
        w = find_witness_small(inst, p)
        assert w is not None
        assert verify_witness(inst, p, w)[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 6))
def test_dominance_matches_definition_roommates(seed, n):
    rng = random.Random(seed)
    inst = random_roommates(rng, n, rng.uniform(0.4, 1.0))
    rep = classify_exhaustive(inst, cap=16)
    dominant = set(rep.dominant)
    for m in rep.matchings:
        assert is_dominant(inst, m) == (m in dominant)


def test_sizes_nest(fig1):
    """Stable matchings are smallest among popular, dominant are largest."""
    rep = classify_exhaustive(fig1, cap=16)
    smallest = min(len(p) for p in rep.popular)
    largest = max(len(p) for p in rep.popular)
    for s in rep.stable:
        assert len(s) == smallest
    for d in rep.dominant:
        assert len(d) == largest


def test_bad_structure_rejected(fig1, m1):
    from popmatch.popularity import ForbiddenStructure

    fake = ForbiddenStructure(kind="path", vertices=("a3", "b1", "a2", "b2"))
    assert not check_structure(fig1, m1, fake)
