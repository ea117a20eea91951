import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import binary_profiles, class_structures, profiles, symmetric_profiles
from seating import constructions, exact, judge
from seating.profile import (
    CYCLE,
    PATH,
    Arrangement,
    ClassStructure,
    PreferenceProfile,
    Topology,
    detect_classes,
    expand_classes,
)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_path_arrangement_counts(n):
    t = Topology.path(n)
    seen = list(exact.arrangements(t))
    assert len(seen) == math.factorial(n) // 2
    assert len(set(seen)) == len(seen)
    assert exact.arrangement_count(t) == len(seen)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cycle_arrangement_counts(n):
    t = Topology.cycle(n)
    seen = list(exact.arrangements(t))
    assert len(seen) == math.factorial(n - 1) // 2
    assert exact.arrangement_count(t) == len(seen)


def test_arrangement_iterator_dataclass():
    it = exact.ArrangementIterator(Topology.cycle(4))
    assert len(list(it)) == 3


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_count_stable_all_zero_cycle(n):
    p = PreferenceProfile.from_rows([[0] * n for _ in range(n)])
    assert exact.count_stable(p, Topology.cycle(n)) == math.factorial(n - 1) // 2


def test_find_arrangement_abf_cycle_none():
    p = constructions.abf_cycle(6)
    assert exact.find_arrangement(p, Topology.cycle(6), exact.Criterion.STABLE) is None


@given(p=symmetric_profiles(min_n=3, max_n=6), data=st.data())
@settings(max_examples=40, deadline=None)
def test_symmetric_profiles_always_stable(p, data):
    kind = data.draw(st.sampled_from([PATH, CYCLE]))
    t = Topology(kind, p.n)
    assert exact.find_arrangement(p, t, exact.Criterion.STABLE) is not None


def test_find_arrangement_respects_limit():
    p = PreferenceProfile.from_rows([[0] * 12 for _ in range(12)])
    with pytest.raises(exact.EnumerationLimitError):
        exact.find_arrangement(p, Topology.cycle(12), exact.Criterion.STABLE)


def test_solve_reports_enumeration_count():
    p = constructions.abf_cycle(5)
    result = exact.solve(p, Topology.cycle(5), exact.Criterion.STABLE)
    assert result.arrangement is None
    assert result.enumerated == 12


@given(p=profiles(min_n=3, max_n=6), data=st.data())
@settings(max_examples=100, deadline=None)
def test_checker_matches_judge(p, data):
    kind = data.draw(st.sampled_from([PATH, CYCLE]))
    t = Topology(kind, p.n)
    seats = list(range(p.n))
    random.Random(data.draw(st.integers(0, 10**6))).shuffle(seats)
    seats = tuple(seats)
    a = Arrangement(seats)
    for crit in exact.Criterion:
        check = exact.make_checker(p, t, crit)
        want = (
            judge.is_stable(p, t, a)[0]
            if crit is exact.Criterion.STABLE
            else judge.is_envy_free(p, t, a)[0]
        )
        assert check(seats) == want


@given(p=binary_profiles(min_n=3, max_n=6), data=st.data())
@settings(max_examples=100, deadline=None)
def test_binary_kernel_matches_generic(p, data):
    kind = data.draw(st.sampled_from([PATH, CYCLE]))
    t = Topology(kind, p.n)
    seats = list(range(p.n))
    random.Random(data.draw(st.integers(0, 10**6))).shuffle(seats)
    seats = tuple(seats)
    for crit in exact.Criterion:
        fast = exact._make_binary_checker(p, t, crit)
        slow = exact._make_generic_checker(p, t, crit)
        assert fast(seats) == slow(seats)


def test_class_sequences_cover_multiset():
    t = Topology.path(5)
    seqs = set(exact.class_sequences((2, 3), t))
    # every sequence or its reflection appears
    import itertools

    all_seqs = {
        seq
        for seq in itertools.permutations((0, 0, 1, 1, 1))
    }
    assert len(all_seqs) == exact.multiset_sequence_count((2, 3))
    for seq in all_seqs:
        assert seq in seqs or seq[::-1] in seqs


def test_class_sequences_cycle_orbit_coverage():
    t = Topology.cycle(6)
    kept = set(exact.class_sequences((2, 2, 2), t))
    import itertools

    for seq in set(itertools.permutations((0, 0, 1, 1, 2, 2))):
        orbit = set()
        for r in range(6):
            rot = seq[r:] + seq[:r]
            orbit.add(rot)
            orbit.add(rot[::-1])
        assert orbit & kept, f"orbit of {seq} unrepresented"


@given(c=class_structures(max_k=3, max_n=8), data=st.data())
@settings(max_examples=60, deadline=None)
def test_class_search_agrees_with_agent_search(c, data):
    kind = data.draw(st.sampled_from([PATH, CYCLE]))
    t = Topology(kind, c.n)
    crit = data.draw(st.sampled_from(list(exact.Criterion)))
    class_level = exact.find_class_arrangement(c, t, crit)
    agent_level = exact.find_arrangement(expand_classes(c), t, crit)
    assert (class_level is None) == (agent_level is None)
    if class_level is not None:
        expanded = expand_classes(c)
        ok = (
            judge.is_stable(expanded, t, class_level)[0]
            if crit is exact.Criterion.STABLE
            else judge.is_envy_free(expanded, t, class_level)[0]
        )
        assert ok


def test_class_search_rejects_over_limit():
    c = ClassStructure.from_lists([20, 20], [[0, 1], [1, 0]])
    with pytest.raises(exact.EnumerationLimitError):
        exact.find_class_arrangement(c, Topology.path(40), exact.Criterion.STABLE, limit=100)


def test_abf_path_class_search_unstable():
    c = detect_classes(constructions.abf_path(12))
    assert exact.multiset_sequence_count(c.sizes) == 1980
    assert exact.find_class_arrangement(c, Topology.path(12), exact.Criterion.STABLE) is None


def test_hamiltonian_cycle_search():
    ring = constructions.Digraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert exact.has_hamiltonian_cycle(ring)
    broken = constructions.Digraph.from_edges(3, [(0, 1), (1, 2)])
    assert not exact.has_hamiltonian_cycle(broken)
    assert exact.has_hamiltonian_path(broken)
    assert exact.has_hamiltonian_cycle(constructions.Digraph.from_edges(1, []))


def test_ef_equiv_on_ring_and_empty():
    ring = constructions.Digraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert exact.ef_equiv_hamiltonicity(ring, CYCLE) == (True, True)
    empty = constructions.Digraph.from_edges(3, [])
    assert exact.ef_equiv_hamiltonicity(empty, CYCLE) == (False, False)


def test_ef_equiv_path_variant():
    chain = constructions.Digraph.from_edges(3, [(0, 1), (1, 2)])
    assert exact.ef_equiv_hamiltonicity(chain, PATH) == (True, True)
