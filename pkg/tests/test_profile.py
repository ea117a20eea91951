import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import class_structures, profiles
from seating import constructions, judge
from seating.profile import (
    CYCLE,
    PATH,
    Arrangement,
    ClassStructure,
    PreferenceProfile,
    ProfileError,
    Topology,
    canonical_profile,
    components,
    detect_classes,
    detect_partition,
    emit_profile,
    expand_classes,
    normalize_for_cycle,
    parse_classes,
    parse_profile,
    relabel_profile,
    value_meta,
)


def test_topology_validation():
    assert Topology.path(1).n == 1
    assert Topology.cycle(3).neighbor_table() == ((2, 1), (0, 2), (1, 0))
    with pytest.raises(ProfileError):
        Topology.cycle(2)
    with pytest.raises(ProfileError):
        Topology.path(0)


def test_path_neighbors_clipped():
    t = Topology.path(4)
    assert t.neighbor_table() == ((1,), (0, 2), (1, 3), (2,))


def test_parse_minimal_matrix():
    p = parse_profile('{"n": 2, "values": [[0, 1], [1, 0]]}')
    assert p.n == 2 and p.values == ((0, 1), (1, 0))


def test_parse_rejects_non_integer():
    with pytest.raises(ProfileError):
        parse_profile("0,1,0\n1,0,0.5\n0,0,0\n")
    with pytest.raises(ProfileError):
        parse_profile('{"n": 2, "values": [[0, 1.5], [1, 0]]}')


def test_parse_rejects_nonzero_diagonal_and_non_square():
    with pytest.raises(ProfileError):
        parse_profile('{"n": 2, "values": [[1, 1], [1, 0]]}')
    with pytest.raises(ProfileError):
        parse_profile("0,1\n1,0,0\n")


def test_profile_round_trip_json_and_csv():
    p = constructions.abf_path(12)
    assert parse_profile(emit_profile(p, "json")) == p
    assert parse_profile(emit_profile(p, "csv")) == p
    assert emit_profile(p).endswith("\n")


def test_class_json_round_trip():
    c = ClassStructure.from_lists([2, 3], [[1, -1], [0, 2]])
    assert parse_classes(c.to_json()) == c


def test_arrangement_must_be_permutation():
    with pytest.raises(ProfileError):
        Arrangement((0, 0, 1))


def test_detect_classes_all_zero():
    p = PreferenceProfile.from_rows([[0] * 5 for _ in range(5)])
    c = detect_classes(p)
    assert c.k == 1 and c.sizes == (5,)


def test_detect_classes_four_class_family():
    c = detect_classes(constructions.four_class_cycle(7))
    assert c.k == 4 and sorted(c.sizes) == [1, 1, 2, 3]


def test_expand_single_class():
    c = ClassStructure.from_lists([3], [[7]])
    p = expand_classes(c)
    assert p.n == 3
    assert all(p.values[i][j] == (0 if i == j else 7) for i in range(3) for j in range(3))


def test_expand_two_singletons():
    c = ClassStructure.from_lists([1, 1], [[5, 2], [-1, 4]])
    assert expand_classes(c).values == ((0, 2), (-1, 0))


@given(c=class_structures())
@settings(max_examples=60, deadline=None)
def test_expand_detect_round_trip(c):
    p = expand_classes(c)
    detected = detect_classes(p)
    # The detected partition may be coarser when distinct labels share values;
    # re-expanding it must reproduce the same profile.
    sigma = [a for group in detect_partition(p) for a in group]
    assert relabel_profile(p, sigma) == expand_classes(detected)


@given(p=profiles(min_n=2, max_n=7))
@settings(max_examples=60, deadline=None)
def test_detect_expand_recovers_any_profile(p):
    sigma = [a for group in detect_partition(p) for a in group]
    assert relabel_profile(p, sigma) == expand_classes(detect_classes(p))


def test_normalize_rank_example():
    p = PreferenceProfile.from_rows([[0, 5, 5, 9], [1, 0, 1, 1], [0, 0, 0, 0], [3, 5, 7, 0]])
    q = normalize_for_cycle(p)
    assert q.values[0] == (0, 0, 0, 1)
    assert q.values[1] == (0, 0, 0, 0)  # constant row: all seats equivalent
    assert q.values[3] == (0, 1, 2, 0)


def test_normalize_two_valued_becomes_binary():
    p = constructions.pm1_path(6)
    q = normalize_for_cycle(p)
    assert value_meta(q).is_binary


@given(p=profiles(min_n=3, max_n=6))
@settings(max_examples=50, deadline=None)
def test_normalize_idempotent(p):
    q = normalize_for_cycle(p)
    assert normalize_for_cycle(q) == q


@given(p=profiles(min_n=3, max_n=6), data=st.data())
@settings(max_examples=60, deadline=None)
def test_normalize_preserves_cycle_judgments(p, data):
    t = Topology.cycle(p.n)
    seats = list(range(p.n))
    random.Random(data.draw(st.integers(0, 10**6))).shuffle(seats)
    a = Arrangement(tuple(seats))
    q = normalize_for_cycle(p)
    envy_p = {(i, j) for i in range(p.n) for j in range(p.n) if i != j and judge.envies(p, t, a, i, j)}
    envy_q = {(i, j) for i in range(p.n) for j in range(p.n) if i != j and judge.envies(q, t, a, i, j)}
    assert envy_p == envy_q
    assert [w.agents for w in judge.blocking_pairs(p, t, a)] == [
        w.agents for w in judge.blocking_pairs(q, t, a)
    ]


def test_canonical_fixed_point_all_zero():
    p = PreferenceProfile.from_rows([[0] * 4 for _ in range(4)])
    assert canonical_profile(p) == p


@given(p=profiles(min_n=2, max_n=6), data=st.data())
@settings(max_examples=60, deadline=None)
def test_canonical_invariant_under_relabeling(p, data):
    sigma = list(range(p.n))
    random.Random(data.draw(st.integers(0, 10**6))).shuffle(sigma)
    assert canonical_profile(p) == canonical_profile(relabel_profile(p, sigma))


def test_canonical_rejects_large():
    p = PreferenceProfile.from_rows([[0] * 9 for _ in range(9)])
    with pytest.raises(ProfileError):
        canonical_profile(p)


def test_value_meta_flags():
    meta = value_meta(constructions.pm1_path(5))
    assert meta.value_set == (-1, 1)
    assert meta.k_valued == 2
    assert not meta.is_binary
    assert not meta.is_nonnegative
    assert value_meta(constructions.four_class_cycle(7)).is_binary


def test_components_blockwise():
    base = constructions.pm1_path(3)
    prof, _ = constructions.blockwise_euler(base)
    assert len(components(prof)) == 7
