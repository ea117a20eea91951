import random

import pytest

from seating import constructions, exact, judge, search
from seating.profile import (
    CYCLE,
    PATH,
    PreferenceProfile,
    Topology,
    canonical_profile,
    normalize_for_cycle,
)


def test_code_round_trip():
    rng = random.Random(3)
    values = (0, 1, 3)
    for _ in range(50):
        code = rng.randrange(3 ** (4 * 3))
        p = search.profile_from_code(4, values, code)
        assert search.profile_to_code(p, values) == code


def test_exhaust_tiny_cycles():
    for n, families in ((3, 0), (4, 0)):
        rep = search.exhaust(n, (0, 1), Topology.cycle(n))
        assert rep.scanned == 2 ** (n * (n - 1))
        assert rep.families == families


def test_exhaust_kernel_matches_definitional_route():
    rng = random.Random(5)
    n = 4
    t = Topology.cycle(n)
    for values in ((0, 1), (1, 3), (-1, 1)):
        for _ in range(120):
            code = rng.randrange(2 ** (n * (n - 1)))
            _, bad = search._scan_two_valued(n, values, CYCLE, code, code + 1)
            p = search.profile_from_code(n, values, code)
            want = exact.find_arrangement(p, t, exact.Criterion.STABLE) is None
            assert (len(bad) == 1) == want


def test_exhaust_path_kernel_matches_definitional_route():
    rng = random.Random(6)
    n = 4
    t = Topology.path(n)
    for values in ((0, 1), (1, 2), (2, 3)):
        for _ in range(120):
            code = rng.randrange(2 ** (n * (n - 1)))
            _, bad = search._scan_two_valued(n, values, PATH, code, code + 1)
            p = search.profile_from_code(n, values, code)
            want = exact.find_arrangement(p, t, exact.Criterion.STABLE) is None
            assert (len(bad) == 1) == want


def test_shard_union_equals_full():
    full = search.exhaust(4, (0, 1), Topology.cycle(4))
    scanned = 0
    unstable = set()
    for idx in range(5):
        rep = search.exhaust(4, (0, 1), Topology.cycle(4), mode=search.SHARDED, shard=(idx, 5))
        scanned += rep.scanned
        unstable.update(p.values for p in rep.unstable)
    assert scanned == full.scanned
    assert unstable == {p.values for p in full.unstable}


def test_jobs_do_not_change_the_report():
    a = search.exhaust(4, (0, 1), Topology.path(4), jobs=1)
    b = search.exhaust(4, (0, 1), Topology.path(4), jobs=3)
    assert a.scanned == b.scanned
    assert [p.values for p in a.unstable] == [p.values for p in b.unstable]


def test_budget_guard():
    with pytest.raises(search.BudgetExceededError):
        search.exhaust(7, (0, 1), Topology.cycle(7), budget=2**20)


def test_sampled_mode_requires_seed_and_runs():
    with pytest.raises(ValueError):
        search.exhaust(5, (0, 1), Topology.cycle(5), mode=search.SAMPLED, trials=10)
    rep = search.exhaust(5, (0, 1), Topology.cycle(5), mode=search.SAMPLED, trials=30, seed=11)
    assert rep.scanned == 30
    assert rep.mode.kind == search.SAMPLED


def test_two_valued_cycle_scan_equals_binary_after_normalization():
    # any two-valued set reduces to binary on cycles
    for n in (3, 4):
        for values in ((1, 2), (-1, 1), (2, 5)):
            rep = search.exhaust(n, values, Topology.cycle(n))
            binary = search.exhaust(n, (0, 1), Topology.cycle(n))
            assert rep.families == binary.families
            normalized = {
                canonical_profile(normalize_for_cycle(p)).values for p in rep.unstable
            }
            assert normalized == {p.values for p in binary.unstable}


def test_canonical_dedup_is_fixed_point():
    rep = search.exhaust(5, (0, 1), Topology.cycle(5))
    for p in rep.unstable:
        assert canonical_profile(p) == p


def test_recover_family_index_errors():
    rep = search.exhaust(4, (0, 1), Topology.cycle(4))
    with pytest.raises(IndexError):
        search.recover_family(rep, 0)


def test_write_fixtures(tmp_path):
    rep = search.exhaust(5, (0, 1), Topology.cycle(5))
    paths = search.write_fixtures(rep, tmp_path)
    assert len(paths) == rep.families
    from seating.profile import parse_profile

    for path in paths:
        with open(path, encoding="utf-8") as fh:
            p = parse_profile(fh.read())
        assert exact.find_arrangement(p, Topology.cycle(5), exact.Criterion.STABLE) is None


def test_kclass_sweep_small_binary_path_clean():
    rep = search.kclass_sweep(2, 3, (0, 1), PATH)
    assert rep.unstable == []
    assert rep.decided > 0


def test_kclass_sweep_two_class_any_values_clean():
    rep = search.kclass_sweep(2, 4, (-1, 1), PATH)
    assert rep.unstable == []
    rep = search.kclass_sweep(2, 4, (-1, 1), CYCLE)
    assert rep.unstable == []


def test_kclass_sweep_finds_negative_value_instability():
    rep = search.kclass_sweep(3, 3, (-1, 1), PATH)
    assert rep.unstable
    # the plus/minus family (sizes 1, 1, m) appears among the hits
    from seating.profile import detect_classes

    hits = {tuple(sorted(c.sizes)) for c in rep.unstable}
    assert any(sorted(s)[:2] == [1, 1] for s in hits)


def test_kclass_sweep_jobs_invariance():
    a = search.kclass_sweep(2, 3, (0, 1), PATH, jobs=1)
    b = search.kclass_sweep(2, 3, (0, 1), PATH, jobs=3)
    assert a.decided == b.decided
    assert [(c.sizes, c.matrix) for c in a.unstable] == [(c.sizes, c.matrix) for c in b.unstable]
