"""Exhaustive and sampled exploration of profile spaces.

Profiles over a value set of size g are encoded as base-g integers over
the n(n-1) off-diagonal cells in row-major order (cell 0 is the least
significant digit), which makes shard boundaries plain integer ranges and
scans resumable and bit-exact.  Two-valued scans run on an incremental
bitmask kernel; each profile is decided by early-exit search for one
stable arrangement, and unstable profiles are canonicalized for
isomorphism-class counting.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from . import exact, judge, polyclass
from .profile import (
    CYCLE,
    PATH,
    ClassStructure,
    PreferenceProfile,
    Topology,
    canonical_profile,
)

FULL = "full"
SHARDED = "sharded"
SAMPLED = "sampled"

DEFAULT_BUDGET = 2**32


class BudgetExceededError(RuntimeError):
    """Full scan would exceed the configured profile budget."""


@dataclass(frozen=True)
class SearchMode:
    kind: str
    shard: tuple[int, int] | None = None  # (index, count)
    trials: int | None = None
    seed: int | None = None


@dataclass
class SearchReport:
    """Outcome of one (n, value set, topology) exploration."""

    n: int
    values: tuple[int, ...]
    topology: str
    mode: SearchMode
    scanned: int
    unstable: tuple[PreferenceProfile, ...]  # canonical, deduplicated, sorted

    @property
    def families(self) -> int:
        return len(self.unstable)

    def to_json_dict(self) -> dict:
        doc = {
            "n": self.n,
            "values": list(self.values),
            "topology": self.topology,
            "mode": self.mode.kind,
            "scanned": self.scanned,
            "families": self.families,
            "unstable": [[list(r) for r in p.values] for p in self.unstable],
        }
        if self.mode.shard:
            doc["shard"] = list(self.mode.shard)
        if self.mode.trials is not None:
            doc["trials"] = self.mode.trials
        if self.mode.seed is not None:
            doc["seed"] = self.mode.seed
        return doc


def _cells(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def profile_from_code(n: int, values, code: int) -> PreferenceProfile:
    g = len(values)
    rows = [[0] * n for _ in range(n)]
    for i, j in _cells(n):
        rows[i][j] = values[code % g]
        code //= g
    return PreferenceProfile.from_rows(rows)


def profile_to_code(p: PreferenceProfile, values) -> int:
    lookup = {v: d for d, v in enumerate(values)}
    g = len(values)
    code = 0
    for i, j in reversed(_cells(p.n)):
        code = code * g + lookup[p.values[i][j]]
    return code


def _pair_tables(n: int, kind: str):
    """Per deduped arrangement: envy-check masks for every seat pair.

    For agent u at seat s considering seat s', the masks select the profile
    cells u values at each seat's neighbors after the swap (the swapped
    partner substitutes at seat s).  With a two-valued profile {v0, v1},
    ``u`` envies iff (v1-v0)*(pop_new - pop_old) > v0*(deg_old - deg_new).
    """
    t = Topology(kind, n)
    ntab = t.neighbor_table()
    tables = []
    for seats in exact.arrangements(t):
        pairs = []
        for s1, s2, adj in exact._seat_pairs_by_distance(kind, n):
            u, v = seats[s1], seats[s2]
            mu_old = 0
            for x in ntab[s1]:
                mu_old |= 1 << (u * n + seats[x])
            mu_new = 0
            for x in ntab[s2]:
                mu_new |= 1 << (u * n + (v if x == s1 else seats[x]))
            mv_old = 0
            for x in ntab[s2]:
                mv_old |= 1 << (v * n + seats[x])
            mv_new = 0
            for x in ntab[s1]:
                mv_new |= 1 << (v * n + (u if x == s2 else seats[x]))
            du = len(ntab[s1]) - len(ntab[s2])
            dv = len(ntab[s2]) - len(ntab[s1])
            pairs.append((mu_old, mu_new, du, mv_old, mv_new, dv))
        tables.append(tuple(pairs))
    return tables


def _scan_two_valued(n: int, values, kind: str, lo: int, hi: int) -> tuple[int, list[int]]:
    """Scan codes [lo, hi); returns (scanned, codes of unstable profiles)."""
    v0, v1 = values
    d = v1 - v0
    tables = _pair_tables(n, kind)
    m = n * (n - 1)
    cells = _cells(n)
    bits = [1 << (i * n + j) for i, j in cells]

    digits = [0] * m
    mask = 0
    code = lo
    for c in range(m):
        digits[c] = code % 2
        if digits[c]:
            mask |= bits[c]
        code //= 2

    unstable = []
    for code in range(lo, hi):
        stable = False
        for pairs in tables:
            blocked = False
            for mu_old, mu_new, du, mv_old, mv_new, dv in pairs:
                if d * ((mask & mu_new).bit_count() - (mask & mu_old).bit_count()) > v0 * du and d * (
                    (mask & mv_new).bit_count() - (mask & mv_old).bit_count()
                ) > v0 * dv:
                    blocked = True
                    break
            if not blocked:
                stable = True
                break
        if not stable:
            unstable.append(code)
        # Odometer step: binary increment over the cell digits.
        c = 0
        while c < m and digits[c] == 1:
            digits[c] = 0
            mask ^= bits[c]
            c += 1
        if c < m:
            digits[c] = 1
            mask ^= bits[c]
    return hi - lo, unstable


def _scan_generic(n: int, values, kind: str, lo: int, hi: int) -> tuple[int, list[int]]:
    t = Topology(kind, n)
    unstable = []
    for code in range(lo, hi):
        p = profile_from_code(n, values, code)
        if exact.find_arrangement(p, t, exact.Criterion.STABLE) is None:
            unstable.append(code)
    return hi - lo, unstable


def _scan_shard(args) -> tuple[int, list[int]]:
    n, values, kind, lo, hi = args
    if len(values) == 2:
        return _scan_two_valued(n, values, kind, lo, hi)
    return _scan_generic(n, values, kind, lo, hi)


def _canonicalize_codes(n: int, values, codes) -> tuple[PreferenceProfile, ...]:
    forms = {canonical_profile(profile_from_code(n, values, code)).values for code in codes}
    return tuple(PreferenceProfile(v) for v in sorted(forms))


def exhaust(
    n: int,
    values,
    t: Topology,
    mode: str = FULL,
    shard: tuple[int, int] | None = None,
    trials: int | None = None,
    seed: int | None = None,
    jobs: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> SearchReport:
    """Scan profiles over the value set, deciding stability of each.

    Full mode covers every code; sharded mode covers the shard's contiguous
    code range; sampled mode draws codes from a seeded generator.  Unstable
    profiles are reported as deduplicated canonical forms.
    """
    values = tuple(sorted(values))
    if len(set(values)) != len(values) or len(values) < 1:
        raise ValueError("the value set must hold distinct values")
    if t.n != n:
        raise ValueError("topology size disagrees with n")
    total = len(values) ** (n * (n - 1))

    if mode == SAMPLED:
        if trials is None or seed is None:
            raise ValueError("sampled mode needs trials and a seed")
        rng = random.Random(seed)
        codes = [rng.randrange(total) for _ in range(trials)]
        bad = []
        for code in codes:
            p = profile_from_code(n, values, code)
            if exact.find_arrangement(p, t, exact.Criterion.STABLE) is None:
                bad.append(code)
        return SearchReport(
            n, values, t.kind, SearchMode(SAMPLED, trials=trials, seed=seed), len(codes),
            _canonicalize_codes(n, values, bad),
        )

    if mode == FULL:
        lo, hi = 0, total
        mode_desc = SearchMode(FULL)
        if total > budget:
            raise BudgetExceededError(
                f"{total} profiles exceed the budget {budget}; use sharded or sampled mode"
            )
    elif mode == SHARDED:
        if shard is None:
            raise ValueError("sharded mode needs a (index, count) shard")
        index, count = shard
        if not 0 <= index < count:
            raise ValueError("shard index out of range")
        lo = total * index // count
        hi = total * (index + 1) // count
        mode_desc = SearchMode(SHARDED, shard=shard)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    span = hi - lo
    if jobs > 1 and span > 4 * jobs:
        from multiprocessing import Pool

        bounds = [lo + span * i // (4 * jobs) for i in range(4 * jobs + 1)]
        tasks = [(n, values, t.kind, a, b) for a, b in zip(bounds, bounds[1:]) if a < b]
        scanned = 0
        bad: list[int] = []
        with Pool(jobs) as pool:
            for cnt, codes in pool.imap_unordered(_scan_shard, tasks):
                scanned += cnt
                bad.extend(codes)
    else:
        scanned, bad = _scan_shard((n, values, t.kind, lo, hi))
    return SearchReport(
        n, values, t.kind, mode_desc, scanned, _canonicalize_codes(n, values, bad)
    )


def recover_family(report: SearchReport, target_index: int) -> PreferenceProfile:
    """Canonical representative of the requested unstable family.

    For the seven-agent binary cycle pair, the representative isomorphic to
    the four-class construction is placed at index 1.
    """
    families = list(report.unstable)
    if not 0 <= target_index < len(families):
        raise IndexError(f"family index {target_index} out of range ({len(families)} families)")
    if report.n == 7 and report.topology == CYCLE and set(report.values) == {0, 1} and len(families) == 2:
        from . import constructions

        four_class = canonical_profile(constructions.four_class_cycle(7))
        families.sort(key=lambda p: (p.values == four_class.values, p.values))
    return families[target_index]


def write_fixtures(report: SearchReport, directory) -> list[str]:
    """Persist the recovered family profiles as JSON files; returns the paths."""
    import pathlib

    out = []
    base = pathlib.Path(directory)
    base.mkdir(parents=True, exist_ok=True)
    for idx in range(report.families):
        p = recover_family(report, idx)
        path = base / f"unstable_n{report.n}_{report.topology}_{idx}.json"
        path.write_text(p.to_json(), encoding="utf-8")
        out.append(str(path))
    return out


# ---------------------------------------------------------------------------
# k-class conjecture sweeps.
# ---------------------------------------------------------------------------


@dataclass
class SweepReport:
    k: int
    max_per_class: int
    values: tuple[int, ...]
    topology: str
    raw_instances: int
    decided: int
    cross_checked: int
    unstable: list[ClassStructure] = field(default_factory=list)


def _matrix_perm(flat, k: int, perm) -> tuple:
    return tuple(flat[perm[i] * k + perm[j]] for i in range(k) for j in range(k))


def _screen_candidates(k: int, sizes) -> list[tuple[int, ...]]:
    cands = []
    for order in itertools.permutations(range(k)):
        seq: list[int] = []
        for label in order:
            seq.extend([label] * sizes[label])
        cands.append(tuple(seq))
        # Fixed-order round-robin, skipping exhausted classes.
        remaining = list(sizes)
        rr: list[int] = []
        while len(rr) < sum(sizes):
            for label in order:
                if remaining[label] > 0:
                    rr.append(label)
                    remaining[label] -= 1
        cands.append(tuple(rr))
    return cands


def _decide_instance(c: ClassStructure, t: Topology, xcheck_budget: int) -> tuple[bool, bool]:
    """(stable, cross_checked).  Fast screen, then the state search, then the
    exhaustive class-sequence oracle when affordable."""
    tables = polyclass.build_triple_tables(c, exact.Criterion.STABLE)
    for seq in _screen_candidates(c.k, c.sizes):
        if polyclass.sequence_compatible(tables, t.kind, seq)[0]:
            return True, False
    arr = polyclass.decide(c, t, exact.Criterion.STABLE)
    stable = arr is not None
    seq_count = exact.multiset_sequence_count(c.sizes)
    must_check = not stable and seq_count <= 10**6
    may_check = stable and seq_count <= xcheck_budget
    if must_check or may_check:
        oracle = exact.find_class_arrangement(c, t, exact.Criterion.STABLE)
        if (oracle is not None) != stable:
            raise AssertionError(
                f"state search and sequence scan disagree on sizes={c.sizes} matrix={c.matrix}"
            )
        return stable, True
    return stable, False


def _sweep_chunk(args) -> tuple[int, int, list]:
    matrices, k, sizes_list, values, kind, xcheck_budget = args
    t_of = {}
    decided = 0
    crossed = 0
    unstable = []
    perms = list(itertools.permutations(range(k)))
    for flat in matrices:
        auto = [perm for perm in perms if _matrix_perm(flat, k, perm) == flat]
        matrix = tuple(tuple(flat[i * k + j] for j in range(k)) for i in range(k))
        for sizes in sizes_list:
            if len(auto) > 1 and min(tuple(sizes[p] for p in perm) for perm in auto) < sizes:
                continue
            c = ClassStructure(sizes, matrix)
            n = c.n
            t = t_of.get(n)
            if t is None:
                if kind == CYCLE and n < 3:
                    continue
                t = Topology(kind, n)
                t_of[n] = t
            stable, crossed_one = _decide_instance(c, t, xcheck_budget)
            decided += 1
            crossed += crossed_one
            if not stable:
                unstable.append((sizes, matrix))
    return decided, crossed, unstable


def kclass_sweep(
    k: int,
    max_per_class: int,
    values,
    t_kind: str,
    jobs: int = 1,
    xcheck_budget: int = 720,
) -> SweepReport:
    """Decide stability of every k-class instance over the value set.

    Instances are deduplicated up to class relabeling before deciding.
    Every suspected-unstable instance is re-verified by exhaustive
    class-sequence search; stable ones are cross-checked when the sequence
    space fits the budget.
    """
    values = tuple(sorted(values))
    g = len(values)
    raw = g ** (k * k) * max_per_class**k

    perms = list(itertools.permutations(range(k)))
    canonical_matrices = []
    for flat in itertools.product(values, repeat=k * k):
        if min(_matrix_perm(flat, k, perm) for perm in perms) == flat:
            canonical_matrices.append(flat)
    sizes_list = list(itertools.product(range(1, max_per_class + 1), repeat=k))

    if jobs > 1:
        from multiprocessing import Pool

        chunks = [canonical_matrices[i::jobs] for i in range(jobs)]
        tasks = [(chunk, k, sizes_list, values, t_kind, xcheck_budget) for chunk in chunks if chunk]
        decided = crossed = 0
        unstable = []
        with Pool(jobs) as pool:
            for d, x, u in pool.imap_unordered(_sweep_chunk, tasks):
                decided += d
                crossed += x
                unstable.extend(u)
    else:
        decided, crossed, unstable = _sweep_chunk(
            (canonical_matrices, k, sizes_list, values, t_kind, xcheck_budget)
        )

    report = SweepReport(
        k=k,
        max_per_class=max_per_class,
        values=values,
        topology=t_kind,
        raw_instances=raw,
        decided=decided,
        cross_checked=crossed,
        unstable=[ClassStructure(s, m) for s, m in sorted(unstable)],
    )
    return report
