"""Polynomial k-class decision via compatible triples and state-graph search.

A class sequence is envy-free (stable) iff every pair of seat-centered
class triples is compatible: adjacent seats must be short-range
compatible, all other pairs long-range compatible.  Envy-freeness takes
the conjunction of the two agents' no-gain conditions, stability the
disjunction.

The search places one class symbol at a time.  A state keeps the last
three symbols, per-class usage counts, and per-triple occurrence counts
capped at four: every long-range query is "count minus d positive" with
at most three temporary decrements, so min(count, 4) answers all queries
exactly.  States are explored breadth-first with a hashed visited set and
parent links for arrangement reconstruction.

Paths pad the sequence with a dummy class 0 (zero preferences both ways)
at both virtual ends.  Cycles guess the wrap symbols s_n, s_1, s_2 up
front; at the final step the pair of triples around the wrap is checked
short-range instead of long-range, which takes one extra temporary
decrement.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import judge
from .profile import CYCLE, PATH, Arrangement, ClassStructure, Topology, expand_classes

COUNTER_CAP = 4


@dataclass
class TripleTable:
    """Precomputed compatibility data over symbols 0..k (0 is the path dummy)."""

    k: int
    stable: bool
    short_ok: tuple[bool, ...]  # flat (a,b,c,d) -> triples (a,b,c),(b,c,d) compatible
    sums: tuple[tuple[int, ...], ...]  # sums[x][y*K+z] = P_x(y) + P_x(z)
    decode: tuple[tuple[int, int, int], ...]  # triple id -> (a, b, c)
    # Lazy exact state abstraction for the search: triple types with identical
    # long-range conflict rows are interchangeable in every future check, so
    # the search tracks one capped occurrence sum per conflict class.  Types
    # that conflict with nothing map to None and are not tracked at all.
    class_of: list[int | None] | None = None
    class_rep: list[int] | None = None
    conflict_mask: list[int] | None = None  # new-triple id -> bitmask of conflicting classes

    def ensure_classes(self) -> None:
        if self.class_of is not None:
            return
        K = self.k + 1
        total = K**3
        rows: dict[tuple[bool, ...], int] = {}
        class_of: list[int | None] = [None] * total
        class_rep: list[int] = []
        for v in range(total):
            a, b, cc = self.decode[v]
            s_b_ac = self.sums[b][a * K + cc]
            row = []
            hit = False
            for u in range(total):
                d, e, f = self.decode[u]
                gain_b = s_b_ac < self.sums[b][d * K + f]
                gain_e = self.sums[e][d * K + f] < self.sums[e][a * K + cc]
                conflict = (gain_b and gain_e) if self.stable else (gain_b or gain_e)
                row.append(conflict)
                hit = hit or conflict
            if not hit:
                continue
            key = tuple(row)
            cls = rows.get(key)
            if cls is None:
                cls = len(class_rep)
                rows[key] = cls
                class_rep.append(v)
            class_of[v] = cls
        self.class_of = class_of
        self.class_rep = class_rep
        masks = []
        for u in range(total):
            d, e, f = self.decode[u]
            s_e_df = self.sums[e][d * K + f]
            mask = 0
            for cls, v in enumerate(class_rep):
                if _long_conflict(self, v, d, e, f, s_e_df):
                    mask |= 1 << cls
            masks.append(mask)
        self.conflict_mask = masks


@dataclass(frozen=True)
class SearchState:
    """One node of the search graph (reconstructed from the internal key)."""

    window: tuple[int, ...]  # most recent class symbols, oldest first
    usage: tuple[int, ...]  # agents consumed per class
    triple_counts: tuple[tuple[int, int], ...]  # (triple id, capped count)
    position: int


@dataclass
class DecideStats:
    visited: int = 0
    frontier_peak: int = 0


def build_triple_tables(c: ClassStructure, criterion) -> TripleTable:
    k = c.k
    K = k + 1
    stable = getattr(criterion, "value", criterion) == "stable"
    # Symbol 0 is the dummy with zero preferences both ways.
    pref = [[0] * K for _ in range(K)]
    for a in range(k):
        for b in range(k):
            pref[a + 1][b + 1] = c.matrix[a][b]

    sums = tuple(
        tuple(pref[x][y] + pref[x][z] for y in range(K) for z in range(K)) for x in range(K)
    )

    short = []
    for a in range(K):
        for b in range(K):
            for cc in range(K):
                for d in range(K):
                    keep_b = pref[b][a] >= pref[b][d]
                    keep_c = pref[cc][d] >= pref[cc][a]
                    short.append((keep_b or keep_c) if stable else (keep_b and keep_c))

    decode = tuple((t // (K * K), (t // K) % K, t % K) for t in range(K**3))
    return TripleTable(k=k, stable=stable, short_ok=tuple(short), sums=sums, decode=decode)


def _long_conflict(tables: TripleTable, v_tid: int, d: int, e: int, f: int, s_e_df: int) -> bool:
    # V = (a, b, c) earlier, U = (d, e, f) new; s_e_df = sums[e][d*K+f].
    K = tables.k + 1
    a, b, cc = tables.decode[v_tid]
    gain_b = tables.sums[b][a * K + cc] < tables.sums[b][d * K + f]
    gain_e = s_e_df < tables.sums[e][a * K + cc]
    if tables.stable:
        return gain_b and gain_e
    return gain_b or gain_e


def sequence_compatible(tables: TripleTable, kind: str, seq) -> tuple[bool, tuple[int, int] | None]:
    """Full O(n^2) compatibility check of a 0-based class sequence.

    Returns (ok, violating seat pair).  Equals the judge verdict on the
    expanded arrangement.
    """
    n = len(seq)
    K = tables.k + 1
    s = [0] * (n + 2)
    for i, label in enumerate(seq):
        s[i + 1] = label + 1
    if kind == CYCLE:
        s[0] = seq[-1] + 1
        s[n + 1] = seq[0] + 1

    short_ok = tables.short_ok
    sums = tables.sums
    # Adjacent centers: short-range; the wrap pair (n, 1) exists on cycles only.
    for i in range(1, n):
        if not short_ok[((s[i - 1] * K + s[i]) * K + s[i + 1]) * K + s[i + 2]]:
            return False, (i - 1, i)
    if kind == CYCLE:
        if not short_ok[((s[n - 1] * K + s[n]) * K + s[1]) * K + s[2]]:
            return False, (n - 1, 0)

    # Non-adjacent centers: long-range.
    tids = [0] * (n + 1)
    for i in range(1, n + 1):
        tids[i] = (s[i - 1] * K + s[i]) * K + s[i + 1]
    hi_gap = n - 1 if kind == CYCLE else n
    for i in range(1, n + 1):
        a, b, cc = tables.decode[tids[i]]
        s_b_ac = sums[b][a * K + cc]
        for j in range(i + 2, n + 1):
            if j - i >= hi_gap:
                break
            d, e, f = tables.decode[tids[j]]
            gain_b = s_b_ac < sums[b][d * K + f]
            gain_e = sums[e][d * K + f] < sums[e][a * K + cc]
            conflict = (gain_b and gain_e) if tables.stable else (gain_b or gain_e)
            if conflict:
                return False, (i - 1, j - 1)
    return True, None


def check_compatible(
    c: ClassStructure, t: Topology, sequence, criterion
) -> tuple[bool, tuple[int, int] | None]:
    """Check a concrete class sequence against the sizes and the criterion."""
    seq = tuple(sequence)
    if len(seq) != c.n:
        raise ValueError("sequence length disagrees with class sizes")
    counts = [0] * c.k
    for label in seq:
        counts[label] += 1
    if tuple(counts) != c.sizes:
        raise ValueError("sequence does not match the class sizes")
    tables = build_triple_tables(c, criterion)
    return sequence_compatible(tables, t.kind, seq)


# ---------------------------------------------------------------------------
# State search.  Internal state keys are
#   (w2, w1, w0, usage, m)
# where (w2, w1, w0) are the last three symbols, usage counts placed agents
# per class, and m is a sorted tuple of (triple id, capped count) covering
# every triple completed so far.
# ---------------------------------------------------------------------------


def _dominated_by(small: tuple, big: tuple) -> bool:
    """Pointwise <= on sparse (class, count) tuples sorted by class."""
    i = 0
    for cls, cnt in small:
        while i < len(big) and big[i][0] < cls:
            i += 1
        if i == len(big) or big[i][0] != cls or big[i][1] < cnt:
            return False
    return True


def _antichain_filter(bucket: dict) -> list:
    """Keep only minimal count vectors: lower counts admit every future a
    higher vector admits, so dominated states are redundant (exact prune)."""
    kept: list = []
    for m_t in sorted(bucket, key=lambda mt: (sum(c for _, c in mt), mt)):
        if not any(_dominated_by(km, m_t) for km in kept):
            kept.append(m_t)
    return kept


def _bump(m: tuple, tid: int, cap: int) -> tuple:
    out = []
    placed = False
    for entry in m:
        if entry[0] == tid:
            out.append((tid, min(entry[1] + 1, cap)))
            placed = True
        else:
            out.append(entry)
    if not placed:
        out.append((tid, 1))
        out.sort()
    return tuple(out)


def _long_ok(tables: TripleTable, m, dec_a: int | None, dec_b: int | None, d: int, e: int, f: int) -> bool:
    # m holds capped occurrence sums per conflict class for the triples
    # completed before the one being formed; ``dec_a`` and ``dec_b`` name
    # classes excluded once because their occurrences sit adjacent to the new
    # triple's center (None for no exclusion).
    K = tables.k + 1
    s_e_df = tables.sums[e][d * K + f]
    rep = tables.class_rep
    for cls, cnt in m:
        if cls == dec_a:
            cnt -= 1
        if cls == dec_b:
            cnt -= 1
        if cnt > 0 and _long_conflict(tables, rep[cls], d, e, f, s_e_df):
            return False
    return True


def _reconstruct(parents, state, root_symbols) -> list[int]:
    symbols: list[int] = []
    while True:
        prev = parents[state]
        if prev is None:
            break
        state, d = prev
        symbols.append(d)
    symbols.reverse()
    return list(root_symbols) + symbols


def _search_path(tables: TripleTable, sizes, cap: int, stats: DecideStats) -> list[int] | None:
    tables.ensure_classes()
    k = tables.k
    K = k + 1
    n = sum(sizes)
    short_ok = tables.short_ok
    class_of = tables.class_of
    conflict_mask = tables.conflict_mask
    parents: dict = {}
    frontier: dict = {}
    for s1 in range(1, K):
        for s2 in range(1, K):
            usage = [0] * k
            usage[s1 - 1] += 1
            usage[s2 - 1] += 1
            if usage[s1 - 1] > sizes[s1 - 1] or usage[s2 - 1] > sizes[s2 - 1]:
                continue
            cls = class_of[(0 * K + s1) * K + s2]
            m0 = ((cls, 1),) if cls is not None else ()
            state = (0, s1, s2, tuple(usage), m0)
            if state not in parents:
                parents[state] = None
                frontier[state] = (s1, s2)
    stats.visited += len(frontier)
    stats.frontier_peak = max(stats.frontier_peak, len(frontier))

    for level in range(3, n + 1):
        groups: dict = {}
        for state, root in frontier.items():
            w2, w1, w0, usage, m = state
            prev_cls = class_of[(w2 * K + w1) * K + w0]
            base = ((w2 * K + w1) * K + w0) * K
            pos = 0
            for cls, cnt in m:
                if cnt > 1 or cls != prev_cls:
                    pos |= 1 << cls
            ubase = (w1 * K + w0) * K
            for d in range(1, K):
                if usage[d - 1] >= sizes[d - 1]:
                    continue
                if not short_ok[base + d]:
                    continue
                if pos & conflict_mask[ubase + d]:
                    continue
                u_cls = class_of[ubase + d]
                new_usage = list(usage)
                new_usage[d - 1] += 1
                new_m = _bump(m, u_cls, cap) if u_cls is not None else m
                bucket = groups.setdefault((w1, w0, d, tuple(new_usage)), {})
                if new_m not in bucket:
                    bucket[new_m] = (state, d, root)
        nxt: dict = {}
        for key, bucket in groups.items():
            for m_t in _antichain_filter(bucket):
                prev_state, d, root = bucket[m_t]
                new_state = key + (m_t,)
                parents[new_state] = (prev_state, d)
                nxt[new_state] = root
        frontier = nxt
        stats.visited += len(frontier)
        stats.frontier_peak = max(stats.frontier_peak, len(frontier))
        if not frontier:
            return None

    # Force the trailing dummy and run its checks; usage is exact at level n.
    for state, root in frontier.items():
        w2, w1, w0, usage, m = state
        if not short_ok[(((w2 * K + w1) * K + w0) * K)]:
            continue
        prev_cls = class_of[(w2 * K + w1) * K + w0]
        if not _long_ok(tables, m, prev_cls, None, w1, w0, 0):
            continue
        return _reconstruct(parents, state, root)
    return None


def _search_cycle_rooted(
    tables: TripleTable, sizes, s0: int, s1: int, s2: int, cap: int, stats: DecideStats
) -> list[int] | None:
    tables.ensure_classes()
    k = tables.k
    K = k + 1
    n = sum(sizes)
    short_ok = tables.short_ok
    class_of = tables.class_of
    conflict_mask = tables.conflict_mask
    usage = [0] * k
    usage[s1 - 1] += 1
    usage[s2 - 1] += 1
    if usage[s1 - 1] > sizes[s1 - 1] or usage[s2 - 1] > sizes[s2 - 1]:
        return None
    first_cls = class_of[(s0 * K + s1) * K + s2]
    m0 = ((first_cls, 1),) if first_cls is not None else ()
    root = (s0, s1, s2, tuple(usage), m0)
    parents: dict = {root: None}
    frontier: dict = {root: (s1, s2)}
    stats.visited += 1
    stats.frontier_peak = max(stats.frontier_peak, 1)

    for level in range(3, n + 1):
        forced = s0 if level == n else None
        groups: dict = {}
        for state, rootsyms in frontier.items():
            w2, w1, w0, usage_t, m = state
            prev_cls = class_of[(w2 * K + w1) * K + w0]
            base = ((w2 * K + w1) * K + w0) * K
            pos = 0
            for cls, cnt in m:
                if cnt > 1 or cls != prev_cls:
                    pos |= 1 << cls
            ubase = (w1 * K + w0) * K
            symbols = (forced,) if forced is not None else range(1, K)
            for d in symbols:
                if usage_t[d - 1] >= sizes[d - 1]:
                    continue
                if not short_ok[base + d]:
                    continue
                if pos & conflict_mask[ubase + d]:
                    continue
                u_cls = class_of[ubase + d]
                new_usage = list(usage_t)
                new_usage[d - 1] += 1
                new_m = _bump(m, u_cls, cap) if u_cls is not None else m
                bucket = groups.setdefault((w1, w0, d, tuple(new_usage)), {})
                if new_m not in bucket:
                    bucket[new_m] = (state, d, rootsyms)
        nxt: dict = {}
        for key, bucket in groups.items():
            for m_t in _antichain_filter(bucket):
                prev_state, d, rootsyms = bucket[m_t]
                new_state = key + (m_t,)
                parents[new_state] = (prev_state, d)
                nxt[new_state] = rootsyms
        frontier = nxt
        stats.visited += len(frontier)
        stats.frontier_peak = max(stats.frontier_peak, len(frontier))
        if not frontier:
            return None

    # Wrap step: s_{n+1} stands for s_1.  The triple pair around the wrap is
    # short-range; its two triples plus the opening triple leave the long
    # scan via temporary decrements.
    for state, rootsyms in frontier.items():
        w2, w1, w0, usage_t, m = state
        if not short_ok[(((w2 * K + w1) * K + w0) * K) + s1]:
            continue
        if not short_ok[(((w1 * K + w0) * K + s1) * K) + s2]:
            continue
        prev_cls = class_of[(w2 * K + w1) * K + w0]
        if not _long_ok(tables, m, prev_cls, first_cls, w1, w0, s1):
            continue
        return _reconstruct(parents, state, rootsyms)
    return None


def _trivial_arrangement(c: ClassStructure) -> Arrangement:
    return Arrangement(tuple(range(c.n)))


def _sequence_to_arrangement(c: ClassStructure, symbols: list[int]) -> Arrangement:
    offs = [0]
    for size in c.sizes[:-1]:
        offs.append(offs[-1] + size)
    seats = []
    for sym in symbols:
        label = sym - 1
        seats.append(offs[label])
        offs[label] += 1
    return Arrangement(tuple(seats))


def _verify(c: ClassStructure, t: Topology, arr: Arrangement, criterion) -> Arrangement:
    # Soundness is asserted always, in tests and in production.
    expanded = expand_classes(c)
    crit = getattr(criterion, "value", criterion)
    if crit == "stable":
        ok, _ = judge.is_stable(expanded, t, arr)
    else:
        ok, _ = judge.is_envy_free(expanded, t, arr)
    if not ok:
        raise AssertionError("state search produced an arrangement the judge rejects")
    return arr


def decide_path(
    c: ClassStructure,
    criterion,
    cap: int = COUNTER_CAP,
    stats: DecideStats | None = None,
) -> Arrangement | None:
    """A compatible path arrangement for the class structure, or certified None."""
    stats = stats if stats is not None else DecideStats()
    if c.n <= 2:
        return _trivial_arrangement(c)
    tables = build_triple_tables(c, criterion)
    symbols = _search_path(tables, c.sizes, cap, stats)
    if symbols is None:
        return None
    return _verify(c, Topology.path(c.n), _sequence_to_arrangement(c, symbols), criterion)


def decide_cycle(
    c: ClassStructure,
    criterion,
    cap: int = COUNTER_CAP,
    stats: DecideStats | None = None,
) -> Arrangement | None:
    """A compatible cycle arrangement for the class structure, or certified None."""
    stats = stats if stats is not None else DecideStats()
    if c.n < 3:
        raise ValueError("cycle decision needs at least three agents")
    tables = build_triple_tables(c, criterion)
    K = c.k + 1
    for s0 in range(1, K):
        if c.sizes[s0 - 1] == 0:
            continue
        for s1 in range(1, K):
            for s2 in range(1, K):
                symbols = _search_cycle_rooted(tables, c.sizes, s0, s1, s2, cap, stats)
                if symbols is not None:
                    return _verify(
                        c, Topology.cycle(c.n), _sequence_to_arrangement(c, symbols), criterion
                    )
    return None


def decide(
    c: ClassStructure,
    t: Topology,
    criterion,
    cap: int = COUNTER_CAP,
    stats: DecideStats | None = None,
) -> Arrangement | None:
    if t.kind == PATH:
        return decide_path(c, criterion, cap=cap, stats=stats)
    return decide_cycle(c, criterion, cap=cap, stats=stats)
