"""Brute-force solvers over arrangements, with symmetry reduction and class compression.

Agent-level enumeration dedups reflections (paths) and rotations plus
reflections (cycles).  Class-level enumeration walks multiset sequences
and decides each one with the compatible-triple tables, which is what
makes instances like 30 agents in 3 classes tractable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from . import judge, polyclass
from .profile import (
    CYCLE,
    PATH,
    Arrangement,
    ClassStructure,
    PreferenceProfile,
    Topology,
    class_offsets,
    value_meta,
)

DEFAULT_AGENT_LIMIT = 11
DEFAULT_SEQUENCE_LIMIT = 10**8


class EnumerationLimitError(RuntimeError):
    """Instance exceeds the configured enumeration budget."""


class Criterion(Enum):
    STABLE = "stable"
    ENVY_FREE = "ef"


@dataclass
class ArrangementIterator:
    """Symmetry-deduplicated arrangements of ``n`` agents on a topology.

    Paths pin the ends (``seats[0] < seats[-1]``); cycles pin agent 0 at
    seat 0 and orient so ``seats[1] < seats[-1]``.  Yields exactly n!/2
    path arrangements (n >= 2) and (n-1)!/2 cycle arrangements (n >= 3).
    """

    topology: Topology

    def __iter__(self):
        return arrangements(self.topology)


def arrangements(t: Topology):
    n = t.n
    if n == 1:
        yield (0,)
        return
    if t.kind == PATH:
        for seats in itertools.permutations(range(n)):
            if seats[0] < seats[-1]:
                yield seats
    else:
        for rest in itertools.permutations(range(1, n)):
            if rest[0] < rest[-1]:
                yield (0,) + rest


def arrangement_count(t: Topology) -> int:
    n = t.n
    if n == 1:
        return 1
    if t.kind == PATH:
        return math.factorial(n) // 2
    return math.factorial(n - 1) // 2


def multiset_sequence_count(sizes) -> int:
    total = math.factorial(sum(sizes))
    for s in sizes:
        total //= math.factorial(s)
    return total


def _lex_multiset_permutations(items: list[int]):
    """All distinct permutations of a multiset, in lexicographic order."""
    seq = sorted(items)
    n = len(seq)
    while True:
        yield tuple(seq)
        i = n - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1 :] = reversed(seq[i + 1 :])


def class_sequences(sizes, t: Topology):
    """Deduplicated class-label sequences for the given class sizes.

    Dedup keeps at least one representative of every reflection
    (and rotation, on cycles) orbit; orbits may repeat, which is sound for
    existence questions.
    """
    items: list[int] = []
    for label, size in enumerate(sizes):
        items.extend([label] * size)
    kind = t.kind
    for seq in _lex_multiset_permutations(items):
        if kind == PATH:
            if seq <= seq[::-1]:
                yield seq
        else:
            if seq[0] == items[0] and seq[1] <= seq[-1]:
                yield seq


# ---------------------------------------------------------------------------
# Arrangement checkers.  The binary kernel runs on row bitmasks and is
# differentially tested against the generic, judge-shaped evaluation.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _seat_pairs_by_distance(kind: str, n: int) -> tuple[tuple[int, int, bool], ...]:
    """(seat, seat, adjacent) pairs, nearest first: most witnesses are local."""
    t = Topology(kind, n)
    pairs = [(s, u) for s in range(n) for u in range(s + 1, n)]
    pairs.sort(key=lambda su: t.seat_distance(su[0], su[1]))
    return tuple((s, u, t.seat_distance(s, u) == 1) for s, u in pairs)


def _binary_row_masks(p: PreferenceProfile) -> list[int]:
    masks = []
    for row in p.values:
        m = 0
        for j, v in enumerate(row):
            if v:
                m |= 1 << j
        masks.append(m)
    return masks


def make_checker(p: PreferenceProfile, t: Topology, criterion: Criterion):
    """Returns seats-tuple -> bool for the criterion, using the fastest valid kernel."""
    if value_meta(p).is_binary:
        return _make_binary_checker(p, t, criterion)
    return _make_generic_checker(p, t, criterion)


def _make_binary_checker(p: PreferenceProfile, t: Topology, criterion: Criterion):
    rows = _binary_row_masks(p)
    ntab = t.neighbor_table()
    pairs = _seat_pairs_by_distance(t.kind, t.n)
    n = t.n
    stable = criterion is Criterion.STABLE

    def check(seats) -> bool:
        nbr = [0] * n
        for s in range(n):
            m = 0
            for x in ntab[s]:
                m |= 1 << seats[x]
            nbr[s] = m
        for s, u, adj in pairs:
            i = seats[s]
            j = seats[u]
            ri = rows[i]
            gain_i = (ri & nbr[u]).bit_count() + (adj and (ri >> j) & 1) - (ri & nbr[s]).bit_count()
            if stable:
                if gain_i <= 0:
                    continue
                rj = rows[j]
                if (rj & nbr[s]).bit_count() + (adj and (rj >> i) & 1) > (rj & nbr[u]).bit_count():
                    return False
            else:
                if gain_i > 0:
                    return False
                rj = rows[j]
                if (rj & nbr[s]).bit_count() + (adj and (rj >> i) & 1) > (rj & nbr[u]).bit_count():
                    return False
        return True

    return check


def _make_generic_checker(p: PreferenceProfile, t: Topology, criterion: Criterion):
    vals = p.values
    ntab = t.neighbor_table()
    pairs = _seat_pairs_by_distance(t.kind, t.n)
    n = t.n
    stable = criterion is Criterion.STABLE

    def check(seats) -> bool:
        utils = [0] * n
        for s in range(n):
            row = vals[seats[s]]
            utils[s] = sum(row[seats[x]] for x in ntab[s])
        for s, u, adj in pairs:
            i = seats[s]
            j = seats[u]
            ri = vals[i]
            new_i = sum(ri[j] if x == s else ri[seats[x]] for x in ntab[u])
            if stable:
                if new_i <= utils[s]:
                    continue
                rj = vals[j]
                if sum(rj[i] if x == u else rj[seats[x]] for x in ntab[s]) > utils[u]:
                    return False
            else:
                if new_i > utils[s]:
                    return False
                rj = vals[j]
                if sum(rj[i] if x == u else rj[seats[x]] for x in ntab[s]) > utils[u]:
                    return False
        return True

    return check


@dataclass
class SolveResult:
    """Outcome of an exhaustive scan; ``enumerated`` certifies nonexistence."""

    arrangement: Arrangement | None
    enumerated: int
    method: str = "exact"


def solve(
    p: PreferenceProfile, t: Topology, criterion: Criterion, limit: int = DEFAULT_AGENT_LIMIT
) -> SolveResult:
    if p.n != t.n:
        raise ValueError("profile and topology sizes disagree")
    if p.n > limit:
        raise EnumerationLimitError(f"agent-level enumeration limited to n <= {limit}, got {p.n}")
    check = make_checker(p, t, criterion)
    count = 0
    for seats in arrangements(t):
        count += 1
        if check(seats):
            return SolveResult(Arrangement(seats), count)
    return SolveResult(None, count)


def find_arrangement(
    p: PreferenceProfile, t: Topology, criterion: Criterion, limit: int = DEFAULT_AGENT_LIMIT
) -> Arrangement | None:
    """Some arrangement satisfying the criterion, or None after full enumeration."""
    return solve(p, t, criterion, limit).arrangement


def count_stable(p: PreferenceProfile, t: Topology, limit: int = DEFAULT_AGENT_LIMIT) -> int:
    """Number of symmetry-deduplicated arrangements with no blocking pair."""
    if p.n > limit:
        raise EnumerationLimitError(f"agent-level enumeration limited to n <= {limit}, got {p.n}")
    check = make_checker(p, t, Criterion.STABLE)
    return sum(1 for seats in arrangements(t) if check(seats))


def sequence_to_arrangement(c: ClassStructure, seq) -> Arrangement:
    """Arrangement on the expanded profile realizing a class sequence.

    Within each class, agents are assigned in ascending id order.
    """
    offs = list(class_offsets(c))
    seats = []
    for label in seq:
        seats.append(offs[label])
        offs[label] += 1
    return Arrangement(tuple(seats))


def find_class_arrangement(
    c: ClassStructure,
    t: Topology,
    criterion: Criterion,
    limit: int = DEFAULT_SEQUENCE_LIMIT,
) -> Arrangement | None:
    """Exhaustive search over class sequences only.

    Each sequence is decided by the compatible-triple tables (the verdict
    depends only on the classes at the seats involved); existence answers
    agree with ``find_arrangement`` on the expanded profile.
    """
    if c.n != t.n:
        raise ValueError("class structure and topology sizes disagree")
    total = multiset_sequence_count(c.sizes)
    if total > limit:
        raise EnumerationLimitError(f"{total} class sequences exceed the limit {limit}")
    tables = polyclass.build_triple_tables(c, criterion)
    for seq in class_sequences(c.sizes, t):
        if polyclass.sequence_compatible(tables, t.kind, seq)[0]:
            return sequence_to_arrangement(c, seq)
    return None


# ---------------------------------------------------------------------------
# Hamiltonicity <-> envy-freeness equivalence on reduction gadgets.
# ---------------------------------------------------------------------------


def has_hamiltonian_cycle(g) -> bool:
    """Permutation search; a single vertex counts as trivially Hamiltonian."""
    n = g.n
    if n == 1:
        return True
    adj = g.adjacency()
    for perm in itertools.permutations(range(1, n)):
        order = (0,) + perm
        if all(order[(i + 1) % n] in adj[order[i]] for i in range(n)):
            return True
    return False


def has_hamiltonian_path(g) -> bool:
    n = g.n
    if n == 1:
        return True
    adj = g.adjacency()
    for order in itertools.permutations(range(n)):
        if all(order[i + 1] in adj[order[i]] for i in range(n - 1)):
            return True
    return False


def ef_equiv_hamiltonicity(g, kind: str = CYCLE) -> tuple[bool, bool]:
    """(envy-free arrangement exists on the gadget, Hamiltonian structure exists).

    Both flags are computed independently; callers assert their equality.
    ``kind=CYCLE`` tests Hamiltonian cycles, ``kind=PATH`` Hamiltonian paths
    on digraphs whose last vertex is a sink.
    """
    from . import constructions

    if kind == CYCLE:
        gadget = constructions.hamiltonian_cycle_profile(g)
        ham = has_hamiltonian_cycle(g)
    elif kind == PATH:
        gadget = constructions.hamiltonian_path_profile(g)
        ham = has_hamiltonian_path(g)
    else:
        raise ValueError(f"unknown topology kind {kind!r}")
    t = Topology(kind, gadget.n)
    ef = find_arrangement(gadget, t, Criterion.ENVY_FREE, limit=12) is not None
    return ef, ham
