"""Ground-truth evaluation: utilities, envy, blocking pairs, welfare, potential.

Envy is defined on the fully swapped arrangement: agent i envies agent j
when i's utility is strictly larger after the two exchange seats.  The
functions here use an O(1) seat-delta shortcut; its equality with the
definitional full-swap evaluation is pinned by a property test.
"""

from __future__ import annotations

from dataclasses import dataclass

from .profile import CYCLE, PATH, Arrangement, PreferenceProfile, Topology, value_meta

ENVY = "envy"
BLOCKING_PAIR = "blocking_pair"

# Edge coding for binary path profiles: adjacent seats (left, right).
EDGE_NONE = 0  # mutual dislike
EDGE_LEFT_LIKES = 1  # only left -> right
EDGE_RIGHT_LIKES = 2  # only right -> left
EDGE_MUTUAL = 3


@dataclass(frozen=True)
class Witness:
    """Re-checkable certificate: an envy edge (i envies j) or a blocking pair."""

    kind: str
    agents: tuple[int, int]
    seats: tuple[int, int]

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "agents": list(self.agents)}


@dataclass(frozen=True, order=True)
class PotentialValue:
    """Lexicographic pair (welfare, edge sequence) for binary path dynamics."""

    welfare: int
    edge_seq: tuple[int, ...]


def _require_valid(t: Topology, a: Arrangement) -> None:
    if t.n != a.n:
        raise ValueError(f"arrangement of size {a.n} on topology of size {t.n}")


def utility(p: PreferenceProfile, t: Topology, a: Arrangement, agent: int) -> int:
    """Sum of ``agent``'s preferences toward its seat neighbors."""
    _require_valid(t, a)
    seat = a.positions()[agent]
    row = p.values[agent]
    return sum(row[a.seats[s]] for s in t.neighbor_table()[seat])


def _utility_at(p, nbr_table, seats, agent: int, seat: int) -> int:
    row = p.values[agent]
    return sum(row[seats[s]] for s in nbr_table[seat])


def _envies_seats(p, nbr_table, seats, i: int, si: int, j: int, sj: int) -> bool:
    # Delta form: i's utility at j's seat in the swapped arrangement. Only the
    # occupants of si and sj change, and sj is never its own neighbor, so it
    # suffices to read current occupants and substitute j at seat si.
    row = p.values[i]
    cur = 0
    for s in nbr_table[si]:
        cur += row[seats[s]]
    new = 0
    for s in nbr_table[sj]:
        new += row[j] if s == si else row[seats[s]]
    return new > cur


def envies_by_swap(p: PreferenceProfile, t: Topology, a: Arrangement, i: int, j: int) -> bool:
    """Definitional evaluation: rebuild the swapped arrangement and compare utilities."""
    _require_valid(t, a)
    pos = a.positions()
    si, sj = pos[i], pos[j]
    swapped = list(a.seats)
    swapped[si], swapped[sj] = swapped[sj], swapped[si]
    nbr = t.neighbor_table()
    return _utility_at(p, nbr, tuple(swapped), i, sj) > _utility_at(p, nbr, a.seats, i, si)


def envies(p: PreferenceProfile, t: Topology, a: Arrangement, i: int, j: int) -> bool:
    """True iff i's utility strictly increases when i and j trade seats."""
    if i == j:
        raise ValueError("an agent cannot envy itself")
    _require_valid(t, a)
    pos = a.positions()
    return _envies_seats(p, t.neighbor_table(), a.seats, i, pos[i], j, pos[j])


def blocking_pairs(p: PreferenceProfile, t: Topology, a: Arrangement) -> list[Witness]:
    """All unordered pairs with mutual envy, sorted by agent ids."""
    _require_valid(t, a)
    nbr = t.neighbor_table()
    pos = a.positions()
    seats = a.seats
    out = []
    for i in range(p.n):
        for j in range(i + 1, p.n):
            if _envies_seats(p, nbr, seats, i, pos[i], j, pos[j]) and _envies_seats(
                p, nbr, seats, j, pos[j], i, pos[i]
            ):
                out.append(Witness(BLOCKING_PAIR, (i, j), (pos[i], pos[j])))
    return out


def is_stable(p: PreferenceProfile, t: Topology, a: Arrangement) -> tuple[bool, Witness | None]:
    """No blocking pair; returns the first witness (lexicographic) otherwise."""
    _require_valid(t, a)
    nbr = t.neighbor_table()
    pos = a.positions()
    seats = a.seats
    for i in range(p.n):
        for j in range(i + 1, p.n):
            if _envies_seats(p, nbr, seats, i, pos[i], j, pos[j]) and _envies_seats(
                p, nbr, seats, j, pos[j], i, pos[i]
            ):
                return False, Witness(BLOCKING_PAIR, (i, j), (pos[i], pos[j]))
    return True, None


def is_envy_free(p: PreferenceProfile, t: Topology, a: Arrangement) -> tuple[bool, Witness | None]:
    """No directed envy edge; implies stability."""
    _require_valid(t, a)
    nbr = t.neighbor_table()
    pos = a.positions()
    seats = a.seats
    for i in range(p.n):
        for j in range(p.n):
            if i != j and _envies_seats(p, nbr, seats, i, pos[i], j, pos[j]):
                return False, Witness(ENVY, (i, j), (pos[i], pos[j]))
    return True, None


def welfare(p: PreferenceProfile, t: Topology, a: Arrangement) -> int:
    """Total utility, summed over both directions of every seat edge."""
    _require_valid(t, a)
    seats = a.seats
    n = t.n
    total = 0
    for s in range(n - 1):
        u, v = seats[s], seats[s + 1]
        total += p.values[u][v] + p.values[v][u]
    if t.kind == CYCLE and n > 2:
        u, v = seats[n - 1], seats[0]
        total += p.values[u][v] + p.values[v][u]
    return total


def edge_sequence(p: PreferenceProfile, t: Topology, a: Arrangement) -> tuple[int, ...]:
    """Length n-1 coding of adjacent pairs on a binary path profile."""
    if t.kind != PATH:
        raise ValueError("edge sequences are defined on paths only")
    if not value_meta(p).is_binary:
        raise ValueError("edge sequences are defined for binary profiles only")
    _require_valid(t, a)
    seats = a.seats
    seq = []
    for s in range(t.n - 1):
        left, right = seats[s], seats[s + 1]
        # 0/1 values make the coding a two-bit number: left-likes is bit 0.
        seq.append(p.values[left][right] + 2 * p.values[right][left])
    return tuple(seq)


def potential(p: PreferenceProfile, t: Topology, a: Arrangement) -> PotentialValue:
    """Lexicographic potential (welfare, edge sequence); strictly increases
    under distance-<=2 blocking-pair swaps on binary paths."""
    return PotentialValue(welfare(p, t, a), edge_sequence(p, t, a))
