"""Generators for the named instance families, reductions, and stable constructors.

Instance generators return exact integer profiles.  Stable constructors
dispatch on the class structure, emit candidate arrangements in the order
the constructive case analysis suggests, and return the first candidate
the judge certifies; they raise ``ConstructionError`` if no candidate
survives, which the exhaustive grid tests show never happens.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import judge
from .profile import (
    CYCLE,
    PATH,
    Arrangement,
    ClassStructure,
    PreferenceProfile,
    ProfileError,
    Topology,
    expand_classes,
    normalize_for_cycle,
)


class ConstructionError(RuntimeError):
    """No candidate arrangement passed verification (should be unreachable)."""


@dataclass(frozen=True)
class Digraph:
    """Directed graph without self-loops, vertices 0..n-1."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if u == v:
                raise ProfileError("self-loops are not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ProfileError(f"edge ({u}, {v}) out of range for {self.n} vertices")

    @staticmethod
    def from_edges(n: int, edges) -> "Digraph":
        return Digraph(n, frozenset((int(u), int(v)) for u, v in edges))

    def adjacency(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            out[u].add(v)
        return tuple(frozenset(s) for s in out)

    def out_degree(self, v: int) -> int:
        return sum(1 for u, w in self.edges if u == v)


def _binary_profile(n: int, likes) -> PreferenceProfile:
    rows = []
    for i in range(n):
        liked = likes(i)
        rows.append(tuple(1 if j in liked and j != i else 0 for j in range(n)))
    return PreferenceProfile(tuple(rows))


def canonical_yes_instance() -> PreferenceProfile:
    """Three mutually indifferent agents: envy-free on both topologies."""
    return PreferenceProfile.from_rows([[0, 0, 0], [0, 0, 0], [0, 0, 0]])


def canonical_no_instance_cycle() -> PreferenceProfile:
    """A fixed profile with no envy-free cycle arrangement."""
    return abf_cycle(4)


def canonical_no_instance_path() -> PreferenceProfile:
    """A fixed profile with no envy-free path arrangement."""
    return pm1_path(3)


def hamiltonian_cycle_profile(g: Digraph) -> PreferenceProfile:
    """Gadget tying envy-free cycle arrangements to Hamiltonian cycles.

    Each vertex v contributes agents x_v, y_v, z_v (ids 3v, 3v+1, 3v+2):
    x_v likes only y_v, y_v only z_v, and z_v likes x_u for every edge
    (v, u).  Vertices without outgoing edges short-circuit to a canonical
    no-instance, except the single-vertex graph, which is a yes-instance.
    """
    if any(g.out_degree(v) == 0 for v in range(g.n)):
        if g.n == 1:
            return canonical_yes_instance()
        return canonical_no_instance_cycle()
    adj = g.adjacency()

    def likes(agent: int):
        v, role = divmod(agent, 3)
        if role == 0:
            return {3 * v + 1}
        if role == 1:
            return {3 * v + 2}
        return {3 * u for u in adj[v]}

    return _binary_profile(3 * g.n, likes)


def hamiltonian_path_profile(g: Digraph) -> PreferenceProfile:
    """Path variant of the gadget; the last vertex must be a sink.

    Preprocessing only requires outgoing edges of the non-sink vertices.
    """
    sink = g.n - 1
    if g.out_degree(sink) != 0:
        raise ProfileError("the designated sink (last vertex) must have no outgoing edges")
    if any(g.out_degree(v) == 0 for v in range(g.n - 1)):
        if g.n == 1:
            return canonical_yes_instance()
        return canonical_no_instance_path()
    adj = g.adjacency()

    def likes(agent: int):
        v, role = divmod(agent, 3)
        if role == 0:
            return {3 * v + 1}
        if role == 1:
            return {3 * v + 2}
        return {3 * u for u in adj[v]}

    return _binary_profile(3 * g.n, likes)


def abf_cycle(n: int) -> PreferenceProfile:
    """Three-class, three-valued, non-negative family unstable on every cycle.

    Agent 0 (Alice) prefers any friend to agent 1 (Bob); Bob prefers Alice;
    the n-2 friends prefer Bob, then each other, then Alice.  Values 0/1/2
    are the smallest non-negative integers realizing those orders.
    """
    if n < 4:
        raise ProfileError("this family needs n >= 4")
    rows = [[0] * n for _ in range(n)]
    for j in range(2, n):
        rows[0][j] = 1  # Alice -> friends
    rows[1][0] = 1  # Bob -> Alice
    for i in range(2, n):
        rows[i][1] = 2  # friend -> Bob
        for j in range(2, n):
            if j != i:
                rows[i][j] = 1  # friend -> friend
    return PreferenceProfile.from_rows(rows)


def abf_path(n: int) -> PreferenceProfile:
    """Three-class, three-valued, non-negative family unstable on every path.

    Ordering (Alice, Bob1, Bob2, Bob3, friends...): Alice likes the friends;
    each Bob likes only Alice; friends value the Bobs at 3, and the other
    friends and nothing else at 1.  Needs at least eight friends.
    """
    if n < 12:
        raise ProfileError("this family needs n >= 12")
    rows = [[0] * n for _ in range(n)]
    for j in range(4, n):
        rows[0][j] = 1  # Alice -> friends
    for b in (1, 2, 3):
        rows[b][0] = 1  # Bob -> Alice
    for i in range(4, n):
        for b in (1, 2, 3):
            rows[i][b] = 3  # friend -> Bobs
        for j in range(4, n):
            if j != i:
                rows[i][j] = 1  # friend -> friend
    return PreferenceProfile.from_rows(rows)


def four_class_cycle(n: int) -> PreferenceProfile:
    """Four-class binary family with no stable cycle arrangement for n >= 7.

    Agents: a=0, b1=1, b2=2, c=3, d's from 4.  a likes only c; b1 and b2
    like a and c; c likes every d; each d likes the other d's plus b1, b2.
    """
    if n < 7:
        raise ProfileError("this family needs n >= 7")

    def likes(i: int):
        if i == 0:
            return {3}
        if i in (1, 2):
            return {0, 3}
        if i == 3:
            return set(range(4, n))
        return (set(range(4, n)) - {i}) | {1, 2}

    return _binary_profile(n, likes)


def pm1_path(n: int) -> PreferenceProfile:
    """Three-class two-valued family over {-1, 1} unstable on every path.

    Bob (1) values Alice (0) at one; Alice values the friends at one;
    friends value Bob and each other at one; everything else is minus one.
    """
    if n < 3:
        raise ProfileError("this family needs n >= 3")
    rows = [[-1] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 0
    rows[1][0] = 1  # Bob -> Alice
    for j in range(2, n):
        rows[0][j] = 1  # Alice -> friends
    for i in range(2, n):
        rows[i][1] = 1  # friend -> Bob
        for j in range(2, n):
            if j != i:
                rows[i][j] = 1  # friend -> friend
    return PreferenceProfile.from_rows(rows)


def p4_loop() -> PreferenceProfile:
    """Four agents on a directed approval ring 0->1->2->3->0.

    The path (0,1,2,3) is stable, yet unrestricted swap dynamics started
    from (0,3,1,2) oscillate with period two.  The ring is the unique
    one-out-regular digraph consistent with that behavior (pinned by an
    exhaustive scan in the tests).
    """
    return _binary_profile(4, lambda i: {(i + 1) % 4})


def remove_agent(p: PreferenceProfile, agent: int) -> PreferenceProfile:
    keep = [i for i in range(p.n) if i != agent]
    return PreferenceProfile(
        tuple(tuple(p.values[i][j] for j in keep) for i in keep)
    )


def nonmonotone_pair(n: int) -> tuple[PreferenceProfile, PreferenceProfile, PreferenceProfile]:
    """Adding one agent can destroy stability or restore it, for any base n >= 7.

    Returns (unstable instance of size n+1, that instance with agent a
    removed, the size-n instance with an extra b3) - the first has no
    stable cycle arrangement while both others do.
    """
    if n < 7:
        raise ProfileError("non-monotonicity families need n >= 7")
    unstable = four_class_cycle(n + 1)
    minus_a = remove_agent(unstable, 0)

    base = four_class_cycle(n)

    def likes(i: int):
        # Agent ids: 0=a, 1=b1, 2=b2, 3=b3 (new), 4=c, d's from 5.
        if i == 0:
            return {4}
        if i in (1, 2, 3):
            return {0, 4}
        if i == 4:
            return set(range(5, n + 1))
        return (set(range(5, n + 1)) - {i}) | {1, 2, 3}

    del base
    plus_b3 = _binary_profile(n + 1, likes)
    return unstable, minus_a, plus_b3


def euler_tour_complete_graph(k: int) -> list[int]:
    """Closed Euler tour of the complete graph on k vertices (k odd).

    Hierholzer's method with lowest-numbered-vertex tie-breaking; the tour
    is returned as a vertex sequence of length k(k-1)/2 (the closing edge
    back to the start is implicit).
    """
    if k < 3 or k % 2 == 0:
        raise ProfileError("a complete graph has an Euler tour only for odd k >= 3")
    remaining = [set(range(k)) - {v} for v in range(k)]
    stack = [0]
    tour: list[int] = []
    while stack:
        v = stack[-1]
        if remaining[v]:
            u = min(remaining[v])
            remaining[v].remove(u)
            remaining[u].remove(v)
            stack.append(u)
        else:
            tour.append(stack.pop())
    tour.reverse()
    assert tour[0] == tour[-1] == 0
    return tour[:-1]


def blockwise_euler(base: PreferenceProfile) -> tuple[PreferenceProfile, Arrangement]:
    """Blockwise-diagonal profile of 2l+1 copies of ``base`` plus a stable cycle seating.

    The arrangement follows an Euler tour of the complete graph on the
    copies, so every agent sits between two foreign components and each
    component pair is adjacent at most once; all utilities are zero, which
    makes the arrangement stable regardless of the base values.
    """
    ell = base.n
    if ell < 2:
        raise ProfileError("the base profile needs at least two agents")
    k = 2 * ell + 1
    n = ell * k
    rows = [[0] * n for _ in range(n)]
    for copy in range(k):
        off = copy * ell
        for i in range(ell):
            for j in range(ell):
                rows[off + i][off + j] = base.values[i][j]
    profile = PreferenceProfile.from_rows(rows)

    tour = euler_tour_complete_graph(k)
    assert len(tour) == n
    next_member = [copy * ell for copy in range(k)]
    seats = []
    for comp in tour:
        seats.append(next_member[comp])
        next_member[comp] += 1
    return profile, Arrangement(tuple(seats))


def euler_arrangement_conditions(p: PreferenceProfile, a: Arrangement) -> bool:
    """Structural hypotheses of the zero-utility stability argument.

    Checks, independently of the judge, that every agent's neighbors come
    from foreign components and that each pair of components is adjacent
    at most once on the cycle.
    """
    from .profile import components

    comp_of = {}
    for idx, comp in enumerate(components(p)):
        for agent in comp:
            comp_of[agent] = idx
    n = a.n
    seen_pairs = set()
    for s in range(n):
        u = a.seats[s]
        v = a.seats[(s + 1) % n]
        cu, cv = comp_of[u], comp_of[v]
        if cu == cv:
            return False
        pair = (min(cu, cv), max(cu, cv))
        if pair in seen_pairs:
            return False
        seen_pairs.add(pair)
    return True


# ---------------------------------------------------------------------------
# Constructive stable arrangements for the always-stable regimes.
# ---------------------------------------------------------------------------


def _dedup(seqs):
    seen = set()
    out = []
    for s in seqs:
        tup = tuple(s)
        if tup not in seen:
            seen.add(tup)
            out.append(tup)
    return out


def _round_robin(order, sizes) -> list[int]:
    """Cycle through the classes in a fixed order, skipping exhausted ones."""
    remaining = list(sizes)
    seq: list[int] = []
    while len(seq) < sum(sizes):
        for label in order:
            if remaining[label] > 0:
                seq.append(label)
                remaining[label] -= 1
    return seq


def _alternate(first: int, second: int, n_first: int, n_second: int) -> list[int]:
    """Interleave two classes starting with ``first``; leftovers trail as a block."""
    seq = []
    a, b = n_first, n_second
    while a > 0 and b > 0:
        seq.append(first)
        seq.append(second)
        a -= 1
        b -= 1
    seq.extend([first] * a)
    seq.extend([second] * b)
    return seq


def _swap_positions(seq, a, b) -> list[int]:
    out = list(seq)
    out[a], out[b] = out[b], out[a]
    return out


def _two_class_candidates(n0: int, n1: int, kind: str) -> list[tuple[int, ...]]:
    cands: list[list[int]] = []
    n = n0 + n1
    for x, y, nx, ny in ((0, 1, n0, n1), (1, 0, n1, n0)):
        cands.append([x] * nx + [y] * ny)  # blocks
        for alt in (_alternate(x, y, nx, ny), _alternate(y, x, ny, nx)[::-1]):
            cands.append(alt)
            if n >= 3:
                # Alternation after exchanging an extremal agent with its
                # non-extremal counterpart (the "proceed to the exchange" case).
                cands.append(_swap_positions(alt, n - 2, n - 1))
                cands.append(_swap_positions(alt, 0, 1))
        if kind == PATH:
            if nx >= 2:
                # Same class at both path ends, block or alternating interior.
                cands.append([x] * (nx - 1) + [y] * ny + [x])
                cands.append([x] + _alternate(y, x, ny, nx - 2) + [x])
                cands.append([x] + _alternate(x, y, nx - 2, ny) + [x])
            if ny >= 2:
                # x-block kept away from the endpoints.
                cands.append([y] + [x] * nx + [y] * (ny - 1))
                cands.append([y] * (ny - (ny // 2)) + [x] * nx + [y] * (ny // 2))
            if nx == 1:
                for j in {0, 1, ny // 2, ny}:
                    cands.append([y] * j + [x] + [y] * (ny - j))
    return _dedup(cands)


def _sequence_arrangement(c: ClassStructure, seq) -> Arrangement:
    offs = [0]
    for size in c.sizes[:-1]:
        offs.append(offs[-1] + size)
    seats = []
    for label in seq:
        seats.append(offs[label])
        offs[label] += 1
    return Arrangement(tuple(seats))


def _first_stable(c: ClassStructure, t: Topology, candidates) -> Arrangement:
    expanded = expand_classes(c)
    for seq in candidates:
        arr = _sequence_arrangement(c, seq)
        if judge.is_stable(expanded, t, arr)[0]:
            return arr
    raise ConstructionError("no candidate arrangement was stable")


def two_class_stable(c: ClassStructure, t: Topology) -> Arrangement:
    """Stable arrangement for at most two classes, on either topology.

    Cycle dispatch: an indifferent class or a self-preferring class makes
    the block arrangement stable; two classes preferring each other are
    alternated from the larger.  Paths also try endpoint and centered
    placements plus best-seat placements of a singleton class; every
    candidate is certified by the judge before being returned.
    """
    if c.k > 2:
        raise ProfileError("this constructor handles at most two classes")
    if c.n != t.n:
        raise ValueError("class structure and topology sizes disagree")
    if c.k == 1 or c.n <= 2:
        arr = Arrangement(tuple(range(c.n)))
        expanded = expand_classes(c)
        assert judge.is_stable(expanded, t, arr)[0]
        return arr
    return _first_stable(c, t, _two_class_candidates(c.sizes[0], c.sizes[1], t.kind))


def _normalized_likes(c: ClassStructure) -> list[list[int]]:
    """Per-row binary like-matrix of the class matrix (cycle normalization)."""
    k = c.k
    likes = []
    for a in range(k):
        row = c.matrix[a]
        lo = min(row)
        likes.append([1 if v > lo else 0 for v in row])
    return likes


def min_adjacency_cycle_sequence(counts: dict[int, int]) -> list[int]:
    """Cycle sequence over the classes minimizing same-class adjacencies.

    Achieves max(0, 2*max_count - n) monochromatic adjacent pairs, which is
    optimal: with a <= rest the two smaller classes split exactly into the
    gaps between majority members, otherwise the rest can only separate the
    majority into that many blocks.
    """
    order = sorted(counts, key=lambda lbl: (-counts[lbl], lbl))
    labels = order + [None] * (3 - len(order))
    a = counts[order[0]]
    b = counts[order[1]] if len(order) > 1 else 0
    cc = counts[order[2]] if len(order) > 2 else 0
    big, mid, small = labels[0], labels[1], labels[2]
    if b + cc == 0:
        return [big] * a
    if a > b + cc:
        groups = b + cc
        others = [mid] * b + [small] * cc
        base, extra = divmod(a, groups)
        seq: list[int] = []
        for g in range(groups):
            seq.extend([big] * (base + (1 if g < extra else 0)))
            seq.append(others[g])
        return seq
    # a <= b + c: zero monochromatic adjacencies.  r gaps get one mid and one
    # small each (r = b + c - a <= min(b, c)), the rest get a lone filler.
    r = b + cc - a
    gaps = [[mid, small] for _ in range(r)]
    gaps += [[mid]] * (b - r)
    gaps += [[small]] * (cc - r)
    assert len(gaps) == a
    seq = []
    for g in gaps:
        seq.append(big)
        seq.extend(g)
    return seq


def _three_class_candidates(c: ClassStructure) -> list[tuple[int, ...]]:
    likes = _normalized_likes(c)
    sizes = c.sizes
    self_likers = [x for x in range(3) if likes[x][x]]
    cands: list[list[int]] = []

    def block(x):
        return [x] * sizes[x]

    if len(self_likers) >= 2:
        # Each class seated among themselves, plus the variant separating the
        # two self-liking blocks with a single member of the third class.
        for order in itertools.permutations(range(3)):
            cands.append(block(order[0]) + block(order[1]) + block(order[2]))
        for r, b in itertools.permutations(self_likers, 2):
            g = 3 - r - b if len(self_likers) == 2 else [x for x in range(3) if x not in (r, b)][0]
            if sizes[g] >= 1:
                cands.append(block(r) + [g] + block(b) + [g] * (sizes[g] - 1))
    elif len(self_likers) == 1:
        r = self_likers[0]
        others = [x for x in range(3) if x != r]
        liked = [x for x in others if likes[r][x]]
        if liked:
            for b in liked:
                g = [x for x in others if x != b][0]
                if sizes[g] < sizes[b]:
                    cands.append(block(r) + _alternate(b, g, sizes[b], sizes[g]))
                else:
                    cands.append(block(r) + _alternate(g, b, sizes[g], sizes[b]))
                    # Greens dislike Blues: two-by-two alternation.
                    seq = [g]
                    rem_b, rem_g = sizes[b], sizes[g] - 1
                    while rem_b > 0:
                        take = min(2, rem_b)
                        seq += [b] * take
                        rem_b -= take
                        if rem_b > 0:
                            take_g = min(2, rem_g)
                            seq += [g] * take_g
                            rem_g -= take_g
                            if take_g == 0:
                                break
                    seq += [b] * rem_b + [g] * rem_g
                    cands.append(block(r) + seq)
        # Self-liker that likes nobody else: others alternated from the larger.
        x, y = others
        if sizes[x] < sizes[y]:
            x, y = y, x
        cands.append(block(r) + _alternate(x, y, sizes[x], sizes[y]))
    else:
        pariah = [y for y in range(3) if all(not likes[x][y] for x in range(3))]
        generous = [x for x in range(3) if sum(likes[x][y] for y in range(3) if y != x) == 2]
        if pariah:
            r = pariah[0]
            x, y = [z for z in range(3) if z != r]
            if sizes[x] < sizes[y]:
                x, y = y, x
            cands.append(block(r) + _alternate(x, y, sizes[x], sizes[y]))
        if generous:
            r = generous[0]
            others = [x for x in range(3) if x != r]
            lovers = [x for x in others if likes[x][r]]
            for b in lovers:
                g = [x for x in others if x != b][0]
                nr, nb, ng = sizes[r], sizes[b], sizes[g]
                if nr > nb:
                    seq = _alternate(r, b, nb, nb)
                    m = min(nr - nb, ng)
                    seq += _alternate(r, g, m, m)
                    seq += [r] * (nr - nb - m) + [g] * (ng - m)
                elif nr < nb:
                    seq = _alternate(b, r, nr, nr)
                    m = min(nb - nr, ng)
                    seq += _alternate(b, g, m, m)
                    seq += [b] * (nb - nr - m) + [g] * (ng - m)
                else:
                    seq = _alternate(r, b, nr, nb) + [g] * ng
                cands.append(seq)
        if not pariah and not generous:
            # Cyclic likes: any welfare-maximizing arrangement is stable, and
            # welfare is n minus the monochromatic adjacency count.
            cands.append(min_adjacency_cycle_sequence({x: sizes[x] for x in range(3)}))

    # Robust fallbacks, tried only if the case construction misses.
    for order in itertools.permutations(range(3)):
        cands.append(block(order[0]) + block(order[1]) + block(order[2]))
        cands.append(_round_robin(order, sizes))
    cands.append(min_adjacency_cycle_sequence({x: sizes[x] for x in range(3)}))
    return _dedup(cands)


def three_class_two_valued_cycle_stable(c: ClassStructure) -> Arrangement:
    """Stable cycle arrangement for three classes over at most two values."""
    if c.k != 3:
        raise ProfileError("this constructor handles exactly three classes")
    values = {v for row in c.matrix for v in row}
    if len(values) > 2:
        raise ProfileError("this constructor handles at most two distinct values")
    t = Topology.cycle(c.n)
    return _first_stable(c, t, _three_class_candidates(c))
