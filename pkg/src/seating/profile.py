"""Core data model: preference profiles, topologies, arrangements, agent classes.

All preference values are exact integers.  Comparisons between seat
utilities decide stability, so approximate arithmetic is never allowed
anywhere downstream of this module.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

PATH = "path"
CYCLE = "cycle"

# Factorial relabeling scan; larger instances must be supplied in class form.
CANONICAL_LIMIT = 8


class ProfileError(ValueError):
    """Malformed profile/class document or invalid field value."""


@dataclass(frozen=True)
class Topology:
    """Seat graph: a path or a cycle on ``n`` seats."""

    kind: str
    n: int

    def __post_init__(self) -> None:
        if self.kind not in (PATH, CYCLE):
            raise ProfileError(f"unknown topology kind {self.kind!r}")
        if self.kind == PATH and self.n < 1:
            raise ProfileError("a path needs at least one seat")
        if self.kind == CYCLE and self.n < 3:
            # A 2-cycle would count the single neighbor pair twice.
            raise ProfileError("a cycle needs at least three seats")

    @staticmethod
    def path(n: int) -> "Topology":
        return Topology(PATH, n)

    @staticmethod
    def cycle(n: int) -> "Topology":
        return Topology(CYCLE, n)

    def neighbor_table(self) -> tuple[tuple[int, ...], ...]:
        """Seat index -> tuple of adjacent seat indices."""
        return _neighbor_table(self.kind, self.n)

    def seat_distance(self, s: int, t: int) -> int:
        d = abs(s - t)
        if self.kind == CYCLE:
            d = min(d, self.n - d)
        return d


@lru_cache(maxsize=None)
def _neighbor_table(kind: str, n: int) -> tuple[tuple[int, ...], ...]:
    table = []
    for i in range(n):
        if kind == PATH:
            nbrs = tuple(j for j in (i - 1, i + 1) if 0 <= j < n)
        else:
            nbrs = ((i - 1) % n, (i + 1) % n)
        table.append(nbrs)
    return tuple(table)


def _check_matrix(values: tuple[tuple[int, ...], ...], diag_zero: bool) -> None:
    n = len(values)
    if n < 1:
        raise ProfileError("empty matrix")
    for i, row in enumerate(values):
        if len(row) != n:
            raise ProfileError(f"non-square matrix: row {i} has {len(row)} entries, expected {n}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ProfileError(f"non-integer entry at ({i}, {j}): {v!r}")
        if diag_zero and row[i] != 0:
            raise ProfileError(f"nonzero diagonal entry at agent {i}")


@dataclass(frozen=True)
class PreferenceProfile:
    """n-by-n integer matrix; entry (i, j) is agent i's value for sitting next to j.

    Diagonal entries are pinned to zero.
    """

    values: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        _check_matrix(self.values, diag_zero=True)

    @property
    def n(self) -> int:
        return len(self.values)

    @staticmethod
    def from_rows(rows) -> "PreferenceProfile":
        return PreferenceProfile(tuple(tuple(row) for row in rows))

    def row(self, i: int) -> tuple[int, ...]:
        return self.values[i]

    def to_json(self) -> str:
        doc = {"n": self.n, "values": [list(r) for r in self.values]}
        return json.dumps(doc) + "\n"

    def to_csv(self) -> str:
        return "".join(",".join(str(v) for v in row) + "\n" for row in self.values)


@dataclass(frozen=True)
class Arrangement:
    """Seat index -> agent id; a permutation of 0..n-1."""

    seats: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.seats)
        if sorted(self.seats) != list(range(n)):
            raise ProfileError(f"seats {self.seats!r} are not a permutation of 0..{n - 1}")

    @property
    def n(self) -> int:
        return len(self.seats)

    def positions(self) -> tuple[int, ...]:
        """Agent id -> seat index (inverse of ``seats``)."""
        pos = [0] * self.n
        for seat, agent in enumerate(self.seats):
            pos[agent] = seat
        return tuple(pos)


@dataclass(frozen=True)
class ClassStructure:
    """Compressed form of a profile whose agents fall into k classes.

    ``matrix[a][b]`` is the value members of class ``a`` assign to members
    of class ``b``; the diagonal holds the within-class value (meaningful,
    unlike agent-level diagonals).
    """

    sizes: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        _check_matrix(self.matrix, diag_zero=False)
        if len(self.sizes) != len(self.matrix):
            raise ProfileError("sizes and matrix disagree on class count")
        for s in self.sizes:
            if isinstance(s, bool) or not isinstance(s, int) or s < 1:
                raise ProfileError(f"class sizes must be positive integers, got {s!r}")

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @staticmethod
    def from_lists(sizes, matrix) -> "ClassStructure":
        return ClassStructure(tuple(sizes), tuple(tuple(row) for row in matrix))

    def to_json(self) -> str:
        doc = {"k": self.k, "sizes": list(self.sizes), "matrix": [list(r) for r in self.matrix]}
        return json.dumps(doc) + "\n"


@dataclass(frozen=True)
class ValueProfileMeta:
    """Shape of the off-diagonal value set of a profile."""

    value_set: tuple[int, ...]
    is_binary: bool
    is_nonnegative: bool
    k_valued: int


def value_meta(p: PreferenceProfile) -> ValueProfileMeta:
    vals = sorted({p.values[i][j] for i in range(p.n) for j in range(p.n) if i != j})
    return ValueProfileMeta(
        value_set=tuple(vals),
        is_binary=set(vals) <= {0, 1},
        is_nonnegative=all(v >= 0 for v in vals),
        k_valued=len(vals),
    )


def parse_profile(text: str) -> PreferenceProfile:
    """Parse a profile document in JSON or CSV form.

    JSON: ``{"n": int, "values": [[int;n];n]}``.  CSV: n lines of n
    comma-separated integers.  Agent-level documents must carry a zero
    diagonal.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict) or "values" not in doc:
            raise ProfileError("profile JSON must be an object with a 'values' field")
        rows = doc["values"]
        if not isinstance(rows, list):
            raise ProfileError("'values' must be a list of rows")
        if "n" in doc and doc["n"] != len(rows):
            raise ProfileError(f"declared n={doc['n']} but matrix has {len(rows)} rows")
        return PreferenceProfile.from_rows(rows)
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([int(cell.strip()) for cell in line.split(",")])
        except ValueError as exc:
            raise ProfileError(f"non-integer entry in CSV line {line!r}") from exc
    if not rows:
        raise ProfileError("empty profile document")
    return PreferenceProfile.from_rows(rows)


def emit_profile(p: PreferenceProfile, fmt: str = "json") -> str:
    if fmt == "json":
        return p.to_json()
    if fmt == "csv":
        return p.to_csv()
    raise ProfileError(f"unknown profile format {fmt!r}")


def parse_classes(text: str) -> ClassStructure:
    """Parse a class-structure document: ``{"k", "sizes", "matrix"}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "sizes" not in doc or "matrix" not in doc:
        raise ProfileError("class JSON must be an object with 'sizes' and 'matrix'")
    if "k" in doc and doc["k"] != len(doc["sizes"]):
        raise ProfileError("declared k disagrees with sizes length")
    return ClassStructure.from_lists(doc["sizes"], doc["matrix"])


def _indistinguishable(vals, i: int, j: int) -> bool:
    # Same class: rows agree off {i, j}, columns agree off {i, j}, and the
    # pair value is symmetric so the within-class value is well defined.
    if vals[i][j] != vals[j][i]:
        return False
    ri, rj = vals[i], vals[j]
    for x in range(len(vals)):
        if x == i or x == j:
            continue
        if ri[x] != rj[x] or vals[x][i] != vals[x][j]:
            return False
    return True


def detect_partition(p: PreferenceProfile) -> tuple[tuple[int, ...], ...]:
    """Coarsest partition of agents into classes, ordered by smallest member."""
    n = p.n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j) and _indistinguishable(p.values, i, j):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    return tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))


def detect_classes(p: PreferenceProfile) -> ClassStructure:
    """Compress ``p`` into its coarsest class structure."""
    part = detect_partition(p)
    k = len(part)
    vals = p.values
    matrix = []
    for a in range(k):
        row = []
        for b in range(k):
            if a == b:
                members = part[a]
                row.append(vals[members[0]][members[1]] if len(members) > 1 else 0)
            else:
                row.append(vals[part[a][0]][part[b][0]])
        matrix.append(tuple(row))
    return ClassStructure(tuple(len(g) for g in part), tuple(matrix))


def expand_classes(c: ClassStructure) -> PreferenceProfile:
    """Agent-level profile with class members grouped consecutively.

    Agents ``offset(a) .. offset(a)+sizes[a]-1`` belong to class ``a``; the
    agent-level diagonal is re-zeroed.
    """
    labels = []
    for a, size in enumerate(c.sizes):
        labels.extend([a] * size)
    n = len(labels)
    rows = []
    for i in range(n):
        mrow = c.matrix[labels[i]]
        rows.append(tuple(0 if j == i else mrow[labels[j]] for j in range(n)))
    return PreferenceProfile(tuple(rows))


def class_offsets(c: ClassStructure) -> tuple[int, ...]:
    """First agent id of each class in the ``expand_classes`` numbering."""
    offs = [0]
    for size in c.sizes[:-1]:
        offs.append(offs[-1] + size)
    return tuple(offs)


def normalize_for_cycle(p: PreferenceProfile) -> PreferenceProfile:
    """Per-row affine reduction to minimal non-negative integers.

    Valid on regular seat graphs (cycles): subtracting the row minimum and
    dividing by the gcd of the gaps preserves every utility comparison, so
    stability and envy are untouched.  Two-valued rows come out binary.
    """
    n = p.n
    rows = []
    for i in range(n):
        off = [p.values[i][j] for j in range(n) if j != i]
        lo = min(off)
        g = 0
        for v in off:
            g = math.gcd(g, v - lo)
        row = tuple(
            0 if j == i else (p.values[i][j] - lo) // g if g else 0
            for j in range(n)
        )
        rows.append(row)
    return PreferenceProfile(tuple(rows))


def canonical_profile(p: PreferenceProfile) -> PreferenceProfile:
    """Lexicographically minimal matrix over simultaneous row/column relabelings.

    Two profiles are isomorphic iff their canonical forms are equal.  The
    scan is factorial in ``n`` and refuses n > 8.
    """
    n = p.n
    if n > CANONICAL_LIMIT:
        raise ProfileError(f"canonicalization is limited to n <= {CANONICAL_LIMIT}, got {n}")
    vals = p.values
    best: list[tuple[int, ...]] | None = None
    for sigma in itertools.permutations(range(n)):
        rows: list[tuple[int, ...]] = []
        verdict = 0
        for i in range(n):
            src = vals[sigma[i]]
            row = tuple(src[sigma[j]] for j in range(n))
            if best is not None and verdict == 0:
                ref = best[i]
                if row < ref:
                    verdict = -1
                elif row > ref:
                    verdict = 1
                    break
            rows.append(row)
        if verdict == 1:
            continue
        if best is None or verdict == -1:
            best = rows
    assert best is not None
    return PreferenceProfile(tuple(best))


def relabel_profile(p: PreferenceProfile, sigma) -> PreferenceProfile:
    """Profile after renaming agents: new agent i is old agent sigma[i]."""
    n = p.n
    return PreferenceProfile(
        tuple(tuple(p.values[sigma[i]][sigma[j]] for j in range(n)) for i in range(n))
    )


def components(p: PreferenceProfile) -> tuple[tuple[int, ...], ...]:
    """Maximal agent sets with zero preferences in both directions across the boundary."""
    n = p.n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if p.values[i][j] != 0 or p.values[j][i] != 0:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    return tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))
