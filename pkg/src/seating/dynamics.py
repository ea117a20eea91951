"""Swap dynamics with pluggable policies, loop detection, and rewrite chains.

A swap is admissible when the two agents form a blocking pair and their
seat distance is within the policy bound.  Runs detect loops by hashing
arrangements canonicalized up to reflection (paths) or rotation plus
reflection (cycles): seat labels carry no preference information, and the
reference four-agent oscillation only closes up to reversal.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from . import judge
from .profile import CYCLE, PATH, Arrangement, PreferenceProfile, Topology, value_meta

LEXICOGRAPHIC = "lexicographic"
SEEDED_RANDOM = "random"
MAX_POTENTIAL_GAIN = "max_gain"

CONVERGED = "converged"
LOOP_DETECTED = "loop_detected"
STEP_CAP_REACHED = "step_cap_reached"

UNRESTRICTED: int | None = None


@dataclass(frozen=True)
class SwapPolicy:
    """Admissibility bound on seat distance plus a selection rule."""

    max_distance: int | None = UNRESTRICTED  # None means unrestricted
    selection: str = LEXICOGRAPHIC

    def admits(self, t: Topology, si: int, sj: int) -> bool:
        if self.max_distance is None:
            return True
        return t.seat_distance(si, sj) <= self.max_distance

    @property
    def deterministic(self) -> bool:
        return self.selection != SEEDED_RANDOM


@dataclass
class DynamicsReport:
    outcome: str
    start: Arrangement
    final: Arrangement
    trace: list[tuple[tuple[int, int], Arrangement]] = field(default_factory=list)
    potentials: list[judge.PotentialValue] | None = None
    period: int | None = None

    @property
    def steps(self) -> int:
        return len(self.trace)

    def to_json_dict(self, include_trace: bool = False) -> dict:
        doc: dict = {
            "outcome": self.outcome,
            "steps": self.steps,
            "start": list(self.start.seats),
            "final": list(self.final.seats),
        }
        if self.period is not None:
            doc["period"] = self.period
        if include_trace:
            doc["trace"] = [
                {"pair": list(pair), "seats": list(arr.seats)} for pair, arr in self.trace
            ]
        return doc


def admissible_pairs(
    p: PreferenceProfile, t: Topology, a: Arrangement, policy: SwapPolicy
) -> list[tuple[int, int]]:
    """Blocking pairs within the policy's distance bound, sorted by agent ids."""
    pos = a.positions()
    out = []
    for w in judge.blocking_pairs(p, t, a):
        i, j = w.agents
        if policy.admits(t, pos[i], pos[j]):
            out.append((i, j))
    return out


def _swap(a: Arrangement, i: int, j: int) -> Arrangement:
    pos = a.positions()
    seats = list(a.seats)
    seats[pos[i]], seats[pos[j]] = seats[pos[j]], seats[pos[i]]
    return Arrangement(tuple(seats))


def step(
    p: PreferenceProfile,
    t: Topology,
    a: Arrangement,
    policy: SwapPolicy,
    rng: random.Random | None = None,
) -> tuple[tuple[int, int], Arrangement] | None:
    """Swap one admissible blocking pair per the policy; None when none exists."""
    pairs = admissible_pairs(p, t, a, policy)
    if not pairs:
        return None
    if policy.selection == LEXICOGRAPHIC:
        pair = pairs[0]
    elif policy.selection == SEEDED_RANDOM:
        if rng is None:
            raise ValueError("the random selection rule needs an rng")
        pair = pairs[rng.randrange(len(pairs))]
    elif policy.selection == MAX_POTENTIAL_GAIN:
        scorable = t.kind == PATH and value_meta(p).is_binary

        def score(pr):
            swapped = _swap(a, *pr)
            if scorable:
                val = judge.potential(p, t, swapped)
                return (val.welfare, val.edge_seq)
            return (judge.welfare(p, t, swapped),)

        pair = max(pairs, key=lambda pr: (score(pr), (-pr[0], -pr[1])))
    else:
        raise ValueError(f"unknown selection rule {policy.selection!r}")
    return pair, _swap(a, *pair)


def canonical_state(t: Topology, a: Arrangement) -> tuple[int, ...]:
    """Minimal seats tuple over reflections (paths) or rotations+reflections (cycles)."""
    seats = a.seats
    if t.kind == PATH:
        return min(seats, seats[::-1])
    n = t.n
    best = seats
    for r in range(n):
        rot = seats[r:] + seats[:r]
        if rot < best:
            best = rot
        ref = rot[::-1]
        if ref < best:
            best = ref
    return best


def derived_seed(master_seed: int, run_index: int) -> int:
    """Counter-based per-run seed; independent of execution order."""
    digest = hashlib.sha256(f"{master_seed}:{run_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def run(
    p: PreferenceProfile,
    t: Topology,
    a0: Arrangement,
    policy: SwapPolicy = SwapPolicy(),
    max_steps: int | None = None,
    seed: int | None = None,
) -> DynamicsReport:
    """Iterate the swap dynamics until convergence, a loop, or the step cap.

    Loops are reported for deterministic selection rules only: under random
    selection a revisited state does not pin the future.
    """
    if max_steps is None:
        max_steps = 10**4 * t.n
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    rng = random.Random(seed) if policy.selection == SEEDED_RANDOM else None

    track_potential = t.kind == PATH and value_meta(p).is_binary
    trace: list[tuple[tuple[int, int], Arrangement]] = []
    potentials = [judge.potential(p, t, a0)] if track_potential else None

    seen: dict[tuple[int, ...], int] = {}
    current = a0
    for step_index in range(max_steps + 1):
        if policy.deterministic:
            canon = canonical_state(t, current)
            prev = seen.get(canon)
            if prev is not None:
                return DynamicsReport(
                    LOOP_DETECTED,
                    a0,
                    current,
                    trace,
                    potentials,
                    period=step_index - prev,
                )
            seen[canon] = step_index
        if step_index == max_steps:
            break
        outcome = step(p, t, current, policy, rng)
        if outcome is None:
            return DynamicsReport(CONVERGED, a0, current, trace, potentials)
        pair, current = outcome
        trace.append((pair, current))
        if track_potential:
            potentials.append(judge.potential(p, t, current))
    return DynamicsReport(STEP_CAP_REACHED, a0, current, trace, potentials)


def audit_potential(p: PreferenceProfile, report: DynamicsReport) -> bool:
    """True iff the lexicographic potential strictly increased at every step."""
    if report.potentials is None:
        raise ValueError("potential audit needs a binary profile on a path")
    vals = report.potentials
    return all(vals[s + 1] > vals[s] for s in range(len(vals) - 1))


# ---------------------------------------------------------------------------
# Rewriting operators over binary strings: welfare-preserving swaps move the
# edge sequence like f3: 0x1 -> 1~x0 (distance one) and f4: 0xy1 -> 1~y~x0
# (distance two).  Chaining them yields exponentially long strictly
# increasing trajectories.
# ---------------------------------------------------------------------------

F3 = "f3"
F4 = "f4"


class PatternMismatchError(ValueError):
    """The window does not match the operator's left-hand pattern."""


@dataclass(frozen=True)
class RewriteStep:
    op: str
    pos: int
    before: str
    after: str


@dataclass(frozen=True)
class RewriteTrace:
    steps: tuple[RewriteStep, ...]

    @property
    def initial(self) -> str:
        return self.steps[0].before

    @property
    def final(self) -> str:
        return self.steps[-1].after

    def __len__(self) -> int:
        return len(self.steps)

    def validate(self) -> bool:
        """Re-apply every operator and confirm strict lexicographic growth."""
        for k, s in enumerate(self.steps):
            if apply_f(s.op, s.before, s.pos) != s.after:
                return False
            if not s.after > s.before:
                return False
            if k + 1 < len(self.steps) and self.steps[k + 1].before != s.after:
                return False
        return True


def _flip(ch: str) -> str:
    return "1" if ch == "0" else "0"


def apply_f(op: str, s: str, pos: int) -> str:
    """Apply f3 (0x1 -> 1~x0) or f4 (0xy1 -> 1~y~x0) at a 0-based position."""
    if any(ch not in "01" for ch in s):
        raise PatternMismatchError(f"not a binary string: {s!r}")
    width = 3 if op == F3 else 4 if op == F4 else None
    if width is None:
        raise ValueError(f"unknown operator {op!r}")
    if pos < 0 or pos + width > len(s):
        raise PatternMismatchError(f"window [{pos}, {pos + width}) out of range")
    window = s[pos : pos + width]
    if window[0] != "0" or window[-1] != "1":
        raise PatternMismatchError(f"window {window!r} does not match 0..1")
    if op == F3:
        repl = "1" + _flip(window[1]) + "0"
    else:
        repl = "1" + _flip(window[2]) + _flip(window[1]) + "0"
    return s[: pos] + repl + s[pos + width :]


def _chain_ops(k: int) -> list[tuple[str, int]]:
    """(operator, 0-based position) list turning 0^{3k-2}1 into 10^{3k-2}."""
    if k == 3:
        return [(F3, 5), (F4, 2), (F4, 1), (F4, 3), (F4, 2), (F3, 0)]
    inner = _chain_ops(k - 1)
    ops: list[tuple[str, int]] = [(F3, 3 * k - 4)]
    ops.extend((op, pos + 1) for op, pos in inner)
    ops.extend((op, pos + 2) for op, pos in inner)
    ops.append((F3, 0))
    return ops


def expand_chain(k: int) -> RewriteTrace:
    """The recursive rewrite chain over strings of length 3k-1.

    The trace maps 0...01 to 10...0 in exactly 2^k - 2 operator
    applications, each validated and strictly increasing.
    """
    if not 3 <= k <= 20:
        raise ValueError("chains are defined for 3 <= k <= 20")
    s = "0" * (3 * k - 2) + "1"
    steps = []
    for op, pos in _chain_ops(k):
        nxt = apply_f(op, s, pos)
        steps.append(RewriteStep(op, pos, s, nxt))
        s = nxt
    trace = RewriteTrace(tuple(steps))
    assert trace.final == "1" + "0" * (3 * k - 2)
    assert len(trace) == 2**k - 2
    return trace
