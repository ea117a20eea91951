"""Random binary preferences: sampling, blocking-pair probability, expected stability.

Each ordered pair (i, j) becomes an approval edge independently with a
rational probability p.  Randomness comes from a counter-based generator
keyed on (master seed, trial index), so trial results are independent of
execution order and worker count.  Probability formulas are evaluated in
exact rational arithmetic; floats appear only at reporting boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .profile import CYCLE, PreferenceProfile, Topology

#: Edge-probability threshold constant for the expected-count lower bound.
LLL_CONSTANT = 1.0 / math.sqrt(96.0 * math.e)


@dataclass(frozen=True)
class GnpSpec:
    """Random approval digraph: every ordered pair is an edge with probability p."""

    n: int
    p: Fraction
    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.p <= 1:
            raise ValueError("edge probability must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("need at least one agent")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), trial]))


def sample_profile(spec: GnpSpec, trial: int = 0) -> PreferenceProfile:
    """One binary profile draw; reproducible given (seed, trial)."""
    n = spec.n
    p = Fraction(spec.p)
    rng = _trial_rng(spec.seed, trial)
    num, den = p.numerator, p.denominator
    draws = rng.integers(0, den, size=n * (n - 1)) if den > 1 else np.zeros(n * (n - 1), dtype=np.int64)
    rows = [[0] * n for _ in range(n)]
    idx = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            rows[i][j] = 1 if draws[idx] < num else 0
            idx += 1
    return PreferenceProfile.from_rows(rows)


def blocking_probability(p: Fraction, near: bool) -> Fraction:
    """Exact probability that a fixed pair blocks the identity cycle seating.

    ``near`` selects cyclic seat distance <= 2; beyond that the two agents'
    relevant edges are disjoint and the single-envy probability squares.
    """
    p = Fraction(p)
    q = 1 - p
    if near:
        return p * p * q * q
    envy = 2 * p**3 * q + 2 * p * q**3 + p * p * q * q
    return envy * envy


def lll_bound(n: int, p) -> float | None:
    """Lower bound on the expected number of stable cycle arrangements.

    Valid for p <= C/sqrt(n) or p >= 1 - C/sqrt(n) with C = (96e)^(-1/2);
    returns None outside that range.
    """
    if n < 3:
        raise ValueError("cycle arrangements need n >= 3")
    threshold = LLL_CONSTANT / math.sqrt(n)
    pf = float(p)
    if not (pf <= threshold or pf >= 1 - threshold):
        return None
    return math.factorial(n - 1) / 2 * math.exp(-n * (n - 1) / (2 * n - 3))


def estimate_expected_stable(
    n: int, p: Fraction, trials: int, seed: int, jobs: int = 1
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the stable cycle-arrangement count.

    Counts are exact per sample (full enumeration), so n is capped at 9.
    """
    if n > 9:
        raise ValueError("exact counting per sample is limited to n <= 9")
    if trials < 1:
        raise ValueError("need at least one trial")
    counts = stable_count_samples(n, p, trials, seed, jobs=jobs)
    total = sum(counts)
    mean = Fraction(total, trials)
    if trials == 1:
        return float(mean), 0.0
    var = Fraction(sum((c - mean) ** 2 for c in counts), trials - 1)
    stderr = math.sqrt(float(var) / trials)
    return float(mean), stderr


def _one_stable_count(args) -> int:
    n, p, seed, trial = args
    spec = GnpSpec(n, p, seed)
    profile = sample_profile(spec, trial)
    return exact.count_stable(profile, Topology.cycle(n))


def stable_count_samples(n: int, p: Fraction, trials: int, seed: int, jobs: int = 1) -> list[int]:
    """Per-trial stable-arrangement counts; identical for any worker count."""
    p = Fraction(p)
    tasks = [(n, p, seed, t) for t in range(trials)]
    if jobs > 1:
        from multiprocessing import Pool

        with Pool(jobs) as pool:
            return pool.map(_one_stable_count, tasks)
    return [_one_stable_count(task) for task in tasks]
