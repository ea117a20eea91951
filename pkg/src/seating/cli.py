"""Command-line entry point.

Results go to stdout as JSON (CSV for ``sample``), diagnostics to stderr.
Exit codes: 0 success, 2 certified nonexistence (``solve``), 1 invalid
input, exceeded budget, or internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import constructions, dynamics, exact, judge, polyclass, randomized, search
from .profile import (
    CYCLE,
    PATH,
    Arrangement,
    ClassStructure,
    PreferenceProfile,
    ProfileError,
    Topology,
    detect_classes,
    detect_partition,
    emit_profile,
    parse_classes,
    parse_profile,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_FOUND = 2


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc) + "\n")


def _diag(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _criterion(name: str) -> exact.Criterion:
    return exact.Criterion.STABLE if name == "stable" else exact.Criterion.ENVY_FREE


def _parse_arrangement(text: str) -> Arrangement:
    return Arrangement(tuple(int(x) for x in text.split(",")))


def _load_instance(args) -> tuple[PreferenceProfile | None, ClassStructure | None]:
    profile = parse_profile(_read(args.profile)) if getattr(args, "profile", None) else None
    classes = parse_classes(_read(args.classes)) if getattr(args, "classes", None) else None
    if profile is None and classes is None:
        raise ProfileError("provide --profile or --classes")
    return profile, classes


def _remap_class_arrangement(partition, expanded_arr: Arrangement) -> Arrangement:
    """Translate an arrangement over the grouped expansion back to original agent ids."""
    flat = [agent for group in partition for agent in group]
    return Arrangement(tuple(flat[a] for a in expanded_arr.seats))


def _solve_once(profile, classes, t: Topology, criterion, algo: str):
    """Returns (arrangement | None, method, diagnostics dict)."""
    if algo == "auto":
        if classes is not None:
            algo = "polyclass"
        else:
            algo = "polyclass" if detect_classes(profile).k <= 5 else "exact"

    if algo == "exact":
        if classes is not None:
            arr = exact.find_class_arrangement(classes, t, criterion)
            return arr, "exact-class", {}
        result = exact.solve(profile, t, criterion)
        return result.arrangement, "exact", {"enumerated": result.enumerated}

    if algo == "polyclass":
        stats = polyclass.DecideStats()
        if classes is not None:
            arr = polyclass.decide(classes, t, criterion, stats=stats)
        else:
            part = detect_partition(profile)
            cs = detect_classes(profile)
            arr = polyclass.decide(cs, t, criterion, stats=stats)
            if arr is not None:
                arr = _remap_class_arrangement(part, arr)
                ok = (
                    judge.is_stable(profile, t, arr)[0]
                    if criterion is exact.Criterion.STABLE
                    else judge.is_envy_free(profile, t, arr)[0]
                )
                if not ok:
                    raise AssertionError("remapped arrangement failed verification")
        return arr, "polyclass", {"visited": stats.visited, "frontier_peak": stats.frontier_peak}

    if algo == "constructive":
        if criterion is not exact.Criterion.STABLE:
            raise ProfileError("constructive solving handles the stable criterion only")
        cs = classes if classes is not None else detect_classes(profile)
        if cs.k <= 2:
            arr = constructions.two_class_stable(cs, t)
        elif cs.k == 3 and t.kind == CYCLE:
            arr = constructions.three_class_two_valued_cycle_stable(cs)
        else:
            raise ProfileError("no constructive case covers this instance")
        if classes is None:
            arr = _remap_class_arrangement(detect_partition(profile), arr)
        return arr, "constructive", {}

    raise ProfileError(f"unknown algorithm {algo!r}")


def _cmd_solve(args) -> int:
    profile, classes = _load_instance(args)
    n = profile.n if profile is not None else classes.n
    t = Topology(args.topology, n)
    criterion = _criterion(args.criterion)
    arr, method, diags = _solve_once(profile, classes, t, criterion, args.algo)
    if args.verify:
        for other in ("exact", "polyclass"):
            if other == method.split("-")[0]:
                continue
            arr2, _, _ = _solve_once(profile, classes, t, criterion, other)
            if (arr2 is None) != (arr is None):
                raise AssertionError(f"{method} and {other} disagree on existence")
    for key, val in diags.items():
        _diag(f"{key}: {val}")
    if arr is None:
        _emit({"exists": False, "algo": method})
        return EXIT_NOT_FOUND
    _emit({"exists": True, "arrangement": list(arr.seats), "algo": method})
    return EXIT_OK


def _cmd_check(args) -> int:
    profile, classes = _load_instance(args)
    if profile is None:
        from .profile import expand_classes

        profile = expand_classes(classes)
    t = Topology(args.topology, profile.n)
    arr = _parse_arrangement(args.arrangement)
    stable, witness = judge.is_stable(profile, t, arr)
    ef, envy_witness = judge.is_envy_free(profile, t, arr)
    doc = {
        "stable": stable,
        "envy_free": ef,
        "welfare": judge.welfare(profile, t, arr),
        "witness": (witness or envy_witness).to_json_dict() if (witness or envy_witness) else None,
    }
    _emit(doc)
    return EXIT_OK


def _cmd_dynamics(args) -> int:
    profile, classes = _load_instance(args)
    if profile is None:
        from .profile import expand_classes

        profile = expand_classes(classes)
    t = Topology(args.topology, profile.n)
    start = (
        _parse_arrangement(args.start)
        if args.start
        else Arrangement(tuple(range(profile.n)))
    )
    distance = None if args.distance in (None, "inf") else int(args.distance)
    policy = dynamics.SwapPolicy(max_distance=distance, selection=args.policy)
    if policy.selection == dynamics.SEEDED_RANDOM and args.seed is None:
        raise ProfileError("randomized selection requires an explicit --seed")
    report = dynamics.run(
        profile, t, start, policy, max_steps=args.max_steps, seed=args.seed
    )
    _emit(report.to_json_dict(include_trace=args.trace))
    return EXIT_OK


def _cmd_construct(args) -> int:
    fam = args.family
    n = args.n
    if fam == "p4-loop":
        _emit(json.loads(constructions.p4_loop().to_json()))
    elif fam == "abf-cycle":
        _emit(json.loads(constructions.abf_cycle(n).to_json()))
    elif fam == "abf-path":
        _emit(json.loads(constructions.abf_path(n).to_json()))
    elif fam == "four-class-cycle":
        _emit(json.loads(constructions.four_class_cycle(n).to_json()))
    elif fam == "pm1-path":
        _emit(json.loads(constructions.pm1_path(n).to_json()))
    elif fam == "nonmonotone-pair":
        unstable, minus_a, plus_b3 = constructions.nonmonotone_pair(n)
        _emit(
            {
                "unstable": json.loads(unstable.to_json()),
                "stable_minus_a": json.loads(minus_a.to_json()),
                "stable_plus_b3": json.loads(plus_b3.to_json()),
            }
        )
    elif fam == "blockwise-euler":
        base = (
            parse_profile(_read(args.base)) if args.base else constructions.pm1_path(n)
        )
        prof, arr = constructions.blockwise_euler(base)
        _emit({"profile": json.loads(prof.to_json()), "arrangement": list(arr.seats)})
    else:
        raise ProfileError(f"unknown family {fam!r}")
    return EXIT_OK


def _parse_digraph(text: str) -> constructions.Digraph:
    edges = []
    top = -1
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v = (int(x) for x in line.split())
        edges.append((u, v))
        top = max(top, u, v)
    return constructions.Digraph.from_edges(top + 1, edges)


def _cmd_reduce(args) -> int:
    g = _parse_digraph(_read(args.graph))
    if args.problem == "hc":
        profile = constructions.hamiltonian_cycle_profile(g)
    else:
        profile = constructions.hamiltonian_path_profile(g)
    sys.stdout.write(emit_profile(profile))
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    values = tuple(int(x) for x in args.values.split(","))
    t = Topology(args.topology, args.n)
    shard = None
    if args.shard:
        a, b = args.shard.split("/")
        shard = (int(a), int(b))
        mode = search.SHARDED
    else:
        mode = args.mode
    if mode == search.SAMPLED and args.seed is None:
        raise ProfileError("sampled mode requires an explicit --seed")
    report = search.exhaust(
        args.n,
        values,
        t,
        mode=mode,
        shard=shard,
        trials=args.trials,
        seed=args.seed,
        jobs=args.jobs,
    )
    if args.fixtures:
        for path in search.write_fixtures(report, args.fixtures):
            _diag(f"fixture: {path}")
    _emit(report.to_json_dict())
    return EXIT_OK


def _cmd_sample(args) -> int:
    p = Fraction(args.p)
    counts = randomized.stable_count_samples(args.n, p, args.trials, args.seed, jobs=args.jobs)
    sys.stdout.write("trial,stable_count\n")
    for t, c in enumerate(counts):
        sys.stdout.write(f"{t},{c}\n")
    bound = randomized.lll_bound(args.n, p)
    mean = sum(counts) / len(counts)
    _diag(f"mean: {mean}")
    if bound is not None:
        _diag(f"expected_lower_bound: {bound}")
    return EXIT_OK


def _cmd_chain(args) -> int:
    trace = dynamics.expand_chain(args.k)
    doc = {
        "k": args.k,
        "length": len(trace),
        "initial": trace.initial,
        "final": trace.final,
        "steps": [
            {"op": s.op, "pos": s.pos, "before": s.before, "after": s.after}
            for s in trace.steps
        ],
    }
    _emit(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seating",
        description="Exchange-stable and envy-free seating on path and cycle tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance_flags(sp):
        sp.add_argument("--profile", help="profile file (JSON or CSV)")
        sp.add_argument("--classes", help="class-structure file (JSON)")
        sp.add_argument("--topology", choices=[PATH, CYCLE], required=True)

    sp = sub.add_parser("solve", help="find an arrangement or certify nonexistence")
    add_instance_flags(sp)
    sp.add_argument("--criterion", choices=["stable", "ef"], default="stable")
    sp.add_argument("--algo", choices=["exact", "polyclass", "constructive", "auto"], default="auto")
    sp.add_argument("--verify", action="store_true", help="run a second algorithm and compare")
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("check", help="judge a concrete arrangement")
    add_instance_flags(sp)
    sp.add_argument("--arrangement", required=True, help="comma-separated agent ids by seat")
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("dynamics", help="run the swap dynamics")
    add_instance_flags(sp)
    sp.add_argument("--start", help="starting arrangement (defaults to identity)")
    sp.add_argument("--policy", choices=[dynamics.LEXICOGRAPHIC, dynamics.SEEDED_RANDOM, dynamics.MAX_POTENTIAL_GAIN], default=dynamics.LEXICOGRAPHIC)
    sp.add_argument("--distance", help="max swap seat distance (2, 3, ... or 'inf')")
    sp.add_argument("--max-steps", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--trace", action="store_true", help="include the full trace")
    sp.set_defaults(func=_cmd_dynamics)

    sp = sub.add_parser("construct", help="emit a named instance family")
    sp.add_argument(
        "family",
        choices=[
            "p4-loop",
            "abf-cycle",
            "abf-path",
            "four-class-cycle",
            "pm1-path",
            "nonmonotone-pair",
            "blockwise-euler",
        ],
    )
    sp.add_argument("--n", type=int, default=7)
    sp.add_argument("--base", help="base profile file for blockwise-euler")
    sp.set_defaults(func=_cmd_construct)

    sp = sub.add_parser("reduce", help="build a reduction gadget from a digraph")
    sp.add_argument("problem", choices=["hc", "hp"])
    sp.add_argument("--graph", required=True, help="edge list file, one 'u v' per line, 0-based")
    sp.set_defaults(func=_cmd_reduce)

    sp = sub.add_parser("enumerate", help="scan a profile space for unstable families")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--values", required=True, help="comma-separated value set, e.g. '0,1'")
    sp.add_argument("--topology", choices=[PATH, CYCLE], required=True)
    sp.add_argument("--mode", choices=[search.FULL, search.SAMPLED], default=search.FULL)
    sp.add_argument("--shard", help="a/b: scan shard a of b")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--fixtures", help="directory for recovered family fixtures")
    sp.set_defaults(func=_cmd_enumerate)

    sp = sub.add_parser("sample", help="Monte Carlo stable-count estimation")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", required=True, help="edge probability as a rational, e.g. '3/10'")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("chain", help="expand a rewrite chain")
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=_cmd_chain)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProfileError, ValueError, OSError) as exc:
        _diag(f"error: {exc}")
        return EXIT_ERROR
    except (exact.EnumerationLimitError, search.BudgetExceededError) as exc:
        _diag(f"budget: {exc}")
        return EXIT_ERROR
    except AssertionError as exc:
        _diag(f"internal check failed: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
