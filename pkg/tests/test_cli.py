import json

import pytest

from seating import cli, constructions
from seating.profile import parse_profile


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_solve_unstable_instance_exits_two(tmp_path, capsys):
    prof = write(tmp_path, "abf6.json", constructions.abf_cycle(6).to_json())
    code, out, _ = run_cli(
        capsys, "solve", "--topology", "cycle", "--criterion", "stable",
        "--algo", "auto", "--profile", prof,
    )
    assert code == 2
    assert json.loads(out) == {"exists": False, "algo": "polyclass"}


def test_solve_exact_reports_enumeration(tmp_path, capsys):
    prof = write(tmp_path, "abf5.json", constructions.abf_cycle(5).to_json())
    code, out, err = run_cli(
        capsys, "solve", "--topology", "cycle", "--algo", "exact", "--profile", prof,
    )
    assert code == 2
    assert "enumerated: 12" in err


def test_solve_with_verify_agrees(tmp_path, capsys):
    prof = write(tmp_path, "p4.json", constructions.p4_loop().to_json())
    code, out, _ = run_cli(
        capsys, "solve", "--topology", "path", "--algo", "polyclass",
        "--profile", prof, "--verify",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["exists"] is True and len(doc["arrangement"]) == 4


def test_solve_classes_input(tmp_path, capsys):
    classes = write(tmp_path, "c.json", '{"k": 2, "sizes": [3, 3], "matrix": [[0, 1], [1, 0]]}')
    code, out, _ = run_cli(
        capsys, "solve", "--topology", "cycle", "--algo", "constructive", "--classes", classes,
    )
    assert code == 0
    assert json.loads(out)["exists"] is True


def test_check_p4_star(tmp_path, capsys):
    prof = write(tmp_path, "p4.json", constructions.p4_loop().to_json())
    code, out, _ = run_cli(
        capsys, "check", "--arrangement", "0,1,2,3", "--profile", prof, "--topology", "path",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["stable"] is True and doc["envy_free"] is False and doc["welfare"] == 3


def test_dynamics_loop_report(tmp_path, capsys):
    prof = write(tmp_path, "p4.json", constructions.p4_loop().to_json())
    code, out, _ = run_cli(
        capsys, "dynamics", "--profile", prof, "--topology", "path",
        "--start", "0,3,1,2", "--trace",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"] == "loop_detected" and doc["period"] == 2
    assert doc["trace"][0]["pair"] == [0, 2]


def test_dynamics_random_needs_seed(tmp_path, capsys):
    prof = write(tmp_path, "p4.json", constructions.p4_loop().to_json())
    code, _, err = run_cli(
        capsys, "dynamics", "--profile", prof, "--topology", "path", "--policy", "random",
    )
    assert code == 1 and "seed" in err


def test_construct_round_trip(capsys):
    code, out, _ = run_cli(capsys, "construct", "four-class-cycle", "--n", "8")
    assert code == 0
    p = parse_profile(out)
    assert p == constructions.four_class_cycle(8)


def test_construct_blockwise(capsys):
    code, out, _ = run_cli(capsys, "construct", "blockwise-euler", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["profile"]["n"] == 21
    assert len(doc["arrangement"]) == 21


def test_construct_invalid_n(capsys):
    code, _, err = run_cli(capsys, "construct", "abf-path", "--n", "5")
    assert code == 1 and "error" in err


def test_reduce_round_trip(tmp_path, capsys):
    graph = write(tmp_path, "g.txt", "0 1\n1 2\n2 0\n")
    code, out, _ = run_cli(capsys, "reduce", "hc", "--graph", graph)
    assert code == 0
    g = constructions.Digraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert parse_profile(out) == constructions.hamiltonian_cycle_profile(g)


def test_reduce_hp_sink(tmp_path, capsys):
    graph = write(tmp_path, "g.txt", "0 1\n1 2\n")
    code, out, _ = run_cli(capsys, "reduce", "hp", "--graph", graph)
    assert code == 0
    assert json.loads(out)["n"] == 9


def test_enumerate_report_and_fixtures(tmp_path, capsys):
    fix = tmp_path / "fixtures"
    code, out, err = run_cli(
        capsys, "enumerate", "--n", "4", "--values", "0,1", "--topology", "cycle",
        "--fixtures", str(fix),
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["scanned"] == 4096 and doc["families"] == 0


def test_enumerate_sampled_needs_seed(capsys):
    code, _, err = run_cli(
        capsys, "enumerate", "--n", "5", "--values", "0,1", "--topology", "cycle",
        "--mode", "sampled", "--trials", "5",
    )
    assert code == 1


def test_sample_csv(capsys):
    code, out, err = run_cli(capsys, "sample", "--n", "4", "--p", "0", "--trials", "3", "--seed", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "trial,stable_count"
    assert lines[1:] == ["0,3", "1,3", "2,3"]


def test_chain_length(capsys):
    code, out, _ = run_cli(capsys, "chain", "--k", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["length"] == 14
    assert doc["initial"] == "0" * 10 + "1"


def test_emitted_profiles_parse_back(capsys):
    for fam, n in (("abf-cycle", 6), ("pm1-path", 5), ("p4-loop", 4)):
        code, out, _ = run_cli(capsys, "construct", fam, "--n", str(n))
        assert code == 0
        p = parse_profile(out)
        assert p.n == n
