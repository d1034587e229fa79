import json
import subprocess
import sys

import pytest

from bitorsion import cli, io


def run(*argv):
    return cli.run([str(a) for a in argv])


def without_clock(report):
    return {k: v for k, v in report.items() if k != "wall_clock"}


def test_golden_file(data_dir):
    code, report = run("torsion", "--input", data_dir / "golden.json")
    assert code == 0
    assert report["results"]["value"] == [6.0, 0.0]
    assert report["results"]["sign_exponent"] == 0
    assert len(report["inputs_digest"]) == 64


def test_identity_file(data_dir):
    code, report = run("torsion", "--input", data_dir / "identity.json")
    assert code == 0 and report["results"]["value"] == [1.0, 0.0]


def test_supplied_bases_are_used(data_dir):
    code, report = run("torsion", "--input", data_dir / "random_with_basis.json")
    assert code == 0 and report["results"]["basis"] == "supplied"


def test_malformed_json_exits_2_with_position(data_dir):
    code, report = run("torsion", "--input", data_dir / "malformed.json")
    assert code == cli.EXIT_INPUT
    assert "line 2, column 1" in report["error"]


def test_non_acyclic_without_bases_exits_2(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps({"dims": [1, 1], "d": [[[0]]], "dstar": [[[0]]]}))
    code, report = run("torsion", "--input", path)
    assert code == cli.EXIT_INPUT and "not doubly acyclic" in report["error"]


def test_invalid_bicomplex_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [1, 1, 1], "d": [[[1]], [[1]]], "dstar": [[[0]], [[0]]]}))
    assert run("torsion", "--input", path)[0] == cli.EXIT_INPUT
    code, report = run("validate", "--input", path)
    assert code == cli.EXIT_CHECK and not report["checks"]["square_zero"]


def test_spectral_above_spectrum(data_dir):
    code, report = run("spectral", "--input", data_dir / "random_acyclic.json", "--K", 1000)
    assert code == 0
    assert report["results"]["ray_singer"] == [1.0, 0.0]
    assert report["checks"]["total_matches_direct"]


def test_spectral_collision_exits_3(data_dir):
    code, report = run("spectral", "--input", data_dir / "golden.json", "--K", 6)
    assert code == cli.EXIT_COLLISION
    assert report["degree"] == 0 and report["eigenvalue"] == [6.0, 0.0]


def test_sweep_over_gaps(data_dir):
    code, report = run("sweep-k", "--input", data_dir / "random_acyclic.json")
    assert code == 0
    assert len(report["results"]["thresholds"]) >= 4
    assert report["residuals"]["max_pairwise_deviation"] < 1e-8


def test_sweep_with_ladder(data_dir):
    code, report = run("sweep-k", "--input", data_dir / "golden.json", "--K-ladder", "1,5,7")
    assert code == 0
    assert report["results"]["thresholds"] == [1.0, 5.0, 7.0]


def test_sweep_ladder_collision(data_dir):
    code, _ = run("sweep-k", "--input", data_dir / "golden.json", "--K-ladder", "1,6")
    assert code == cli.EXIT_COLLISION


def test_cw_circle():
    code, report = run("cw", "--builtin", "circle", "--holonomy", "2,0")
    assert code == 0 and report["results"]["modulus"] == pytest.approx(0.5)


def test_cw_circle_trivial_holonomy_lists_cohomology():
    code, report = run("cw", "--builtin", "circle", "--holonomy", "1,0")
    assert code == cli.EXIT_INPUT and "[1, 1]" in report["error"]


def test_cw_lens():
    code, report = run("cw", "--builtin", "lens", "--lens-p", 5, "--lens-q", 1)
    assert code == 0 and report["results"]["acyclic"]
    assert report["results"]["metadata"]["dual_exponent"] == 4


def test_cw_lens_bad_parameters():
    assert run("cw", "--builtin", "lens", "--lens-p", 4, "--lens-q", 2)[0] == cli.EXIT_INPUT


def test_cw_file(data_dir):
    code, report = run("cw", "--input", data_dir / "circle2.json")
    assert code == 0 and report["results"]["value"] == pytest.approx([2.0, 0.0])


def test_claims_report_failure_count():
    code, report = run("claims", "b", "--trials", 20, "--seed", 42)
    assert code == 0 and report["results"]["failure_count"] == 0
    assert len(report["results"]["records"]) == 20


def test_claims_zero_trials_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("claims", "c", "--trials", 0)
    assert exc.value.code == 2


def test_probe_dimension_one():
    code, report = run("probe", "--dim", 1, "--trials", 10)
    assert code == 0


def test_probe_zero_alpha_is_real():
    code, report = run("probe", "--zero-alpha", "--trials", 50)
    assert code == 0 and report["results"]["worst"] <= 1e-9


COMMANDS = [
    ("validate", "--input", "{data}/golden.json"),
    ("torsion", "--input", "{data}/random_with_basis.json"),
    ("spectral", "--input", "{data}/random_acyclic.json", "--K", "0.5"),
    ("sweep-k", "--input", "{data}/random_acyclic.json"),
    ("cw", "--builtin", "lens", "--lens-p", "7", "--lens-q", "3"),
    ("claims", "a", "--trials", "10", "--seed", "9"),
    ("claims", "b", "--trials", "10", "--seed", "9"),
    ("claims", "c", "--trials", "10", "--seed", "9"),
    ("probe", "--trials", "50", "--seed", "9"),
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_reports_are_reproducible(argv, data_dir):
    argv = [a.format(data=data_dir) for a in argv]
    first = io.dumps(without_clock(cli.run(argv)[1]))
    second = io.dumps(without_clock(cli.run(argv)[1]))
    assert first == second


def test_module_entry_point_writes_report(tmp_path, data_dir):
    out = tmp_path / "report.json"
    proc = subprocess.run([sys.executable, "-m", "bitorsion", "torsion", "--input",
                           str(data_dir / "golden.json"), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "value: (6+0j)" in proc.stdout
    report = json.loads(out.read_text())
    assert set(report) >= {"command", "inputs_digest", "results", "residuals", "checks",
                           "wall_clock"}
