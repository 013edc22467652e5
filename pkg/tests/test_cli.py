import json

from vsmetric.cli import main

CONSTANT_MAP = """
[carrier]
dim = 1
lower = [0.0]
upper = [1.0]

[maps]
f = "0.25"
K = "x0"
K_inverse = "x0"

[metric]
kind = "abs_sum"

[theorem]
mode = "thm22"

[options]
samples = 500
seed = 3
"""

NEGATIVE_CUSTOM = """
[carrier]
dim = 1
lower = [0.0]
upper = [1.0]

[maps]
f = "x0/4"
K = "x0/2"
K_inverse = "2*x0"

[metric]
kind = "custom"
expressions = ["x0 - x2"]

[theorem]
mode = "cor23"

[options]
samples = 400
seed = 8
"""

SQUARE_PAIR_NARROW = """
[carrier]
dim = 1
lower = [0.0]
upper = [1.0]

[maps]
f = "x0^2+5"
K = "2*x0^2"

[metric]
kind = "weighted_pair"
rho = 1.0
sigma = 1.0

[theorem]
mode = "cor23"

[options]
samples = 200
seed = 4
"""


def write(tmp_path, text, name):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run(args):
    return main(args)


def test_validate_space_catalog_passes(tmp_path):
    out = tmp_path / "report.json"
    code = run(
        [
            "validate-space",
            "--problem",
            "example_2_6",
            "--samples",
            "2000",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["schema_version"] == 1
    assert report["report"]["axioms"]["pass"] is True
    assert report["report"]["symmetry"]["max_deviation"] == 0.0


def test_validate_space_negative_custom_metric(tmp_path, capsys):
    path = write(tmp_path, NEGATIVE_CUSTOM, "neg.toml")
    out = tmp_path / "r.json"
    code = run(["validate-space", "--problem", path, "--out", str(out)])
    assert code == 1
    report = json.loads(out.read_text())
    axioms = {e["name"]: e for e in report["report"]["axioms"]["axioms"]}
    assert axioms["nonnegativity"]["pass"] is False
    assert axioms["nonnegativity"]["witness"] is not None


def test_validate_space_malformed_file(tmp_path, capsys):
    path = tmp_path / "broken.toml"
    path.write_text("[carrier]\ndim = ", encoding="utf-8")
    code = run(["validate-space", "--problem", str(path)])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_check_exit_codes(tmp_path):
    assert run(["check", "--problem", "example_2_6", "--samples", "500"]) == 1
    assert run(["check", "--problem", "example_2_5", "--samples", "500"]) == 1
    const = write(tmp_path, CONSTANT_MAP, "const.toml")
    assert run(["check", "--problem", const]) == 0


def test_check_report_content(tmp_path):
    out = tmp_path / "check.json"
    run(
        [
            "check",
            "--problem",
            "example_2_6",
            "--samples",
            "800",
            "--out",
            str(out),
        ]
    )
    report = json.loads(out.read_text())["report"]
    assert report["commutes"]["pass"] is True
    assert report["range"]["pass"] is True
    assert report["q"]["q_hat"] == 0.5
    assert report["applicable"] is False
    assert report["q_position"] == "between_threshold_and_one"


def test_solve_exit_codes(tmp_path):
    assert run(["solve", "--problem", "example_2_6", "--x0", "1"]) == 0
    assert run(["solve", "--problem", "example_2_6", "--x0", "0"]) == 0
    assert run(["solve", "--problem", "example_2_5", "--x0", "1"]) == 1


def test_solve_inversion_failure_exits_3(tmp_path, capsys):
    path = write(tmp_path, SQUARE_PAIR_NARROW, "narrow.toml")
    code = run(["solve", "--problem", path, "--x0", "0.5"])
    assert code == 3
    assert "inversion fault" in capsys.readouterr().err


def test_solve_with_certificate_and_trace(tmp_path):
    out = tmp_path / "solve.json"
    trace = tmp_path / "orbit.jsonl"
    code = run(
        [
            "solve",
            "--problem",
            "example_2_6",
            "--x0",
            "1",
            "--certify-alpha",
            "0.5",
            "--trace-out",
            str(trace),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    report = json.loads(out.read_text())["report"]
    assert report["converged"] is True
    assert report["observed_sigma"] == 0.5
    assert report["certificate"]["step_ok"] is True
    assert report["certificate"]["pair_bound_ok"] is True
    # certify the exported trace standalone (metric travels in the header)
    assert run(["certify", "--trace", str(trace), "--alpha", "0.5"]) == 0
    assert run(["certify", "--trace", str(trace), "--alpha", "0.4"]) == 1


def test_probe_exit_codes():
    assert (
        run(["probe", "--problem", "example_2_6", "--starts", "30", "--seed", "6"]) == 0
    )
    assert (
        run(["probe", "--problem", "example_2_5", "--starts", "10", "--seed", "6"]) == 1
    )


def test_catalog_regression_exit_codes():
    """Pin the exit-code contract across the shipped catalog."""
    assert run(["validate-space", "--problem", "example_1_9", "--samples", "2000"]) == 0
    assert run(["validate-space", "--problem", "example_2_5", "--samples", "2000"]) == 0
    assert run(["solve", "--problem", "example_1_9", "--x0", "0.5"]) == 0
    assert run(["check", "--problem", "example_1_9", "--samples", "500"]) == 1


def test_probe_report(tmp_path):
    out = tmp_path / "probe.json"
    run(
        [
            "probe",
            "--problem",
            "example_2_6",
            "--starts",
            "25",
            "--seed",
            "7",
            "--out",
            str(out),
        ]
    )
    report = json.loads(out.read_text())["report"]
    assert report["cluster_count"] == 1
    assert report["converged"] == 25
    assert report["clusters"][0]["diameter"] <= 1e-8


def test_custom_metric_guard_requires_force(tmp_path, capsys):
    path = write(tmp_path, NEGATIVE_CUSTOM, "neg.toml")
    code = run(["solve", "--problem", path, "--x0", "0.5"])
    assert code == 2
    assert "--force" in capsys.readouterr().err
    assert run(["solve", "--problem", path, "--x0", "0.5", "--force"]) == 0


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        run(
            [
                "check",
                "--problem",
                "example_2_6",
                "--samples",
                "600",
                "--seed",
                "42",
                "--out",
                str(out),
            ]
        )
    assert a.read_bytes() == b.read_bytes()


def test_json_flag_prints_envelope(capsys):
    code = run(
        ["solve", "--problem", "example_2_6", "--x0", "0.5", "--json"]
    )
    assert code == 0
    envelope = json.loads(capsys.readouterr().out)
    assert envelope["command"] == "solve"
    assert envelope["report"]["converged"] is True
