import pytest

from vsmetric.catalog import (
    CATALOG_NAMES,
    catalog_path,
    load_catalog_problem,
    resolve_problem,
)
from vsmetric.errors import ProblemError
from vsmetric.problemfile import load_problem

GOOD = """
[carrier]
dim = 1
lower = [0.0]
upper = [1.0]

[maps]
f = "x0/4"
K = "x0/2"
K_inverse = "2*x0"

[metric]
kind = "abs_sum"

[theorem]
mode = "cor23"
q_claimed = 0.5

[options]
tol = 1e-6
max_iters = 50
samples = 123
seed = 9
"""


def write(tmp_path, text, name="problem.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_good_file(tmp_path):
    problem, options = load_problem(write(tmp_path, GOOD))
    assert problem.dim == 1
    assert problem.theorem_mode == "cor23"
    assert problem.q_claimed == 0.5
    assert problem.metric.kind == "abs_sum"
    assert options.tol == 1e-6
    assert options.max_iters == 50
    assert options.samples == 123
    assert options.seed == 9


def test_scalar_sugar_for_bounds_and_maps(tmp_path):
    text = GOOD.replace("lower = [0.0]", "lower = 0.0").replace(
        "upper = [1.0]", "upper = 1.0"
    )
    problem, _ = load_problem(write(tmp_path, text))
    assert problem.carrier.lower == (0.0,)


def test_unknown_key_is_fatal(tmp_path):
    text = GOOD.replace("mode = \"cor23\"", "mode = \"cor23\"\nq_clamied = 0.5")
    with pytest.raises(ProblemError, match="unknown key"):
        load_problem(write(tmp_path, text))


def test_unknown_section_is_fatal(tmp_path):
    with pytest.raises(ProblemError, match="unknown section"):
        load_problem(write(tmp_path, GOOD + "\n[extras]\nfoo = 1\n"))


def test_missing_section_is_fatal(tmp_path):
    text = GOOD.replace("[metric]\nkind = \"abs_sum\"\n", "")
    with pytest.raises(ProblemError, match="missing section"):
        load_problem(write(tmp_path, text))


def test_metric_keys_are_kind_specific(tmp_path):
    text = GOOD.replace('kind = "abs_sum"', 'kind = "abs_sum"\nrho = 1.0')
    with pytest.raises(ProblemError, match="weighted_pair"):
        load_problem(write(tmp_path, text))


def test_bad_expression_reports_problem(tmp_path):
    text = GOOD.replace('f = "x0/4"', 'f = "x0//4"')
    with pytest.raises(Exception):
        load_problem(write(tmp_path, text))


def test_bad_toml_reports_parse_error(tmp_path):
    with pytest.raises(ProblemError, match="TOML parse error"):
        load_problem(write(tmp_path, "[carrier\ndim = 1"))


def test_custom_metric_round_trip(tmp_path):
    text = GOOD.replace(
        'kind = "abs_sum"',
        'kind = "custom"\nexpressions = ["abs(x0-x2)+abs(x1-x2)"]\ncodomain_dim = 1',
    )
    problem, _ = load_problem(write(tmp_path, text))
    assert problem.metric.kind == "custom"
    assert problem.metric.codomain_dim == 1


def test_catalog_entries_all_load():
    assert set(CATALOG_NAMES) == {"example_1_9", "example_2_5", "example_2_6"}
    for name in CATALOG_NAMES:
        problem, options = load_catalog_problem(name)
        assert problem.dim == 1
        assert options.samples >= 1000
        assert catalog_path(name).exists()


def test_resolve_problem_accepts_names_paths_and_catalog_refs(tmp_path):
    p1, _ = resolve_problem("example_2_6")
    p2, _ = resolve_problem("catalog/example_2_6.toml")
    assert p1 == p2
    path = write(tmp_path, GOOD)
    p3, _ = resolve_problem(str(path))
    assert p3.metric.kind == "abs_sum"
    with pytest.raises(ProblemError, match="not found"):
        resolve_problem("no_such_problem.toml")
