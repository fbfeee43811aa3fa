import json
from fractions import Fraction

import pytest

import verify
from config import Settings
from models import SuiteConfig
from suites import SuiteRunner


def _check(tmp_path, suite, *extra):
    output = tmp_path / f"{suite}.json"
    code = verify.main(["check", "--suite", suite, "--deterministic", "--output", str(output), *extra])
    return code, output


def test_theta_suite_passes(repo_root, tmp_path):
    code, output = _check(tmp_path, "theta", "--np", "4", "--window", "6")
    assert code == 0
    document = json.loads(output.read_text())
    assert document["config"]["suite"] == "theta"
    assert {r["relation"] for r in document["reports"]} == {"quasi-periodicity", "inversion", "p-zero", "residue"}
    assert all(r["status"] == "PASS" for r in document["reports"])


def test_deterministic_reports_are_byte_identical(repo_root, tmp_path):
    _, first = _check(tmp_path / "a", "theta", "--np", "3", "--window", "5")
    _, second = _check(tmp_path / "b", "theta", "--np", "3", "--window", "5")
    assert first.read_bytes() == second.read_bytes()
    document = json.loads(first.read_text())
    assert document["wall_millis"] == 0
    assert all(r["millis"] == 0 for r in document["reports"])


def test_quiet_writes_the_report_to_stdout(repo_root, tmp_path, capsys):
    code = verify.main(["--quiet", "check", "--suite", "kernels", "--window", "4",
                        "--deterministic", "--output", str(tmp_path / "k.json")])
    assert code == 0
    document = json.loads(capsys.readouterr().out)
    assert document["tool_version"]
    assert all(r["status"] == "PASS" for r in document["reports"])


@pytest.mark.parametrize("suite", ["kernels", "degeneration-tower"])
def test_structural_suites_pass(repo_root, tmp_path, suite):
    code, _ = _check(tmp_path, suite, "--window", "4")
    assert code == 0


def test_algebra_suite_passes(repo_root, tmp_path):
    code, output = _check(tmp_path, "algebra-rational", "--window", "4")
    assert code == 0
    relations = [r["relation"] for r in json.loads(output.read_text())["reports"]]
    assert "rel5" in relations and "divisibility" in relations


def test_unknown_suite_is_a_usage_error(repo_root):
    with pytest.raises(SystemExit) as exc:
        verify.main(["check", "--suite", "quantum"])
    assert exc.value.code == 2


def test_bad_rank_is_a_config_error(repo_root, tmp_path):
    code, _ = _check(tmp_path, "elliptic-rep", "--rank", "7")
    assert code == 2


def test_expand_syntax_error(repo_root, capsys):
    assert verify.main(["expand", "theta(z"]) == 2
    assert "col" in capsys.readouterr().err


def test_expand_theta_ratio_prints_descriptor(repo_root, capsys):
    assert verify.main(["expand", "theta(z*q1)/theta(z)"]) == 0
    out = capsys.readouterr().out
    assert "descriptor:" in out
    assert "automorphy in z" in out


def test_expand_series_prints_a_table(repo_root, capsys):
    assert verify.main(["expand", "1/(z - w)", "--series", "--window", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "z_exp,w_exp,p_ord,coefficient"
    assert "-1,0,0,1" in lines


def test_table_gamma_rational_csv(repo_root, tmp_path):
    from engine.ring import LaurentPoly

    output = tmp_path / "gamma.csv"
    assert verify.main(["table", "gamma-rational", "--max-order", "4", "--output", str(output)]) == 0
    text = output.read_text()
    t1, t2 = LaurentPoly.symbol("t1"), LaurentPoly.symbol("t2")
    assert str(-2 * t1 - 2 * t2) in text


def test_table_theta_coeffs_json(repo_root, tmp_path):
    output = tmp_path / "theta.json"
    code = verify.main(["table", "theta-coeffs", "--max-order", "1", "--argument", "z*q1",
                        "--format", "json", "--output", str(output)])
    assert code == 0
    rows = json.loads(output.read_text())
    assert [row["p_ord"] for row in rows] == ["0", "1"]


def test_table_rows_rejects_non_monomial_arguments(repo_root):
    from engine.errors import ExpressionTypeError

    with pytest.raises(ExpressionTypeError):
        verify.table_rows("theta-coeffs", 1, Settings(), "z + 1")


def test_table_rows_relation_corpus(repo_root):
    rows = verify.table_rows("relation-corpus", 0, Settings())
    assert len(rows) == 10
    assert {row["level"] for row in rows} == {"rational", "trig"}


def test_corpus_command(repo_root, capsys):
    assert verify.main(["corpus"]) == 0
    assert "[rational/rel5]" in capsys.readouterr().out


def test_missing_relations_dir_is_a_config_error(repo_root, tmp_path, monkeypatch):
    monkeypatch.setenv("RELATIONS_DIR", str(tmp_path / "nowhere"))
    assert verify.main(["corpus"]) == 2


def test_check_counts():
    runner = SuiteRunner(Settings())
    assert len(runner.checks(SuiteConfig(suite="elliptic-rep", seeds=[1, 2, 3]))) == 18
    assert len(runner.checks(SuiteConfig(suite="pushforward", seeds=[5]))) == 20
    assert len(runner.checks(SuiteConfig(suite="algebra-trig"))) == 8


def test_explicit_params_override_sampling(repo_root):
    runner = SuiteRunner(Settings())
    config = SuiteConfig(suite="lemma-integral", params={"p": "1/9", "q1": "11/10", "q2": "107/100", "u1": "4/5"})
    checks = runner.checks(config)
    assert len(checks) == 1
    assert checks[0].params.us == (Fraction(4, 5),)


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["elliptic-rep", "ktheory-degeneration"])
def test_representation_suites_pass(repo_root, tmp_path, suite):
    code, output = _check(tmp_path, suite, "--rank", "1", "--np", "1", "--window", "3")
    assert code == 0
    reports = json.loads(output.read_text())["reports"]
    assert {r["relation"] for r in reports} >= {"rel1", "rel2", "rel5"}
    assert all(r["status"] == "PASS" for r in reports)
