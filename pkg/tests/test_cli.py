"""Command-line surface: schemas, determinism, and exit codes."""

import json

import pytest

from discrep.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_vdc_and_norms_roundtrip(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, stdout, _ = run(capsys, "gen", "--kind", "vdc", "--m", "3", "--out", str(out))
    assert code == 0
    assert "wrote 8 points" in stdout
    # 8 data lines after the label comment and header
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 11

    code, stdout, _ = run(capsys, "norms", "--in", str(out), "--json")
    assert code == 0
    payload = json.loads(stdout)
    for key in ("n_points", "l1", "l1_err", "l2_sq", "linf", "d_n"):
        assert key in payload
    assert payload["n_points"] == 8
    assert "/" in payload["l2_sq"]


def test_gen_random_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "gen", "--kind", "random", "--n", "16", "--seed", "7", "--out", str(a))[0] == 0
    assert run(capsys, "gen", "--kind", "random", "--n", "16", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_text() == b.read_text()


def test_gen_resource_limit(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--kind", "vdc", "--m", "99", "--out", str(tmp_path / "x.csv"))
    assert code == 3
    assert "resource limit" in err


def test_gen_unknown_kind_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "sobol", "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


def test_norms_exact_single_norm(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "2", "--out", str(out))
    code, stdout, _ = run(capsys, "norms", "--in", str(out), "--which", "l1", "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert set(payload) == {"config", "n_points", "l1", "l1_err"}
    assert float(payload["l1"]) == 13 / 16
    code, stdout, _ = run(capsys, "norms", "--in", str(out), "--which", "l2", "--json")
    assert json.loads(stdout)["l2_sq"] == "887/1152"


def test_norms_mc_deterministic(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "2", "--out", str(out))
    args = ("norms", "--in", str(out), "--which", "l1", "--method", "mc",
            "--samples", "20000", "--seed", "5", "--json")
    code, first, _ = run(capsys, *args)
    assert code == 0
    code, second, _ = run(capsys, *args)
    assert first == second
    payload = json.loads(first)
    assert payload["config"]["seed"] == 5
    assert payload["config"]["samples"] == 20000
    assert float(payload["stderr"]) > 0


def test_aux_summaries(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "2", "--out", str(out))
    code, stdout, _ = run(capsys, "aux", "--in", str(out), "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert len(payload["trees"]) == 4  # n = 3
    tree = payload["trees"][0]
    assert set(tree) == {"i", "n", "levels", "stabilized", "l_star", "sum_area_sq", "inner_product"}


def test_lemmas_pass_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "2", "--out", str(out))
    code, stdout, _ = run(capsys, "lemmas", "--in", str(out), "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["passed"] is True
    assert all(c["passed"] for c in payload["checks"])


def test_lemmas_text_mode(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "1", "--out", str(out))
    code, stdout, _ = run(capsys, "lemmas", "--in", str(out))
    assert code == 0
    assert "overall: PASS" in stdout


def test_lemmas_failing_check_exits_nonzero(tmp_path, capsys, monkeypatch):
    # corrupted-construction hook: a failing suite must map to exit code 1
    from discrep.auxiliary import CheckResult, SuiteReport

    def fake_suite(ps, **kwargs):
        return SuiteReport(ps.label, 1, (CheckResult("level_counts", False, "i=0: forged"),))

    monkeypatch.setattr("discrep.cli.auxiliary.lemma_suite", fake_suite)
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "1", "--out", str(out))
    code, stdout, _ = run(capsys, "lemmas", "--in", str(out), "--json")
    assert code == 1
    payload = json.loads(stdout)
    assert payload["passed"] is False
    assert "forged" in payload["checks"][0]["witness"]


def test_comb_json(capsys):
    code, stdout, _ = run(capsys, "comb", "--n", "1", "--k", "3", "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["A"] == {"1": "4"}
    code, stdout, _ = run(capsys, "comb", "--n", "2", "--k", "3", "--json")
    assert json.loads(stdout)["A"]["1"] == "7"


def test_comb_resource_limit(capsys):
    code, _, err = run(capsys, "comb", "--n", "13", "--k", "3")
    assert code == 3


def test_lin_report(capsys):
    code, stdout, _ = run(capsys, "lin", "--n", "4", "--order", "21", "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert float(payload["two_route_gap"]) < 1e-10
    assert abs(float(payload["limit_sin"]) - 0.6065306597126334) < 1e-14


def test_lin_even_order_usage_error(capsys):
    code, _, err = run(capsys, "lin", "--n", "4", "--order", "2")
    assert code == 2


def test_certificate_json_and_edge_case(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "3", "--out", str(out))
    code, stdout, _ = run(capsys, "certificate", "--in", str(out), "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["N"] == 8 and payload["n"] == 4
    assert float(payload["l1_lower_bound"]) > 0
    assert "constants" in payload

    single = tmp_path / "one.csv"
    single.write_text("x,y\n0,0\n")
    code, stdout, _ = run(capsys, "certificate", "--in", str(single), "--json")
    assert code == 0
    assert json.loads(stdout)["d_n_bound"] is None


def test_certificate_missing_file(capsys):
    code, _, err = run(capsys, "certificate", "--in", "/nonexistent/file.csv")
    assert code == 2


def test_constants_output(capsys):
    code, stdout, _ = run(capsys, "constants", "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["constants"]["liminf_dn_lower"].startswith("0.00853731")
    assert payload["dn_lower_bound_limit"].startswith("0.01138308")

    code, text, _ = run(capsys, "constants")
    assert "limsup_dn_lower" in text


def test_byte_identical_reruns(tmp_path, capsys):
    out = tmp_path / "p.csv"
    run(capsys, "gen", "--kind", "vdc", "--m", "2", "--out", str(out))
    outputs = []
    for _ in range(2):
        code, stdout, _ = run(capsys, "lemmas", "--in", str(out), "--json", "--seed", "9")
        assert code == 0
        outputs.append(stdout)
    assert outputs[0] == outputs[1]


def test_bad_csv_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n2.0,0.5\n")
    code, _, err = run(capsys, "norms", "--in", str(bad))
    assert code == 2
    assert "line 2" in err
