import json
import subprocess
import sys

import pytest

from tubeforms.cli import RunConfig, fmt, main, render
from tubeforms.errors import DomainError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval2f1_examples(capsys):
    code, out, _ = run(capsys, "eval2f1", "--k", "0", "--d", "1", "--u", "0", "--format", "json")
    assert code == 0 and json.loads(out)[0]["value"] == 1.0
    code, out, _ = run(capsys, "eval2f1", "--k", "0", "--d", "1", "--u", "0.5", "--format", "csv")
    header, row = out.strip().splitlines()
    assert header.split(",")[:4] == ["value", "log_value", "terms_used", "truncation_estimate"]
    assert float(row.split(",")[0]) == pytest.approx(1.6764, abs=1e-4)


def test_eval2f1_domain_and_usage_errors(capsys):
    code, _, err = run(capsys, "eval2f1", "--d", "1", "--u", "1.5")
    assert code == 2 and "u must lie" in err
    code, _, err = run(capsys, "eval2f1", "--u", "1.5")
    assert code == 2
    code, _, _ = run(capsys, "eval2f1", "--d", "abc", "--u", "0.1")
    assert code == 2
    code, _, _ = run(capsys, "nosuchcommand")
    assert code == 2


def test_eval2f1_convergence_failure_exit_1(capsys):
    code, _, err = run(capsys, "eval2f1", "--k", "2", "--d", "0.1", "--u", "0.999999999", "--method", "series")
    assert code == 1 and "error" in err


def test_eval2f1_endpoint_and_deriv(capsys):
    code, out, _ = run(capsys, "eval2f1", "--d", "1", "--u", "1", "--format", "json")
    assert code == 0 and json.loads(out)[0]["method"] == "endpoint"
    code, out, _ = run(capsys, "eval2f1", "--d", "1", "--u", "0.5", "--deriv", "--format", "json")
    assert code == 0 and json.loads(out)[0]["value"] > 1


def test_float_format_twelve_digits():
    assert fmt(1.0) == "1.00000000000e+00"
    assert fmt(float("inf")) == "inf" and fmt(True) == "true" and fmt(3) == "3"
    assert render([{"a": float("nan")}], "json") == '[\n  {"a": null}\n]\n'


def test_counterexample_formats_and_exit(capsys):
    code, out, _ = run(capsys, "counterexample", "--steps", "1", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 2
    assert lines[0] == "lambda,R,linf_sq,l2_sq,log_cosh_R,ratio,constraint"
    code, out2, _ = run(capsys, "counterexample", "--steps", "1", "--format", "json")
    rec = json.loads(out2)[0]
    assert list(rec) == lines[0].split(",")
    assert f"{rec['ratio']:.11e}" == lines[1].split(",")[5]


def test_output_is_byte_identical(capsys):
    _, a, _ = run(capsys, "counterexample", "--steps", "2", "--format", "csv")
    _, b, _ = run(capsys, "counterexample", "--steps", "2", "--format", "csv")
    assert a == b


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"format": "json", "steps": 2, "m": 1}))
    code, out, _ = run(capsys, "counterexample", "--config", str(cfg))
    assert len(json.loads(out)) == 2
    code, out, _ = run(capsys, "counterexample", "--config", str(cfg), "--steps", "1", "--format", "csv")
    assert len(out.strip().splitlines()) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "counterexample", "--config", str(bad))[0] == 2
    cfg.write_text(json.dumps({"tolerance": 1.0}))
    assert run(capsys, "counterexample", "--config", str(cfg), "--steps", "1")[0] == 2


def test_run_config_validation():
    with pytest.raises(DomainError):
        RunConfig(tolerance=0.5)
    with pytest.raises(DomainError):
        RunConfig(n_r=4)
    assert RunConfig().quadrature.n_z == 64


def test_bounds_commands(capsys):
    code, out, _ = run(capsys, "bounds", "thurston", "--lambda", "58e-6", "--kappa", "1", "--format", "json")
    rec = json.loads(out)[0]
    assert code == 0 and rec["value"] == pytest.approx(82.5, abs=0.1) and rec["valid_regime"] is True
    code, *_ = run(capsys, "bounds", "thurston", "--lambda", "58e-6", "--kappa", "1", "--rounded")
    assert code == 1
    code, out, _ = run(capsys, "bounds", "entropy", "--K", "1", "--ent", "0.2", "--vol", "2", "--thurston", "0.5", "--genus", "2")
    assert code == 1 and "inconsistent" in out
    code, out, _ = run(capsys, "bounds", "dehn", "--n", "1000", "--c", "1", "--format", "json")
    assert code == 0 and json.loads(out)[0]["lower_bound"] == pytest.approx(628.3, abs=0.05)
    code, out, _ = run(capsys, "bounds", "ratio", "--c", "1", "--R", "200", "--format", "json")
    assert code == 0 and json.loads(out)[0]["bound_over_sqrt_log_cosh"] == pytest.approx(8.2349, abs=1e-3)
    code, *_ = run(capsys, "bounds", "sandwich", "--vol", "10", "--inj", "0.1", "--thurston", "2")
    assert code == 0
    code, *_ = run(capsys, "bounds", "volume", "--genus", "2", "--K", "1", "--vol", "6")
    assert code == 1
    code, out, _ = run(capsys, "bounds", "covering", "--lip", "2", "--ent", "0.5", "--n", "4", "--format", "json")
    assert {r["product"] for r in json.loads(out)} == {1.0}
    assert run(capsys, "bounds", "thurston", "--kappa", "1")[0] == 2


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "inequality")
    assert code == 0 and "inequality_strict" in out
    code, out, _ = run(capsys, "verify", "--suite", "ode", "--lambda", "0.01", "--k", "8", "--m", "8", "--theta0", "0")
    assert code == 0


def test_field_command(tmp_path, capsys):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"lambda": 1.0, "theta0": 0.0, "R": 1.0, "c0": 2.0,
                             "modes": [{"k": 1, "m": 0, "a": 1.0, "a_prime": 0.0}]}))
    code, out, _ = run(capsys, "field", "--file", str(p), "--r", "0.5", "--theta", "0", "--z", "0", "--format", "json")
    assert code == 0 and json.loads(out)[0]["f"] == pytest.approx(2.0)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tubeforms", "bounds", "dehn", "--n", "2", "--c", "1", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("n,c,lambda_n")
