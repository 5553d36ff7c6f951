import json

import pytest

from coklab.cli import EXIT_BUDGET, EXIT_INDETERMINATE, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cokernel_examples(capsys):
    code, rep = run(capsys, "cokernel", "--matrix", "[[3]]", "--prime", "3", "--exp", "3")
    assert code == EXIT_OK
    assert rep["result"]["key"].startswith("3:(1):") and rep["result"]["parts"][0]["gram"] == [[1]]
    code, _ = run(capsys, "cokernel", "--matrix", "[[0, 0], [0, 1]]", "--prime", "3", "--exp", "1")
    assert code == EXIT_INDETERMINATE
    code, rep = run(capsys, "cokernel", "--matrix", "[[0, 2], [-2, 0]]", "--prime", "2", "--exp", "3")
    assert code == EXIT_OK and rep["result"]["parts"][0]["H"] == [1]


def test_malformed_input_is_usage_error(capsys):
    assert run(capsys, "cokernel", "--matrix", "[[1, 2", "--modulus", "9")[0] == EXIT_USAGE
    assert run(capsys, "simulate", "--n", "5", "--kind", "banana")[0] == EXIT_USAGE
    assert run(capsys, "limits", "--group", "Z/3", "--primes", "3")[0] == EXIT_USAGE


def test_budget_exit(capsys, monkeypatch):
    monkeypatch.setenv("COKLAB_BUDGET", "10")
    code, _ = run(capsys, "transition", "--matrix", "[[1, 0], [0, 1]]", "--modulus", "9", "--enumerate")
    assert code == EXIT_BUDGET


def test_transition_enumerate(capsys):
    code, rep = run(capsys, "transition", "--matrix", "[[1]]", "--modulus", "3", "--enumerate")
    assert code == EXIT_OK
    assert rep["result"]["fractions"] == {"3:():S": "2/3", "3:(1):U": "1/3"}


def test_limits_examples(capsys):
    code, rep = run(capsys, "limits", "--group", "Z/3", "--pairing", "1", "--primes", "3")
    assert code == EXIT_OK
    res = rep["result"]
    assert res["mu_inf"] == pytest.approx(0.10650, abs=5e-6) and res["aut"] == 2 and res["tail_bound"] < 1e-12
    code, rep = run(capsys, "limits", "--group", "Z/2", "--primes", "2", "--setting", "alternating")
    assert rep["result"]["sp"] == {"2": 6}
    assert rep["result"]["mu_inf_even"] == pytest.approx(0.27961, abs=5e-6)


def test_audit_identity(capsys):
    code, rep = run(capsys, "audit", "--event", "S2", "--n", "12", "--p", "2", "--exhaustive", "--matrix", "identity", "--gamma", "0.25")
    assert code == EXIT_OK
    res = rep["result"]
    assert res["verdict"] == "violated" and res["witness"]["xi"][:2] == [1, 0] and res["witness_revalidated"]
    code, rep = run(capsys, "audit", "--event", "S2", "--n", "12", "--matrix", "identity")
    assert rep["result"]["detail"]["vacuous"] and rep["result"]["verdict"] == "pass-exhaustive"


def test_simulate_is_reproducible(capsys, tmp_path):
    argv = ["simulate", "--kind", "sym", "--n", "12", "--primes", "3", "--samples", "300", "--seed", "4"]
    code, first = run(capsys, *argv, "--out", str(tmp_path / "a"))
    _, second = run(capsys, "--threads", "1", *argv)
    assert code == EXIT_OK
    first.pop("runtime_seconds"), second.pop("runtime_seconds")
    assert first == second
    assert "distance" in first and first["parameters"]["samples"] == 300
    assert (tmp_path / "a.csv").read_text().startswith("key,probability,count")


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 10, "samples": 200, "primes": "2", "k-max": 2}))
    code, rep = run(capsys, "--config", str(cfg), "simulate", "--kind", "alt")
    assert code == EXIT_OK
    assert rep["parameters"]["n"] == 10 and rep["modulus"] == 4
    code, rep = run(capsys, "--config", str(cfg), "simulate", "--kind", "alt", "--n", "11")
    assert rep["parameters"]["n"] == 11


def test_remaining_commands(capsys):
    code, rep = run(capsys, "corank-law", "--n", "20", "--p", "3", "--runs", "50")
    assert code == EXIT_OK and set(rep["result"]["increments"]) <= {"-1", "0", "1"}
    code, rep = run(capsys, "joint-corners", "--n", "10", "--j", "2", "--samples", "200")
    assert code == EXIT_OK and rep["result"]["distance"] >= 0
    code, rep = run(capsys, "bounds", "--samples", "50", "--hamming-n", "10", "--inverse-n", "3")
    assert code == EXIT_OK and rep["result"]["inverse_diagonal"]["failures"] == 0
