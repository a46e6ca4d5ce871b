import json

import pytest

from qspair import cli
from qspair.cli import ConfigError, JobConfig, main, run


def _cfg(tmp_path, obj, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_factorization_config_passes(tmp_path, capsys):
    path = _cfg(tmp_path, {"N": 1, "modules": [{"eval": {"a": "q^2"}}], "checks": ["factorization"], "M": 4})
    assert main(["verify", path]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "pass"
    (entry,) = rep["results"]
    (r,) = entry["reports"]
    assert {k: r[k] for k in ("theorem", "N", "i", "M", "status")} == \
        {"theorem": "factorization", "N": 1, "i": 1, "M": 4, "status": "pass"}
    assert r["witnesses"] == []


def test_tau_symmetry_is_enforced(tmp_path, capsys):
    path = _cfg(tmp_path, {"N": 3, "u": ["1", "q", "1", "1"]})
    assert main(["verify", path]) == 2
    assert "u must be tau-symmetric" in capsys.readouterr().err


@pytest.mark.parametrize("raw,where", [
    ({"N": 0}, "config.N"),
    ({"N": 2, "checks": ["nope"]}, "config.checks[0]"),
    ({"N": 2, "modules": [{"eval": {}}]}, "config.modules[0].eval"),
    ({"N": 2, "modules": [{"tensor": [{"eval": {"a": "q"}}]}]}, "config.modules[0].tensor"),
    ({"N": 2, "modules": [{"eval": {"a": "0"}}]}, "config.modules[0].eval.a"),
    ({"N": 2, "u": ["1", "1"]}, "config.u"),
    ({"N": 2, "order": 0}, "config.order"),
    ({"N": 2, "specialize": "x"}, "config.specialize"),
    ({"N": 2, "colour": 1}, "config.colour"),
])
def test_validation_messages_are_path_qualified(raw, where):
    with pytest.raises(ConfigError, match=where.replace("[", r"\[").replace("]", r"\]")):
        JobConfig.from_dict(raw)


def test_dimension_cap():
    cfg = JobConfig.from_dict({"N": 5, "modules": [{"tensor": [{"eval": {"a": "q"}}, {"tensor": [
        {"eval": {"a": "q"}}, {"eval": {"a": "q^3"}}]}]}], "checks": ["relations"]})
    with pytest.raises(ConfigError, match="cap"):
        run(cfg)


def test_bad_json_and_missing_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert main(["verify", str(p)]) == 2
    assert main(["verify", str(tmp_path / "missing.json")]) == 2


def test_lemma_config(tmp_path, capsys):
    path = _cfg(tmp_path, {"N": 3, "checks": ["lemmas"]})
    assert main(["verify", path]) == 0
    rep = json.loads(capsys.readouterr().out)
    theorems = [r["theorem"] for e in rep["results"] for r in e["reports"]]
    assert theorems[0] == "symbolic-lemmas"
    assert {"appendix-lemmas", "omega-prime", "loop-relations"} <= set(theorems)


def test_skipped_checks_do_not_fail(tmp_path, capsys):
    path = _cfg(tmp_path, {"N": 1, "modules": [{"eval": {"a": "q^3"}}], "checks": ["coproduct"]})
    assert main(["verify", path]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["results"][0]["reports"][0]["status"] == "skipped"


def test_failing_check_sets_exit_code(tmp_path, capsys, monkeypatch):
    real = cli.check_factorization
    monkeypatch.setattr(cli, "check_factorization",
                        lambda X, i, M: real(X, i, M, drop_theta_term=True))
    path = _cfg(tmp_path, {"N": 2, "checks": ["factorization"], "order": 2})
    assert main(["verify", path]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "fail"
    assert rep["results"][0]["reports"][0]["witnesses"]


def test_full_battery_deterministic(tmp_path, capsys):
    cfg = {"N": 2, "u": ["1", "q", "q"], "order": 3, "specialize": "3",
           "modules": [{"tensor": [{"eval": {"a": "q^-1"}}, {"eval": {"a": "q^3"}}]}]}
    path = _cfg(tmp_path, cfg)
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", path, "--out", str(out1)]) == 0
    assert main(["verify", path, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rep = json.loads(out1.read_text())
    statuses = {r["theorem"]: r["status"] for e in rep["results"] for r in e["reports"]}
    assert set(statuses) >= {"relations", "kolb", "dual-oracle", "factorization", "coproduct",
                             "spectrum", "joint-spectrum", "qchar", "boundary-qchar", "module-action"}
    assert all(s == "pass" for s in statuses.values())


def test_text_mode(tmp_path, capsys):
    path = _cfg(tmp_path, {"N": 2, "checks": ["relations", "kolb"]})
    assert main(["verify", path, "--text"]) == 0
    out = capsys.readouterr().out
    assert "relations" in out and out.strip().endswith("overall: pass")


def test_qchar_subcommand(capsys):
    assert main(["qchar", "--N", "1", "--a", "q", "--order", "4"]) == 0
    chi = json.loads(capsys.readouterr().out)
    assert len(chi) == 2
    assert chi[0] == {"Y": [{"i": 1, "a": "q^-1", "e": 1}], "mult": 1}


def test_boundary_qchar_subcommand(capsys):
    assert main(["boundary-qchar", "--N", "2", "--a", "q^3", "--order", "4", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["M"] == 4 and sum(e["mult"] for e in data["entries"]) == 3
    assert all(len(g) == 5 for e in data["entries"] for g in e["gamma"].values())


def test_boundary_qchar_with_specialization(capsys):
    assert main(["boundary-qchar", "--N", "1", "--a", "q^3", "--order", "3", "--specialize", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert all(s["status"] == "pass" for s in data["specialization"])


def test_dump_lw(capsys):
    assert main(["dump-lw", "--N", "1", "--a", "q^2", "--order", "4"]) == 0
    data = json.loads(capsys.readouterr().out)
    roots = sorted((tuple(e["Q"]["1"]), tuple(e["R"]["1"])) for e in data["lweights"])
    assert roots == [((), ("q^2",)), (("1",), ())]


def test_lemma_and_root_suites(capsys):
    assert main(["lemma-suite", "--N", "4"]) == 0
    capsys.readouterr()
    assert main(["root-suite", "--N", "7", "--text"]) == 0
    out = capsys.readouterr().out
    assert "N=7: pass" in out and out.strip().endswith("overall: pass")


def test_cli_flag_errors(capsys):
    assert main(["qchar", "--N", "0"]) == 2
    assert main(["qchar", "--N", "1", "--a", "zz"]) == 2
    assert main(["qchar", "--N", "1", "--order", "0"]) == 2
    assert main(["nonsense"]) == 2
