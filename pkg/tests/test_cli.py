import json

import numpy as np
import pytest

from demonic.cli import main
from demonic.decision import load_certificate
from demonic.structure import FinStructure, serialize_structure

ONE_TEXT = serialize_structure(
    FinStructure(("a",), np.array([[True]]), np.array([[0]]))
)
BAD_TEXT = serialize_structure(
    FinStructure(
        ("a", "b"), np.array([[1, 1], [1, 1]], dtype=bool), np.zeros((2, 2), dtype=int)
    )
)


@pytest.fixture()
def one_path(tmp_path):
    p = tmp_path / "one.json"
    p.write_text(ONE_TEXT)
    return str(p)


@pytest.fixture()
def sn2_path(tmp_path, sn2):
    p = tmp_path / "sn2.json"
    p.write_text(serialize_structure(sn2))
    return str(p)


@pytest.fixture()
def bad_path(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(BAD_TEXT)
    return str(p)


def test_validate_exit_codes(one_path, bad_path, capsys):
    assert main(["validate", one_path]) == 0
    assert main(["validate", bad_path]) == 3
    out = capsys.readouterr().out
    assert "antisymmetry" in out


def test_check_gen_sn(sn2_path, capsys):
    assert main(["check", sn2_path]) == 2
    out = capsys.readouterr().out
    assert "a0b" in out and "a1c" in out


def test_check_json_round_trips(sn2_path, one_path, capsys):
    assert main(["check", sn2_path, "--json"]) == 2
    s, cert = load_certificate(capsys.readouterr().out)
    assert cert.status == "not_representable"
    assert main(["check", one_path, "--json"]) == 0
    s, cert = load_certificate(capsys.readouterr().out)
    assert cert.status == "representable"


def test_check_invalid(bad_path):
    assert main(["check", bad_path]) == 3


def test_represent_and_verify(one_path, tmp_path, capsys):
    rep = tmp_path / "rep.json"
    dot = tmp_path / "rep.dot"
    assert main(["represent", one_path, "-o", str(rep), "--dot", str(dot)]) == 0
    node_lines = [
        line
        for line in dot.read_text().splitlines()
        if "[label=" in line and "->" not in line
    ]
    assert len(node_lines) == 7
    assert main(["verify", one_path, str(rep)]) == 0
    obj = json.loads(rep.read_text())
    obj["rels"]["a"] = obj["rels"]["a"][1:]
    rep.write_text(json.dumps(obj))
    assert main(["verify", one_path, str(rep)]) == 2


def test_represent_refuses(sn2_path, bad_path):
    assert main(["represent", sn2_path]) == 2
    assert main(["represent", bad_path]) == 3


def test_gen_sn_output_and_cap(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["gen-sn", "2", "-o", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert len(obj["elements"]) == 18
    assert main(["gen-sn", "24"]) == 4


def test_gen_sn_deterministic(capsys):
    assert main(["gen-sn", "1"]) == 0
    first = capsys.readouterr().out
    assert main(["gen-sn", "1"]) == 0
    assert capsys.readouterr().out == first


def test_enumerate_classify(capsys):
    assert main(["enumerate", "--max-size", "2", "--classify"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 26
    statuses = {json.loads(line)["certificate"]["status"] for line in lines}
    assert statuses == {"representable", "not_representable"}


def test_enumerate_resource_cap(capsys):
    assert main(["enumerate", "--max-size", "9"]) == 4


def test_enumerate_classify_size3_reports_construction_gaps(capsys):
    # the four known construction failures surface as internal_error lines
    # and flip the exit code; every other structure classifies cleanly
    assert main(["enumerate", "--max-size", "3", "--dedupe", "--classify"]) == 1
    lines = [json.loads(l) for l in capsys.readouterr().out.strip().splitlines()]
    assert len(lines) == 387  # 1 + 1 + 13 + 372 representatives
    assert sum(1 for l in lines if l["certificate"]["status"] == "internal_error") == 4


def test_mem_env_cap(sn2_path, monkeypatch):
    monkeypatch.setenv("DEMONIC_MEM_MB", "0")
    assert main(["stages", sn2_path]) == 4
    assert main(["stages", sn2_path, "--mem-mb", "512"]) == 0


def test_stages_fact_queries(sn2_path, capsys):
    assert main(["stages", sn2_path, "--fact", "a0 <* a2"]) == 0
    assert "@ 1" in capsys.readouterr().out
    assert main(["stages", sn2_path, "--fact", "a0b <|[a1c] a1c"]) == 0
    assert "@ 3" in capsys.readouterr().out
    assert main(["stages", sn2_path, "--fact", "a0b◁[a1c]a1c"]) == 0
    assert "@ 3" in capsys.readouterr().out
    assert main(["stages", sn2_path, "--fact", "b <* a0"]) == 2
    assert "not derivable" in capsys.readouterr().out
    assert main(["stages", sn2_path, "--fact", "nonsense"]) == 64


def test_stages_explain(sn2_path, capsys):
    assert main(["stages", sn2_path, "--fact", "a0 <* a2", "--explain"]) == 0
    out = capsys.readouterr().out
    assert "[trans" in out and out.count("\n") >= 3


def test_stages_full_listing(one_path, capsys):
    assert main(["stages", one_path]) == 0
    out = capsys.readouterr().out
    assert "a <* a @ 0" in out and "a <|[a] a @ 0" in out
    assert main(["stages", one_path, "--json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["black"] == [["a", "a", 0]]


def test_oracle_cli(one_path, sn2_path, capsys):
    assert main(["oracle", one_path, "--max-base", "1"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["base"] == 1
    assert main(["oracle", sn2_path, "--max-base", "2", "--size-cap", "18"]) == 2
    assert main(["oracle", sn2_path, "--max-base", "2"]) == 4  # size cap


def test_laws_cli(capsys):
    assert main(["laws", "--seed", "1", "--trials", "50"]) == 0
    assert main(["laws", "--seed", "1", "--trials", "50", "--json"]) == 0
    obj = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert obj["passed"] is True


def test_eval_cli(capsys):
    assert main(["eval", "R;S", "--let", 'R={"base":3,"pairs":[[0,1]]}',
                 "--let", 'S={"base":3,"pairs":[[1,2]]}']) == 0
    assert json.loads(capsys.readouterr().out) == {"base": 3, "pairs": [[0, 2]]}
    assert main(["eval", "R <<= empty", "--let", 'R={"base":2,"pairs":[[0,1]]}']) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert main(["eval", "empty <<= R", "--let", 'R={"base":2,"pairs":[[0,1]]}']) == 2
    assert capsys.readouterr().out.strip() == "false"
    assert main(["eval", "R ;; S", "--let", 'R={"base":2,"pairs":[]}']) == 3


def test_usage_errors(capsys):
    assert main(["no-such-command"]) == 64
    assert main([]) == 64
    assert main(["eval", "R", "--let", "bogus"]) == 64


def test_unreadable_file():
    assert main(["validate", "/nonexistent/f.json"]) == 3


def test_byte_identical_outputs(sn2_path, capsys):
    assert main(["check", sn2_path, "--json"]) == 2
    first = capsys.readouterr().out
    assert main(["check", sn2_path, "--json"]) == 2
    assert capsys.readouterr().out == first


def test_config_file(tmp_path, sn2_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"kernel": "python"}')
    assert main(["check", sn2_path, "--config", str(cfg)]) == 2
    cfg.write_text('{"mem_mb": 0}')
    assert main(["stages", sn2_path, "--config", str(cfg)]) == 4
    assert main(["stages", sn2_path, "--config", str(cfg), "--mem-mb", "512"]) == 0
