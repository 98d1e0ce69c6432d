"""Command line interface: exit codes, output shape, determinism."""

import json

import pytest

from fairsubsidy.cli import main
from fairsubsidy.model import instance_to_dict
from fairsubsidy.oracle import (
    instance_example_inheritance,
    instance_substitute_items,
)


@pytest.fixture
def inheritance_files(tmp_path):
    inst = instance_example_inheritance()
    instance_path = tmp_path / "instance.json"
    instance_path.write_text(json.dumps(instance_to_dict(inst)))
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"bundles": [["g1", "g2"], [], []]}))
    return str(instance_path), str(alloc_path)


def test_check_positive_exit_code_and_subsidies(inheritance_files, capsys):
    instance_path, alloc_path = inheritance_files
    assert main(["check", instance_path, alloc_path]) == 0
    out = capsys.readouterr().out
    assert "envy-freeable: yes" in out
    assert "minimum subsidies: [0, 65, 65]" in out


def test_check_negative_exit_code(tmp_path, capsys):
    inst = instance_substitute_items()
    instance_path = tmp_path / "instance.json"
    instance_path.write_text(json.dumps(instance_to_dict(inst)))
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"bundles": [["g1"], ["g2"]]}))
    assert main(["check", str(instance_path), str(alloc_path)]) == 1
    out = capsys.readouterr().out
    assert "envy-freeable: no" in out
    assert "positive envy cycle" in out


def test_check_json_output_is_deterministic(inheritance_files, capsys):
    instance_path, alloc_path = inheritance_files
    main(["check", instance_path, alloc_path, "--format", "json", "--emit-graph"])
    first = capsys.readouterr().out
    main(["check", instance_path, alloc_path, "--format", "json", "--emit-graph"])
    second = capsys.readouterr().out
    assert first == second
    data = json.loads(first)
    assert data["min_subsidies"] == ["0", "65", "65"]
    assert data["envy_graph"][1][0] == "260"


def test_check_rejects_bad_files(tmp_path, capsys):
    instance_path = tmp_path / "instance.json"
    instance_path.write_text("{\"agents\": []}")
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text("{}")
    assert main(["check", str(instance_path), str(alloc_path)]) == 2
    assert main(["check", str(tmp_path / "missing.json"), str(alloc_path)]) == 2


def test_solve_writes_outcome_file(inheritance_files, tmp_path, capsys):
    instance_path, _ = inheritance_files
    out_path = tmp_path / "outcome.json"
    code = main([
        "solve", instance_path, "--algorithm", "greedy",
        "--trace", "--output", str(out_path),
    ])
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["bundles"] == [["g1"], ["g2"], []]
    assert data["payments"] == ["0", "0", "0"]
    out = capsys.readouterr().out
    assert "trace:" in out
    assert "achieved max subsidy: 0" in out


def test_solve_auto_reports_algorithm(inheritance_files, capsys):
    instance_path, _ = inheritance_files
    assert main(["solve", instance_path]) == 0
    assert "algorithm: greedy" in capsys.readouterr().out


def test_mechanism_aw(tmp_path, capsys):
    from fairsubsidy.oracle import instance_picking_sequence_counterexample

    inst = instance_picking_sequence_counterexample()
    instance_path = tmp_path / "instance.json"
    instance_path.write_text(json.dumps(instance_to_dict(inst)))
    assert main(["mechanism", "aw", str(instance_path), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["bundles"] == [[], ["g1"]]


def test_mechanism_vcg(tmp_path, capsys):
    inst = instance_example_inheritance()
    instance_path = tmp_path / "instance.json"
    instance_path.write_text(json.dumps(instance_to_dict(inst)))
    assert main([
        "mechanism", "vcg", str(instance_path), "--upfront", "400",
        "--format", "json",
    ]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["mechanism"] == "vcg"
    assert len(data["payments"]) == 3


def test_mef_command(inheritance_files, capsys):
    instance_path, alloc_path = inheritance_files
    assert main(["mef", instance_path, alloc_path, "--budget", "65"]) == 0
    out = capsys.readouterr().out
    assert "regime: deficit" in out
    assert "[0, 65/2, 65/2]" in out


def test_mef_rejects_negative_budget(inheritance_files, capsys):
    instance_path, alloc_path = inheritance_files
    assert main(["mef", instance_path, alloc_path, "--budget", "-3"]) == 2
    assert "error" in capsys.readouterr().err


def test_mef_non_freeable_allocation(tmp_path, capsys):
    inst = instance_substitute_items()
    instance_path = tmp_path / "instance.json"
    instance_path.write_text(json.dumps(instance_to_dict(inst)))
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"bundles": [["g1"], ["g2"]]}))
    assert main(["mef", str(instance_path), str(alloc_path), "--budget", "1"]) == 1
    assert "not envy-freeable" in capsys.readouterr().err


def test_fixtures_all(capsys):
    assert main(["fixtures", "--all"]) == 0
    out = capsys.readouterr().out
    assert out.count("ok ") == 10


def test_fixtures_single_verbose(capsys):
    assert main(["fixtures", "--name", "example-1-inheritance", "--verbose"]) == 0
    out = capsys.readouterr().out
    assert "minimum subsidies" in out


def test_fixtures_unknown_name(capsys):
    assert main(["fixtures", "--name", "nope"]) == 2
