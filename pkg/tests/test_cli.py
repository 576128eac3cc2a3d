import json
import subprocess
import sys
from importlib import resources

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from cli_runs import RUNS
from lemlab import cli


def validator():
    root = resources.files("lemlab") / "schemas"
    schemas = {name: json.loads((root / name).read_text()) for name in ("report.schema.json",
                                                                        "input.schema.json")}
    registry = Registry().with_resources(
        (f"lemlab/{name}", Resource.from_contents(s)) for name, s in schemas.items())
    return Draft202012Validator(schemas["report.schema.json"], registry=registry)


def invoke(command, data_dir, out, seed=7, extra=()):
    name, args = RUNS[command]
    argv = [command, "--input", str(data_dir / name), "--out", str(out), "--seed", str(seed), *args, *extra]
    return cli.main(argv)


@pytest.fixture(scope="module")
def all_runs(tmp_path_factory, request):
    data_dir = request.config.rootpath / "tests" / "data"
    out = tmp_path_factory.mktemp("runs")
    codes = {c: invoke(c, data_dir, out) for c in RUNS}
    return out, codes


def test_commands_cover_every_subcommand():
    assert set(RUNS) == set(cli.COMMANDS)


def test_every_command_passes_and_validates(all_runs):
    out, codes = all_runs
    v = validator()
    for command, code in codes.items():
        assert code == 0, command
        report = json.loads((out / f"{command}_report.json").read_text())
        v.validate(report)
        assert report["payload"]["status"] in ("pass", "inconclusive")
        for name in report["artifacts"]:
            assert (out / name).exists()


def test_spec_run_examples(all_runs):
    out, _ = all_runs
    cartan = json.loads((out / "cartan_report.json").read_text())["payload"]
    assert cartan["status"] == "pass" and cartan["counts"]["discs"] == 2
    assert cartan["content_sum"] <= 2 * 2.718281828459045 * 0.1
    assert json.loads((out / "thm42_report.json").read_text())["payload"]["status"] == "pass"


def test_artifacts_format(all_runs):
    out, _ = all_runs
    head = (out / "cartan_grid.csv").read_text().splitlines()
    assert head[0] == "x,y,value,in_exceptional"
    assert len(head) == 1 + cli.PLOT_GRID ** 2
    svg = (out / "lemma51_cover.svg").read_text()
    assert svg.startswith("<svg") and 'class="invariant"' in svg
    assert 'class="euclidean"' in (out / "cartan_cover.svg").read_text()


def test_replay_every_command(all_runs):
    out, _ = all_runs
    for command in RUNS:
        path = out / f"{command}_report.json"
        stored = json.loads(path.read_text())["payload"]
        assert cli.replay(path)["payload"] == stored
        assert cli.main(["replay", str(path)]) == 0


def test_replay_refuses_tampering(all_runs, tmp_path):
    out, _ = all_runs
    report = json.loads((out / "cartan_report.json").read_text())
    report["config"]["seed"] = 8
    (tmp_path / "seed.json").write_text(json.dumps(report))
    with pytest.raises(cli.CliError, match="differs"):
        cli.replay(tmp_path / "seed.json")
    assert cli.main(["replay", str(tmp_path / "seed.json")]) == 1
    report["config"]["seed"] = 7
    report["schema_version"] = "2.0"
    (tmp_path / "bump.json").write_text(json.dumps(report))
    with pytest.raises(cli.CliError, match="refusing"):
        cli.replay(tmp_path / "bump.json")


def test_two_runs_identical(data_dir, tmp_path):
    a = cli.run({**cli_config("cartan", data_dir), "out": str(tmp_path)})["payload"]
    b = cli.run({**cli_config("cartan", data_dir), "out": str(tmp_path)})["payload"]
    assert cli.dumps(a) == cli.dumps(b)


def cli_config(command, data_dir, seed=7):
    name, args = RUNS[command]
    ns = cli.build_parser().parse_args([command, "--input", str(data_dir / name), "--seed", str(seed), *args])
    return cli.config_from_args(ns)


def test_exit_codes(data_dir, tmp_path, capsys):
    assert cli.main(["cartan", "--input", str(data_dir / "z2m1.json"), "--epsilon", "0.1"]) == 1
    assert "seed" in capsys.readouterr().err
    assert cli.main(["nosuch"]) == 1
    assert cli.main(["cartan", "--input", str(data_dir / "z2m1.json"), "--seed", "1", "--epsilon", "-1",
                     "--out", str(tmp_path)]) == 1
    assert "epsilon" in capsys.readouterr().err
    # a negative slack turns the lower bound into a violated one: a mathematical fail
    assert invoke("thm42", data_dir, tmp_path, extra=["--slack", "-100"]) == 2


def test_module_entry_point(data_dir, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lemlab", "capacity", "--input", str(data_dir / "disc.json"),
                           "--seed", "1", "--out", str(tmp_path), "--no-artifacts"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "capacity_report.json").read_text())["artifacts"] == ["capacity_report.json"]
