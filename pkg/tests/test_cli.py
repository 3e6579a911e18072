import csv
import io
import json

import pytest
from click.testing import CliRunner

from towerlab import cli


@pytest.fixture
def runner():
    return CliRunner()


def test_count_single_level(runner):
    result = runner.invoke(cli.main, ["count", "--tower", "x0_2", "--p", "5", "--k", "2", "--levels", "1"])
    assert result.exit_code == 0, result.output
    assert result.output == "tower,q,level,count\nx0_2,25,1,26\n"


def test_count_with_multiplicity(runner):
    result = runner.invoke(cli.main, ["count", "--tower", "x0_2", "--p", "5", "--levels", "2", "--multiplicity"])
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert [row["count"] for row in rows] == ["6", "8"]


@pytest.mark.parametrize(
    "args",
    [
        ["count", "--tower", "x0_2", "--p", "2", "--levels", "2"],
        ["count", "--tower", "x0_9", "--p", "5", "--levels", "2"],
        ["count", "--tower", "x0_2", "--p", "6", "--levels", "2"],
        ["reduce", "--tower", "x0_6", "--p", "5"],
    ],
)
def test_domain_errors_exit_2(runner, args):
    result = runner.invoke(cli.main, args)
    assert result.exit_code == 2
    assert "Error" in result.output


def test_usage_errors_exit_2(runner):
    assert runner.invoke(cli.main, ["count", "--tower", "x0_2"]).exit_code == 2
    assert runner.invoke(cli.main, ["genus", "--tower", "x0_2", "--levels", "3", "--format", "xml"]).exit_code == 2
    bad = runner.invoke(cli.main, ["ramify", "--tower", "shimura_p3", "--surrogates", "abc"])
    assert bad.exit_code == 2


def test_complete_set_json(runner):
    result = runner.invoke(cli.main, ["complete-set", "--tower", "x0_2", "--p", "5"])
    assert result.exit_code == 0
    assert json.loads(result.output) == {"points": [], "q": 5, "size": 0, "tower": "x0_2"}


def test_catalog_lists_every_tower(runner):
    result = runner.invoke(cli.main, ["catalog"])
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert len(rows) == 8
    assert {row["name"]: row["excluded"] for row in rows}["x0_6"] == "2;3"


def test_chains_jsonl(runner):
    result = runner.invoke(cli.main, ["chains", "--tower", "x0_2", "--p", "5", "--level", "2"])
    records = [json.loads(line) for line in result.output.splitlines()]
    assert len(records) == 5
    assert records[0] == {"chain": [0, 2], "level": 2, "q": 5, "tower": "x0_2"}
    assert records[-1]["chain"] == ["inf", "inf"]


def test_reduce_prints_relation(runner):
    result = runner.invoke(cli.main, ["reduce", "--tower", "x0_2", "--p", "3"])
    assert result.exit_code == 0
    assert "mod 3" in result.output


def test_genus_csv(runner):
    result = runner.invoke(cli.main, ["genus", "--tower", "x0_2", "--levels", "5", "--no-cross-check"])
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert [row["genus"] for row in rows] == ["0", "0", "0", "0", "1"]


def test_ramify_json(runner):
    result = runner.invoke(cli.main, ["ramify", "--tower", "shimura_p3", "--depth", "5"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["stabilization_level"] == 4
    assert report["surrogates"] == [101, 103]


def test_optimality_to_file(runner, tmp_path):
    out = tmp_path / "opt.csv"
    result = runner.invoke(
        cli.main, ["optimality", "--tower", "x0_2", "--p", "5", "--k", "2", "--levels", "2", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [row["ratio"] for row in rows] == ["undefined", "undefined"]


def test_verify_identities_passes(runner):
    result = runner.invoke(cli.main, ["verify-identities", "--precision", "20"])
    assert result.exit_code == 0, result.output
    assert all(report["status"] == "pass" for report in json.loads(result.output))


def test_verify_identities_failure_exits_1(runner, monkeypatch):
    def fake_verify_all(prec):
        return [{"id": "h2_level", "status": "fail", "residual_leading_exponent": 5, "precision": 20}]

    monkeypatch.setattr(cli, "verify_all", fake_verify_all)
    result = runner.invoke(cli.main, ["verify-identities", "--precision", "20"])
    assert result.exit_code == 1
    assert "h2_level" in result.output


def test_chains_help_documents_point_encoding(runner):
    result = runner.invoke(cli.main, ["chains", "--help"])
    assert result.exit_code == 0
    assert "base-p digits" in result.output
    assert '"inf"' in result.output
