import json
from fractions import Fraction

from towerlab.tools import (
    csv_text,
    json_text,
    jsonl_text,
    render_value,
    save_csv_file,
    save_json_file,
    save_jsonl_file,
)


def test_render_value():
    assert render_value(Fraction(16, 3)) == "16/3"
    assert render_value(Fraction(4, 1)) == 4
    assert render_value(1.2360679) == "1.236068"
    assert render_value(None) is None
    assert render_value(None, for_csv=True) == "undefined"
    assert render_value(True) is True
    assert render_value({"r": [Fraction(1, 2)]}) == {"r": ["1/2"]}


def test_csv_text():
    rows = [{"level": 1, "ratio": None}, {"level": 2, "ratio": Fraction(8, 3)}]
    assert csv_text(rows) == "level,ratio\n1,undefined\n2,8/3\n"
    assert csv_text([]) == ""


def test_json_and_jsonl_text():
    assert json.loads(json_text({"b": Fraction(1, 2), "a": None})) == {"a": None, "b": "1/2"}
    lines = jsonl_text([{"chain": ["inf", 4]}, {"chain": [0, 2]}]).splitlines()
    assert [json.loads(line) for line in lines] == [{"chain": ["inf", 4]}, {"chain": [0, 2]}]


def test_save_files(tmp_path):
    rows = [{"level": 1, "count": 6}]
    result = save_csv_file(rows, str(tmp_path / "out" / "counts.csv"))
    assert result == {"status": "success", "path": str(tmp_path / "out" / "counts.csv"), "rows": 1}
    assert (tmp_path / "out" / "counts.csv").read_text() == "level,count\n1,6\n"

    assert save_json_file({"size": 0}, str(tmp_path / "s.json"))["status"] == "success"
    assert json.loads((tmp_path / "s.json").read_text()) == {"size": 0}

    assert save_jsonl_file(rows, str(tmp_path / "c.jsonl"))["rows"] == 1
    assert not [p for p in tmp_path.rglob(".tmp-*")]


def test_save_reports_errors(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    result = save_csv_file([{"a": 1}], str(blocker / "inner.csv"))
    assert result["status"] == "error"
    assert result["error"]
