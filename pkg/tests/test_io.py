import io

import pytest

from rare_temporal import MiningConfig, mine
from rare_temporal.io import (
    InputFormatError, format_ticks, load_db, parse_timestamp, read_csv_series, read_report, save_db,
    summary_lines, write_report,
)

from conftest import FIXTURE_CSV


def test_timestamps():
    assert parse_timestamp("42") == 42
    t = parse_timestamp("2024-01-01T07:35")
    assert format_ticks(t) == "2024-01-01T07:35"
    assert parse_timestamp("2024-01-01T07:35", tick_seconds=300) * 5 == t
    with pytest.raises(InputFormatError):
        parse_timestamp("2024-01-01T07:35:30")
    with pytest.raises(InputFormatError):
        parse_timestamp("yesterday")


def test_read_fixture():
    series = read_csv_series(FIXTURE_CSV)
    assert [s.name for s in series] == ["S", "T", "W", "I"]
    assert all(len(s) == 28 and s.step == 5 for s in series)


@pytest.mark.parametrize("text", [
    "", "time,A\n0,1\n", "timestamp,A,A\n0,1,2\n", "timestamp,A\n0,1,2\n", "timestamp,A\n0,abc\n",
    "timestamp,A\n0,1\n5,1\n7,1\n",
])
def test_bad_csv(tmp_path, text):
    p = tmp_path / "x.csv"
    p.write_text(text)
    with pytest.raises(InputFormatError):
        read_csv_series(p)


def test_empty_cells_are_nan(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("timestamp,A\n0,1\n1,\n")
    assert str(read_csv_series(p)[0].values[1]) == "nan"


def test_db_round_trip(tmp_path, running_db):
    p = tmp_path / "db.jsonl"
    save_db(running_db, p)
    back = load_db(p)
    assert back.sequences == running_db.sequences
    assert back.alphabet == running_db.alphabet
    p.write_text('{"format": "other"}\n')
    with pytest.raises(InputFormatError):
        load_db(p)
    p.write_text('{"format": "rare-temporal-sequence-db"}\n{"id": 1, "instances": [["A", 3, 1]]}\n')
    with pytest.raises(InputFormatError):
        load_db(p)


def test_report_layout(tmp_path, running_db):
    r = mine(running_db, MiningConfig(0.2, 1.0, 0.3))
    p = tmp_path / "r.jsonl"
    with open(p, "w") as fh:
        write_report(fh, r, len(running_db), {"sigma_min": 0.2}, volatile={"seconds": 1.5}, with_witness=True)
    header, pats, metrics = read_report(p)
    assert header["type"] == "header" and header["seconds"] == 1.5
    assert len(pats) == len(r.patterns) == metrics["n_patterns"]
    assert metrics["levels"][0]["level"] == 1
    son = next(x for x in pats if x["key"] == "SOn C TOn")
    assert son["sequences"] == [2] and son["support_count"] == 1
    assert son["witness"]["2"][0][0][0] == "SOn"


def test_tsv_report(running_db):
    r = mine(running_db, MiningConfig(0.2, 1.0, 0.3, max_pattern_events=2))
    buf = io.StringIO()
    write_report(buf, r, 4, {}, fmt="tsv")
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# ") and lines[-1].startswith("# ")
    assert lines[1].split("\t")[:3] == ["level", "key", "support_count"]
    assert any(l.split("\t")[1] == "SOn C TOn" for l in lines[2:-1])
    with pytest.raises(ValueError):
        write_report(buf, r, 4, {}, fmt="xml")


def test_summary_glyphs(running_db):
    r = mine(running_db, MiningConfig(0.2, 1.0, 0.3))
    lines = summary_lines(r.patterns, limit=3)
    assert len(lines) == 4 and lines[-1] == "..."
    assert "≽" in lines[0]
