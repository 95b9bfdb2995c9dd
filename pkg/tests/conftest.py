import random
from pathlib import Path

import pytest

from rare_temporal import EventInstance, SequenceDatabase, SymbolizationRule, sequence_db_from_symbolic, symbolize
from rare_temporal.io import read_csv_series

DATA = Path(__file__).parent / "data"
FIXTURE_CSV = DATA / "running_example.csv"


def hm(text: str) -> int:
    """'7:35' -> minutes since midnight, the tick unit of the fixture."""
    h, m = text.split(":")
    return int(h) * 60 + int(m)


def fixture_db() -> SequenceDatabase:
    series = read_csv_series(FIXTURE_CSV)
    symbolic = [symbolize(s, SymbolizationRule.threshold(s.name, 0.5)) for s in series]
    # timestamps are minutes since the epoch; 2024-01-01T07:00 is the first sample
    return sequence_db_from_symbolic(symbolic, window=35)


# the fixture's ticks are minutes since the epoch; 2024-01-01T00:00 is this tick
DAY0 = 28401120

# sequences 1-4 of the running example, as (symbol, start, end) in clock time
EXPECTED_SEQUENCES = [
    [("SOff", "7:00", "7:30"), ("TOff", "7:00", "7:30"), ("WOff", "7:00", "7:30"), ("IOn", "7:00", "7:30")],
    [("SOn", "7:35", "7:45"), ("TOn", "7:35", "7:40"), ("WOn", "7:35", "7:40"), ("IOff", "7:35", "8:05"),
     ("TOff", "7:40", "8:05"), ("WOff", "7:40", "8:05"), ("SOff", "7:45", "8:05")],
    [("SOff", "8:10", "8:40"), ("TOff", "8:10", "8:40"), ("WOff", "8:10", "8:40"), ("IOn", "8:10", "8:40")],
    [("SOff", "8:45", "9:15"), ("TOn", "8:45", "8:50"), ("WOn", "8:45", "8:55"), ("IOff", "8:45", "9:15"),
     ("TOff", "8:50", "9:15"), ("WOff", "8:55", "9:15")],
]


def as_clock(seq):
    def fmt(t):
        t -= DAY0
        return f"{t // 60}:{t % 60:02d}"
    return {(i.symbol, fmt(i.start), fmt(i.end)) for i in seq}


def random_db(rng: random.Random, n_sym=8, n_seq=10, max_inst=12, horizon=40, max_dur=12) -> SequenceDatabase:
    syms = [f"E{i}" for i in range(rng.randint(2, n_sym))]
    rows = []
    for _ in range(rng.randint(1, n_seq)):
        insts = set()
        for _ in range(rng.randint(0, max_inst)):
            s = rng.randint(0, horizon)
            insts.add(EventInstance(rng.choice(syms), s, s + rng.randint(1, max_dur)))
        rows.append(list(insts))
    return SequenceDatabase.from_instance_lists(rows)


@pytest.fixture(scope="session")
def running_db():
    return fixture_db()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
