import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rare_temporal.model import EventInstance
from rare_temporal.transform import (
    SequenceDatabase, SymbolicSeries, SymbolizationRule, TemporalSequence, TimeSeries,
    build_sequence_db, extract_instances, sequence_db_from_symbolic, symbolize,
)

from conftest import DAY0, EXPECTED_SEQUENCES, as_clock, hm

def test_running_example_sequences(running_db):
    assert len(running_db) == 4
    for seq, row in zip(running_db, EXPECTED_SEQUENCES):
        assert as_clock(seq) == set(row)
        assert len(seq) == len(row)


def test_symbolize_on_off():
    ts = TimeSeries("X", np.arange(4), np.array([1.6, 1.2, 0.3, 0.0]))
    ss = symbolize(ts, SymbolizationRule.threshold("X", 0.5, prefix=""))
    assert ss.symbols == ("On", "On", "Off", "Off")


def test_symbolize_boundary_is_on():
    ts = TimeSeries("X", np.arange(3), np.full(3, 0.5))
    assert symbolize(ts, SymbolizationRule.threshold("X", 0.5)).symbols == ("XOn",) * 3


def test_symbolize_empty_and_multibin():
    empty = TimeSeries("X", np.array([], dtype=np.int64), np.array([]))
    assert len(symbolize(empty, SymbolizationRule.threshold("X", 0.5))) == 0
    rule = SymbolizationRule("X", ((0.0, "Neg"), (1.0, "Low"), (math.inf, "High")))
    ts = TimeSeries("X", np.arange(5), np.array([-1, 0, 0.5, 1, 7]))
    assert symbolize(ts, rule).symbols == ("Neg", "Low", "Low", "High", "High")


def test_symbolize_nan_policies():
    ts = TimeSeries("X", np.arange(3), np.array([1.0, np.nan, 0.0]))
    rule = SymbolizationRule.threshold("X", 0.5)
    with pytest.raises(ValueError):
        symbolize(ts, rule)
    assert symbolize(ts, rule, "carry_forward").symbols == ("XOn", "XOn", "XOff")
    with pytest.raises(ValueError):
        symbolize(TimeSeries("X", np.arange(2), np.array([np.nan, 1.0])), rule, "carry_forward")
    with pytest.raises(ValueError):
        symbolize(ts, SymbolizationRule.threshold("Y", 0.5))


@pytest.mark.parametrize("bins", [(), ((1.0, "A"),), ((2.0, "A"), (1.0, "B"), (math.inf, "C"))])
def test_rule_validation(bins):
    with pytest.raises(ValueError):
        SymbolizationRule("X", bins)


def test_series_validation():
    with pytest.raises(ValueError):
        TimeSeries("X", np.array([0, 5, 7]), np.zeros(3))
    with pytest.raises(ValueError):
        TimeSeries("X", np.array([0, 5, 5]), np.zeros(3))
    with pytest.raises(ValueError):
        TimeSeries("X", np.array([0, 5]), np.zeros(3))


def test_toaster_instances():
    from rare_temporal.io import read_csv_series
    from conftest import FIXTURE_CSV

    t = next(s for s in read_csv_series(FIXTURE_CSV) if s.name == "T")
    insts = extract_instances(symbolize(t, SymbolizationRule.threshold("T", 0.5)))
    on = [(i.start - DAY0, i.end - DAY0) for i in insts if i.symbol == "TOn"]
    assert on == [(hm("7:35"), hm("7:40")), (hm("8:45"), hm("8:50"))]


def test_extract_single_and_alternating():
    one = SymbolicSeries("X", np.array([10]), ("A",), step=5)
    assert extract_instances(one) == [EventInstance("A", 10, 15)]
    alt = SymbolicSeries("X", np.arange(0, 30, 5), ("On", "Off") * 3)
    insts = extract_instances(alt)
    assert len(insts) == 6
    assert all(i.end == i.start + 5 for i in insts)
    with pytest.raises(ValueError):
        extract_instances(SymbolicSeries("X", np.array([], dtype=np.int64), ()))


@given(st.lists(st.sampled_from("ABC"), min_size=1, max_size=40), st.integers(1, 9))
def test_extract_round_trip(symbols, step):
    ts = np.arange(len(symbols)) * step
    insts = extract_instances(SymbolicSeries("X", ts, tuple(symbols), step=step))
    starts = [i.start for i in insts]
    for t, sym in zip(ts, symbols):
        k = int(np.searchsorted(starts, t, side="right")) - 1
        assert insts[k].symbol == sym
        assert insts[k].start <= t <= insts[k].end
    assert all(a.symbol != b.symbol for a, b in zip(insts, insts[1:]))


def test_clipping_example():
    db = build_sequence_db({"X": [EventInstance("A", hm("7:30"), hm("7:50"))]}, window=35, origin=hm("7:00"))
    assert [[tuple(i) for i in s] for s in db] == [[("A", hm("7:30"), hm("7:35"))], [("A", hm("7:35"), hm("7:50"))]]


def test_single_window_and_step_guard():
    db = build_sequence_db({"X": [EventInstance("A", 0, 10)]}, window=10)
    assert len(db) == 1 and db[1].instances == (EventInstance("A", 0, 10),)
    with pytest.raises(ValueError):
        build_sequence_db({"X": [EventInstance("A", 0, 10)]}, window=2, step=5)
    with pytest.raises(ValueError):
        build_sequence_db({"X": [EventInstance("A", 0, 10)]}, window=0)


def test_empty_windows_are_kept():
    insts = [EventInstance("A", 0, 3), EventInstance("B", 25, 28)]
    db = build_sequence_db({"X": insts}, window=10)
    assert [len(s) for s in db] == [1, 0, 1]


def runs_for(rng, symbols):
    # non-overlapping instances per symbol, the shape extraction produces
    out = []
    for sym in symbols:
        t = rng.randint(0, 10)
        for _ in range(rng.randint(1, 6)):
            d = rng.randint(1, 25)
            out.append(EventInstance(sym, t, t + d))
            t += d + rng.randint(0, 10)
    return out


@given(st.integers(0, 2**31))
def test_clipping_properties(seed):
    rng = random.Random(seed)
    insts = runs_for(rng, "AB")
    window = rng.randint(1, 30)
    origin = rng.randint(-10, 0)
    db = build_sequence_db({"X": insts}, window=window, origin=origin)
    first = (min(i.start for i in insts) - origin) // window
    total = 0
    for seq in db:
        lo = origin + (first + seq.id - 1) * window
        for i in seq:
            assert lo <= i.start < i.end <= lo + window
        total += sum(i.duration for i in seq)
        keys = [(i.start, i.end, i.symbol) for i in seq]
        assert keys == sorted(keys)
    assert total == sum(i.duration for i in insts)


def test_clipping_collapses_identical_pieces():
    db = build_sequence_db({"X": [EventInstance("A", 0, 20)], "Y": [EventInstance("A", 5, 20)]},
                           window=10, origin=0)
    assert [[tuple(i) for i in s] for s in db] == [[("A", 0, 10), ("A", 5, 10)], [("A", 10, 20)]]


def test_sequence_order_and_ids():
    seq = TemporalSequence(1, (EventInstance("B", 3, 5), EventInstance("A", 1, 9), EventInstance("A", 1, 4)))
    assert [tuple(i) for i in seq] == [("A", 1, 4), ("A", 1, 9), ("B", 3, 5)]
    with pytest.raises(ValueError):
        SequenceDatabase((TemporalSequence(2, ()),))


def test_origin_after_data_rejected():
    ss = SymbolicSeries("X", np.arange(0, 20, 5), ("A", "A", "B", "B"))
    with pytest.raises(ValueError):
        sequence_db_from_symbolic([ss], window=10, origin=3)
