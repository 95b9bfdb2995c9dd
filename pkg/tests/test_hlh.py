import json
import random

import pytest
from hypothesis import given, strategies as st

from rare_temporal import MiningConfig, Pruning, mine
from rare_temporal.hlh import HLH1, FrozenError, HLHk, dump_json, intersect_sorted
from rare_temporal.model import EventInstance, Relation, TemporalPattern

from conftest import random_db

C = Relation.CONTAINS


def test_hlh1_postings():
    h = HLH1()
    h.insert("TOn", 2, [EventInstance("TOn", 455, 460)])
    h.insert("TOn", 4, [EventInstance("TOn", 525, 530)])
    assert h.sequences("TOn") == [2, 4]
    assert h.support("TOn") == 2
    assert h.sequences("nope") == [] and h.support("nope") == 0
    with pytest.raises(ValueError):
        h.insert("TOn", 3, [EventInstance("TOn", 1, 2)])
    with pytest.raises(ValueError):
        h.insert("X", 1, [])
    h.freeze()
    with pytest.raises(FrozenError):
        h.insert("Y", 1, [EventInstance("Y", 1, 2)])


def test_hlh1_singleton():
    h = HLH1()
    h.insert("A", 7, [EventInstance("A", 0, 1)])
    assert h.sequences("A") == [7] and len(h) == 1 and "A" in h


def test_running_example_hlh1(running_db):
    r = mine(running_db, MiningConfig(0.2))
    assert len(r.hlh1) == 8
    assert r.hlh1.sequences("TOn") == [2, 4]
    assert r.hlh1.sequences("SOff") == [1, 2, 3, 4]


def test_group_sequences(running_db):
    r = mine(running_db, MiningConfig(0.2, pruning="none"))
    h2 = r.levels[0]
    assert h2.group_sequences(("SOn", "TOn")) == [2]
    assert h2.group_sequences(("TOn", "WOn")) == [2, 4]
    assert h2.group_sequences(("IOn", "SOn")) == []
    assert h2.pattern_sequences("SOn C TOn") == [2]


def test_store_pattern_contract():
    h = HLHk(2)
    p = TemporalPattern.pair(C, "SOn", "TOn")
    b = (EventInstance("SOn", 455, 465), EventInstance("TOn", 455, 460))
    with pytest.raises(KeyError):
        h.store_pattern(("SOn", "TOn"), p, 2, [b])
    h.register_group(("SOn", "TOn"), [2])
    assert h.store_pattern(("SOn", "TOn"), p, 2, [b]) == "SOn C TOn"
    h.store_pattern(("SOn", "TOn"), p, 2, [b])
    assert h.pattern_table["SOn C TOn"] == [2]
    assert h.patterns_of(("SOn", "TOn")) == ["SOn C TOn"]
    assert h.bindings("SOn C TOn", 2) == [b]
    with pytest.raises(ValueError):
        h.store_pattern(("SOn", "TOn"), p, 4, [b])
    with pytest.raises(ValueError):
        h.store_pattern(("SOn", "TOn"), p, 3, [b])


def test_one_witness_unless_asked():
    b1 = (EventInstance("A", 0, 5), EventInstance("B", 1, 3))
    b2 = (EventInstance("A", 0, 5), EventInstance("B", 2, 4))
    p = TemporalPattern.pair(C, "A", "B")
    for keep, n in ((False, 1), (True, 2)):
        h = HLHk(2, keep_all_bindings=keep)
        h.register_group(("A", "B"), [1])
        h.store_pattern(("A", "B"), p, 1, [b1, b2])
        assert len(h.bindings(p.key, 1)) == n


def test_out_of_order_store_keeps_ids_sorted():
    h = HLHk(2)
    h.register_group(("A", "B"), [1, 2, 3])
    p = TemporalPattern.pair(C, "A", "B")
    b = (EventInstance("A", 0, 5), EventInstance("B", 1, 3))
    for sid in (3, 1, 2):
        h.store_pattern(("A", "B"), p, sid, [b])
    assert h.pattern_sequences(p.key) == [1, 2, 3]


@given(st.lists(st.integers(0, 60), unique=True), st.lists(st.integers(0, 60), unique=True))
def test_intersect_sorted(a, b):
    a, b = sorted(a), sorted(b)
    assert intersect_sorted(a, b) == sorted(set(a) & set(b))


@pytest.mark.parametrize("seed", range(15))
def test_structure_invariants(seed):
    db = random_db(random.Random(seed))
    r = mine(db, MiningConfig(0.1, 1.0, 0.0, max_pattern_events=4, pruning=Pruning.NONE))
    h1 = r.hlh1
    for sym, ids in h1.event_table.items():
        assert ids == sorted(set(ids))
    for (sym, sid) in h1.sequence_table:
        assert sid in h1.sequences(sym)
    for h in r.levels:
        for g, entry in h.group_table.items():
            assert entry.sequences == sorted(set(entry.sequences))
            assert all(s in h1 for s in g)
            for key in entry.patterns:
                ps = h.pattern_sequences(key)
                assert ps == sorted(set(ps))
                assert set(ps) <= set(entry.sequences)
                for sid in ps:
                    assert len(h.bindings(key, sid)) >= 1


def test_dump_json(running_db):
    r = mine(running_db, MiningConfig(0.2, max_pattern_events=3))
    doc = json.loads(dump_json(r.hlh1, r.levels))
    assert doc["HLH1"]["EH"]["TOn"] == [2, 4]
    assert doc["levels"][0]["k"] == 2
    assert "SOn C TOn" in doc["levels"][0]["PH"]
