"""Brute-force reference miner.

Shares nothing with :mod:`rare_temporal.miner` except the relation
classifier and the pattern types. Two enumeration strategies:

``"bindings"``
    walk every tuple of distinct instances with non-decreasing start
    times in every sequence and record the pattern it realizes;
``"exhaustive"``
    enumerate every symbol tuple and every relation assignment and test
    each candidate against every sequence directly.

Both are exponential and guarded by a work budget.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import perm
from typing import Optional

from .model import EventInstance, Relation, RelationConfig, TemporalPattern, classify_relation, pair_order
from .transform import SequenceDatabase, TemporalSequence


class OracleBudgetExceeded(RuntimeError):
    pass


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def sequence_supports(seq: TemporalSequence, pattern: TemporalPattern, rc: RelationConfig) -> bool:
    """Direct check: is there a binding of ``pattern`` in ``seq``?"""
    insts = seq.instances
    n = pattern.size
    if len(insts) < 2:
        return False
    pools = [[i for i in insts if i.symbol == s] for s in pattern.events]
    pairs = pair_order(n)

    def search(chosen: list[EventInstance]) -> bool:
        pos = len(chosen)
        if pos == n:
            return True
        for cand in pools[pos]:
            if cand in chosen:
                continue
            if chosen and cand.start < chosen[-1].start:
                continue
            ok = True
            for (i, j), r in zip(pairs, pattern.relations):
                if j == pos and classify_relation(chosen[i], cand, rc) is not r:
                    ok = False
                    break
            if ok and search(chosen + [cand]):
                return True
        return False

    return search([])


def _bindings_table(db: SequenceDatabase, rc: RelationConfig, max_events: int) -> dict[TemporalPattern, set[int]]:
    table: dict[TemporalPattern, set[int]] = {}
    for seq in db:
        insts = seq.instances
        if len(insts) < 2:
            continue
        seen: set[tuple] = set()

        def grow(idx: list[int], rels: list[list[Relation]]):
            # rels[j] holds relations (i, j) for i < j
            if len(idx) >= 2:
                flat = tuple(rels[j][i] for i, j in pair_order(len(idx)))
                events = tuple(insts[i].symbol for i in idx)
                sig = (events, flat)
                if sig not in seen:
                    seen.add(sig)
                    table.setdefault(TemporalPattern(events, flat), set()).add(seq.id)
            if len(idx) == max_events:
                return
            last_start = insts[idx[-1]].start if idx else None
            for c in range(len(insts)):
                if c in idx:
                    continue
                cand = insts[c]
                if last_start is not None and cand.start < last_start:
                    continue
                to_c = []
                for i in idx:
                    r = classify_relation(insts[i], cand, rc)
                    if r is None:
                        break
                    to_c.append(r)
                else:
                    grow(idx + [c], rels + [to_c])

        grow([], [])
    return table


def _exhaustive_table(db: SequenceDatabase, rc: RelationConfig, max_events: int) -> dict[TemporalPattern, set[int]]:
    alphabet = sorted(db.alphabet)
    table: dict[TemporalPattern, set[int]] = {}
    for n in range(2, max_events + 1):
        n_rel = n * (n - 1) // 2
        for events in itertools.product(alphabet, repeat=n):
            holders = [s for s in db if all(e in s.symbols for e in events)]
            if not holders:
                continue
            for rels in itertools.product(list(Relation), repeat=n_rel):
                p = TemporalPattern(events, rels)
                ids = {s.id for s in holders if sequence_supports(s, p, rc)}
                if ids:
                    table[p] = ids
    return table


def _budget_cost(db: SequenceDatabase, max_events: int, method: str) -> int:
    if method == "bindings":
        return sum(perm(len(s), min(k, len(s))) for s in db for k in range(2, max_events + 1))
    m = len(db.alphabet)
    return sum(m ** k * 3 ** (k * (k - 1) // 2) for k in range(2, max_events + 1)) * max(len(db), 1)


def pattern_support_table(db: SequenceDatabase, rc: RelationConfig, max_events: Optional[int] = 5,
                          method: str = "bindings", budget: int = 5_000_000) -> dict[TemporalPattern, set[int]]:
    """Every pattern with nonzero support, mapped to its supporting sequence ids."""
    if max_events is None:
        max_events = max((len(s) for s in db), default=2)
    max_events = max(max_events, 2)
    if method not in ("bindings", "exhaustive"):
        raise ValueError(f"unknown oracle method {method!r}")
    cost = _budget_cost(db, max_events, method)
    if cost > budget:
        raise OracleBudgetExceeded(f"oracle work estimate {cost} exceeds budget {budget}")
    if method == "bindings":
        return _bindings_table(db, rc, max_events)
    return _exhaustive_table(db, rc, max_events)


def event_supports(db: SequenceDatabase) -> dict[str, int]:
    counts: dict[str, int] = {}
    for seq in db:
        for s in {i.symbol for i in seq.instances}:
            counts[s] = counts.get(s, 0) + 1
    return counts


def filter_table(db: SequenceDatabase, table: dict[TemporalPattern, set[int]], sigma_min, sigma_max, delta):
    """Apply the rare-pattern thresholds; returns (pattern, ids, supp_frac, conf) rows sorted by level, key."""
    n = len(db)
    lo, hi, d = _frac(sigma_min), _frac(sigma_max), _frac(delta)
    ev = event_supports(db)
    rows = []
    for p, ids in table.items():
        supp = Fraction(len(ids), n)
        conf = Fraction(len(ids), max(ev[e] for e in p.events))
        if lo <= supp <= hi and conf >= d:
            rows.append((p, tuple(sorted(ids)), supp, conf))
    rows.sort(key=lambda r: (r[0].size, r[0].key))
    return rows


def oracle_mine(db: SequenceDatabase, cfg, method: str = "bindings", budget: int = 5_000_000):
    """Reference answer for ``cfg`` (a MiningConfig); returns MinedPattern objects."""
    from .miner import MinedPattern

    if len(db) == 0:
        return []
    table = pattern_support_table(db, cfg.relation, cfg.max_pattern_events, method, budget)
    return [
        MinedPattern(p, len(ids), float(supp), float(conf), ids)
        for p, ids, supp, conf in filter_table(db, table, cfg.sigma_min, cfg.sigma_max, cfg.delta)
    ]
