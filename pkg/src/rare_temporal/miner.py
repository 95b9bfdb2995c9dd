"""Level-wise rare temporal pattern mining over hierarchical lookup hash tables.

Level 1 keeps events with support >= sigma_min. Level 2 pairs them up,
filters pairs on support and all-confidence, then classifies instance pairs
inside every shared sequence. Level k >= 3 extends each stored
(k-1)-pattern with one more event that comes chronologically last.

A sequence supports a pattern when some tuple of distinct instances, with
non-decreasing start times and the pattern's symbols in order, realizes
every pairwise relation of the pattern.
"""
from __future__ import annotations

import enum
import math
import time
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .hlh import HLH1, Binding, HLHk, intersect_sorted
from .model import Relation, RelationConfig, TemporalPattern, classify_relation
from .transform import SequenceDatabase


class Pruning(str, enum.Enum):
    NONE = "none"
    APRIORI = "apriori"
    TRANS = "trans"
    ALL = "all"

    @property
    def apriori(self) -> bool:
        return self in (Pruning.APRIORI, Pruning.ALL)

    @property
    def trans(self) -> bool:
        return self in (Pruning.TRANS, Pruning.ALL)


def as_fraction(x) -> Fraction:
    # str() first so 0.2 becomes 1/5, not its binary float expansion
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class MiningConfig:
    sigma_min: float
    sigma_max: float = 1.0
    delta: float = 0.0
    relation: RelationConfig = field(default_factory=RelationConfig)
    max_pattern_events: Optional[int] = 5
    pruning: Pruning = Pruning.ALL
    strict_siblings: bool = False
    keep_all_witnesses: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pruning", Pruning(self.pruning))
        if not 0 < self.sigma_min <= 1:
            raise ValueError("sigma_min must lie in (0, 1]")
        if not 0 < self.sigma_max <= 1:
            raise ValueError("sigma_max must lie in (0, 1]")
        if self.sigma_min > self.sigma_max:
            raise ValueError("sigma_min must not exceed sigma_max")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.max_pattern_events is not None and self.max_pattern_events < 2:
            raise ValueError("max_pattern_events must be >= 2 (or None for unbounded)")


class Thresholds:
    """Support bounds as sequence counts and an exact confidence test."""

    def __init__(self, n_sequences: int, cfg: MiningConfig):
        self.n = n_sequences
        self.min_count = math.ceil(as_fraction(cfg.sigma_min) * n_sequences)
        self.max_count = math.floor(as_fraction(cfg.sigma_max) * n_sequences)
        d = as_fraction(cfg.delta)
        self._dn, self._dd = d.numerator, d.denominator

    def confident(self, supp: int, max_event_supp: int) -> bool:
        return supp * self._dd >= self._dn * max_event_supp

    def frequent(self, supp: int) -> bool:
        return supp >= self.min_count

    def rare(self, supp: int) -> bool:
        return self.min_count <= supp <= self.max_count


@dataclass(frozen=True)
class MinedPattern:
    pattern: TemporalPattern
    support_count: int
    support_frac: float
    confidence: float
    supporting_sequences: tuple[int, ...]
    witness: Optional[dict[int, tuple[Binding, ...]]] = None

    @property
    def key(self) -> str:
        return self.pattern.key

    @property
    def level(self) -> int:
        return self.pattern.size


@dataclass
class LevelStats:
    level: int
    groups_generated: int = 0
    groups_evaluated: int = 0
    pattern_candidates: int = 0
    patterns_stored: int = 0
    patterns_emitted: int = 0
    seconds: float = 0.0

    @property
    def candidates(self) -> int:
        """Candidate groups whose patterns were actually examined."""
        return self.groups_evaluated


@dataclass
class MiningResult:
    patterns: list[MinedPattern]
    stats: list[LevelStats]
    hlh1: HLH1
    levels: list[HLHk]

    def keys(self) -> set[str]:
        return {p.key for p in self.patterns}

    def level_stats(self, level: int) -> Optional[LevelStats]:
        for s in self.stats:
            if s.level == level:
                return s
        return None


def support(db: SequenceDatabase, events: Sequence[str]) -> int:
    """Number of sequences holding at least one instance of every listed symbol."""
    if not events:
        raise ValueError("support needs at least one event")
    need = set(events)
    return sum(1 for syms in db.symbol_sets() if need <= syms)


def confidence(db: SequenceDatabase, pattern_support: int, events: Sequence[str]) -> float:
    """All-confidence: pattern support over the largest single-event support."""
    supports = [support(db, [e]) for e in events]
    if not supports or min(supports) == 0:
        raise ValueError("confidence is undefined when an event has zero support")
    return pattern_support / max(supports)


def mine_single_events(db: SequenceDatabase, cfg: MiningConfig,
                       stats: Optional[list[LevelStats]] = None) -> HLH1:
    """Post every event with support >= sigma_min into a fresh HLH1.

    Neither sigma_max nor delta applies to single events.
    """
    t0 = time.perf_counter()
    th = Thresholds(len(db), cfg)
    per_symbol: dict[str, list[tuple[int, list]]] = defaultdict(list)
    for seq in db:
        grouped: dict[str, list] = {}
        for inst in seq.instances:
            grouped.setdefault(inst.symbol, []).append(inst)
        for sym, insts in grouped.items():
            per_symbol[sym].append((seq.id, insts))
    hlh1 = HLH1()
    for sym in sorted(per_symbol):
        rows = per_symbol[sym]
        if th.frequent(len(rows)):
            for sid, insts in rows:
                hlh1.insert(sym, sid, insts)
    hlh1.freeze()
    if stats is not None:
        stats.append(LevelStats(1, groups_generated=len(per_symbol), groups_evaluated=len(per_symbol),
                                patterns_stored=len(hlh1), seconds=time.perf_counter() - t0))
    return hlh1


def _max_support(hlh1: HLH1, events: Sequence[str]) -> int:
    return max(hlh1.support(e) for e in events)


def mine_pairs(db: SequenceDatabase, cfg: MiningConfig, hlh1: HLH1,
               stats: Optional[LevelStats] = None) -> HLHk:
    """Register every ordered event pair (self-pairs included) worth scanning.

    With Apriori pruning a pair must reach sigma_min and delta on its own;
    otherwise any pair sharing a sequence is kept. sigma_max never applies.
    """
    th = Thresholds(len(db), cfg)
    hlh2 = HLHk(2, keep_all_bindings=True)
    events = hlh1.symbols()
    for a in events:
        sa = hlh1.sequences(a)
        for b in events:
            if stats is not None:
                stats.groups_generated += 1
            seqs = sa if a == b else intersect_sorted(sa, hlh1.sequences(b))
            if not seqs:
                continue
            if cfg.pruning.apriori and not (
                th.frequent(len(seqs)) and th.confident(len(seqs), _max_support(hlh1, (a, b)))
            ):
                continue
            if stats is not None:
                stats.groups_evaluated += 1
            hlh2.register_group((a, b), seqs)
    return hlh2


def _qualifies(th: Thresholds, cfg: MiningConfig, supp: int, max_event_supp: int) -> bool:
    # what a level structure keeps: sigma_min always, delta only when
    # confidence-based pruning is switched on
    if not th.frequent(supp):
        return False
    return th.confident(supp, max_event_supp) if cfg.pruning.trans else True


def _finish_level(db, cfg, th, hlh1, hlh_k, found, stats) -> list[MinedPattern]:
    """Store qualifying patterns of one group and emit the rare ones.

    ``found`` maps pattern -> {seq_id: [bindings]}.
    """
    n = len(db)
    emitted = []
    for pattern, per_seq in found.items():
        supp = len(per_seq)
        max_e = _max_support(hlh1, pattern.events)
        if stats is not None:
            stats.pattern_candidates += 1
        if not _qualifies(th, cfg, supp, max_e):
            continue
        seqs = sorted(per_seq)
        for sid in seqs:
            hlh_k.store_pattern(pattern.events, pattern, sid, per_seq[sid])
        if stats is not None:
            stats.patterns_stored += 1
        if th.rare(supp) and th.confident(supp, max_e):
            if cfg.keep_all_witnesses:
                witness = {sid: tuple(per_seq[sid]) for sid in seqs}
            else:
                witness = {sid: (per_seq[sid][0],) for sid in seqs}
            emitted.append(MinedPattern(pattern, supp, supp / n, supp / max_e, tuple(seqs), witness))
    if stats is not None:
        stats.patterns_emitted += len(emitted)
    return emitted


def mine_2event_patterns(db: SequenceDatabase, cfg: MiningConfig, hlh1: HLH1, hlh2: HLHk,
                         stats: Optional[LevelStats] = None) -> list[MinedPattern]:
    """Classify instance pairs of every registered pair and fill PH_2 / SH_2."""
    th = Thresholds(len(db), cfg)
    rc = cfg.relation
    out = []
    for a, b in hlh2.groups():
        found: dict[TemporalPattern, dict[int, list[Binding]]] = {}
        by_rel: dict[Relation, dict[int, list[Binding]]] = defaultdict(dict)
        for sid in hlh2.group_sequences((a, b)):
            ia = hlh1.instances(a, sid)
            ib = hlh1.instances(b, sid)
            for x in ia:
                lo = bisect_left(ib, x.start, key=_start)
                for y in ib[lo:]:
                    if x == y:
                        continue
                    r = classify_relation(x, y, rc)
                    if r is not None:
                        by_rel[r].setdefault(sid, []).append((x, y))
        for r in sorted(by_rel):
            found[TemporalPattern((a, b), (r,))] = by_rel[r]
        out.extend(_finish_level(db, cfg, th, hlh1, hlh2, found, stats))
    hlh2.freeze()
    return out


def _start(inst) -> int:
    return inst.start


def _extend_by_scan(hlh_prev: HLHk, hlh1: HLH1, group, new_event, group_seqs, rc):
    """Extend every stored pattern of ``group`` with ``new_event`` by
    classifying each later instance against each full binding."""
    found: dict[tuple[str, tuple], dict[int, list[Binding]]] = {}
    for key in hlh_prev.patterns_of(group):
        for sid in intersect_sorted(hlh_prev.pattern_sequences(key), group_seqs):
            news = hlh1.instances(new_event, sid)
            for b in hlh_prev.bindings(key, sid):
                last = b[-1].start
                for c in news[bisect_left(news, last, key=_start):]:
                    if c in b:
                        continue
                    rels = []
                    for x in b:
                        r = classify_relation(x, c, rc)
                        if r is None:
                            break
                        rels.append(r)
                    else:
                        found.setdefault((key, tuple(rels)), {}).setdefault(sid, []).append(b + (c,))
    return found


def _head(p: TemporalPattern) -> tuple:
    """Relations among all but the last event."""
    return p.sub_pattern(range(p.size - 1)).relations if p.size > 2 else ()


def _extend_verified(hlh_prev: HLHk, hlh1: HLH1, hlh2: HLHk, group, new_event, group_seqs, rc,
                     th: Thresholds, strict: bool):
    """Extension guided by the stored sub-patterns.

    For a stored (k-1)-pattern p, the new triple (last event, new event)
    must be stored at level 2, and the sibling pattern over
    (E_1..E_{k-2}, E_new) sharing p's head must be stored at level k-1.
    Only the combinations surviving both checks get their support counted.
    """
    found: dict[tuple[str, tuple], dict[int, list[Binding]]] = {}
    last_sym = group[-1]
    sib_group = group[:-1] + (new_event,)
    triple_seqs = {}
    for r in Relation:
        tkey = f"{last_sym} {r.code} {new_event}"
        if tkey in hlh2:
            triple_seqs[r] = hlh2.pattern_sequences(tkey)
    if not triple_seqs:
        return found
    for key in hlh_prev.patterns_of(group):
        p = hlh_prev.pattern(key)
        p_seqs = intersect_sorted(hlh_prev.pattern_sequences(key), group_seqs)
        sibs = hlh_prev.siblings(sib_group, _head(p))
        if not sibs:
            continue
        cand: dict[tuple, list[int]] = {}
        for skey in sibs:
            sp = hlh_prev.pattern(skey)
            m = sp.size - 1
            to_new = tuple(sp.relation(i, m) for i in range(m))
            s_seqs = intersect_sorted(p_seqs, hlh_prev.pattern_sequences(skey))
            for r, t_seqs in triple_seqs.items():
                rels = to_new + (r,)
                if strict and not all(
                    p.extend(new_event, rels).drop(i).key in hlh_prev for i in range(m)
                ):
                    continue
                seqs = intersect_sorted(s_seqs, t_seqs)
                if th.frequent(len(seqs)):
                    cand[rels] = seqs
        if not cand:
            continue
        allowed_last = {rels[-1] for rels in cand}
        scan = sorted(set().union(*cand.values()))
        for sid in scan:
            news = hlh1.instances(new_event, sid)
            for b in hlh_prev.bindings(key, sid):
                tail = b[-1]
                for c in news[bisect_left(news, tail.start, key=_start):]:
                    if c in b:
                        continue
                    r_last = classify_relation(tail, c, rc)
                    if r_last not in allowed_last:
                        continue
                    rels = []
                    for x in b[:-1]:
                        r = classify_relation(x, c, rc)
                        if r is None:
                            break
                        rels.append(r)
                    else:
                        rels = tuple(rels) + (r_last,)
                        if rels in cand:
                            found.setdefault((key, rels), {}).setdefault(sid, []).append(b + (c,))
    return found


def mine_k_event_level(db: SequenceDatabase, cfg: MiningConfig, hlh_prev: HLHk, hlh1: HLH1, k: int,
                       hlh2: Optional[HLHk] = None, stats: Optional[LevelStats] = None,
                       workers: int = 1) -> tuple[HLHk, list[MinedPattern]]:
    """Build HLH_k from HLH_{k-1} and return it with the rare k-event patterns."""
    if k < 3 or hlh_prev.k != k - 1:
        raise ValueError("mine_k_event_level needs k >= 3 and the level k-1 structure")
    mode = cfg.pruning
    if mode.trans and hlh2 is None:
        raise ValueError("transitivity pruning needs the level-2 structure")
    th = Thresholds(len(db), cfg)
    rc = cfg.relation
    hlh_k = HLHk(k, keep_all_bindings=True)
    base = [g for g in hlh_prev.groups() if hlh_prev.patterns_of(g)]
    if mode.trans:
        present = {s for g in base for s in g}
        new_events = [s for s in hlh1.symbols() if s in present]
    else:
        new_events = hlh1.symbols()
    tasks = []
    for g in base:
        g_seqs = hlh_prev.group_sequences(g)
        for e in new_events:
            if stats is not None:
                stats.groups_generated += 1
            seqs = intersect_sorted(g_seqs, hlh1.sequences(e))
            if not seqs:
                continue
            group = g + (e,)
            if mode.apriori and not (th.frequent(len(seqs)) and th.confident(len(seqs), _max_support(hlh1, group))):
                continue
            if stats is not None:
                stats.groups_evaluated += 1
            tasks.append((g, e, seqs))

    def extend(task):
        g, e, seqs = task
        if mode.trans:
            return _extend_verified(hlh_prev, hlh1, hlh2, g, e, seqs, rc, th, cfg.strict_siblings)
        return _extend_by_scan(hlh_prev, hlh1, g, e, seqs, rc)

    # previous levels are frozen, so groups can be extended concurrently;
    # results are merged in task order
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raws = pool.map(extend, tasks)
            results = list(raws)
    else:
        results = map(extend, tasks)
    out = []
    for (g, e, seqs), raw in zip(tasks, results):
        hlh_k.register_group(g + (e,), seqs)
        found = {hlh_prev.pattern(key).extend(e, rels): per_seq for (key, rels), per_seq in raw.items()}
        out.extend(_finish_level(db, cfg, th, hlh1, hlh_k, found, stats))
    hlh_k.freeze()
    return hlh_k, out


def _sort_key(mp: MinedPattern):
    return (mp.level, mp.key)


def mine(db: SequenceDatabase, cfg: MiningConfig, workers: int = 1) -> MiningResult:
    """Mine every rare temporal pattern of ``db``, level by level.

    ``workers > 1`` extends the candidate groups of each level on a thread
    pool; the output does not depend on it.
    """
    stats: list[LevelStats] = []
    levels: list[HLHk] = []
    if len(db) == 0:
        return MiningResult([], stats, HLH1().freeze(), levels)
    hlh1 = mine_single_events(db, cfg, stats)
    cap = cfg.max_pattern_events

    t0 = time.perf_counter()
    st = LevelStats(2)
    hlh2 = mine_pairs(db, cfg, hlh1, st)
    patterns = mine_2event_patterns(db, cfg, hlh1, hlh2, st)
    st.seconds = time.perf_counter() - t0
    stats.append(st)
    levels.append(hlh2)

    k = 3
    prev = hlh2
    while (cap is None or k <= cap) and len(prev):
        t0 = time.perf_counter()
        st = LevelStats(k)
        prev, found = mine_k_event_level(db, cfg, prev, hlh1, k, hlh2=hlh2, stats=st, workers=workers)
        st.seconds = time.perf_counter() - t0
        stats.append(st)
        levels.append(prev)
        patterns.extend(found)
        k += 1
    patterns.sort(key=_sort_key)
    return MiningResult(patterns, stats, hlh1, levels)
