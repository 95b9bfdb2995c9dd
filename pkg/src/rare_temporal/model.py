"""Events, intervals, relations and temporal patterns.

Timestamps are integer ticks. Symbols are plain interned strings such as
``"SOn"``; a symbol label doubles as its identifier.
"""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence

_FORBIDDEN_IN_LABEL = (" ", "\t", "\n", ";")


def check_label(label: str) -> str:
    if not label or any(ch in label for ch in _FORBIDDEN_IN_LABEL):
        raise ValueError(f"invalid symbol label {label!r}")
    return sys.intern(label)


class Interval(NamedTuple):
    start: int
    end: int

    @property
    def duration(self) -> int:
        return self.end - self.start


class EventInstance(NamedTuple):
    """One occurrence of a symbol over ``[start, end]``.

    Stored flat (not as symbol + Interval) because the miner reads the
    endpoints in its innermost loops.
    """

    symbol: str
    start: int
    end: int

    @classmethod
    def make(cls, symbol: str, start: int, end: int) -> "EventInstance":
        if not start < end:
            raise ValueError(f"instance {symbol} needs start < end, got [{start}, {end}]")
        return cls(check_label(symbol), int(start), int(end))

    @property
    def interval(self) -> Interval:
        return Interval(self.start, self.end)

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class TemporalEvent:
    """A symbol together with every interval during which it holds."""

    symbol: str
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = self.intervals
        for a, b in zip(ivs, ivs[1:]):
            if not a.end < b.start:
                raise ValueError(f"intervals of {self.symbol} must be disjoint and sorted")
        for iv in ivs:
            if not iv.start < iv.end:
                raise ValueError(f"empty interval {iv} for {self.symbol}")

    @classmethod
    def from_instances(cls, instances: Iterable[EventInstance]) -> dict[str, "TemporalEvent"]:
        by_symbol: dict[str, list[Interval]] = {}
        for inst in instances:
            by_symbol.setdefault(inst.symbol, []).append(inst.interval)
        return {s: cls(s, tuple(sorted(ivs))) for s, ivs in by_symbol.items()}

    def instances(self) -> list[EventInstance]:
        return [EventInstance(self.symbol, iv.start, iv.end) for iv in self.intervals]


class Relation(enum.IntEnum):
    # the integer order is the canonical tie-break order
    FOLLOWS = 0
    CONTAINS = 1
    OVERLAPS = 2

    def __bool__(self) -> bool:
        # FOLLOWS is 0; a found relation should never test false
        return True

    @property
    def code(self) -> str:
        return "FCO"[self]

    @property
    def glyph(self) -> str:
        return ("→", "≽", "≬")[self]

    @classmethod
    def from_code(cls, code: str) -> "Relation":
        try:
            return cls("FCO".index(code))
        except ValueError:
            raise ValueError(f"unknown relation code {code!r}") from None


@dataclass(frozen=True)
class RelationConfig:
    """Tolerance buffer ``epsilon`` and minimal overlap ``d_overlap``, in ticks."""

    epsilon: int = 0
    d_overlap: int = 1

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.d_overlap <= 0:
            raise ValueError("d_overlap must be > 0")
        if not self.d_overlap > 2 * self.epsilon:
            raise ValueError("d_overlap must exceed 2 * epsilon")


# Raw predicates, evaluated independently of each other. classify_relation
# layers the precedence order on top of them.

def follows(a: EventInstance, b: EventInstance, cfg: RelationConfig) -> bool:
    return a.end - cfg.epsilon <= b.start


def contains(a: EventInstance, b: EventInstance, cfg: RelationConfig) -> bool:
    return a.start <= b.start and a.end + cfg.epsilon >= b.end


def overlaps(a: EventInstance, b: EventInstance, cfg: RelationConfig) -> bool:
    return (
        a.start < b.start
        and a.end + cfg.epsilon < b.end
        and a.end - b.start >= cfg.d_overlap + cfg.epsilon
    )


def classify_relation(a: EventInstance, b: EventInstance, cfg: RelationConfig) -> Optional[Relation]:
    """Relation between ``a`` and a chronologically later (or equal-start) ``b``.

    Contains is tested first, then Overlaps, then Follows; ``None`` when no
    relation holds.
    """
    a_start, a_end = a.start, a.end
    b_start, b_end = b.start, b.end
    if a_start > b_start:
        raise ValueError(f"instances out of order: {a} starts after {b}")
    eps = cfg.epsilon
    if a_end + eps >= b_end:
        return Relation.CONTAINS
    if a_start < b_start and a_end - b_start >= cfg.d_overlap + eps:
        # a_end + eps < b_end holds here since Contains failed
        return Relation.OVERLAPS
    if a_end - eps <= b_start:
        return Relation.FOLLOWS
    return None


@dataclass(frozen=True)
class RelationTriple:
    relation: Relation
    left: str
    right: str

    def render(self) -> str:
        return f"{self.left} {self.relation.code} {self.right}"


@lru_cache(maxsize=None)
def pair_order(n: int) -> tuple[tuple[int, int], ...]:
    """Event-position pairs ``(i, j)``, ``i < j``, in lexicographic order."""
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def _pair_slot(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pair_order(n))}


@dataclass(frozen=True)
class TemporalPattern:
    """``n`` events in chronological order plus one relation per event pair.

    ``relations`` follows :func:`pair_order`: (0,1), (0,2), ..., (1,2), ...
    """

    events: tuple[str, ...]
    relations: tuple[Relation, ...]

    def __post_init__(self):
        n = len(self.events)
        if n < 2:
            raise ValueError("a temporal pattern needs at least 2 events")
        if len(self.relations) != n * (n - 1) // 2:
            raise ValueError(f"{n}-event pattern needs {n * (n - 1) // 2} relations, got {len(self.relations)}")

    @classmethod
    def pair(cls, relation: Relation, left: str, right: str) -> "TemporalPattern":
        return cls((left, right), (Relation(relation),))

    @classmethod
    def from_triples(cls, triples: Sequence[RelationTriple]) -> "TemporalPattern":
        """Rebuild a pattern from its lexicographically ordered triple list."""
        m = len(triples)
        n = 2
        while n * (n - 1) // 2 < m:
            n += 1
        if n * (n - 1) // 2 != m:
            raise ValueError(f"{m} triples do not describe a complete pattern")
        events: list[Optional[str]] = [None] * n
        for (i, j), t in zip(pair_order(n), triples):
            for pos, sym in ((i, t.left), (j, t.right)):
                if events[pos] is None:
                    events[pos] = sym
                elif events[pos] != sym:
                    raise ValueError(f"inconsistent symbol at event {pos}: {events[pos]} vs {sym}")
        return cls(tuple(events), tuple(Relation(t.relation) for t in triples))

    @classmethod
    def from_key(cls, key: str) -> "TemporalPattern":
        triples = []
        for part in key.split(";"):
            left, code, right = part.split(" ")
            triples.append(RelationTriple(Relation.from_code(code), left, right))
        return cls.from_triples(triples)

    @property
    def size(self) -> int:
        return len(self.events)

    @property
    def triples(self) -> tuple[RelationTriple, ...]:
        ev = self.events
        return tuple(
            RelationTriple(r, ev[i], ev[j]) for (i, j), r in zip(pair_order(len(ev)), self.relations)
        )

    def relation(self, i: int, j: int) -> Relation:
        return self.relations[_pair_slot(len(self.events))[(i, j)]]

    @property
    def key(self) -> str:
        return canonical_pattern_key(self)

    def extend(self, symbol: str, to_new: Sequence[Relation]) -> "TemporalPattern":
        """Append ``symbol`` as the chronologically last event.

        ``to_new[i]`` is the relation between event ``i`` and the new event.
        """
        n = len(self.events)
        if len(to_new) != n:
            raise ValueError("need one relation per existing event")
        rels: list[Relation] = []
        old = iter(self.relations)
        for i in range(n):
            rels.extend(next(old) for _ in range(n - 1 - i))
            rels.append(Relation(to_new[i]))
        return TemporalPattern(self.events + (symbol,), tuple(rels))

    def sub_pattern(self, keep: Sequence[int]) -> "TemporalPattern":
        """Restrict to the events at positions ``keep`` (ascending)."""
        keep = tuple(keep)
        slot = _pair_slot(len(self.events))
        rels = tuple(self.relations[slot[(keep[a], keep[b])]] for a, b in pair_order(len(keep)))
        return TemporalPattern(tuple(self.events[i] for i in keep), rels)

    def drop(self, index: int) -> "TemporalPattern":
        return self.sub_pattern([i for i in range(len(self.events)) if i != index])

    def render(self) -> str:
        """Human-readable chain using the relation glyphs."""
        return "; ".join(f"{t.left} {t.relation.glyph} {t.right}" for t in self.triples)


def canonical_pattern_key(p: TemporalPattern) -> str:
    """Stable text key: ``"S C T;S C W;T C W"``.

    Injective because labels cannot contain spaces or semicolons and the
    triple count fixes the number of events.
    """
    return ";".join(t.render() for t in p.triples)
