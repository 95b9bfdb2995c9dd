"""Hierarchical lookup hash tables.

``HLH1`` indexes single events: symbol -> increasing sequence ids (EH) and
(symbol, sequence id) -> instances (SH).

``HLHk`` indexes k-event groups: group -> (sequence ids, pattern keys)
(EH_k), pattern key -> supporting sequence ids (PH_k) and
(pattern key, sequence id) -> instance bindings (SH_k).
"""
from __future__ import annotations

import json
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import EventInstance, TemporalPattern, canonical_pattern_key

Binding = tuple[EventInstance, ...]


def intersect_sorted(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Linear merge of two strictly increasing id lists."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            out.append(x)
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return out


def _contains_sorted(xs: Sequence[int], x: int) -> bool:
    i = bisect_left(xs, x)
    return i < len(xs) and xs[i] == x


class FrozenError(RuntimeError):
    pass


class HLH1:
    def __init__(self):
        self.event_table: dict[str, list[int]] = {}
        self.sequence_table: dict[tuple[str, int], tuple[EventInstance, ...]] = {}
        self.frozen = False

    def insert(self, symbol: str, seq_id: int, instances: Iterable[EventInstance]) -> None:
        if self.frozen:
            raise FrozenError("HLH1 is frozen")
        postings = self.event_table.setdefault(symbol, [])
        if postings and seq_id <= postings[-1]:
            raise ValueError(f"out-of-order insert for {symbol}: {seq_id} after {postings[-1]}")
        insts = tuple(sorted(instances, key=lambda i: (i.start, i.end)))
        if not insts:
            raise ValueError("cannot post an event without instances")
        postings.append(seq_id)
        self.sequence_table[(symbol, seq_id)] = insts

    def sequences(self, symbol: str) -> list[int]:
        return self.event_table.get(symbol, [])

    def support(self, symbol: str) -> int:
        return len(self.event_table.get(symbol, ()))

    def instances(self, symbol: str, seq_id: int) -> tuple[EventInstance, ...]:
        return self.sequence_table.get((symbol, seq_id), ())

    def symbols(self) -> list[str]:
        return sorted(self.event_table)

    def freeze(self) -> "HLH1":
        self.frozen = True
        return self

    def __contains__(self, symbol) -> bool:
        return symbol in self.event_table

    def __len__(self):
        return len(self.event_table)

    def to_dict(self) -> dict:
        return {
            "EH": {s: list(ids) for s, ids in sorted(self.event_table.items())},
            "SH": {
                f"{s}@{sid}": [[i.start, i.end] for i in insts]
                for (s, sid), insts in sorted(self.sequence_table.items())
            },
        }


@dataclass
class GroupEntry:
    sequences: list[int]
    patterns: list[str] = field(default_factory=list)


class HLHk:
    """Level-k structure. ``keep_all_bindings=False`` keeps one witness per
    (pattern, sequence); extending patterns to level k+1 needs them all."""

    def __init__(self, k: int, keep_all_bindings: bool = False):
        if k < 2:
            raise ValueError("HLHk is for k >= 2")
        self.k = k
        self.keep_all_bindings = keep_all_bindings
        self.group_table: dict[tuple[str, ...], GroupEntry] = {}
        self.pattern_table: dict[str, list[int]] = {}
        self.binding_table: dict[tuple[str, int], list[Binding]] = {}
        self.pattern_objects: dict[str, TemporalPattern] = {}
        self.frozen = False
        self._sibling_index: dict[tuple[str, ...], dict] = {}

    def _check_writable(self):
        if self.frozen:
            raise FrozenError(f"HLH{self.k} is frozen")

    def register_group(self, group: Sequence[str], sequences: Sequence[int]) -> None:
        self._check_writable()
        group = tuple(group)
        if len(group) != self.k:
            raise ValueError(f"group {group} does not have {self.k} events")
        seqs = list(sequences)
        if any(a >= b for a, b in zip(seqs, seqs[1:])):
            raise ValueError("group sequence ids must be strictly increasing")
        if group in self.group_table:
            raise ValueError(f"group {group} already registered")
        self.group_table[group] = GroupEntry(seqs)

    def store_pattern(self, group: Sequence[str], pattern: TemporalPattern, seq_id: int,
                      bindings: Iterable[Binding]) -> str:
        self._check_writable()
        group = tuple(group)
        entry = self.group_table.get(group)
        if entry is None:
            raise KeyError(f"group {group} is not registered")
        if pattern.events != group:
            raise ValueError(f"pattern events {pattern.events} do not match group {group}")
        if not _contains_sorted(entry.sequences, seq_id):
            raise ValueError(f"sequence {seq_id} does not support group {group}")
        key = canonical_pattern_key(pattern)
        seqs = self.pattern_table.get(key)
        if seqs is None:
            seqs = self.pattern_table[key] = []
            entry.patterns.append(key)
            self.pattern_objects[key] = pattern
        if not seqs or seqs[-1] < seq_id:
            seqs.append(seq_id)
        elif not _contains_sorted(seqs, seq_id):
            insort(seqs, seq_id)
        stored = self.binding_table.setdefault((key, seq_id), [])
        for b in bindings:
            b = tuple(b)
            if len(b) != self.k:
                raise ValueError("binding size does not match k")
            if stored and not self.keep_all_bindings:
                break
            if b not in stored:
                stored.append(b)
        if not stored:
            raise ValueError("a stored pattern needs at least one binding per sequence")
        return key

    def group_sequences(self, group: Sequence[str]) -> list[int]:
        entry = self.group_table.get(tuple(group))
        return entry.sequences if entry is not None else []

    def groups(self) -> list[tuple[str, ...]]:
        return list(self.group_table)

    def patterns_of(self, group: Sequence[str]) -> list[str]:
        entry = self.group_table.get(tuple(group))
        return entry.patterns if entry is not None else []

    def pattern(self, key: str) -> TemporalPattern:
        return self.pattern_objects[key]

    def pattern_sequences(self, key: str) -> list[int]:
        return self.pattern_table.get(key, [])

    def bindings(self, key: str, seq_id: int) -> list[Binding]:
        return self.binding_table.get((key, seq_id), [])

    def siblings(self, group: Sequence[str], head: tuple) -> list[str]:
        """Patterns of ``group`` whose relations among all but the last event equal ``head``."""
        group = tuple(group)
        idx = self._sibling_index.get(group)
        if idx is None:
            idx = {}
            keep = range(len(group) - 1)
            for key in self.patterns_of(group):
                p = self.pattern_objects[key]
                h = p.sub_pattern(keep).relations if len(group) > 2 else ()
                idx.setdefault(h, []).append(key)
            if self.frozen:
                self._sibling_index[group] = idx
        return idx.get(head, [])

    def freeze(self) -> "HLHk":
        self.frozen = True
        return self

    def __contains__(self, key) -> bool:
        return key in self.pattern_table

    def __len__(self):
        return len(self.pattern_table)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "EH": {
                ",".join(g): {"sequences": e.sequences, "patterns": e.patterns}
                for g, e in self.group_table.items()
            },
            "PH": {key: seqs for key, seqs in self.pattern_table.items()},
            "SH": {
                f"{key}@{sid}": [[[i.symbol, i.start, i.end] for i in b] for b in bs]
                for (key, sid), bs in self.binding_table.items()
            },
        }


def dump_json(hlh1: HLH1, levels: Sequence[HLHk], indent: Optional[int] = 2) -> str:
    """Debug dump of every table."""
    doc = {"HLH1": hlh1.to_dict(), "levels": [h.to_dict() for h in levels]}
    return json.dumps(doc, indent=indent, ensure_ascii=False)
