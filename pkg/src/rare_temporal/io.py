"""CSV ingestion, sequence-database files and pattern reports."""
from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .miner import MinedPattern, MiningResult
from .model import EventInstance
from .transform import SequenceDatabase, TemporalSequence, TimeSeries

DB_FORMAT = "rare-temporal-sequence-db"


class InputFormatError(ValueError):
    pass


def parse_timestamp(text: str, tick_seconds: float = 60) -> int:
    """Integer ticks pass through; ISO-8601 becomes ticks since the epoch
    (naive times are read as UTC)."""
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise InputFormatError(f"unparseable timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    seconds = dt.timestamp()
    ticks = seconds / tick_seconds
    if ticks != math.floor(ticks):
        raise InputFormatError(f"timestamp {text!r} is not a whole number of {tick_seconds}s ticks")
    return int(ticks)


def format_ticks(ticks: int, tick_seconds: float = 60) -> str:
    dt = datetime.fromtimestamp(ticks * tick_seconds, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M")


def read_csv_series(path, tick_seconds: float = 60) -> list[TimeSeries]:
    """``timestamp,<series1>,<series2>,...``; empty cells become NaN."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputFormatError(f"{path}: empty file") from None
        if not header or header[0].strip().lower() != "timestamp":
            raise InputFormatError(f"{path}: first column must be 'timestamp'")
        names = [h.strip() for h in header[1:]]
        if not names or len(set(names)) != len(names):
            raise InputFormatError(f"{path}: series names must be present and unique")
        stamps, cols = [], [[] for _ in names]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            stamps.append(parse_timestamp(row[0], tick_seconds))
            for c, cell in zip(cols, row[1:]):
                cell = cell.strip()
                try:
                    c.append(float(cell) if cell else math.nan)
                except ValueError:
                    raise InputFormatError(f"{path}:{lineno}: non-numeric value {cell!r}") from None
    ts = np.array(stamps, dtype=np.int64)
    try:
        return [TimeSeries(n, ts, np.array(c)) for n, c in zip(names, cols)]
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def write_db(db: SequenceDatabase, fh: TextIO) -> None:
    """One JSON header line, then one line per sequence."""
    head = {"format": DB_FORMAT, "version": 1, "tick_unit": db.tick_unit,
            "alphabet": sorted(db.alphabet), "n_sequences": len(db)}
    fh.write(json.dumps(head, sort_keys=True) + "\n")
    for seq in db:
        row = {"id": seq.id, "instances": [[i.symbol, i.start, i.end] for i in seq.instances]}
        fh.write(json.dumps(row, sort_keys=True) + "\n")


def save_db(db: SequenceDatabase, path) -> None:
    with open(path, "w", newline="\n") as fh:
        write_db(db, fh)


def load_db(path) -> SequenceDatabase:
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise InputFormatError(f"{path}: empty file")
    try:
        head = json.loads(lines[0])
        if head.get("format") != DB_FORMAT:
            raise InputFormatError(f"{path}: not a sequence database file")
        seqs = []
        for ln in lines[1:]:
            row = json.loads(ln)
            insts = tuple(EventInstance.make(s, a, b) for s, a, b in row["instances"])
            seqs.append(TemporalSequence(int(row["id"]), insts))
        return SequenceDatabase(tuple(seqs), alphabet=frozenset(head.get("alphabet", ())),
                                tick_unit=float(head.get("tick_unit", 1.0)))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"{path}: malformed sequence database ({exc})") from None
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def pattern_record(mp: MinedPattern, with_witness: bool = False) -> dict:
    rec = {
        "type": "pattern",
        "level": mp.level,
        "key": mp.key,
        "events": list(mp.pattern.events),
        "support_count": mp.support_count,
        "support_frac": round(mp.support_frac, 12),
        "confidence": round(mp.confidence, 12),
        "sequences": list(mp.supporting_sequences),
    }
    if with_witness and mp.witness is not None:
        rec["witness"] = {
            str(sid): [[[i.symbol, i.start, i.end] for i in b] for b in bs] for sid, bs in mp.witness.items()
        }
    return rec


def stats_records(result: MiningResult) -> list[dict]:
    return [
        {"level": s.level, "groups_generated": s.groups_generated, "groups_evaluated": s.groups_evaluated,
         "pattern_candidates": s.pattern_candidates, "patterns_stored": s.patterns_stored,
         "patterns_emitted": s.patterns_emitted}
        for s in result.stats
    ]


def write_report(fh: TextIO, result: MiningResult, n_sequences: int, config: dict, fmt: str = "jsonl",
                 volatile: Optional[dict] = None, extra_metrics: Optional[dict] = None,
                 with_witness: bool = False) -> None:
    """Report layout: a header (the only line holding timestamps, timings
    and memory), one record per pattern, then a trailing metrics block of
    deterministic counters."""
    header = {"type": "header", "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    header.update(volatile or {})
    metrics = {"type": "metrics", "n_sequences": n_sequences, "n_patterns": len(result.patterns),
               "config": config, "levels": stats_records(result)}
    metrics.update(extra_metrics or {})
    if fmt == "jsonl":
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for mp in result.patterns:
            fh.write(json.dumps(pattern_record(mp, with_witness), sort_keys=True, ensure_ascii=False) + "\n")
        fh.write(json.dumps(metrics, sort_keys=True) + "\n")
    elif fmt == "tsv":
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write("level\tkey\tsupport_count\tsupport_frac\tconfidence\tsequences\n")
        for mp in result.patterns:
            r = pattern_record(mp)
            fh.write(f"{r['level']}\t{r['key']}\t{r['support_count']}\t{r['support_frac']}\t"
                     f"{r['confidence']}\t{','.join(map(str, r['sequences']))}\n")
        fh.write("# " + json.dumps(metrics, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def read_report(path) -> tuple[dict, list[dict], dict]:
    """Parse a JSON-lines report into (header, pattern records, metrics)."""
    with open(path) as fh:
        recs = [json.loads(ln) for ln in fh if ln.strip()]
    header = recs[0] if recs and recs[0].get("type") == "header" else {}
    metrics = recs[-1] if recs and recs[-1].get("type") == "metrics" else {}
    return header, [r for r in recs if r.get("type") == "pattern"], metrics


def summary_lines(patterns: Iterable[MinedPattern], limit: Optional[int] = 20) -> list[str]:
    """Human-readable lines with relation glyphs."""
    out = []
    for n, mp in enumerate(patterns):
        if limit is not None and n >= limit:
            out.append("...")
            break
        out.append(f"{mp.pattern.render():<60} supp={mp.support_count} ({mp.support_frac:.3f}) conf={mp.confidence:.3f}")
    return out
