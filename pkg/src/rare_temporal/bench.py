"""Pruning ablation: run every pruning mode over a parameter sweep."""
from __future__ import annotations

import dataclasses
import resource
import time
import tracemalloc
from typing import Iterable, Optional, Sequence

from .miner import MiningConfig, MiningResult, Pruning, mine
from .transform import SequenceDatabase


class AblationMismatch(AssertionError):
    """Two pruning modes disagreed on the output: a soundness bug."""


def peak_rss_mb() -> float:
    """Process peak resident set (Linux reports KiB). An estimate only."""
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def timed_mine(db: SequenceDatabase, cfg: MiningConfig, repeats: int = 1,
               measure_memory: bool = False) -> tuple[MiningResult, float, Optional[float]]:
    """Best-of-``repeats`` wall clock; optional traced peak in MiB from an extra run."""
    best = float("inf")
    result = None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        result = mine(db, cfg)
        best = min(best, time.perf_counter() - t0)
    peak = None
    if measure_memory:
        tracemalloc.start()
        mine(db, cfg)
        peak = tracemalloc.get_traced_memory()[1] / 2**20
        tracemalloc.stop()
    return result, best, peak


def _signature(result: MiningResult) -> list[tuple]:
    return [(p.key, p.support_count, p.supporting_sequences) for p in result.patterns]


def benchmark_ablation(db: SequenceDatabase, base: MiningConfig,
                       modes: Sequence[Pruning | str] = tuple(Pruning),
                       sweep: Optional[dict[str, Iterable[float]]] = None,
                       repeats: int = 1, measure_memory: bool = False) -> list[dict]:
    """One row per (parameter point, mode).

    ``sweep`` maps a MiningConfig field (``sigma_min``, ``sigma_max``,
    ``delta``) to the values to try; without it only ``base`` is run.
    Raises AblationMismatch when modes disagree at any point.
    """
    points: list[tuple[Optional[str], Optional[float], MiningConfig]] = []
    if sweep:
        for name, values in sweep.items():
            for v in values:
                points.append((name, v, dataclasses.replace(base, **{name: v})))
    else:
        points.append((None, None, base))
    modes = [Pruning(m) for m in modes]
    rows = []
    for name, value, cfg in points:
        reference = None
        for mode in modes:
            mcfg = dataclasses.replace(cfg, pruning=mode)
            result, seconds, peak = timed_mine(db, mcfg, repeats, measure_memory)
            sig = _signature(result)
            if reference is None:
                reference = (mode, sig)
            elif sig != reference[1]:
                raise AblationMismatch(f"{mode.value} and {reference[0].value} disagree at {name}={value}")
            k_levels = [s for s in result.stats if s.level >= 3]
            rows.append({
                "param": name,
                "value": value,
                "mode": mode.value,
                "seconds": seconds,
                "peak_mem_mb": peak,
                "peak_rss_mb": peak_rss_mb(),
                "n_patterns": len(result.patterns),
                "candidates": sum(s.candidates for s in result.stats if s.level >= 2),
                "k_candidates": sum(s.candidates for s in k_levels),
                "k_groups_generated": sum(s.groups_generated for s in k_levels),
                "per_level": {s.level: s.candidates for s in result.stats},
            })
    return rows


def format_table(rows: Sequence[dict]) -> str:
    cols = ["param", "value", "mode", "seconds", "n_patterns", "candidates", "k_candidates", "peak_mem_mb"]
    lines = ["\t".join(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c)
            cells.append(f"{v:.4f}" if isinstance(v, float) else ("-" if v is None else str(v)))
        lines.append("\t".join(cells))
    return "\n".join(lines)
