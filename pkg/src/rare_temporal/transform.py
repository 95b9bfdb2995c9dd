"""Time series -> symbolic series -> event instances -> temporal sequence database."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .model import EventInstance, check_label


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled series. ``step`` is only needed for single-sample series."""

    name: str
    timestamps: np.ndarray
    values: np.ndarray
    step: Optional[int] = None

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=float)
        if ts.shape != vals.shape or ts.ndim != 1:
            raise ValueError("timestamps and values must be 1-d and of equal length")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "step", _check_step(ts, self.step))

    def __len__(self):
        return len(self.timestamps)


def _check_step(ts: np.ndarray, step: Optional[int]) -> Optional[int]:
    if len(ts) >= 2:
        d = np.diff(ts)
        if np.any(d <= 0):
            raise ValueError("timestamps must be strictly increasing")
        if np.any(d != d[0]):
            raise ValueError("timestamps must have a constant sampling step")
        if step is not None and step != d[0]:
            raise ValueError(f"declared step {step} disagrees with sampling step {d[0]}")
        return int(d[0])
    if step is not None and step <= 0:
        raise ValueError("step must be positive")
    return step


@dataclass(frozen=True)
class SymbolizationRule:
    """Threshold binning: a value goes to the first bin whose bound it is below.

    Bins are ``[lower, upper)``, so ``((0.5, "Off"), (inf, "On"))`` means
    ``On <=> x >= 0.5``.
    """

    series_name: str
    bins: tuple[tuple[float, str], ...]

    def __post_init__(self):
        bins = tuple((float(b), check_label(lbl)) for b, lbl in self.bins)
        if not bins:
            raise ValueError("a symbolization rule needs at least one bin")
        bounds = [b for b, _ in bins]
        if any(not a < b for a, b in zip(bounds, bounds[1:])):
            raise ValueError("bin upper bounds must be strictly increasing")
        if bounds[-1] != math.inf:
            raise ValueError("the last bin must be unbounded (+inf)")
        object.__setattr__(self, "bins", bins)

    @classmethod
    def threshold(cls, series_name: str, threshold: float, low: str = "Off", high: str = "On",
                  prefix: Optional[str] = None) -> "SymbolizationRule":
        """Two-state rule; labels are ``prefix + low`` / ``prefix + high``."""
        prefix = series_name if prefix is None else prefix
        return cls(series_name, ((threshold, prefix + low), (math.inf, prefix + high)))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for _, lbl in self.bins)


@dataclass(frozen=True)
class SymbolicSeries:
    name: str
    timestamps: np.ndarray
    symbols: tuple[str, ...]
    step: Optional[int] = None

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        if len(ts) != len(self.symbols):
            raise ValueError("timestamps and symbols differ in length")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "step", _check_step(ts, self.step))

    def __len__(self):
        return len(self.symbols)


def symbolize(ts: TimeSeries, rule: SymbolizationRule, nan_policy: str = "reject") -> SymbolicSeries:
    """Map every sample to a symbol.

    ``nan_policy`` is ``"reject"`` (raise) or ``"carry_forward"`` (repeat the
    previous symbol; a leading NaN is still an error).
    """
    if rule.series_name != ts.name:
        raise ValueError(f"rule for {rule.series_name!r} applied to series {ts.name!r}")
    if nan_policy not in ("reject", "carry_forward"):
        raise ValueError(f"unknown nan_policy {nan_policy!r}")
    bounds = np.array([b for b, _ in rule.bins])
    labels = rule.labels
    idx = np.searchsorted(bounds, ts.values, side="right")
    nan = np.isnan(ts.values)
    symbols: list[str] = []
    for k, i in enumerate(idx):
        if nan[k]:
            if nan_policy == "reject":
                raise ValueError(f"missing value in {ts.name} at t={ts.timestamps[k]}")
            if not symbols:
                raise ValueError(f"{ts.name} starts with a missing value; nothing to carry forward")
            symbols.append(symbols[-1])
        else:
            symbols.append(labels[min(i, len(labels) - 1)])
    return SymbolicSeries(ts.name, ts.timestamps, tuple(symbols), ts.step)


def _runs(symbols: Sequence[str]) -> list[tuple[int, int]]:
    """Half-open index ranges of maximal equal-symbol runs."""
    runs = []
    start = 0
    for i in range(1, len(symbols) + 1):
        if i == len(symbols) or symbols[i] != symbols[start]:
            runs.append((start, i))
            start = i
    return runs


def extract_instances(ss: SymbolicSeries) -> list[EventInstance]:
    """Merge maximal runs into instances.

    A run sampled at ``t_1..t_k`` becomes ``[t_1, t_k]``; a single-sample run
    becomes ``[t_1, t_1 + step]``.
    """
    if len(ss) == 0:
        raise ValueError("cannot extract instances from an empty series")
    ts = ss.timestamps
    out = []
    for a, b in _runs(ss.symbols):
        start, end = int(ts[a]), int(ts[b - 1])
        if start == end:
            if ss.step is None:
                raise ValueError(f"{ss.name}: single-sample run needs a known sampling step")
            end = start + ss.step
        out.append(EventInstance.make(ss.symbols[a], start, end))
    return out


def _instance_order(inst: EventInstance):
    return (inst.start, inst.end, inst.symbol)


@dataclass(frozen=True)
class TemporalSequence:
    id: int
    instances: tuple[EventInstance, ...]

    def __post_init__(self):
        insts = tuple(sorted(self.instances, key=_instance_order))
        if len(set(insts)) != len(insts):
            raise ValueError(f"sequence {self.id} holds duplicate instances")
        object.__setattr__(self, "instances", insts)

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(i.symbol for i in self.instances)


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[TemporalSequence, ...]
    alphabet: frozenset[str] = frozenset()
    tick_unit: float = 1.0
    _symbol_sets: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        seqs = tuple(self.sequences)
        ids = [s.id for s in seqs]
        if ids != list(range(1, len(seqs) + 1)):
            raise ValueError("sequence ids must be 1..N in order")
        used = frozenset().union(*(s.symbols for s in seqs)) if seqs else frozenset()
        alphabet = frozenset(self.alphabet) | used
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_symbol_sets", tuple(s.symbols for s in seqs))

    @classmethod
    def from_instance_lists(cls, rows: Iterable[Iterable[EventInstance]], **kw) -> "SequenceDatabase":
        """Ids 1..N in row order; plain ``(symbol, start, end)`` tuples are accepted."""
        def coerce(r):
            return tuple(x if isinstance(x, EventInstance) else EventInstance.make(*x) for x in r)
        return cls(tuple(TemporalSequence(i, coerce(r)) for i, r in enumerate(rows, start=1)), **kw)

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    def __getitem__(self, seq_id: int) -> TemporalSequence:
        if seq_id < 1:
            raise IndexError(seq_id)
        return self.sequences[seq_id - 1]

    def symbol_sets(self) -> tuple[frozenset[str], ...]:
        return self._symbol_sets


def _window_count(lo: int, hi: int, origin: int, window: int) -> tuple[int, int]:
    first = (lo - origin) // window
    last = (hi - origin) // window
    return first, last


def build_sequence_db(instances_per_series: Mapping[str, Sequence[EventInstance]], window: int,
                      origin: Optional[int] = None, step: Optional[int] = None,
                      tick_unit: float = 1.0) -> SequenceDatabase:
    """Cut instances into fixed windows ``[origin + k*window, origin + (k+1)*window)``.

    An instance crossing a boundary is split into clipped copies, one per
    window it overlaps with positive length. Every window between the first
    and the last one holding data becomes a sequence, even if it is sparse.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    if step is not None and window < step:
        raise ValueError(f"window {window} is shorter than the sampling step {step}")
    all_insts = [i for insts in instances_per_series.values() for i in insts]
    if not all_insts:
        return SequenceDatabase((), tick_unit=tick_unit)
    lo = min(i.start for i in all_insts)
    hi = max(i.end for i in all_insts)
    if origin is None:
        origin = lo
    if origin > lo:
        raise ValueError(f"origin {origin} lies after the first instance start {lo}")
    first, last = _window_count(lo, hi - 1, origin, window)
    # sets: overlapping instances of one symbol can clip to the same piece
    rows: list[set[EventInstance]] = [set() for _ in range(last - first + 1)]
    for inst in all_insts:
        k0, k1 = _window_count(inst.start, inst.end - 1, origin, window)
        for k in range(k0, k1 + 1):
            w_start = origin + k * window
            s = max(inst.start, w_start)
            e = min(inst.end, w_start + window)
            if s < e:
                rows[k - first].add(EventInstance(inst.symbol, s, e))
    alphabet = frozenset(i.symbol for i in all_insts)
    return SequenceDatabase.from_instance_lists(rows, alphabet=alphabet, tick_unit=tick_unit)


def sequence_db_from_symbolic(series: Sequence[SymbolicSeries], window: int, origin: Optional[int] = None,
                              tick_unit: float = 1.0) -> SequenceDatabase:
    """Window the samples first, then segment each window into instances.

    Inside one window the first run of a series starts at its first sample;
    every later run starts where the previous run's last sample was, so the
    instances of one series tile the window. A run ends at its last sample
    (a lone sample at the window start ends one step later). This is the
    segmentation behind the running example's sequence table.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    series = [s for s in series if len(s)]
    if not series:
        return SequenceDatabase((), tick_unit=tick_unit)
    for s in series:
        if s.step is not None and window < s.step:
            raise ValueError(f"window {window} is shorter than the sampling step of {s.name}")
    lo = min(int(s.timestamps[0]) for s in series)
    hi = max(int(s.timestamps[-1]) for s in series)
    if origin is None:
        origin = lo
    if origin > lo:
        raise ValueError(f"origin {origin} lies after the first sample {lo}")
    first, last = _window_count(lo, hi, origin, window)
    rows: list[list[EventInstance]] = [[] for _ in range(last - first + 1)]
    alphabet = set()
    for s in series:
        ts = s.timestamps
        win = (ts - origin) // window
        bounds = np.flatnonzero(np.diff(win)) + 1
        for a, b in zip(np.r_[0, bounds], np.r_[bounds, len(ts)]):
            k = int(win[a])
            syms = s.symbols[a:b]
            prev_end = None
            for ra, rb in _runs(syms):
                t_first, t_last = int(ts[a + ra]), int(ts[a + rb - 1])
                start = t_first if prev_end is None else prev_end
                end = t_last
                if start == end:
                    if s.step is None:
                        raise ValueError(f"{s.name}: single-sample run needs a known sampling step")
                    end = start + s.step
                rows[k - first].append(EventInstance.make(syms[ra], start, end))
                alphabet.add(syms[ra])
                prev_end = t_last
    return SequenceDatabase.from_instance_lists(rows, alphabet=frozenset(alphabet), tick_unit=tick_unit)
