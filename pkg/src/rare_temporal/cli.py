"""Command-line driver: ingest, transform, mine, report.

    rare-temporal --input data.csv --window 35 --smin 0.2 --conf 0.3
    rare-temporal --config run.json --bench
    rare-temporal generate --sequences 1000 --symbols 50 --plant "E41 C E45:30" --seed 7 -o db.jsonl

Exit codes are listed in ``EXIT_CODES``.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .bench import AblationMismatch, benchmark_ablation, format_table, peak_rss_mb
from .io import InputFormatError, load_db, parse_timestamp, read_csv_series, save_db, summary_lines, write_report
from .miner import MiningConfig, Pruning, mine
from .model import RelationConfig
from .oracle import OracleBudgetExceeded, oracle_mine
from .synthetic import InfeasibleSpec, PlantedPattern, SyntheticSpec, generate_synthetic
from .transform import SequenceDatabase, SymbolizationRule, sequence_db_from_symbolic, symbolize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_CONFIG = 5
EXIT_MISMATCH = 6
EXIT_BUDGET = 7

EXIT_CODES = {
    EXIT_OK: "success",
    EXIT_USAGE: "bad command line",
    EXIT_IO: "file could not be read or written",
    EXIT_PARSE: "input or config file could not be parsed",
    EXIT_CONFIG: "invalid configuration",
    EXIT_MISMATCH: "oracle check or pruning ablation disagreed",
    EXIT_BUDGET: "oracle work budget exceeded",
}

DB_SUFFIXES = (".jsonl", ".json", ".ndjson")
SWEEPABLE = ("sigma_min", "sigma_max", "delta")


class ConfigError(ValueError):
    pass


class ParseError(ValueError):
    pass


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    rules: dict = field(default_factory=lambda: {"*": {"threshold": 0.5}})
    window: Optional[int] = None
    origin: Optional[str] = None
    tick_seconds: float = 60.0
    nan_policy: str = "reject"
    mining: MiningConfig = field(default_factory=lambda: MiningConfig(0.01))
    output: Optional[str] = None
    format: str = "jsonl"
    witness: bool = False
    bench: bool = False
    bench_modes: list[str] = field(default_factory=lambda: [m.value for m in Pruning])
    sweep: dict = field(default_factory=dict)
    repeats: int = 1
    oracle_check: bool = False
    oracle_budget: int = 5_000_000
    seed: Optional[int] = None
    threads: int = 1
    synthetic: Optional[SyntheticSpec] = None

    def validate(self) -> None:
        if self.format not in ("jsonl", "tsv"):
            raise ConfigError(f"unknown report format {self.format!r}")
        if self.window is not None and self.window <= 0:
            raise ConfigError("window must be positive")
        if self.tick_seconds <= 0:
            raise ConfigError("tick_seconds must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.nan_policy not in ("reject", "carry_forward"):
            raise ConfigError(f"unknown nan_policy {self.nan_policy!r}")
        for name in self.sweep:
            if name not in SWEEPABLE:
                raise ConfigError(f"cannot sweep {name!r}; choose from {', '.join(SWEEPABLE)}")
        for m in self.bench_modes:
            if m not in {p.value for p in Pruning}:
                raise ConfigError(f"unknown pruning mode {m!r}")
        if not self.inputs and self.synthetic is None:
            raise ConfigError("no input: give --input or a synthetic section in the config")

    def rule_for(self, series: str) -> SymbolizationRule:
        spec = self.rules.get(series, self.rules.get("*"))
        if spec is None:
            raise ConfigError(f"series {series!r} has no symbolization rule")
        return _make_rule(series, spec)

    def report_config(self) -> dict:
        """Everything that determines the report content, as plain JSON."""
        m = self.mining
        return {
            "inputs": [os.path.basename(p) for p in self.inputs],
            "window": self.window,
            "origin": self.origin,
            "tick_seconds": self.tick_seconds,
            "rules": self.rules,
            "seed": self.seed,
            "sigma_min": m.sigma_min,
            "sigma_max": m.sigma_max,
            "delta": m.delta,
            "epsilon": m.relation.epsilon,
            "d_overlap": m.relation.d_overlap,
            "max_pattern_events": m.max_pattern_events,
            "pruning": m.pruning.value,
            "strict_siblings": m.strict_siblings,
        }


def _make_rule(series: str, spec) -> SymbolizationRule:
    try:
        if isinstance(spec, (int, float)):
            return SymbolizationRule.threshold(series, float(spec))
        if "bins" in spec:
            bins = []
            for bound, label in spec["bins"]:
                bins.append((math.inf if bound in (None, "inf", "+inf") else float(bound), label))
            return SymbolizationRule(series, tuple(bins))
        return SymbolizationRule.threshold(series, float(spec["threshold"]), spec.get("low", "Off"),
                                           spec.get("high", "On"), spec.get("prefix"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad symbolization rule for {series!r}: {exc}") from None


_MINING_KEYS = {"sigma_min", "sigma_max", "delta", "epsilon", "d_overlap", "max_pattern_events",
                "pruning", "strict_siblings", "keep_all_witnesses"}
_TOP_KEYS = {"inputs", "symbolization", "window", "origin", "tick_seconds", "nan_policy", "mining", "output",
             "format", "witness", "bench", "oracle_check", "oracle_budget", "seed", "threads", "synthetic"}


def _mining_config(d: dict) -> MiningConfig:
    unknown = set(d) - _MINING_KEYS
    if unknown:
        raise ConfigError(f"unknown mining keys: {', '.join(sorted(unknown))}")
    if "sigma_min" not in d:
        raise ConfigError("sigma_min is required")
    try:
        rc = RelationConfig(epsilon=d.get("epsilon", 0), d_overlap=d.get("d_overlap", 1))
        return MiningConfig(
            sigma_min=d["sigma_min"], sigma_max=d.get("sigma_max", 1.0), delta=d.get("delta", 0.0),
            relation=rc, max_pattern_events=d.get("max_pattern_events", 5),
            pruning=d.get("pruning", "all"), strict_siblings=bool(d.get("strict_siblings", False)),
            keep_all_witnesses=bool(d.get("keep_all_witnesses", False)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _synthetic_spec(d: dict) -> SyntheticSpec:
    try:
        planted = tuple(PlantedPattern.parse(p["pattern"], p["support"]) for p in d.get("planted", ()))
        rc = RelationConfig(epsilon=d.get("epsilon", 0), d_overlap=d.get("d_overlap", 1))
        kw = {k: (tuple(v) if isinstance(v, list) else v) for k, v in d.items()
              if k not in ("planted", "epsilon", "d_overlap")}
        return SyntheticSpec(planted=planted, relation=rc, **kw)
    except InfeasibleSpec as exc:
        raise ConfigError(f"infeasible synthetic spec: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad synthetic spec: {exc}") from None


def load_run_config(path) -> tuple[RunConfig, dict]:
    """Read a JSON config. Returns the config and the raw mining section
    (so command-line flags can be layered over it)."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    base = Path(path).parent
    cfg = RunConfig()
    cfg.inputs = [str(base / p) for p in raw.get("inputs", [])]
    if "symbolization" in raw:
        cfg.rules = dict(raw["symbolization"])
    for key in ("window", "origin", "tick_seconds", "nan_policy", "format", "witness", "oracle_check",
                "oracle_budget", "seed", "threads"):
        if key in raw:
            setattr(cfg, key, raw[key])
    if cfg.origin is not None:
        cfg.origin = str(cfg.origin)
    if "output" in raw:
        cfg.output = str(base / raw["output"])
    bench = raw.get("bench", {})
    if isinstance(bench, bool):
        bench = {"enabled": bench}
    cfg.bench = bool(bench.get("enabled", False))
    cfg.bench_modes = list(bench.get("modes", cfg.bench_modes))
    cfg.sweep = {k: list(v) for k, v in bench.get("sweep", {}).items()}
    cfg.repeats = int(bench.get("repeats", 1))
    if "synthetic" in raw:
        cfg.synthetic = _synthetic_spec(raw["synthetic"])
    mining = dict(raw.get("mining", {}))
    return cfg, mining


def _parse_sweep(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        name, _, values = item.partition("=")
        aliases = {"smin": "sigma_min", "smax": "sigma_max", "conf": "delta"}
        name = aliases.get(name.strip(), name.strip())
        try:
            out[name] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad sweep {item!r}; expected NAME=v1,v2,...") from None
        if not out[name]:
            raise ConfigError(f"sweep {item!r} has no values")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rare-temporal",
        description="Mine rare temporal interval patterns from time series.",
        epilog="Use 'rare-temporal generate --help' for the synthetic data generator.",
    )
    p.add_argument("--input", action="append", default=None, metavar="PATH",
                   help="CSV time series or a sequence-database .jsonl file (repeatable)")
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--smin", type=float, help="minimum support fraction")
    p.add_argument("--smax", type=float, help="maximum support fraction")
    p.add_argument("--conf", type=float, help="minimum all-confidence")
    p.add_argument("--epsilon", type=int, help="relation tolerance in ticks")
    p.add_argument("--doverlap", type=int, help="minimal overlap duration in ticks")
    p.add_argument("--window", type=int, help="sequence window length in ticks")
    p.add_argument("--origin", help="window origin (ISO time or integer ticks); default first sample")
    p.add_argument("--tick-seconds", type=float, help="seconds per tick for ISO timestamps (default 60)")
    p.add_argument("--threshold", type=float, help="On/Off threshold applied to every series")
    p.add_argument("--max-events", type=int, help="largest pattern size (0 for no cap)")
    p.add_argument("--pruning", choices=[m.value for m in Pruning])
    p.add_argument("--strict-siblings", action="store_true", default=None,
                   help="check every (k-1)-sub-pattern during extension")
    p.add_argument("--oracle-check", action="store_true", default=None,
                   help="compare against the brute-force miner")
    p.add_argument("--format", choices=["jsonl", "tsv"])
    p.add_argument("--witness", action="store_true", default=None, help="include witness intervals")
    p.add_argument("--bench", action="store_true", default=None, help="run the pruning ablation")
    p.add_argument("--modes", help="comma-separated pruning modes for --bench")
    p.add_argument("--sweep", action="append", default=None, metavar="NAME=V1,V2",
                   help="bench parameter sweep over sigma_min, sigma_max or delta (repeatable)")
    p.add_argument("--repeats", type=int, help="timing repeats per bench point (best is kept)")
    p.add_argument("--seed", type=int, help="seed for synthetic input")
    p.add_argument("--threads", type=int, help="worker threads for candidate groups")
    p.add_argument("-o", "--output", help="report path (default stdout)")
    p.add_argument("-q", "--quiet", action="store_true", help="no pattern summary")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        cfg, mining = load_run_config(args.config)
    else:
        cfg, mining = RunConfig(), {}
    if args.input:
        cfg.inputs = list(args.input)
    flag_map = {"smin": "sigma_min", "smax": "sigma_max", "conf": "delta", "epsilon": "epsilon",
                "doverlap": "d_overlap", "pruning": "pruning", "strict_siblings": "strict_siblings"}
    for flag, key in flag_map.items():
        v = getattr(args, flag)
        if v is not None:
            mining[key] = v
    if args.max_events is not None:
        mining["max_pattern_events"] = args.max_events or None
    if "sigma_min" not in mining:
        mining["sigma_min"] = 0.01
    cfg.mining = _mining_config(mining)
    if args.threshold is not None:
        cfg.rules = {"*": {"threshold": args.threshold}}
    for flag, attr in (("window", "window"), ("origin", "origin"), ("tick_seconds", "tick_seconds"),
                       ("format", "format"), ("witness", "witness"), ("bench", "bench"),
                       ("oracle_check", "oracle_check"), ("seed", "seed"), ("threads", "threads"),
                       ("output", "output"), ("repeats", "repeats")):
        v = getattr(args, flag)
        if v is not None:
            setattr(cfg, attr, v)
    if args.modes:
        cfg.bench_modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    if args.sweep:
        cfg.sweep = _parse_sweep(args.sweep)
    if cfg.synthetic is not None and cfg.seed is None:
        cfg.seed = 0
    cfg.validate()
    return cfg


def load_database(cfg: RunConfig) -> SequenceDatabase:
    if not cfg.inputs:
        return generate_synthetic(cfg.synthetic, cfg.seed or 0)
    dbs = [p for p in cfg.inputs if p.lower().endswith(DB_SUFFIXES)]
    if dbs:
        if len(cfg.inputs) > 1:
            raise ConfigError("a sequence-database file must be the only input")
        return load_db(dbs[0])
    series = []
    for path in cfg.inputs:
        series.extend(read_csv_series(path, cfg.tick_seconds))
    names = [s.name for s in series]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ConfigError(f"series names repeat across inputs: {', '.join(sorted(dup))}")
    if cfg.window is None:
        raise ConfigError("--window is required for time-series input")
    origin = None if cfg.origin is None else parse_timestamp(str(cfg.origin), cfg.tick_seconds)
    try:
        symbolic = [symbolize(s, cfg.rule_for(s.name), cfg.nan_policy) for s in series]
        return sequence_db_from_symbolic(symbolic, cfg.window, origin, tick_unit=cfg.tick_seconds)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _signature(patterns) -> list[tuple]:
    return [(p.key, p.support_count, p.supporting_sequences, round(p.confidence, 12)) for p in patterns]


def _open_out(path: Optional[str], stdout: TextIO):
    if path is None:
        return stdout, False
    return open(path, "w", newline="\n", encoding="utf-8"), True


def run(cfg: RunConfig, stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr, quiet: bool = False) -> int:
    """Execute one configured run and return the exit status."""
    msg = stderr if cfg.output is None else stdout
    t0 = time.perf_counter()
    db = load_database(cfg)
    t_ingest = time.perf_counter() - t0

    if cfg.bench:
        try:
            rows = benchmark_ablation(db, cfg.mining, cfg.bench_modes, cfg.sweep or None,
                                      repeats=cfg.repeats, measure_memory=True)
        except AblationMismatch as exc:
            print(f"ablation mismatch: {exc}", file=stderr)
            return EXIT_MISMATCH
        fh, close = _open_out(cfg.output, stdout)
        try:
            if cfg.format == "jsonl":
                for r in rows:
                    fh.write(json.dumps(r, sort_keys=True) + "\n")
            else:
                fh.write(format_table(rows) + "\n")
        finally:
            if close:
                fh.close()
        print(f"bench: {len(rows)} rows, pruning modes agree", file=msg)
        return EXIT_OK

    t1 = time.perf_counter()
    result = mine(db, cfg.mining, workers=cfg.threads)
    t_mine = time.perf_counter() - t1

    extra = {"n_instances": sum(len(s) for s in db), "alphabet_size": len(db.alphabet),
             "n_single_events": len(result.hlh1)}
    status = EXIT_OK
    if cfg.oracle_check:
        try:
            expected = oracle_mine(db, cfg.mining, budget=cfg.oracle_budget)
        except OracleBudgetExceeded as exc:
            print(f"oracle: skipped ({exc})", file=stderr)
            return EXIT_BUDGET
        same = _signature(expected) == _signature(result.patterns)
        extra["oracle_check"] = "match" if same else "mismatch"
        if same:
            print("oracle: match", file=msg)
        else:
            missing = {p.key for p in expected} - result.keys()
            extra_keys = result.keys() - {p.key for p in expected}
            print(f"oracle: MISMATCH (missing {sorted(missing)[:5]}, unexpected {sorted(extra_keys)[:5]})",
                  file=stderr)
            status = EXIT_MISMATCH

    volatile = {
        "seconds": {"ingest": round(t_ingest, 6), "mine": round(t_mine, 6),
                    "levels": {str(s.level): round(s.seconds, 6) for s in result.stats}},
        "peak_rss_mb_estimate": round(peak_rss_mb(), 1),
        "threads": cfg.threads,
    }
    fh, close = _open_out(cfg.output, stdout)
    try:
        write_report(fh, result, len(db), cfg.report_config(), cfg.format, volatile=volatile,
                     extra_metrics=extra, with_witness=cfg.witness)
    finally:
        if close:
            fh.close()
    if not quiet:
        print(f"{len(db)} sequences, {len(result.hlh1)} single events, {len(result.patterns)} rare patterns",
              file=msg)
        for line in summary_lines(result.patterns):
            print("  " + line, file=msg)
    return status


def build_generate_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rare-temporal generate",
                                description="Write a seeded synthetic sequence database.")
    p.add_argument("--spec", help="JSON synthetic spec (same shape as the config's synthetic section)")
    p.add_argument("--sequences", type=int)
    p.add_argument("--symbols", type=int)
    p.add_argument("--instances", help="MIN,MAX instances per sequence")
    p.add_argument("--horizon", type=int)
    p.add_argument("--zipf", type=float)
    p.add_argument("--plant", action="append", default=[], metavar="KEY:SUPPORT",
                   help='planted pattern, e.g. "E41 C E45:30" (repeatable)')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    return p


def generate_main(argv: Sequence[str], stdout: TextIO, stderr: TextIO) -> int:
    args = build_generate_parser().parse_args(argv)
    d: dict = {}
    if args.spec:
        try:
            with open(args.spec) as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.spec}: {exc}") from None
    for flag, key in (("sequences", "n_sequences"), ("symbols", "alphabet_size"),
                      ("horizon", "horizon"), ("zipf", "zipf")):
        v = getattr(args, flag)
        if v is not None:
            d[key] = v
    if args.instances:
        try:
            lo, hi = (int(x) for x in args.instances.split(","))
        except ValueError:
            raise ConfigError("--instances expects MIN,MAX") from None
        d["instances_per_sequence"] = [lo, hi]
    for item in args.plant:
        key, _, supp = item.rpartition(":")
        if not key or not supp.strip().isdigit():
            raise ConfigError(f"bad --plant {item!r}; expected KEY:SUPPORT")
        d.setdefault("planted", []).append({"pattern": key, "support": int(supp)})
    spec = _synthetic_spec(d)
    try:
        db = generate_synthetic(spec, args.seed)
    except InfeasibleSpec as exc:
        raise ConfigError(f"infeasible synthetic spec: {exc}") from None
    save_db(db, args.output)
    print(f"wrote {len(db)} sequences to {args.output}", file=stdout)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if argv and argv[0] == "generate":
            return generate_main(argv[1:], stdout, stderr)
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        return run(cfg, stdout, stderr, quiet=args.quiet)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ParseError, InputFormatError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    except (ConfigError, InfeasibleSpec) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
