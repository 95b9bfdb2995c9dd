"""Rare temporal pattern mining over interval events derived from time series."""
from .hlh import HLH1, HLHk, intersect_sorted
from .miner import (
    LevelStats,
    MinedPattern,
    MiningConfig,
    MiningResult,
    Pruning,
    confidence,
    mine,
    mine_2event_patterns,
    mine_k_event_level,
    mine_pairs,
    mine_single_events,
    support,
)
from .model import (
    EventInstance,
    Interval,
    Relation,
    RelationConfig,
    RelationTriple,
    TemporalEvent,
    TemporalPattern,
    canonical_pattern_key,
    classify_relation,
)
from .oracle import OracleBudgetExceeded, oracle_mine
from .synthetic import InfeasibleSpec, PlantedPattern, SyntheticSpec, generate_synthetic
from .transform import (
    SequenceDatabase,
    SymbolicSeries,
    SymbolizationRule,
    TemporalSequence,
    TimeSeries,
    build_sequence_db,
    extract_instances,
    sequence_db_from_symbolic,
    symbolize,
)

__version__ = "0.1.0"

__all__ = [
    "EventInstance", "HLH1", "HLHk", "InfeasibleSpec", "Interval", "LevelStats", "MinedPattern",
    "MiningConfig", "MiningResult", "OracleBudgetExceeded", "PlantedPattern", "Pruning", "Relation",
    "RelationConfig", "RelationTriple", "SequenceDatabase", "SymbolicSeries", "SymbolizationRule",
    "SyntheticSpec", "TemporalEvent", "TemporalPattern", "TemporalSequence", "TimeSeries",
    "build_sequence_db", "canonical_pattern_key", "classify_relation", "confidence", "extract_instances",
    "generate_synthetic", "intersect_sorted", "mine", "mine_2event_patterns", "mine_k_event_level",
    "mine_pairs", "mine_single_events", "oracle_mine", "sequence_db_from_symbolic", "support", "symbolize",
]
