"""Wireless-context security engine for smart-home event traffic.

The pipeline: sniff encrypted wireless metadata, fingerprint event bursts,
detect events with a random forest over sliding windows, mine temporal
dependencies into wireless-context graphs, compare them against the contexts
apps are supposed to produce, and surface hidden physical couplings between
automations.
"""

from .model import (
    ConfigError,
    ConsistencyError,
    ConditionNode,
    DetectedEvent,
    EngineError,
    EventId,
    EventRegistry,
    EventTransitionGraph,
    GraphNode,
    GraphShape,
    GraphSource,
    PacketKind,
    PacketRecord,
    ParseError,
    TrainingError,
    ValidationError,
    VocabularyError,
    filter_unrelated,
    path_graph,
)
from .fingerprint import FeatureMatrix, assemble_samples, featurize, step_counts
from .forest import RandomForest
from .detect import DetectorParams, detect_events
from .mine import (
    MinerParams,
    MinerResult,
    PairStats,
    collect_pair_stats,
    mine_wireless_context,
)
from .check import (
    AnomalyKind,
    AnomalyReport,
    CheckerParams,
    check_graphs,
    check_stream,
    classify_anomaly,
    match_graph,
)
from .vuln import CouplingChain, channel_stats, confirm_chains, discover_chains
from .simulate import (
    AnomalySpec,
    AppRule,
    EventTemplate,
    SimConfig,
    inject_anomaly,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalyKind", "AnomalyReport", "AnomalySpec", "AppRule", "CheckerParams",
    "ConditionNode", "ConfigError", "ConsistencyError", "CouplingChain",
    "DetectedEvent", "DetectorParams", "EngineError", "EventId",
    "EventRegistry", "EventTemplate", "EventTransitionGraph", "FeatureMatrix",
    "GraphNode", "GraphShape", "GraphSource", "MinerParams", "MinerResult",
    "PacketKind", "PacketRecord", "PairStats", "ParseError", "RandomForest",
    "SimConfig", "TrainingError", "ValidationError", "VocabularyError",
    "assemble_samples", "channel_stats", "check_graphs", "check_stream",
    "classify_anomaly", "collect_pair_stats", "confirm_chains",
    "detect_events", "discover_chains", "featurize", "filter_unrelated",
    "inject_anomaly", "match_graph", "mine_wireless_context", "path_graph",
    "simulate", "step_counts", "__version__",
]
