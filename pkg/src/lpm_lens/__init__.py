"""Projection-set heuristics for faster local process model discovery."""
from .discovery import DiscoveryParams, DiscoveryTimeout, RankedModel, Ranking, discover, discover_with_projections
from .entropy import discover_entropy_projections
from .evaluation import EvalReport, evaluate, ndcg_at_k, random_family, recall_at_k
from .eventlog import EmptyLogError, EventLog, LogFormatError, parse_csv, parse_xes, project_log, read_log
from .markov import MclParams, discover_markov_projections, mcl
from .mrig import discover_mrig_projections, mrig
from .petri import ReplayAutomaton, tree_to_dot, tree_to_net
from .quality import LocalProcessModel, QualityScore, Scorer, score, segment_trace
from .synthetic import planted_log
from .stats import connectedness_matrix, dfr, dpr, entropy, total_entropy
from .tree import canonical_form, parse_tree

__version__ = "0.1.0"

__all__ = [
    "DiscoveryParams", "DiscoveryTimeout", "EmptyLogError", "EvalReport", "EventLog", "LocalProcessModel",
    "LogFormatError", "MclParams", "QualityScore", "RankedModel", "Ranking", "ReplayAutomaton", "Scorer",
    "canonical_form", "connectedness_matrix", "dfr", "discover", "discover_entropy_projections",
    "discover_markov_projections", "discover_mrig_projections", "discover_with_projections", "dpr", "entropy",
    "evaluate", "mcl", "mrig", "ndcg_at_k", "parse_csv", "parse_tree", "parse_xes", "planted_log", "project_log",
    "random_family", "read_log", "recall_at_k", "score", "segment_trace", "total_entropy", "tree_to_dot",
    "tree_to_net",
]
