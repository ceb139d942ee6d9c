"""Streaming detection of frequent, confident categorical interactions with
online random intersection chains."""

from .chains import ChainBatchResult, ChainConfig, ChainSet, generate_chain, generate_chains, run_chains
from .errors import OricError
from .estimator import (ClassPriors, OricConfig, OricModel, PatternStats, RankedInteraction,
                        confidence, estimate, map_frequency, new_model, select, update)
from .patterns import Chain, Item, LabeledBatch, Pattern, node_at, occurrence_count, pattern_from_items
from .planner import PlannerResult, PlannerSpec, detection_probability, plan, required_chains

__all__ = [
    "Chain", "ChainBatchResult", "ChainConfig", "ChainSet", "ClassPriors", "Item", "LabeledBatch",
    "OricConfig", "OricError", "OricModel", "Pattern", "PatternStats", "PlannerResult", "PlannerSpec",
    "RankedInteraction", "confidence", "detection_probability", "estimate", "generate_chain", "generate_chains",
    "map_frequency", "new_model", "node_at", "occurrence_count", "pattern_from_items", "plan",
    "required_chains", "run_chains", "select", "update",
]
