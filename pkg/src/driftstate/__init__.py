"""driftstate: a persistent continual-learning agent and drift measurement kit.

The agent accumulates a token-frequency state vector across scheduled
executions and measures how the direction of that vector moves run to run
(cosine self-similarity) and how stable it stays over intervals.  Includes a
seeded synthetic-corpus generator for plasticity / stabilization /
perturbation / recovery experiments, durable single-writer storage, and a CLI.
"""

from driftstate.agent import AgentConfig, ProtocolResult, report, run_once, run_protocol
from driftstate.corpus import (
    CorpusSpec,
    Document,
    RunRecipe,
    default_spec,
    generate_corpus,
    load_corpus_spec,
    save_corpus_spec,
    scan_new_documents,
)
from driftstate.errors import (
    CorruptStoreError,
    DigestMismatchError,
    DriftStateError,
    EmptyStateError,
    IntervalError,
    LockHeldError,
    MissingHistoryError,
    NonEmptyStoreError,
    SequenceError,
    SpecValidationError,
)
from driftstate.metrics import StabilityValue, cosine, drift_series, stability
from driftstate.state import StateVector
from driftstate.store import HistoryLog, Manifest, ManifestEntry, RunRecord
from driftstate.tokenizer import tokenize

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "CorpusSpec",
    "CorruptStoreError",
    "DigestMismatchError",
    "Document",
    "DriftStateError",
    "EmptyStateError",
    "HistoryLog",
    "IntervalError",
    "LockHeldError",
    "Manifest",
    "ManifestEntry",
    "MissingHistoryError",
    "NonEmptyStoreError",
    "ProtocolResult",
    "RunRecipe",
    "RunRecord",
    "SequenceError",
    "SpecValidationError",
    "StabilityValue",
    "StateVector",
    "cosine",
    "default_spec",
    "drift_series",
    "generate_corpus",
    "load_corpus_spec",
    "report",
    "run_once",
    "run_protocol",
    "save_corpus_spec",
    "scan_new_documents",
    "stability",
    "tokenize",
]
