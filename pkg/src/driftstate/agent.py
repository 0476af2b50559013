"""The execution loop: one learning iteration per invocation, plus protocols.

Each ``run_once`` performs the five stages in order: observe the corpus for
never-seen documents, tokenize them, fold their tokens into the loaded state,
compare the updated state against the previous one, and persist everything.
Scheduling lives outside (cron or the protocol runner); the agent does exactly
one iteration and returns.

``run_protocol`` drives a whole multi-run experiment from a corpus spec on a
fresh store, staging each run's documents before invoking the loop, and
summarizes stability over the spec's named phase intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from driftstate import corpus as corpus_mod
from driftstate import metrics, store
from driftstate.errors import MissingHistoryError, NonEmptyStoreError
from driftstate.metrics import StabilityValue
from driftstate.store import HistoryLog, RunRecord
from driftstate.tokenizer import tokenize


@dataclass(frozen=True)
class AgentConfig:
    """Where the agent reads experience and keeps its persistent state."""

    corpus_root: Path
    store_root: Path


@dataclass(frozen=True)
class ProtocolResult:
    history: HistoryLog
    stability: dict[str, StabilityValue]


def _store_paths(store_root: Path) -> tuple[Path, Path, Path]:
    root = Path(store_root)
    return root / store.STATE_FILE, root / store.HISTORY_FILE, root / store.MANIFEST_FILE


def run_once(config: AgentConfig, perturbation: bool = False) -> RunRecord:
    """Execute one learning iteration and return its history record.

    Aborts with no persistence mutation whatsoever on a held lock, a corrupt
    store, or a mutated past document.  Similarity vs the previous run is
    recorded as 0.0 when there is no previous non-empty state, and as exactly
    1.0 when no new documents arrived (unchanged direction); otherwise it is
    the cosine between the previous and updated count vectors.
    """
    state_path, history_path, manifest_path = _store_paths(config.store_root)
    with store.acquire_run_lock(config.store_root):
        previous = store.load_state(state_path)
        manifest = store.load_manifest(manifest_path)
        history = store.load_history(history_path)

        documents = corpus_mod.scan_new_documents(config.corpus_root, manifest)

        new_state = previous.copy()
        for doc in documents:
            new_state.update(tokenize(doc.text))

        if previous.total_tokens == 0:
            similarity = 0.0
        elif not documents:
            similarity = 1.0
        else:
            # cosine can exceed 1.0 by a few ulps; the record is clamped
            similarity = min(1.0, max(0.0, metrics.cosine(previous, new_state)))

        run_index = history[-1].run_index + 1 if history else 1
        record = RunRecord(
            run_index=run_index,
            timestamp=store.utc_timestamp(),
            tokens_seen=new_state.total_tokens,
            vocab_size=new_state.vocab_size,
            similarity_vs_previous=similarity,
            perturbation=perturbation,
        )

        if documents:
            store.save_state(state_path, new_state)
            for doc in documents:
                manifest[doc.id] = store.ManifestEntry(doc.digest, run_index)
            store.save_manifest(manifest_path, manifest)
        store.append_run_record(history_path, record)
        return record


def run_protocol(spec: corpus_mod.CorpusSpec, config: AgentConfig) -> ProtocolResult:
    """Run every scheduled iteration of a synthetic-corpus protocol.

    Demands a store with no prior state, manifest, or history: accumulated
    experience is irreversible, so a protocol cannot be grafted onto an
    existing trajectory.  Documents are generated (or reused, byte-identical,
    if already staged) and introduced run by run.
    """
    state_path, history_path, manifest_path = _store_paths(config.store_root)
    for path in (state_path, history_path, manifest_path):
        if path.exists():
            raise NonEmptyStoreError(
                f"{config.store_root}: store already holds {path.name}; "
                "a protocol needs a fresh store"
            )
    scheduled = generate_schedule(spec)
    records: HistoryLog = []
    for run_index, recipe in enumerate(spec.runs, start=1):
        corpus_mod.stage_documents(scheduled.get(run_index, []), config.corpus_root)
        record = run_once(config, perturbation=recipe.pool == corpus_mod.PERTURBATION_POOL)
        records.append(record)
    phases = corpus_mod.resolve_phases(spec)
    stability = {
        name: metrics.stability(records, t1, t2) for name, (t1, t2) in phases.items()
    }
    return ProtocolResult(history=records, stability=stability)


def generate_schedule(spec: corpus_mod.CorpusSpec) -> dict[int, list[corpus_mod.Document]]:
    """Generated documents grouped by scheduled run index."""
    grouped: dict[int, list[corpus_mod.Document]] = {}
    for run_index, doc in corpus_mod.generate_corpus(spec):
        grouped.setdefault(run_index, []).append(doc)
    return grouped


@dataclass(frozen=True)
class ReportOutput:
    history: HistoryLog
    stability: list[StabilityValue]
    csv_path: Path | None = None
    series_path: Path | None = None


def report(
    store_root: Path,
    csv_path: Path | None = None,
    series_path: Path | None = None,
    intervals: list[tuple[int, int]] | None = None,
) -> ReportOutput:
    """Emit history-derived artifacts from a store.

    Writes a per-run summary CSV (run, tokens_seen, vocab_size, similarity)
    and/or a two-column run/similarity series file suitable for external
    plotting, and computes interval stability for each requested (t1, t2).
    """
    history = store.load_history(Path(store_root) / store.HISTORY_FILE)
    if not history:
        raise MissingHistoryError(f"{store_root}: no run history to report")
    if csv_path is not None:
        lines = ["run,tokens_seen,vocab_size,similarity"]
        for rec in history:
            lines.append(
                f"{rec.run_index},{rec.tokens_seen},{rec.vocab_size},"
                f"{rec.similarity_vs_previous:.6f}"
            )
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    if series_path is not None:
        lines = ["# run similarity"]
        for run_index, similarity in metrics.drift_series(history):
            lines.append(f"{run_index} {similarity:.6f}")
        with open(series_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    stability = [metrics.stability(history, t1, t2) for t1, t2 in (intervals or [])]
    return ReportOutput(
        history=history, stability=stability, csv_path=csv_path, series_path=series_path
    )
