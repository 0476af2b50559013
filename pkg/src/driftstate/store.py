"""Durable persistence for state, run history, and the document manifest.

All files are UTF-8 with LF line endings and canonical ordering, so equal
content always produces equal bytes.  Formats:

* ``state.v1``     line 1 ``state.v1``, line 2 ``total <n>``, then one
                   ``<token> <count>`` pair per line in sorted token order.
* ``history.csv``  header ``run,timestamp,tokens_seen,vocab_size,similarity,
                   perturbation``; similarity at 6 decimals, perturbation 0/1.
* ``manifest.txt`` one ``<digest>  <run_index>  <path>`` line per ingested
                   document, sorted by path.

State and manifest writes go through a temp file and an atomic rename, so a
reader (or a crash) sees either the old complete file or the new one.  Nothing
here ever removes a count, a manifest entry, or a history row.
"""

from __future__ import annotations

import fcntl
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from driftstate.errors import CorruptStoreError, LockHeldError, SequenceError
from driftstate.state import StateVector

STATE_FILE = "state.v1"
HISTORY_FILE = "history.csv"
MANIFEST_FILE = "manifest.txt"
LOCK_FILE = "run.lock"

HISTORY_HEADER = "run,timestamp,tokens_seen,vocab_size,similarity,perturbation"


@dataclass(frozen=True)
class RunRecord:
    """One row of the longitudinal history."""

    run_index: int
    timestamp: str
    tokens_seen: int
    vocab_size: int
    similarity_vs_previous: float
    perturbation: bool = False


@dataclass(frozen=True)
class ManifestEntry:
    digest: str
    run_index: int


HistoryLog = list[RunRecord]
Manifest = dict[str, ManifestEntry]


def utc_timestamp() -> str:
    """Current UTC instant as ISO-8601 (second precision, Z suffix)."""
    return datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


# --- state vector ---------------------------------------------------------


def save_state(path: Path, state: StateVector) -> None:
    """Write the state vector canonically (sorted keys) and atomically."""
    lines = [STATE_FILE, f"total {state.total_tokens}"]
    for token in sorted(state.counts):
        lines.append(f"{token} {state.counts[token]}")
    _atomic_write(path, "\n".join(lines) + "\n")


def load_state(path: Path) -> StateVector:
    """Read a state file back, integer-exact.

    An absent path is a brand-new agent and yields an empty state.  Anything
    malformed raises CorruptStoreError instead of silently resetting
    accumulated experience.
    """
    path = Path(path)
    if not path.exists():
        return StateVector()
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != STATE_FILE:
        raise CorruptStoreError(f"{path}: missing '{STATE_FILE}' format header")
    if len(lines) < 2 or not lines[1].startswith("total "):
        raise CorruptStoreError(f"{path}: missing total declaration")
    try:
        declared_total = int(lines[1][len("total "):])
    except ValueError:
        raise CorruptStoreError(f"{path}: total is not an integer") from None
    counts: dict[str, int] = {}
    for lineno, line in enumerate(lines[2:], start=3):
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0]:
            raise CorruptStoreError(f"{path}:{lineno}: expected '<token> <count>'")
        token, raw_count = parts
        try:
            count = int(raw_count)
        except ValueError:
            raise CorruptStoreError(f"{path}:{lineno}: count is not an integer") from None
        if count < 1:
            raise CorruptStoreError(f"{path}:{lineno}: count must be >= 1, got {count}")
        if token in counts:
            raise CorruptStoreError(f"{path}:{lineno}: duplicate token {token!r}")
        counts[token] = count
    actual_total = sum(counts.values())
    if actual_total != declared_total:
        raise CorruptStoreError(
            f"{path}: declared total {declared_total} != sum of counts {actual_total}"
        )
    return StateVector(counts, declared_total)


# --- run history ----------------------------------------------------------


def _format_record(record: RunRecord) -> str:
    return (
        f"{record.run_index},{record.timestamp},{record.tokens_seen},"
        f"{record.vocab_size},{record.similarity_vs_previous:.6f},"
        f"{int(record.perturbation)}"
    )


def append_run_record(path: Path, record: RunRecord) -> None:
    """Append exactly one history row.

    The record's run index must extend the log contiguously (1 for an empty
    log); token and vocabulary columns may never shrink.
    """
    path = Path(path)
    history = load_history(path)
    expected = history[-1].run_index + 1 if history else 1
    if record.run_index != expected:
        raise SequenceError(
            f"run index {record.run_index} does not extend the log (expected {expected})"
        )
    if history:
        last = history[-1]
        if record.tokens_seen < last.tokens_seen or record.vocab_size < last.vocab_size:
            raise ValueError("tokens_seen and vocab_size may never decrease")
    if not 0.0 <= record.similarity_vs_previous <= 1.0:
        raise ValueError(f"similarity {record.similarity_vs_previous} outside [0, 1]")
    is_new = not path.exists()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        if is_new:
            fh.write(HISTORY_HEADER + "\n")
        fh.write(_format_record(record) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def load_history(path: Path) -> HistoryLog:
    """Read the run history; absent file means no runs yet."""
    path = Path(path)
    if not path.exists():
        return []
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != HISTORY_HEADER:
        raise CorruptStoreError(f"{path}: bad or missing history header")
    records: HistoryLog = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 6:
            raise CorruptStoreError(f"{path}:{lineno}: expected 6 fields, got {len(fields)}")
        try:
            record = RunRecord(
                run_index=int(fields[0]),
                timestamp=fields[1],
                tokens_seen=int(fields[2]),
                vocab_size=int(fields[3]),
                similarity_vs_previous=float(fields[4]),
                perturbation=bool(int(fields[5])),
            )
        except ValueError:
            raise CorruptStoreError(f"{path}:{lineno}: unparseable history row") from None
        if record.run_index != len(records) + 1:
            raise CorruptStoreError(
                f"{path}:{lineno}: run index {record.run_index} breaks the sequence"
            )
        records.append(record)
    return records


# --- document manifest ----------------------------------------------------


def save_manifest(path: Path, manifest: Manifest) -> None:
    """Write the manifest canonically (sorted by document id) and atomically."""
    lines = [
        f"{entry.digest}  {entry.run_index}  {doc_id}"
        for doc_id, entry in sorted(manifest.items())
    ]
    _atomic_write(path, "".join(line + "\n" for line in lines))


def load_manifest(path: Path) -> Manifest:
    path = Path(path)
    if not path.exists():
        return {}
    manifest: Manifest = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise CorruptStoreError(f"{path}:{lineno}: expected '<digest>  <run>  <path>'")
        digest, raw_run, doc_id = parts
        try:
            run_index = int(raw_run)
        except ValueError:
            raise CorruptStoreError(f"{path}:{lineno}: run index is not an integer") from None
        if doc_id in manifest:
            raise CorruptStoreError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
        manifest[doc_id] = ManifestEntry(digest, run_index)
    return manifest


# --- run lock ---------------------------------------------------------------


class RunLock:
    """Exclusive advisory lock held for the duration of one execution."""

    def __init__(self, fd: int, path: Path):
        self._fd: int | None = fd
        self.path = path

    def release(self) -> None:
        if self._fd is not None:
            fcntl.flock(self._fd, fcntl.LOCK_UN)
            os.close(self._fd)
            self._fd = None

    def __enter__(self) -> "RunLock":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.release()


def acquire_run_lock(store_root: Path) -> RunLock:
    """Take the store's run lock, failing fast if another run holds it."""
    store_root = Path(store_root)
    store_root.mkdir(parents=True, exist_ok=True)
    lock_path = store_root / LOCK_FILE
    fd = os.open(lock_path, os.O_CREAT | os.O_RDWR, 0o644)
    try:
        fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
    except OSError:
        os.close(fd)
        raise LockHeldError(f"another run holds the lock at {lock_path}") from None
    return RunLock(fd, lock_path)
