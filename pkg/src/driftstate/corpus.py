"""Cumulative corpus ingestion and seeded synthetic corpus generation.

Ingestion side: a corpus directory is append-only experience.  Scanning
returns only documents the manifest has never seen, in sorted path order, and
refuses to proceed if any previously ingested document changed or vanished.

Generation side: synthetic multi-run corpora with controllable vocabulary
overlap.  Two disjoint token pools ("base…" and "alt…") stand in for two
lexical domains; token draws within a pool are rank-inverse (heavy-tailed)
so repeated exposure reuses frequent tokens the way natural text does.
Generation is a pure function of the spec: same spec, same bytes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
import yaml

from driftstate.errors import DigestMismatchError, SpecValidationError
from driftstate.store import Manifest

BASE_POOL = "base"
PERTURBATION_POOL = "perturbation"

TOKENS_PER_LINE = 12

# Per-run document lengths for the default eight-run protocol: four runs of
# in-domain text, one long off-domain document at run 5, then three in-domain
# recovery runs.
DEFAULT_RUN_TOKEN_COUNTS = (48, 38, 33, 34, 240, 37, 34, 33)
DEFAULT_PERTURBATION_RUN = 5
DEFAULT_POOL_SIZE = 300
DEFAULT_SEED = 42

# Named intervals summarized after the default eight-run protocol.
DEFAULT_PHASES: dict[str, tuple[int, int]] = {
    "plastic": (1, 3),
    "stable": (3, 4),
    "perturbation": (4, 5),
    "recovery": (5, 8),
}


def content_digest(data: bytes) -> str:
    """Hex SHA-256 of raw document bytes; the manifest's identity check."""
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class Document:
    """One identified unit of textual experience."""

    id: str
    text: str
    digest: str

    @property
    def ordering_key(self) -> str:
        return self.id


@dataclass(frozen=True)
class RunRecipe:
    """How to generate the documents of one scheduled run."""

    doc_count: int
    tokens_per_doc: int
    pool: str = BASE_POOL
    overlap: float = 0.0


@dataclass(frozen=True)
class CorpusSpec:
    """Seeded recipe for a synthetic multi-run corpus.

    ``overlap`` on a perturbation recipe is the fraction of that document's
    token draws taken from the base pool: 0.0 gives a fully disjoint
    vocabulary, 1.0 collapses the perturbation into in-domain text.
    """

    seed: int
    runs: tuple[RunRecipe, ...]
    base_pool_size: int = DEFAULT_POOL_SIZE
    perturbation_pool_size: int = DEFAULT_POOL_SIZE
    phases: dict[str, tuple[int, int]] | None = field(default=None)


def default_spec(seed: int = DEFAULT_SEED) -> CorpusSpec:
    """The standard eight-run protocol spec: perturbation at run 5, overlap 0."""
    runs = tuple(
        RunRecipe(
            doc_count=1,
            tokens_per_doc=n,
            pool=PERTURBATION_POOL if run == DEFAULT_PERTURBATION_RUN else BASE_POOL,
            overlap=0.0,
        )
        for run, n in enumerate(DEFAULT_RUN_TOKEN_COUNTS, start=1)
    )
    return CorpusSpec(seed=seed, runs=runs, phases=dict(DEFAULT_PHASES))


def resolve_phases(spec: CorpusSpec) -> dict[str, tuple[int, int]]:
    """Phase intervals to summarize: the spec's own, else the standard four
    when the spec has the standard eight runs, else none."""
    if spec.phases is not None:
        return dict(spec.phases)
    if len(spec.runs) == len(DEFAULT_RUN_TOKEN_COUNTS):
        return dict(DEFAULT_PHASES)
    return {}


def validate_spec(spec: CorpusSpec) -> None:
    if not 0 <= spec.seed < 2**64:
        raise SpecValidationError("seed must be a 64-bit unsigned integer")
    if not spec.runs:
        raise SpecValidationError("spec must declare at least one run")
    if spec.base_pool_size < 1:
        raise SpecValidationError("base_pool_size must be >= 1")
    for index, recipe in enumerate(spec.runs, start=1):
        if recipe.doc_count < 1:
            raise SpecValidationError(f"run {index}: doc_count must be >= 1")
        if recipe.tokens_per_doc < 1:
            raise SpecValidationError(f"run {index}: tokens_per_doc must be >= 1")
        if recipe.pool not in (BASE_POOL, PERTURBATION_POOL):
            raise SpecValidationError(f"run {index}: unknown pool {recipe.pool!r}")
        if not 0.0 <= recipe.overlap <= 1.0:
            raise SpecValidationError(f"run {index}: overlap must lie in [0, 1]")
        if recipe.pool == PERTURBATION_POOL and spec.perturbation_pool_size < 1:
            raise SpecValidationError("perturbation_pool_size must be >= 1")
    if spec.phases is not None:
        for name, interval in spec.phases.items():
            if len(interval) != 2 or not all(isinstance(t, int) for t in interval):
                raise SpecValidationError(f"phase {name!r}: interval must be two run indices")
            t1, t2 = interval
            if not 0 <= t1 < t2 <= len(spec.runs):
                raise SpecValidationError(f"phase {name!r}: interval ({t1}, {t2}) out of range")


# --- ingestion --------------------------------------------------------------


def scan_new_documents(corpus_root: Path, manifest: Manifest) -> list[Document]:
    """Documents under corpus_root that the manifest has never seen.

    Results are sorted by ordering key (relative path).  Every document the
    manifest does list is re-digested first; a changed or missing file raises
    DigestMismatchError, because past experience must stay available and
    unmodified.
    """
    corpus_root = Path(corpus_root)
    files = {
        p.relative_to(corpus_root).as_posix(): p
        for p in corpus_root.rglob("*")
        if p.is_file()
    }
    for doc_id, entry in manifest.items():
        path = files.get(doc_id)
        if path is None:
            raise DigestMismatchError(f"{doc_id}: previously ingested document is missing")
        digest = content_digest(path.read_bytes())
        if digest != entry.digest:
            raise DigestMismatchError(
                f"{doc_id}: content changed since ingestion "
                f"(expected {entry.digest[:12]}…, found {digest[:12]}…)"
            )
    new_docs = []
    for doc_id in sorted(files):
        if doc_id in manifest:
            continue
        data = files[doc_id].read_bytes()
        new_docs.append(Document(doc_id, data.decode("utf-8"), content_digest(data)))
    return new_docs


def stage_documents(documents: Iterable[Document], out_dir: Path, overwrite: bool = False) -> list[Path]:
    """Write documents as UTF-8 text files under out_dir.

    Existing files are left alone unless ``overwrite`` is set, so a
    deterministic corpus can be re-staged over itself harmlessly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for doc in documents:
        path = out_dir / doc.id
        if path.exists() and not overwrite:
            continue
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc.text)
        written.append(path)
    return written


# --- generation --------------------------------------------------------------


def _rank_inverse_cdf(pool_size: int) -> np.ndarray:
    weights = 1.0 / np.arange(1, pool_size + 1, dtype=np.float64)
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    cdf[-1] = 1.0  # guard against cumulative rounding
    return cdf


def _draw_rank(rng: np.random.Generator, cdf: np.ndarray) -> int:
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(idx, len(cdf) - 1)


def _layout(tokens: list[str]) -> str:
    lines = [
        " ".join(tokens[i : i + TOKENS_PER_LINE])
        for i in range(0, len(tokens), TOKENS_PER_LINE)
    ]
    return "\n".join(lines) + "\n"


def generate_corpus(spec: CorpusSpec) -> list[tuple[int, Document]]:
    """Generate the scheduled documents for every run in the spec.

    Returns (run_index, document) pairs in schedule order.  The pseudo-random
    source is a counter-based Philox generator keyed by the spec seed, so the
    output is a deterministic function of the spec alone.

    For a perturbation recipe, ``round(overlap * tokens_per_doc)`` of the
    document's draws come from the base pool and the rest from the disjoint
    perturbation pool; overlap 0 therefore shares no vocabulary with base runs.
    """
    validate_spec(spec)
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    base_cdf = _rank_inverse_cdf(spec.base_pool_size)
    pert_cdf = _rank_inverse_cdf(spec.perturbation_pool_size)
    documents: list[tuple[int, Document]] = []
    for run_index, recipe in enumerate(spec.runs, start=1):
        for doc_number in range(1, recipe.doc_count + 1):
            n = recipe.tokens_per_doc
            if recipe.pool == BASE_POOL:
                from_base = n
            else:
                from_base = int(recipe.overlap * n + 0.5)
            tokens = []
            for j in range(n):
                if j < from_base:
                    tokens.append(f"base{_draw_rank(rng, base_cdf)}")
                else:
                    tokens.append(f"alt{_draw_rank(rng, pert_cdf)}")
            text = _layout(tokens)
            doc_id = f"day{run_index:02d}_doc{doc_number:02d}.txt"
            documents.append(
                (run_index, Document(doc_id, text, content_digest(text.encode("utf-8"))))
            )
    return documents


# --- spec files --------------------------------------------------------------

_TOP_LEVEL_KEYS = {"seed", "base_pool_size", "perturbation_pool_size", "runs", "phases"}
_RUN_KEYS = {"doc_count", "tokens_per_doc", "pool", "overlap"}


def load_corpus_spec(path: Path) -> CorpusSpec:
    """Parse a spec file (YAML key-value document with a ``runs`` list)."""
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise SpecValidationError(f"{path}: not parseable as YAML ({exc})") from None
    if not isinstance(data, dict):
        raise SpecValidationError(f"{path}: spec must be a key-value document")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise SpecValidationError(f"{path}: unknown keys {sorted(unknown)}")
    if "seed" not in data or "runs" not in data:
        raise SpecValidationError(f"{path}: 'seed' and 'runs' are required")
    raw_runs = data["runs"]
    if not isinstance(raw_runs, list):
        raise SpecValidationError(f"{path}: 'runs' must be a list")
    runs = []
    for index, raw in enumerate(raw_runs, start=1):
        if not isinstance(raw, dict):
            raise SpecValidationError(f"{path}: run {index} must be a mapping")
        unknown = set(raw) - _RUN_KEYS
        if unknown:
            raise SpecValidationError(f"{path}: run {index}: unknown keys {sorted(unknown)}")
        try:
            runs.append(
                RunRecipe(
                    doc_count=int(raw.get("doc_count", 1)),
                    tokens_per_doc=int(raw["tokens_per_doc"]),
                    pool=str(raw.get("pool", BASE_POOL)),
                    overlap=float(raw.get("overlap", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError):
            raise SpecValidationError(f"{path}: run {index} is malformed") from None
    phases = None
    if "phases" in data and data["phases"] is not None:
        raw_phases = data["phases"]
        if not isinstance(raw_phases, dict):
            raise SpecValidationError(f"{path}: 'phases' must be a mapping")
        phases = {}
        for name, interval in raw_phases.items():
            if not isinstance(interval, (list, tuple)) or len(interval) != 2:
                raise SpecValidationError(f"{path}: phase {name!r} must be [t1, t2]")
            phases[str(name)] = (int(interval[0]), int(interval[1]))
    try:
        spec = CorpusSpec(
            seed=int(data["seed"]),
            runs=tuple(runs),
            base_pool_size=int(data.get("base_pool_size", DEFAULT_POOL_SIZE)),
            perturbation_pool_size=int(data.get("perturbation_pool_size", DEFAULT_POOL_SIZE)),
            phases=phases,
        )
    except (TypeError, ValueError):
        raise SpecValidationError(f"{path}: numeric fields are malformed") from None
    validate_spec(spec)
    return spec


def save_corpus_spec(spec: CorpusSpec, path: Path) -> None:
    """Write a spec as a YAML document readable by ``load_corpus_spec``."""
    data: dict[str, object] = {
        "seed": spec.seed,
        "base_pool_size": spec.base_pool_size,
        "perturbation_pool_size": spec.perturbation_pool_size,
        "runs": [
            {
                "doc_count": r.doc_count,
                "tokens_per_doc": r.tokens_per_doc,
                "pool": r.pool,
                "overlap": r.overlap,
            }
            for r in spec.runs
        ],
    }
    if spec.phases is not None:
        data["phases"] = {name: list(interval) for name, interval in spec.phases.items()}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(data, fh, sort_keys=False)
