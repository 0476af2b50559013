"""Command-line interface.

Subcommands: ``init``, ``run``, ``gen-corpus``, ``protocol``, ``report``.
Every distinct failure class maps to its own exit code so schedulers can
react (retry on a held lock, page on a corrupt store, and so on).  The store
root may come from ``--store`` or the DRIFTSTATE_STORE environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from driftstate import agent, corpus, store
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

STORE_ENV_VAR = "DRIFTSTATE_STORE"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_LOCK_HELD = 3
EXIT_CORRUPT_STORE = 4
EXIT_DIGEST_MISMATCH = 5
EXIT_MISSING_HISTORY = 6
EXIT_NON_EMPTY_STORE = 7
EXIT_SEQUENCE = 8

_EXIT_CODES: list[tuple[type[DriftStateError], int]] = [
    (LockHeldError, EXIT_LOCK_HELD),
    (CorruptStoreError, EXIT_CORRUPT_STORE),
    (DigestMismatchError, EXIT_DIGEST_MISMATCH),
    (MissingHistoryError, EXIT_MISSING_HISTORY),
    (NonEmptyStoreError, EXIT_NON_EMPTY_STORE),
    (SequenceError, EXIT_SEQUENCE),
    (SpecValidationError, EXIT_VALIDATION),
    (IntervalError, EXIT_VALIDATION),
    (EmptyStateError, EXIT_VALIDATION),
]


def exit_code_for(exc: DriftStateError) -> int:
    for exc_type, code in _EXIT_CODES:
        if isinstance(exc, exc_type):
            return code
    return EXIT_FAILURE


def _store_root(args: argparse.Namespace, parser: argparse.ArgumentParser) -> Path:
    if args.store:
        return Path(args.store)
    env = os.environ.get(STORE_ENV_VAR)
    if env:
        return Path(env)
    parser.error(f"--store is required (or set {STORE_ENV_VAR})")
    raise AssertionError("unreachable")


def _interval(raw: str) -> tuple[int, int]:
    try:
        t1, t2 = raw.split(":")
        return int(t1), int(t2)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected t1:t2, got {raw!r}") from None


def _print_record(record: store.RunRecord) -> None:
    print(
        f"run {record.run_index}: tokens_seen={record.tokens_seen} "
        f"vocab_size={record.vocab_size} "
        f"similarity={record.similarity_vs_previous:.6f}"
        + (" [perturbation]" if record.perturbation else "")
    )


def cmd_init(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    root = Path(args.store_dir)
    root.mkdir(parents=True, exist_ok=True)
    print(f"initialized store at {root}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = agent.AgentConfig(corpus_root=Path(args.corpus), store_root=_store_root(args, parser))
    record = agent.run_once(config)
    _print_record(record)
    return EXIT_OK


def cmd_gen_corpus(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = corpus.load_corpus_spec(Path(args.spec))
    documents = [doc for _, doc in corpus.generate_corpus(spec)]
    written = corpus.stage_documents(documents, Path(args.out), overwrite=args.overwrite)
    print(f"generated {len(documents)} documents ({len(written)} written) in {args.out}")
    return EXIT_OK


def cmd_protocol(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = corpus.load_corpus_spec(Path(args.spec))
    store_root = _store_root(args, parser)
    corpus_root = Path(args.corpus) if args.corpus else store_root / "corpus"
    config = agent.AgentConfig(corpus_root=corpus_root, store_root=store_root)
    result = agent.run_protocol(spec, config)
    for record in result.history:
        _print_record(record)
    for name, stab in result.stability.items():
        print(f"S({stab.t1},{stab.t2}) [{name}] = {stab.value:.6f}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    store_root = _store_root(args, parser)
    output = agent.report(
        store_root,
        csv_path=Path(args.csv) if args.csv else None,
        series_path=Path(args.series) if args.series else None,
        intervals=args.interval,
    )
    if output.csv_path:
        print(f"wrote {output.csv_path}")
    if output.series_path:
        print(f"wrote {output.series_path}")
    for stab in output.stability:
        print(f"S({stab.t1},{stab.t2}) = {stab.value:.6f}")
    if not (output.csv_path or output.series_path or output.stability):
        for record in output.history:
            _print_record(record)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftstate",
        description="Persistent continual-learning agent with drift measurement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create an empty store directory")
    p_init.add_argument("store_dir", help="store directory to create")
    p_init.set_defaults(func=cmd_init)

    p_run = sub.add_parser("run", help="execute one learning iteration")
    p_run.add_argument("--corpus", required=True, help="corpus directory to observe")
    p_run.add_argument("--store", help=f"store directory (default: ${STORE_ENV_VAR})")
    p_run.set_defaults(func=cmd_run)

    p_gen = sub.add_parser("gen-corpus", help="generate a synthetic corpus from a spec")
    p_gen.add_argument("--spec", required=True, help="corpus spec file (YAML)")
    p_gen.add_argument("--out", required=True, help="output directory for document files")
    p_gen.add_argument("--overwrite", action="store_true", help="replace existing files")
    p_gen.set_defaults(func=cmd_gen_corpus)

    p_proto = sub.add_parser("protocol", help="run a full multi-run protocol on a fresh store")
    p_proto.add_argument("--spec", required=True, help="corpus spec file (YAML)")
    p_proto.add_argument("--store", help=f"store directory (default: ${STORE_ENV_VAR})")
    p_proto.add_argument("--corpus", help="corpus staging directory (default: <store>/corpus)")
    p_proto.set_defaults(func=cmd_protocol)

    p_report = sub.add_parser("report", help="emit history CSV, similarity series, stability")
    p_report.add_argument("--store", help=f"store directory (default: ${STORE_ENV_VAR})")
    p_report.add_argument("--csv", help="write per-run summary CSV here")
    p_report.add_argument("--series", help="write run/similarity series here")
    p_report.add_argument(
        "--interval",
        action="append",
        type=_interval,
        default=[],
        metavar="T1:T2",
        help="stability interval; may repeat",
    )
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except DriftStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
