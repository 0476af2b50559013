"""Exception types shared across the package.

Every error the library raises deliberately derives from DriftStateError so
callers (and the CLI exit-code mapping) can distinguish failure classes.
"""


class DriftStateError(Exception):
    """Base class for all driftstate errors."""


class EmptyStateError(DriftStateError):
    """A zero state vector has no direction; normalization and similarity are undefined."""


class CorruptStoreError(DriftStateError):
    """A persisted store file is malformed or violates its declared invariants."""


class SequenceError(DriftStateError):
    """A history append would break the contiguous run-index sequence."""


class DigestMismatchError(DriftStateError):
    """A previously ingested document changed or disappeared; past experience is immutable."""


class LockHeldError(DriftStateError):
    """Another execution holds the run lock; this run must abort untouched."""


class SpecValidationError(DriftStateError):
    """A corpus spec is malformed or demands the impossible."""


class MissingHistoryError(DriftStateError):
    """Reporting was requested on a store with no run history."""


class NonEmptyStoreError(DriftStateError):
    """A protocol demands a fresh store; accumulated stores cannot be rewound."""


class IntervalError(DriftStateError):
    """A stability interval is empty, inverted, or outside the recorded history."""
