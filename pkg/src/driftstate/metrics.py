"""Similarity and stability mathematics over states and run histories.

Drift between two states is measured as the cosine of the angle between
their count vectors, computed over the union of token keys with missing
entries treated as zero.  Because cosine is scale-invariant, raw counts and
unit-normalized weights give the same value.  Stability over an interval is
the arithmetic mean of the consecutive-run similarities inside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from driftstate.errors import EmptyStateError, IntervalError
from driftstate.state import StateVector

if TYPE_CHECKING:
    from driftstate.store import RunRecord


@dataclass(frozen=True)
class StabilityValue:
    """Mean consecutive similarity over the run interval (t1, t2]."""

    value: float
    t1: int
    t2: int


def cosine(a: StateVector, b: StateVector) -> float:
    """Cosine similarity between two count vectors.

    Sums ``a[t] * b[t]`` over the union of token keys and divides by the
    product of the L2 norms.  Symmetric, scale-invariant, and in [0, 1]
    (within float error) for non-negative counts.  Keys are visited in
    sorted order so the accumulation is bit-reproducible.

    Raises EmptyStateError if either vector is zero: similarity against
    no experience is undefined.
    """
    if a.total_tokens == 0 or b.total_tokens == 0:
        raise EmptyStateError("cosine similarity is undefined for an empty state")
    dot = 0.0
    norm_a = 0.0
    norm_b = 0.0
    for key in sorted(set(a.counts) | set(b.counts)):
        x = float(a.counts.get(key, 0))
        y = float(b.counts.get(key, 0))
        dot += x * y
        norm_a += x * x
        norm_b += y * y
    return dot / (math.sqrt(norm_a) * math.sqrt(norm_b))


def stability(history: Sequence["RunRecord"], t1: int, t2: int) -> StabilityValue:
    """Mean of the stored consecutive similarities for runs t1+1 through t2.

    ``history`` must hold contiguous run records starting at run 1.  Raises
    IntervalError when t1 >= t2 or the interval reaches outside the history.
    """
    if t1 >= t2:
        raise IntervalError(f"interval ({t1}, {t2}) is empty or inverted")
    if t1 < 0 or t2 > len(history):
        raise IntervalError(
            f"interval ({t1}, {t2}) is outside the recorded history of {len(history)} runs"
        )
    sims = [history[t - 1].similarity_vs_previous for t in range(t1 + 1, t2 + 1)]
    return StabilityValue(value=math.fsum(sims) / len(sims), t1=t1, t2=t2)


def drift_series(history: Sequence["RunRecord"]) -> list[tuple[int, float]]:
    """Per-run similarity series in run order, ready for plotting."""
    return [(record.run_index, record.similarity_vs_previous) for record in history]
