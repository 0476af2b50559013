"""The agent's persistent internal representation.

A StateVector is a sparse map from token to cumulative occurrence count.
Counts only ever grow: there is no decay, no forgetting, no cap.  Raw integer
counts are the stored truth; the unit-norm view used for similarity is derived
on demand and never persisted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from driftstate.errors import EmptyStateError


@dataclass
class StateVector:
    """Cumulative token-count vector.

    Invariants: every stored count is >= 1, ``total_tokens`` equals the sum
    of all counts, and an update never lowers an existing count.
    """

    counts: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0

    @property
    def vocab_size(self) -> int:
        return len(self.counts)

    def copy(self) -> "StateVector":
        return StateVector(dict(self.counts), self.total_tokens)

    def update(self, tokens: list[str]) -> None:
        """Add one occurrence per token in the stream.

        Unseen tokens enter at their multiplicity; the result does not depend
        on the order of tokens within the stream.
        """
        added = 0
        counts = self.counts
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
            added += 1
        self.total_tokens += added

    def normalized(self) -> dict[str, float]:
        """Unit-L2 weight per token, keyed like ``counts``.

        Raises EmptyStateError on a zero vector: before any experience the
        state has no direction.
        """
        if self.total_tokens == 0:
            raise EmptyStateError("empty state has no direction to normalize")
        # Sorted iteration keeps the float accumulation bit-reproducible.
        norm = math.sqrt(sum(float(c) * float(c) for _, c in sorted(self.counts.items())))
        return {token: count / norm for token, count in self.counts.items()}
