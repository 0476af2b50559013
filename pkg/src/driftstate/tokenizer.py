"""Deterministic text tokenization.

A token is a maximal run of Unicode letters (category L*) or decimal digits
(category Nd) after NFC normalization and lowercasing.  Everything else is a
separator.  No stop words, no stemming, no locale dependence: identical bytes
always tokenize identically, on every platform.
"""

from __future__ import annotations

import unicodedata
from functools import lru_cache


@lru_cache(maxsize=None)
def _is_token_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat == "Nd"


def tokenize(text: str) -> list[str]:
    """Split text into lowercase letter/digit tokens.

    Applies NFC normalization, lowercases, then splits on every maximal run
    of characters that are neither letters nor decimal digits.  Empty input
    yields an empty list.  Order and duplicates are preserved.
    """
    normalized = unicodedata.normalize("NFC", text).lower()
    tokens: list[str] = []
    current: list[str] = []
    for ch in normalized:
        if _is_token_char(ch):
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens
