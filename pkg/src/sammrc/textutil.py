"""Tokenisation helpers shared by the evaluator, quality and statistics code."""

from __future__ import annotations

import re
import string

_EDGE_PUNCT = string.punctuation.replace("'", "")

_SENT_BOUNDARY = re.compile(r"(?<=[.!?])\s+")


def strip_edge_punct(token: str) -> str:
    return token.strip(_EDGE_PUNCT)


def word_tokens(text: str) -> list[str]:
    """Whitespace tokens with edge punctuation stripped; empties dropped."""
    return [w for w in (strip_edge_punct(t) for t in text.split()) if w]


def find_token_seq(haystack: list[str], needle: list[str]) -> list[int]:
    """Start indices of every contiguous, case-insensitive match."""
    if not needle or len(needle) > len(haystack):
        return []
    hay = [t.lower() for t in haystack]
    ndl = [t.lower() for t in needle]
    return [i for i in range(len(hay) - len(ndl) + 1) if hay[i:i + len(ndl)] == ndl]


def contains_token_seq(haystack: list[str], needle: list[str]) -> bool:
    return bool(find_token_seq(haystack, needle))


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENT_BOUNDARY.split(text) if s.strip()]


def has_digit(token: str) -> bool:
    return any(c.isdigit() for c in token)
