"""Shared phrase normalization.

One implementation used by the keyphrase scorer and the vocabulary store so
that lookups agree: lowercase, strip one leading article, collapse
whitespace.
"""

from __future__ import annotations

_ARTICLES = {"the", "a", "an"}


def normalize_phrase(phrase: str) -> str:
    tokens = phrase.lower().split()
    if len(tokens) > 1 and tokens[0] in _ARTICLES:
        tokens = tokens[1:]
    return " ".join(tokens)


def singular_token(token: str) -> str:
    """Crude plural folding for similarity comparisons: strip one final 's'."""
    t = token.casefold()
    if len(t) > 3 and t.endswith("s") and not t.endswith("ss"):
        return t[:-1]
    return t
