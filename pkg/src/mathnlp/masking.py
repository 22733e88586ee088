"""TeX formula masking.

Math segments (``$...$``, ``$$...$$``, ``\\(...\\)``, ``\\[...\\]``) are
replaced by placeholder tokens of the shape ``formula-<letters>`` so that
sentence splitting, tokenization and tagging treat each formula as one
ordinary word token. After tagging/chunking the placeholders are swapped
back for the original TeX, delimiters included, byte-exactly.

Placeholders are deterministic: a digest of (doc_salt, formula) encoded in
lowercase letters. Identical formulas within one document therefore share
one placeholder, and repeated runs are reproducible.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

PLACEHOLDER_PREFIX = "formula-"
PLACEHOLDER_RE = re.compile(r"formula-[a-z]+")
_DIGEST_LETTERS = 16
_ALPHA = "abcdefghijklmnopqrstuvwxyz"


class UnbalancedDelimiterError(ValueError):
    """A math delimiter never closes (or closes without opening)."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


@dataclass
class FormulaTable:
    """Bijection placeholder token -> original TeX string for one document."""

    doc_salt: str = ""
    entries: dict[str, str] = field(default_factory=dict)

    def placeholder_for(self, tex: str) -> str:
        """Return the placeholder for ``tex``, allocating one if new."""
        token = encode_placeholder(tex, self.doc_salt)
        # Digest collisions are astronomically unlikely; disambiguate with a
        # letter-encoded counter so the mapping stays a bijection regardless.
        bump = 0
        while token in self.entries and self.entries[token] != tex:
            bump += 1
            token = encode_placeholder(tex, self.doc_salt) + _letters(bump)
        self.entries[token] = tex
        return token

    def to_record(self) -> dict:
        return {"doc_salt": self.doc_salt, "entries": dict(self.entries)}

    @classmethod
    def from_record(cls, rec: dict) -> "FormulaTable":
        return cls(doc_salt=rec.get("doc_salt", ""), entries=dict(rec.get("entries", {})))


def _letters(n: int, width: int = 1) -> str:
    """Encode a non-negative integer in base 26 over a..z."""
    digits = []
    while True:
        n, r = divmod(n, 26)
        digits.append(_ALPHA[r])
        if n == 0:
            break
    while len(digits) < width:
        digits.append("a")
    return "".join(reversed(digits))


def encode_placeholder(tex: str, doc_salt: str) -> str:
    """Deterministic placeholder token for a formula string.

    The digest of (doc_salt, tex) is encoded base-26 and truncated to 16
    letters, giving ~75 bits: collisions within a document are negligible.
    """
    if not tex:
        raise ValueError("cannot encode an empty formula")
    digest = hashlib.sha256(doc_salt.encode("utf-8") + b"\x00" + tex.encode("utf-8")).digest()
    n = int.from_bytes(digest[:12], "big")
    return PLACEHOLDER_PREFIX + _letters(n, width=_DIGEST_LETTERS)[-_DIGEST_LETTERS:]


def _find_math_segments(text: str) -> list[tuple[int, int]]:
    """Locate maximal math segments as (start, end) character spans.

    ``$$`` is tried before ``$`` (longest delimiter first); ``\\$`` is a
    literal dollar, not a delimiter. Unbalanced delimiters raise with the
    offset of the offending character.
    """
    spans = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt == "(":
                end = text.find("\\)", i + 2)
                if end < 0:
                    raise UnbalancedDelimiterError("unclosed \\(", i)
                spans.append((i, end + 2))
                i = end + 2
            elif nxt == "[":
                end = text.find("\\]", i + 2)
                if end < 0:
                    raise UnbalancedDelimiterError("unclosed \\[", i)
                spans.append((i, end + 2))
                i = end + 2
            elif nxt in (")", "]"):
                raise UnbalancedDelimiterError(f"closing \\{nxt} without opener", i)
            else:
                i += 2  # escaped character (\$ included) is literal text
        elif c == "$":
            if text.startswith("$$", i):
                end = text.find("$$", i + 2)
                if end < 0:
                    raise UnbalancedDelimiterError("unclosed $$", i)
                spans.append((i, end + 2))
                i = end + 2
            else:
                j = i + 1
                while j < n:
                    if text[j] == "$" and text[j - 1] != "\\":
                        break
                    j += 1
                else:
                    raise UnbalancedDelimiterError("unclosed $", i)
                spans.append((i, j + 1))
                i = j + 1
        else:
            i += 1
    return spans


def mask_formulae(text: str, doc_salt: str = "") -> tuple[str, FormulaTable]:
    """Replace every maximal math segment by one placeholder token.

    Returns the masked text (free of unescaped ``$``) and the formula table
    needed to undo the substitution.
    """
    table = FormulaTable(doc_salt=doc_salt)
    spans = _find_math_segments(text)
    if not spans:
        return text, table
    out = []
    prev = 0
    for start, end in spans:
        out.append(text[prev:start])
        out.append(table.placeholder_for(text[start:end]))
        prev = end
    out.append(text[prev:])
    return "".join(out), table


def unmask(text_or_phrase: str, table: FormulaTable) -> str:
    """Restore TeX for every placeholder known to ``table``.

    Placeholder-shaped tokens absent from the table are left untouched and
    reported as warnings (they are not an error: a document may legitimately
    mention such a token).
    """
    unknown: set[str] = set()

    def repl(match: re.Match) -> str:
        token = match.group(0)
        if token in table.entries:
            return table.entries[token]
        unknown.add(token)
        return token

    result = PLACEHOLDER_RE.sub(repl, text_or_phrase)
    for token in sorted(unknown):
        log.warning("unmask: unknown placeholder left in place: %s", token)
    return result
