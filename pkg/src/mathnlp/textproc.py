"""Sentence splitting, word tokenization, and acronym expansion.

Operates on masked text: formula placeholders are plain alphabetic tokens
by construction, so nothing here needs to know about TeX.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

TERMINATORS = ".!?"
_OPEN_PUNCT = "([{\"'`"
_CLOSE_PUNCT = ".,;:!?)]}\"'%"


@dataclass
class Sentence:
    tokens: list[str]
    span: tuple[int, int]


@dataclass
class AcronymEntry:
    expansion: str
    msc_top: Optional[str]
    frequency: int


@dataclass
class AcronymLexicon:
    """Acronym -> candidate expansions; an acronym may carry many meanings."""

    entries: dict[str, list[AcronymEntry]] = field(default_factory=dict)

    def add(self, acronym: str, expansion: str, msc_top: Optional[str], frequency: int) -> None:
        self.entries.setdefault(acronym, []).append(AcronymEntry(expansion, msc_top, frequency))

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    @classmethod
    def load(cls, path: Union[str, Path]) -> "AcronymLexicon":
        lex = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                acro, expansion, msc, freq = line.split("\t")
                lex.add(acro, expansion, msc or None, int(freq))
        return lex


def load_default_acronyms() -> AcronymLexicon:
    with resources.as_file(resources.files("mathnlp.data").joinpath("acronyms.tsv")) as p:
        return AcronymLexicon.load(p)


def _load_abbreviations() -> frozenset[str]:
    text = resources.files("mathnlp.data").joinpath("abbreviations.txt").read_text("utf-8")
    abbrevs = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            abbrevs.add(line.lower())
    return frozenset(abbrevs)


ABBREVIATIONS = _load_abbreviations()


def _word_before(text: str, pos: int) -> str:
    """The run of non-space characters ending just before ``pos``."""
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:pos]


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Split masked text into sentence spans (character offsets).

    A run of ``.!?`` ends a sentence unless the preceding word is a known
    abbreviation or a single initial ("J."). Spans jointly cover every
    non-whitespace character.
    """
    spans = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        c = text[i]
        if c in TERMINATORS:
            j = i
            while j + 1 < n and text[j + 1] in TERMINATORS + "\"')]":
                j += 1
            if c == ".":
                word = _word_before(text, i).lower().strip("([{\"'")
                if word in ABBREVIATIONS:
                    i += 1
                    continue
                # decimal number: digit on both sides of the dot
                if i > 0 and text[i - 1].isdigit() and i + 1 < n and text[i + 1].isdigit():
                    i += 1
                    continue
            end = j + 1
            if end >= n or text[end].isspace():
                seg = text[start:end].strip()
                if seg:
                    a = start + (len(text[start:end]) - len(text[start:end].lstrip()))
                    spans.append((a, a + len(seg)))
                start = end
                i = end
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        a = start + (len(text[start:]) - len(text[start:].lstrip()))
        spans.append((a, a + len(tail)))
    return spans


def _split_chunk(chunk: str) -> list[str]:
    """Split one whitespace-delimited chunk into Penn-style tokens.

    Paired punctuation and terminators peel off the ends; internal hyphens
    stay, so hyphenated words and ``formula-...`` placeholders survive as
    single tokens.
    """
    if not chunk:
        return []
    lead = []
    while chunk and chunk[0] in _OPEN_PUNCT:
        lead.append(chunk[0])
        chunk = chunk[1:]
    trail = []
    while chunk and chunk[-1] in _CLOSE_PUNCT:
        core = chunk[:-1]
        # keep abbreviation periods attached ("e.g." stays one token)
        if chunk[-1] == "." and core.lower() in ABBREVIATIONS:
            break
        trail.append(chunk[-1])
        chunk = core
    tokens = lead
    if chunk:
        tokens.append(chunk)
    tokens.extend(reversed(trail))
    return tokens


def tokenize(sentence_text: str) -> list[str]:
    """Tokenize one (masked) sentence; joining with spaces and re-tokenizing is idempotent."""
    tokens: list[str] = []
    for chunk in sentence_text.split():
        tokens.extend(_split_chunk(chunk))
    return tokens


def sentences_of(text: str) -> list[Sentence]:
    """Convenience: split and tokenize in one pass."""
    return [Sentence(tokens=tokenize(text[a:b]), span=(a, b)) for a, b in split_sentences(text)]


def expand_acronyms(
    tokens: list[str],
    lex: AcronymLexicon,
    context_msc: Optional[str] = None,
) -> tuple[list[str], list[tuple[int, str, str]]]:
    """Annotate acronym occurrences with their resolved expansion.

    Tokens are never rewritten; the chosen meaning is returned as
    (index, acronym, expansion) records. Resolution prefers entries whose
    subject code matches ``context_msc``, then the highest frequency, then
    the lexicographically least expansion.
    """
    expansions = []
    for idx, token in enumerate(tokens):
        entries = lex.entries.get(token)
        if not entries:
            continue
        candidates = [e for e in entries if context_msc and e.msc_top == context_msc] or entries
        best = min(candidates, key=lambda e: (-e.frequency, e.expansion))
        expansions.append((idx, token, best.expansion))
    return tokens, expansions
