"""Document records and line-delimited corpus I/O.

A corpus file is UTF-8 JSON lines, one document per line, so large
collections can stream. Unknown fields are ignored for forward
compatibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .msc import UnknownMscCodeError, validate_code


class CorpusError(ValueError):
    """Corpus-level validation failure, positioned by line number where possible."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateIdError(CorpusError):
    pass


@dataclass
class Document:
    """One bibliographic record: title and abstract text may contain TeX."""

    id: str
    title: str = ""
    text: str = ""
    author_keyphrases: list[str] = field(default_factory=list)
    msc_primary: str | None = None
    msc_secondary: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be nonempty")
        if self.msc_primary is not None:
            validate_code(self.msc_primary)
        for code in self.msc_secondary:
            validate_code(code)
        if self.msc_primary is not None and self.msc_primary in self.msc_secondary:
            raise CorpusError(
                f"document {self.id!r}: primary code {self.msc_primary!r} repeated in secondaries"
            )

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "text": self.text,
            "author_keyphrases": list(self.author_keyphrases),
            "msc_primary": self.msc_primary,
            "msc_secondary": list(self.msc_secondary),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Document":
        if not isinstance(rec, dict):
            raise CorpusError(f"record must be an object, got {type(rec).__name__}")
        if "id" not in rec:
            raise CorpusError("record missing required field 'id'")
        return cls(
            id=str(rec["id"]),
            title=str(rec.get("title", "")),
            text=str(rec.get("text", "")),
            author_keyphrases=[str(k) for k in rec.get("author_keyphrases", []) or []],
            msc_primary=rec.get("msc_primary"),
            msc_secondary=[str(c) for c in rec.get("msc_secondary", []) or []],
        )


def iter_corpus(path: Union[str, Path]) -> Iterable[Document]:
    """Yield validated documents one line at a time; duplicate ids rejected."""
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed record: {exc}", line=lineno) from exc
            try:
                doc = Document.from_record(rec)
            except UnknownMscCodeError as exc:
                raise CorpusError(str(exc), line=lineno) from exc
            except CorpusError as exc:
                raise CorpusError(str(exc), line=lineno) from exc
            if doc.id in seen:
                raise DuplicateIdError(f"duplicate document id {doc.id!r}", line=lineno)
            seen.add(doc.id)
            yield doc


def load_corpus(path: Union[str, Path]) -> list[Document]:
    return list(iter_corpus(path))


def save_corpus(docs: Iterable[Document], path: Union[str, Path]) -> None:
    """Write one JSON record per line; load_corpus(save_corpus(docs)) == docs."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc.to_record(), ensure_ascii=False))
            fh.write("\n")
