"""Persistent controlled vocabulary built from expert decisions.

Accepted phrases form the good list, rejected ones the bad list; an edit
retires the original and accepts the replacement. Every decision appends to
an audit log; a snapshot file gives fast startup, with the log replayed on
top. A single writer is enforced with a lock so the review service can
serve concurrent readers safely.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from .corpus import Document
from .normalize import normalize_phrase

GOOD = "GOOD"
BAD = "BAD"
CANDIDATE = "CANDIDATE"

_VERDICT_STATUS = {"accept": GOOD, "reject": BAD}


class VocabError(ValueError):
    pass


@dataclass
class VocabEntry:
    phrase: str
    status: str = CANDIDATE
    frequency: int = 1
    msc_top: Optional[str] = None
    history: list[tuple[float, str, str]] = field(default_factory=list)


class VocabStore:
    """In-memory phrase map with append-only log persistence."""

    def __init__(
        self,
        log_path: Optional[Union[str, Path]] = None,
        snapshot_path: Optional[Union[str, Path]] = None,
    ):
        self._entries: dict[str, VocabEntry] = {}
        self._lock = threading.Lock()
        self.log_path = Path(log_path) if log_path else None
        self.snapshot_path = Path(snapshot_path) if snapshot_path else None
        self._log_fh = None
        self._log_lines = 0
        self._load()
        if self.log_path:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            self._log_fh = open(self.log_path, "a", encoding="utf-8")

    # -- loading ---------------------------------------------------------

    def _load(self) -> None:
        watermark = 0
        if self.snapshot_path and self.snapshot_path.exists():
            for line in self.snapshot_path.read_text("utf-8").splitlines():
                if line.startswith("#loglines\t"):
                    watermark = int(line.split("\t")[1])
                    continue
                if not line or line.startswith("#"):
                    continue
                phrase, status, freq, msc = (line.split("\t") + ["", "", "", ""])[:4]
                self._entries[phrase] = VocabEntry(
                    phrase=phrase, status=status, frequency=int(freq or 1), msc_top=msc or None
                )
        if self.log_path and self.log_path.exists():
            lines = [ln for ln in self.log_path.read_text("utf-8").splitlines() if ln]
            # the snapshot already folds in the first `watermark` log lines
            for line in lines[watermark:]:
                ts, verdict, phrase, replacement, source = (line.split("\t") + [""] * 5)[:5]
                self._apply(float(ts), verdict, phrase, replacement or None, source)
            self._log_lines = len(lines)

    # -- core updates ----------------------------------------------------

    def _entry(self, phrase: str) -> VocabEntry:
        entry = self._entries.get(phrase)
        if entry is None:
            entry = VocabEntry(phrase=phrase)
            self._entries[phrase] = entry
        else:
            entry.frequency += 1
        return entry

    def _apply(
        self, ts: float, verdict: str, phrase: str, replacement: Optional[str], source: str
    ) -> VocabEntry:
        if verdict == "edit":
            if not replacement:
                raise VocabError("edit verdict requires a replacement phrase")
            original = self._entry(phrase)
            original.status = BAD
            original.history.append((ts, "edit", source))
            new = self._entry(replacement)
            new.status = GOOD
            new.history.append((ts, "accept", source))
            return new
        status = _VERDICT_STATUS.get(verdict)
        if status is None:
            raise VocabError(f"unknown verdict {verdict!r}")
        entry = self._entry(phrase)
        entry.status = status
        entry.history.append((ts, verdict, source))
        return entry

    def record_decision(
        self,
        phrase: str,
        verdict: str,
        source: str = "",
        replacement: Optional[str] = None,
    ) -> VocabEntry:
        """Apply one expert verdict (accept | reject | edit) and log it."""
        norm = normalize_phrase(phrase)
        if not norm:
            raise VocabError("phrase is empty after normalization")
        norm_repl = normalize_phrase(replacement) if replacement else None
        if verdict == "edit" and not norm_repl:
            raise VocabError("edit verdict requires a nonempty replacement")
        with self._lock:
            ts = time.time()
            entry = self._apply(ts, verdict, norm, norm_repl, source)
            if self._log_fh:
                self._log_fh.write(f"{ts}\t{verdict}\t{norm}\t{norm_repl or ''}\t{source}\n")
                self._log_fh.flush()
            self._log_lines += 1
            return entry

    def register_candidate(self, phrase: str) -> Optional[VocabEntry]:
        """Note an extracted candidate; never changes GOOD/BAD status."""
        norm = normalize_phrase(phrase)
        if not norm:
            return None
        with self._lock:
            return self._entry(norm)

    def lookup(self, phrase: str) -> Optional[VocabEntry]:
        return self._entries.get(normalize_phrase(phrase))

    # -- derived views ----------------------------------------------------

    def entries(self, status: Optional[str] = None) -> list[VocabEntry]:
        out = self._entries.values()
        if status is not None:
            out = (e for e in out if e.status == status)
        return sorted(out, key=lambda e: e.phrase)

    def counts(self) -> dict[str, int]:
        counts = {GOOD: 0, BAD: 0, CANDIDATE: 0}
        for e in self._entries.values():
            counts[e.status] = counts.get(e.status, 0) + 1
        return counts

    def __len__(self) -> int:
        return len(self._entries)

    def assign_msc(
        self,
        phrase: str,
        corpus: Iterable[Document],
        extractor: Callable[[Document], Iterable],
    ) -> Optional[str]:
        """Attach the top-level class iff all documents yielding the phrase agree.

        ``extractor`` maps a document to its extracted phrases (strings or
        scored phrases); evidence is the set of primary codes of matching
        documents, and the assignment fires only when that set is a singleton.
        """
        norm = normalize_phrase(phrase)
        codes = set()
        for doc in corpus:
            if doc.msc_primary is None:
                continue
            for extracted in extractor(doc):
                text = getattr(extracted, "text", extracted)
                if normalize_phrase(str(text)) == norm:
                    codes.add(doc.msc_primary)
                    break
        if len(codes) != 1:
            return None
        code = codes.pop()
        with self._lock:
            entry = self._entries.get(norm)
            if entry is not None:
                entry.msc_top = code
        return code

    # -- persistence -------------------------------------------------------

    def write_snapshot(self, path: Optional[Union[str, Path]] = None) -> Path:
        """Write the compacted state as `phrase<TAB>status<TAB>frequency<TAB>msc_top`."""
        target = Path(path) if path else self.snapshot_path
        if target is None:
            raise VocabError("no snapshot path configured")
        target.parent.mkdir(parents=True, exist_ok=True)
        with self._lock:
            with open(target, "w", encoding="utf-8") as fh:
                for entry in sorted(self._entries.values(), key=lambda e: e.phrase):
                    fh.write(
                        f"{entry.phrase}\t{entry.status}\t{entry.frequency}\t{entry.msc_top or ''}\n"
                    )
        return target

    def close(self) -> None:
        if self._log_fh:
            self._log_fh.close()
            self._log_fh = None
