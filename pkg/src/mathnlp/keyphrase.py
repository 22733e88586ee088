"""Keyphrase candidate scoring, redundancy grouping, and ranking.

Extracted noun phrases get an ordinal tier plus a numeric weight:

* VERY_HIGH - named mathematical entity (gazetteer), an author keyphrase,
  or an already-curated GOOD vocabulary phrase;
* HIGH - contains a mathematician name, a known acronym, or a formula that
  is more than one-character notation;
* BASELINE - any other noun phrase;
* NEGATIVE - matches a stop phrase (or a curated BAD phrase); dropped from
  the candidate list.

Near-duplicates are grouped by longest-common-subsequence similarity and
each group is replaced by one representative, cutting a raw crop of 10-20
noun phrases down to at most ``max_phrases`` ranked candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .chunker import ChunkGrammar, NounPhrase, extract_nps
from .corpus import Document
from .masking import mask_formulae, _find_math_segments
from .normalize import normalize_phrase, singular_token
from .tagger import TaggerModel, viterbi_tag
from .textproc import AcronymLexicon, expand_acronyms, split_sentences, tokenize

VERY_HIGH = "VERY_HIGH"
HIGH = "HIGH"
BASELINE = "BASELINE"
NEGATIVE = "NEGATIVE"

GAZETTEER = "GAZETTEER"
AUTHOR_KEYPHRASE = "AUTHOR_KEYPHRASE"
EXISTING_KEYPHRASE = "EXISTING_KEYPHRASE"
MATHEMATICIAN_NAME = "MATHEMATICIAN_NAME"
ACRONYM = "ACRONYM"
FORMULA = "FORMULA"
STOP_PHRASE = "STOP_PHRASE"

_VERY_HIGH_REASONS = (GAZETTEER, AUTHOR_KEYPHRASE, EXISTING_KEYPHRASE)
_HIGH_REASONS = (MATHEMATICIAN_NAME, ACRONYM, FORMULA)

DEFAULT_TIER_WEIGHTS = {VERY_HIGH: 3.0, HIGH: 2.0, BASELINE: 1.0, NEGATIVE: -1.0}
EXTRA_REASON_WEIGHT = 0.25


def _load_phrase_file(path: Union[str, Path]) -> set[str]:
    phrases = set()
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            phrases.add(normalize_phrase(line))
    return phrases


@dataclass
class ScoringResources:
    """Static lookup sets plus the live controlled-vocabulary handle."""

    math_gazetteer: set[str] = field(default_factory=set)
    mathematician_names: set[str] = field(default_factory=set)
    acronym_lexicon: AcronymLexicon = field(default_factory=AcronymLexicon)
    existing_keyphrases: Optional[object] = None  # needs .lookup(phrase) -> entry | None
    stop_phrases: set[str] = field(default_factory=set)

    def __post_init__(self):
        self.math_gazetteer = {normalize_phrase(p) for p in self.math_gazetteer}
        self.mathematician_names = {n.casefold() for n in self.mathematician_names}
        self.stop_phrases = {normalize_phrase(p) for p in self.stop_phrases}
        clash = self.math_gazetteer & self.stop_phrases
        if clash:
            raise ValueError(f"stop phrases overlap the gazetteer: {sorted(clash)[:3]}")

    @classmethod
    def load_default(cls, vocab: Optional[object] = None, include_msc_labels: bool = True) -> "ScoringResources":
        from .msc import MSC_LABELS
        from .textproc import load_default_acronyms

        data = resources.files("mathnlp.data")
        with resources.as_file(data.joinpath("gazetteer.txt")) as p:
            gaz = _load_phrase_file(p)
        with resources.as_file(data.joinpath("mathematicians.txt")) as p:
            names = {line.strip() for line in Path(p).read_text("utf-8").splitlines()
                     if line.strip() and not line.startswith("#")}
        with resources.as_file(data.joinpath("stop_phrases.txt")) as p:
            stops = _load_phrase_file(p)
        if include_msc_labels:
            gaz |= {normalize_phrase(label) for label in MSC_LABELS.values()}
        return cls(
            math_gazetteer=gaz,
            mathematician_names=names,
            acronym_lexicon=load_default_acronyms(),
            existing_keyphrases=vocab,
            stop_phrases=stops,
        )


@dataclass
class ScoredPhrase:
    phrase: NounPhrase
    tier: str
    weight: float
    reasons: list[str]
    group_id: Optional[int] = None

    @property
    def text(self) -> str:
        return self.phrase.text

    @property
    def norm_text(self) -> str:
        return normalize_phrase(self.phrase.text)


def _token_is_significant_formula(token: str) -> bool:
    """True when the token carries TeX math that is not one-character notation."""
    try:
        segments = _find_math_segments(token)
    except ValueError:
        return False
    for start, end in segments:
        inner = token[start:end].strip("$")
        if inner.startswith("\\(") or inner.startswith("\\["):
            inner = inner[2:-2]
        if len(inner.strip()) > 1:
            return True
    return False


def _vocab_status(res: ScoringResources, phrase_text: str) -> Optional[str]:
    store = res.existing_keyphrases
    if store is None:
        return None
    entry = store.lookup(phrase_text)
    return getattr(entry, "status", None) if entry is not None else None


def score_phrase(
    np_: NounPhrase,
    doc: Document,
    res: ScoringResources,
    tier_weights: Optional[dict[str, float]] = None,
) -> ScoredPhrase:
    """Assign tier, provenance reasons, and numeric weight to one noun phrase."""
    weights = tier_weights or DEFAULT_TIER_WEIGHTS
    norm = normalize_phrase(np_.text)
    reasons: list[str] = []

    if norm in res.math_gazetteer:
        reasons.append(GAZETTEER)
    if any(norm == normalize_phrase(k) for k in doc.author_keyphrases):
        reasons.append(AUTHOR_KEYPHRASE)
    status = _vocab_status(res, np_.text)
    if status == "GOOD":
        reasons.append(EXISTING_KEYPHRASE)
    tokens_cf = [t.casefold().removesuffix("'s") for t in np_.tokens]
    if any(t in res.mathematician_names for t in tokens_cf):
        reasons.append(MATHEMATICIAN_NAME)
    if any(t in res.acronym_lexicon for t in np_.tokens):
        reasons.append(ACRONYM)
    if any(_token_is_significant_formula(t) for t in np_.tokens):
        reasons.append(FORMULA)
    if norm in res.stop_phrases or status == "BAD":
        reasons.append(STOP_PHRASE)

    if any(r in reasons for r in _VERY_HIGH_REASONS):
        tier = VERY_HIGH
    elif STOP_PHRASE in reasons:
        tier = NEGATIVE
    elif any(r in reasons for r in _HIGH_REASONS):
        tier = HIGH
    else:
        tier = BASELINE
    weight = weights[tier] + EXTRA_REASON_WEIGHT * max(0, len(reasons) - 1)
    return ScoredPhrase(phrase=np_, tier=tier, weight=weight, reasons=reasons)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length over case-normalized token lists."""
    xs = [t.casefold() for t in a]
    ys = [t.casefold() for t in b]
    if not xs or not ys:
        return 0
    prev = [0] * (len(ys) + 1)
    for x in xs:
        cur = [0]
        for j, y in enumerate(ys, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def _similarity_tokens(p: ScoredPhrase) -> list[str]:
    return [singular_token(t) for t in p.phrase.tokens]


def phrase_similarity(a: ScoredPhrase, b: ScoredPhrase) -> float:
    ta, tb = _similarity_tokens(a), _similarity_tokens(b)
    longest = max(len(ta), len(tb))
    if longest == 0:
        return 0.0
    return lcs_length(ta, tb) / longest


def group_similar(phrases: list[ScoredPhrase], threshold: float = 0.6) -> list[ScoredPhrase]:
    """Single-linkage grouping over pairs with similarity >= threshold.

    Mutates (and returns) the scored phrases with group ids forming a
    partition, numbered in order of first appearance.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    n = len(phrases)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if phrase_similarity(phrases[i], phrases[j]) >= threshold:
                parent[find(i)] = find(j)
    ids: dict[int, int] = {}
    for i, p in enumerate(phrases):
        root = find(i)
        if root not in ids:
            ids[root] = len(ids)
        p.group_id = ids[root]
    return phrases


def select_representative(group: list[ScoredPhrase], res: ScoringResources) -> ScoredPhrase:
    """Deterministic pick: curated vocabulary > gazetteer > weight > brevity > spelling."""
    if not group:
        raise ValueError("cannot pick a representative from an empty group")

    def key(p: ScoredPhrase):
        in_vocab = _vocab_status(res, p.text) == "GOOD"
        in_gaz = p.norm_text in res.math_gazetteer
        return (not in_vocab, not in_gaz, -p.weight, len(p.phrase.tokens), p.norm_text, p.text)

    return min(group, key=key)


@dataclass
class ExtractionConfig:
    max_phrases: int = 10
    min_phrases: int = 7
    similarity_threshold: float = 0.6
    tier_weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TIER_WEIGHTS))
    include_title: bool = True


@dataclass
class ExtractionReport:
    """Everything the extractor saw for one document, for reporting and review."""

    doc_id: str
    representatives: list[ScoredPhrase]
    phrases: list[ScoredPhrase]
    acronym_expansions: list[tuple[int, str, str]]

    def group_members(self, group_id: Optional[int]) -> list[ScoredPhrase]:
        if group_id is None:
            return []
        return [p for p in self.phrases if p.group_id == group_id]


def extract_report(
    doc: Document,
    model: TaggerModel,
    grammar: ChunkGrammar,
    res: ScoringResources,
    config: Optional[ExtractionConfig] = None,
) -> ExtractionReport:
    """Run the whole per-document pipeline and keep all intermediate phrases.

    mask -> split -> tokenize -> expand acronyms -> tag -> chunk -> unmask ->
    score -> drop NEGATIVE -> group -> representative per group -> rank.
    """
    cfg = config or ExtractionConfig()
    parts = [doc.title, doc.text] if cfg.include_title else [doc.text]
    scored: list[ScoredPhrase] = []
    expansions: list[tuple[int, str, str]] = []
    sentence_offset = 0
    for part in parts:
        if not part or not part.strip():
            continue
        masked, table = mask_formulae(part, doc_salt=doc.id)
        for si, (a, b) in enumerate(split_sentences(masked)):
            tokens = tokenize(masked[a:b])
            if not tokens:
                continue
            _, exps = expand_acronyms(tokens, res.acronym_lexicon, doc.msc_primary)
            expansions.extend(exps)
            tagged = viterbi_tag(tokens, model)
            for np_ in extract_nps(tagged, grammar, table, sentence_index=sentence_offset + si):
                scored.append(score_phrase(np_, doc, res, cfg.tier_weights))
        sentence_offset += len(split_sentences(masked))
    kept = [p for p in scored if p.tier != NEGATIVE]
    group_similar(kept, cfg.similarity_threshold)
    groups: dict[int, list[ScoredPhrase]] = {}
    for p in kept:
        groups.setdefault(p.group_id, []).append(p)
    reps = [select_representative(g, res) for g in groups.values()]
    reps.sort(key=lambda p: (-p.weight, p.norm_text, p.text))
    reps = reps[: cfg.max_phrases]
    return ExtractionReport(
        doc_id=doc.id,
        representatives=reps,
        phrases=scored,
        acronym_expansions=expansions,
    )


def extract_keyphrases(
    doc: Document,
    model: TaggerModel,
    grammar: ChunkGrammar,
    res: ScoringResources,
    config: Optional[ExtractionConfig] = None,
) -> list[ScoredPhrase]:
    """Ranked keyphrase candidates for one document (representatives only)."""
    return extract_report(doc, model, grammar, res, config).representatives
