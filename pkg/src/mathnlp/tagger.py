"""Dictionary-backed bigram HMM part-of-speech tagger with Viterbi decoding.

Tags are the 45 Penn Treebank categories for tokens and punctuation.
Known tokens are constrained to the tags their dictionary entry allows;
unknown tokens back off to suffix statistics, and formula placeholder
tokens use a noun/adjective prior, since a masked formula behaves like a
noun or an adjective in context.

START/STOP are internal pseudo-states and never appear in output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .masking import PLACEHOLDER_RE

PENN_TAGS: tuple[str, ...] = (
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS",
    "MD", "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB",
    "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN",
    "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
    "#", "$", "''", "(", ")", ",", ".", ":", "``",
)
assert len(PENN_TAGS) == 45

START = "<START>"
STOP = "<STOP>"

NEG_INF = float("-inf")


class TagError(ValueError):
    pass


@dataclass
class TaggedSentence:
    pairs: list[tuple[str, str]]

    @property
    def tokens(self) -> list[str]:
        return [t for t, _ in self.pairs]

    @property
    def tags(self) -> list[str]:
        return [g for _, g in self.pairs]

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


@dataclass
class Lexicon:
    """token -> tag -> count, as accumulated from hand-tagged text."""

    entries: dict[str, dict[str, int]] = field(default_factory=dict)
    fold_sentence_initial: bool = True

    def add(self, token: str, tag: str, count: int = 1) -> None:
        self.entries.setdefault(token, {})[tag] = self.entries.get(token, {}).get(tag, 0) + count

    def get(self, token: str, sentence_initial: bool = False) -> Optional[dict[str, int]]:
        hit = self.entries.get(token)
        if hit is None and sentence_initial and self.fold_sentence_initial:
            hit = self.entries.get(token.lower())
        return hit

    def total(self, token: str) -> int:
        return sum(self.entries.get(token, {}).values())


class TaggerModel:
    """Transition/emission statistics plus unknown-word handling.

    Built from raw counts; probabilities are derived with add-k smoothing so
    that for every predecessor the successor distribution (tags plus STOP)
    sums to one.
    """

    def __init__(
        self,
        lexicon: Lexicon,
        transition_counts: Mapping[tuple[str, str], int],
        suffix_counts: Optional[Mapping[str, Mapping[str, int]]] = None,
        tags: Optional[Sequence[str]] = None,
        smoothing_k: float = 0.1,
        rare_threshold: int = 3,
        formula_prior: Optional[Mapping[str, float]] = None,
        nnp_bias: float = 0.5,
    ):
        self.lexicon = lexicon
        self.transition_counts = dict(transition_counts)
        self.suffix_counts = {s: dict(d) for s, d in (suffix_counts or {}).items()}
        if tags is None:
            observed = {t for (p, t) in transition_counts if t != STOP}
            observed |= {p for (p, t) in transition_counts if p != START}
            for token_tags in lexicon.entries.values():
                observed.update(token_tags)
            tags = [t for t in PENN_TAGS if t in observed] + sorted(observed - set(PENN_TAGS))
        self.tags: tuple[str, ...] = tuple(tags)
        self.smoothing_k = float(smoothing_k)
        self.rare_threshold = int(rare_threshold)
        prior = dict(formula_prior) if formula_prior is not None else {"NN": 0.9, "JJ": 0.1}
        bad = set(prior) - {"NN", "JJ"}
        if bad:
            raise TagError(f"formula prior may only weight NN and JJ, got {sorted(bad)}")
        self.formula_prior = prior
        self.nnp_bias = float(nnp_bias)
        self._log_trans = self._build_transitions()
        self._tag_totals = self._build_tag_totals()
        self._vocab_size = len(self.lexicon.entries)
        self._emission_cache: dict[tuple[str, bool], dict[str, float]] = {}

    # -- probability tables -------------------------------------------------

    def _build_transitions(self) -> dict[str, dict[str, float]]:
        k = self.smoothing_k
        succs = list(self.tags) + [STOP]
        table: dict[str, dict[str, float]] = {}
        for prev in [START] + list(self.tags):
            total = sum(self.transition_counts.get((prev, s), 0) for s in succs)
            denom = total + k * len(succs)
            row = {}
            for s in succs:
                c = self.transition_counts.get((prev, s), 0)
                p = (c + k) / denom if denom > 0 else 1.0 / len(succs)
                row[s] = math.log(p)
            table[prev] = row
        return table

    def _build_tag_totals(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for token_tags in self.lexicon.entries.values():
            for tag, c in token_tags.items():
                totals[tag] = totals.get(tag, 0) + c
        return totals

    def transition_prob(self, prev: str, tag: str) -> float:
        """Smoothed P(tag | prev); rows sum to 1 over tags + STOP."""
        return math.exp(self._log_trans[prev][tag])

    def log_transition(self, prev: str, tag: str) -> float:
        row = self._log_trans.get(prev)
        if row is None or tag not in row:
            return NEG_INF
        return row[tag]

    # -- emissions -----------------------------------------------------------

    def emission_logps(self, token: str, sentence_initial: bool = False) -> dict[str, float]:
        """Candidate tags with log emission scores for one token.

        Known tokens are restricted to their dictionary tags; placeholders
        use the formula prior; other unknowns interpolate suffix statistics,
        with a proper-noun bias for capitalized mid-sentence tokens.
        """
        key = (token, sentence_initial)
        cached = self._emission_cache.get(key)
        if cached is not None:
            return cached
        result = self._emission_uncached(token, sentence_initial)
        self._emission_cache[key] = result
        return result

    def _emission_uncached(self, token: str, sentence_initial: bool) -> dict[str, float]:
        k = self.smoothing_k
        hit = self.lexicon.get(token, sentence_initial)
        if hit:
            out = {}
            for tag in self.tags:
                c = hit.get(tag, 0)
                if c > 0:
                    denom = self._tag_totals.get(tag, 0) + k * self._vocab_size
                    out[tag] = math.log((c + k) / denom)
            if out:
                return out
        if PLACEHOLDER_RE.fullmatch(token):
            prior = {t: p for t, p in self.formula_prior.items() if t in self.tags and p > 0}
            if prior:
                z = sum(prior.values())
                return {t: math.log(p / z) for t, p in prior.items() if t in self.tags}
        dist = self._suffix_distribution(token)
        if token[:1].isupper() and not sentence_initial and "NNP" in self.tags:
            b = self.nnp_bias
            dist = {t: (1 - b) * p for t, p in dist.items()} if dist else {}
            dist["NNP"] = dist.get("NNP", 0.0) + b
        if not dist:
            dist = {t: 1.0 for t in self.tags}
        z = sum(dist.values())
        return {t: math.log(p / z) for t in self.tags if (p := dist.get(t, 0.0)) > 0}

    def _suffix_distribution(self, token: str) -> dict[str, float]:
        low = token.lower()
        dists = []
        for length in range(min(4, len(low) - 1), 0, -1):
            counts = self.suffix_counts.get(low[-length:])
            if counts:
                total = sum(counts.values())
                dists.append({t: c / total for t, c in counts.items() if t in self.tags})
        if not dists:
            return {}
        # linear interpolation: equal weight per matched suffix length
        combined: dict[str, float] = {}
        for d in dists:
            for t, p in d.items():
                combined[t] = combined.get(t, 0.0) + p / len(dists)
        return combined

    # -- persistence ----------------------------------------------------------

    def save(self, model_dir: Union[str, Path]) -> None:
        d = Path(model_dir)
        d.mkdir(parents=True, exist_ok=True)
        with open(d / "lexicon.tsv", "w", encoding="utf-8") as fh:
            for token in sorted(self.lexicon.entries):
                for tag in sorted(self.lexicon.entries[token]):
                    fh.write(f"{token}\t{tag}\t{self.lexicon.entries[token][tag]}\n")
        with open(d / "transitions.tsv", "w", encoding="utf-8") as fh:
            for (prev, tag) in sorted(self.transition_counts):
                fh.write(f"{prev}\t{tag}\t{self.transition_counts[(prev, tag)]}\n")
        with open(d / "suffixes.tsv", "w", encoding="utf-8") as fh:
            for suffix in sorted(self.suffix_counts):
                for tag in sorted(self.suffix_counts[suffix]):
                    fh.write(f"{suffix}\t{tag}\t{self.suffix_counts[suffix][tag]}\n")
        with open(d / "config", "w", encoding="utf-8") as fh:
            fh.write(f"smoothing_k={self.smoothing_k}\n")
            fh.write(f"rare_threshold={self.rare_threshold}\n")
            fh.write(f"formula_prior_nn={self.formula_prior.get('NN', 0.0)}\n")
            fh.write(f"formula_prior_jj={self.formula_prior.get('JJ', 0.0)}\n")
            fh.write(f"nnp_bias={self.nnp_bias}\n")
            fh.write(f"fold_sentence_initial={int(self.lexicon.fold_sentence_initial)}\n")

    @classmethod
    def load(cls, model_dir: Union[str, Path]) -> "TaggerModel":
        d = Path(model_dir)
        lexicon = Lexicon()
        for line in (d / "lexicon.tsv").read_text("utf-8").splitlines():
            if not line:
                continue
            token, tag, count = line.split("\t")
            lexicon.add(token, tag, int(count))
        transition_counts: dict[tuple[str, str], int] = {}
        for line in (d / "transitions.tsv").read_text("utf-8").splitlines():
            if not line:
                continue
            prev, tag, count = line.split("\t")
            transition_counts[(prev, tag)] = int(count)
        suffix_counts: dict[str, dict[str, int]] = {}
        suffix_path = d / "suffixes.tsv"
        if suffix_path.exists():
            for line in suffix_path.read_text("utf-8").splitlines():
                if not line:
                    continue
                suffix, tag, count = line.split("\t")
                suffix_counts.setdefault(suffix, {})[tag] = int(count)
        cfg = {}
        for line in (d / "config").read_text("utf-8").splitlines():
            if line and "=" in line:
                key, val = line.split("=", 1)
                cfg[key.strip()] = val.strip()
        lexicon.fold_sentence_initial = bool(int(cfg.get("fold_sentence_initial", "1")))
        return cls(
            lexicon=lexicon,
            transition_counts=transition_counts,
            suffix_counts=suffix_counts,
            smoothing_k=float(cfg.get("smoothing_k", "0.1")),
            rare_threshold=int(cfg.get("rare_threshold", "3")),
            formula_prior={
                "NN": float(cfg.get("formula_prior_nn", "0.9")),
                "JJ": float(cfg.get("formula_prior_jj", "0.1")),
            },
            nnp_bias=float(cfg.get("nnp_bias", "0.5")),
        )


def train_hmm(
    tagged_corpus: Iterable[Union[TaggedSentence, Sequence[tuple[str, str]]]],
    smoothing_k: float = 0.1,
    rare_threshold: int = 3,
    formula_prior: Optional[Mapping[str, float]] = None,
) -> TaggerModel:
    """Estimate a bigram HMM from hand-tagged sentences.

    Transitions are add-k smoothed bigram relative frequencies; the lexicon
    accumulates token/tag counts (placeholder-shaped tokens train
    transitions only); suffix statistics come from rare tokens.
    """
    sentences = [list(s) for s in tagged_corpus]
    if not sentences:
        raise TagError("training corpus is empty")
    lexicon = Lexicon()
    transition_counts: dict[tuple[str, str], int] = {}
    for pairs in sentences:
        prev = START
        for token, tag in pairs:
            if tag not in PENN_TAGS:
                raise TagError(f"invalid tag {tag!r} on token {token!r}")
            transition_counts[(prev, tag)] = transition_counts.get((prev, tag), 0) + 1
            if not PLACEHOLDER_RE.fullmatch(token):
                lexicon.add(token, tag)
            prev = tag
        transition_counts[(prev, STOP)] = transition_counts.get((prev, STOP), 0) + 1
    suffix_counts: dict[str, dict[str, int]] = {}
    for token, token_tags in lexicon.entries.items():
        if sum(token_tags.values()) >= rare_threshold or not token.isalpha():
            continue
        low = token.lower()
        for length in range(1, min(4, len(low) - 1) + 1):
            suffix = low[-length:]
            row = suffix_counts.setdefault(suffix, {})
            for tag, c in token_tags.items():
                row[tag] = row.get(tag, 0) + c
    return TaggerModel(
        lexicon=lexicon,
        transition_counts=transition_counts,
        suffix_counts=suffix_counts,
        smoothing_k=smoothing_k,
        rare_threshold=rare_threshold,
        formula_prior=formula_prior,
    )


def viterbi_tag(tokens: Sequence[str], model: TaggerModel) -> TaggedSentence:
    """Decode the most probable tag sequence under the bigram HMM.

    Log-space dynamic program; ties break toward the earlier tag in the
    model's tag enumeration, so decoding is deterministic.
    """
    if not tokens:
        raise TagError("cannot tag an empty token list")
    emissions = [model.emission_logps(tok, i == 0) for i, tok in enumerate(tokens)]
    scores: dict[str, float] = {}
    for tag, e in emissions[0].items():
        scores[tag] = model.log_transition(START, tag) + e
    backptrs: list[dict[str, str]] = []
    for i in range(1, len(tokens)):
        nxt: dict[str, float] = {}
        bp: dict[str, str] = {}
        for tag, e in emissions[i].items():
            best_prev, best = None, NEG_INF
            for prev, s in scores.items():
                cand = s + model.log_transition(prev, tag)
                if cand > best:
                    best, best_prev = cand, prev
            if best_prev is None:
                continue
            nxt[tag] = best + e
            bp[tag] = best_prev
        backptrs.append(bp)
        scores = nxt
    last, best = None, NEG_INF
    for tag, s in scores.items():
        cand = s + model.log_transition(tag, STOP)
        if cand > best:
            best, last = cand, tag
    if last is None:
        raise TagError("no admissible tag path (all-zero emissions)")
    path = [last]
    for bp in reversed(backptrs):
        path.append(bp[path[-1]])
    path.reverse()
    return TaggedSentence(pairs=list(zip(list(tokens), path)))


def tag_probability(tokens: Sequence[str], tags: Sequence[str], model: TaggerModel) -> float:
    """Log-probability of one (tokens, tags) path, START/STOP transitions included."""
    if len(tokens) != len(tags):
        raise TagError(f"length mismatch: {len(tokens)} tokens vs {len(tags)} tags")
    total = 0.0
    prev = START
    for i, (token, tag) in enumerate(zip(tokens, tags)):
        e = model.emission_logps(token, i == 0).get(tag, NEG_INF)
        total += model.log_transition(prev, tag) + e
        prev = tag
    total += model.log_transition(prev, STOP)
    return total
