"""Noun-phrase chunking over tagged sentences via tag-pattern rules.

A rule pattern is a sequence of ``<TAG>`` elements (alternation inside the
brackets, ``? * +`` quantifiers, parenthesized groups) matched against the
tag sequence with true longest-match semantics: at each position the
longest match over all rules wins, ties going to the earlier rule. The
pseudo-symbol ``FORMULA-NN`` matches an NN-tagged formula placeholder
token, which is how formula-bearing noun phrases are captured.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .masking import PLACEHOLDER_RE, FormulaTable, unmask
from .tagger import PENN_TAGS, TaggedSentence

FORMULA_NN = "FORMULA-NN"


class ChunkPatternError(ValueError):
    """Bad rule pattern; carries the character position of the problem."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


@dataclass
class NounPhrase:
    tokens: list[str]
    tag_sequence: list[str]
    sentence_index: int
    span: tuple[int, int]
    contains_formula: bool
    rule: str = ""
    norm_tokens: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def norm_text(self) -> str:
        return " ".join(self.norm_tokens)


class _Nfa:
    """Thompson-style epsilon-NFA over (token, tag) predicates."""

    def __init__(self):
        self.eps: list[set[int]] = []
        self.edges: list[list[tuple[frozenset[str], int]]] = []

    def new_state(self) -> int:
        self.eps.append(set())
        self.edges.append([])
        return len(self.eps) - 1

    def closure(self, states: set[int]) -> set[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            s = stack.pop()
            for t in self.eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    def step(self, states: set[int], token: str, tag: str) -> set[int]:
        out: set[int] = set()
        for s in states:
            for names, t in self.edges[s]:
                if _symbol_matches(names, token, tag):
                    out.add(t)
        return self.closure(out)


def _symbol_matches(names: frozenset[str], token: str, tag: str) -> bool:
    if tag in names:
        return True
    if FORMULA_NN in names and tag == "NN" and PLACEHOLDER_RE.fullmatch(token):
        return True
    return False


class _PatternParser:
    """Recursive-descent parser building an NFA fragment for one pattern."""

    def __init__(self, pattern: str, nfa: _Nfa):
        self.src = pattern
        self.pos = 0
        self.nfa = nfa

    def error(self, msg: str) -> ChunkPatternError:
        return ChunkPatternError(msg, self.pos)

    def peek(self) -> str:
        self._skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def _skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def parse(self) -> tuple[int, int]:
        start, end = self.parse_seq()
        self._skip_ws()
        if self.pos != len(self.src):
            raise self.error(f"unexpected character {self.src[self.pos]!r}")
        return start, end

    def parse_seq(self) -> tuple[int, int]:
        frags = []
        while self.peek() in ("<", "("):
            frags.append(self.parse_term())
        if not frags:
            raise self.error("expected <TAG> or group")
        for (_, e1), (s2, _) in zip(frags, frags[1:]):
            self.nfa.eps[e1].add(s2)
        return frags[0][0], frags[-1][1]

    def parse_term(self) -> tuple[int, int]:
        c = self.peek()
        if c == "<":
            frag = self.parse_element()
        elif c == "(":
            self.pos += 1
            frag = self.parse_seq()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
        else:
            raise self.error("expected <TAG> or group")
        return self.parse_quant(frag)

    def parse_element(self) -> tuple[int, int]:
        assert self.peek() == "<"
        open_pos = self.pos
        self.pos += 1
        close = self.src.find(">", self.pos)
        if close < 0:
            self.pos = open_pos
            raise self.error("unterminated '<'")
        spec = self.src[self.pos : close]
        names = [n.strip() for n in spec.split("|")]
        for name in names:
            if not name:
                raise self.error("empty tag name")
            if name != FORMULA_NN and name not in PENN_TAGS:
                raise self.error(f"unknown tag {name!r}")
        self.pos = close + 1
        s = self.nfa.new_state()
        e = self.nfa.new_state()
        self.nfa.edges[s].append((frozenset(names), e))
        return s, e

    def parse_quant(self, frag: tuple[int, int]) -> tuple[int, int]:
        s, e = frag
        c = self.src[self.pos] if self.pos < len(self.src) else ""
        if c not in ("?", "*", "+"):
            return frag
        self.pos += 1
        ws = self.nfa.new_state()
        we = self.nfa.new_state()
        self.nfa.eps[ws].add(s)
        self.nfa.eps[e].add(we)
        if c in ("?", "*"):
            self.nfa.eps[ws].add(we)
        if c in ("*", "+"):
            self.nfa.eps[e].add(s)
        return ws, we


@dataclass
class ChunkRule:
    name: str
    pattern: str
    nfa: _Nfa
    start: int
    accept: int

    def longest_match(self, pairs: Sequence[tuple[str, str]], pos: int) -> int:
        """Length of the longest match starting at ``pos`` (0 = no match)."""
        states = self.nfa.closure({self.start})
        best = 0
        k = pos
        while True:
            if self.accept in states and k - pos > best:
                best = k - pos
            if k >= len(pairs) or not states:
                break
            token, tag = pairs[k]
            states = self.nfa.step(states, token, tag)
            k += 1
        return best


@dataclass
class ChunkGrammar:
    rules: list[ChunkRule]


def compile_rule(name: str, pattern: str) -> ChunkRule:
    nfa = _Nfa()
    start, accept = _PatternParser(pattern, nfa).parse()
    return ChunkRule(name=name, pattern=pattern, nfa=nfa, start=start, accept=accept)


def compile_grammar(patterns: Sequence[tuple[str, str]]) -> ChunkGrammar:
    if not patterns:
        raise ChunkPatternError("grammar needs at least one rule", 0)
    return ChunkGrammar(rules=[compile_rule(n, p) for n, p in patterns])


def load_grammar(path: Union[str, Path]) -> ChunkGrammar:
    """Read a grammar file: one ``name: pattern`` rule per line, # comments."""
    patterns = []
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, pattern = line.partition(":")
        patterns.append((name.strip(), pattern.strip()))
    return compile_grammar(patterns)


def default_grammar() -> ChunkGrammar:
    with resources.as_file(resources.files("mathnlp.data").joinpath("chunk_rules.grammar")) as p:
        return load_grammar(p)


def extract_nps(
    tagged: TaggedSentence,
    grammar: ChunkGrammar,
    table: Optional[FormulaTable] = None,
    sentence_index: int = 0,
) -> list[NounPhrase]:
    """Non-overlapping chunks, longest match over all rules winning at each position.

    Matched spans are unmasked before storage; the leading determiner is
    retained in the span but a DT-stripped normal form is recorded too.
    """
    pairs = list(tagged)
    table = table or FormulaTable()
    chunks: list[NounPhrase] = []
    i = 0
    while i < len(pairs):
        best_len = 0
        best_rule = None
        for rule in grammar.rules:
            length = rule.longest_match(pairs, i)
            if length > best_len:
                best_len = length
                best_rule = rule
        if best_rule is None:
            i += 1
            continue
        span = pairs[i : i + best_len]
        tokens = [unmask(tok, table) for tok, _ in span]
        tags = [tag for _, tag in span]
        skip = 1 if tags and tags[0] == "DT" else 0
        chunks.append(
            NounPhrase(
                tokens=tokens,
                tag_sequence=tags,
                sentence_index=sentence_index,
                span=(i, i + best_len),
                contains_formula=any(PLACEHOLDER_RE.fullmatch(tok) for tok, _ in span),
                rule=best_rule.name,
                norm_tokens=tokens[skip:],
            )
        )
        i += best_len
    return chunks
