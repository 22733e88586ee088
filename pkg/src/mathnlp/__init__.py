"""Math-aware text analysis toolkit.

Pipeline stages: TeX formula masking, sentence/token processing, HMM
part-of-speech tagging, noun-phrase chunking, keyphrase scoring, per-class
SVM classification, and a curated phrase vocabulary fed by expert review.
"""

from .corpus import Document, load_corpus, save_corpus
from .masking import FormulaTable, encode_placeholder, mask_formulae, unmask
from .tagger import PENN_TAGS, TaggedSentence, TaggerModel, tag_probability, train_hmm, viterbi_tag
from .chunker import ChunkGrammar, NounPhrase, compile_grammar, default_grammar, extract_nps
from .textproc import AcronymLexicon, expand_acronyms, sentences_of, split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "Document",
    "load_corpus",
    "save_corpus",
    "FormulaTable",
    "encode_placeholder",
    "mask_formulae",
    "unmask",
    "PENN_TAGS",
    "TaggedSentence",
    "TaggerModel",
    "tag_probability",
    "train_hmm",
    "viterbi_tag",
    "ChunkGrammar",
    "NounPhrase",
    "compile_grammar",
    "default_grammar",
    "extract_nps",
    "AcronymLexicon",
    "expand_acronyms",
    "sentences_of",
    "split_sentences",
    "tokenize",
    "__version__",
]
