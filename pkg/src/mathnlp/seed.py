"""Bundled seed tagger model.

The repo ships a small hand-tagged mini-corpus of mathematical sentences;
the seed model is the HMM trained on it, serialized under
``data/seed_model/`` so tagging works out of the box. Run this module
(``python -m mathnlp.seed``) to regenerate the serialized model after
editing the mini-corpus.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Union

from .tagger import PENN_TAGS, TaggedSentence, TaggerModel, train_hmm


def parse_tagged_line(line: str) -> TaggedSentence:
    pairs = []
    for item in line.split():
        token, sep, tag = item.rpartition("_")
        if not sep or tag not in PENN_TAGS:
            raise ValueError(f"malformed token_TAG item: {item!r}")
        pairs.append((token, tag))
    return TaggedSentence(pairs=pairs)


def load_tagged_file(path: Union[str, Path]) -> list[TaggedSentence]:
    sentences = []
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sentences.append(parse_tagged_line(line))
    return sentences


def load_minicorpus() -> list[TaggedSentence]:
    with resources.as_file(resources.files("mathnlp.data").joinpath("minicorpus.tagged")) as p:
        return load_tagged_file(p)


def build_seed_model() -> TaggerModel:
    return train_hmm(load_minicorpus())


def seed_model_path() -> Path:
    return Path(str(resources.files("mathnlp.data").joinpath("seed_model")))


def load_seed_model() -> TaggerModel:
    """Load the serialized seed model, falling back to retraining if absent."""
    d = seed_model_path()
    if (d / "lexicon.tsv").exists():
        return TaggerModel.load(d)
    return build_seed_model()


if __name__ == "__main__":
    out = seed_model_path()
    build_seed_model().save(out)
    print(f"seed model written to {out}")
