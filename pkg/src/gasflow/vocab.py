"""Event-text normalization, vocabulary building and word-vector loading.

Normalization lowercases, drops punctuation tokens and stopwords (bundled
Snowball English list) and Porter-stems the rest. The vocabulary keeps words
whose document frequency is neither above 90% of documents nor below 3
documents, reading both bounds strictly; ids are dense, descending-df order
with alphabetical tie-breaks, and id 0 is reserved for the OOV symbol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .porter import stem

_TOKEN = re.compile(r"[A-Za-z0-9']+")

OOV_ID = 0


def _load_stopwords() -> frozenset[str]:
    text = resources.files("gasflow.data").joinpath("stopwords.txt").read_text()
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


STOPWORDS = _load_stopwords()


def normalize(text: str) -> list[str]:
    """Lowercase, strip punctuation, drop stopwords, Porter-stem; order kept."""
    stems = []
    for match in _TOKEN.finditer(text.lower()):
        word = match.group().strip("'")
        if not word or word in STOPWORDS:
            continue
        stems.append(stem(word))
    return stems


@dataclass(frozen=True)
class Vocabulary:
    word_to_id: dict[str, int]
    doc_freq: dict[str, int]
    total_documents: int

    def __len__(self) -> int:
        return len(self.word_to_id)

    def __contains__(self, word: str) -> bool:
        return word in self.word_to_id

    def id_of(self, word: str) -> int:
        return self.word_to_id.get(word, OOV_ID)


def build_vocab(documents: Sequence[Sequence[str]]) -> Vocabulary:
    """Frequency-filtered vocabulary over normalized documents.

    A document is one headline's concatenated normalized events. Words in
    more than 90% of documents or fewer than 3 documents are removed.
    """
    n = len(documents)
    if n < 3:
        raise InputError(f"need at least 3 documents to build a vocabulary, got {n}")
    df: dict[str, int] = {}
    for document in documents:
        for word in set(document):
            df[word] = df.get(word, 0) + 1
    kept = {w: c for w, c in df.items() if c >= 3 and c <= 0.9 * n}
    ordered = sorted(kept, key=lambda w: (-kept[w], w))
    word_to_id = {w: i for i, w in enumerate(ordered, start=1)}
    return Vocabulary(word_to_id=word_to_id, doc_freq=kept, total_documents=n)


def serialize_vocab(vocab: Vocabulary) -> str:
    lines = [f"{w}\t{i}\t{vocab.doc_freq[w]}" for w, i in sorted(vocab.word_to_id.items(), key=lambda kv: kv[1])]
    return "\n".join(lines) + "\n"


def parse_vocab(text: str, total_documents: int = 0) -> Vocabulary:
    word_to_id: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputError(f"vocab line {lineno}: expected word<TAB>id<TAB>df")
        word_to_id[parts[0]] = int(parts[1])
        doc_freq[parts[0]] = int(parts[2])
    return Vocabulary(word_to_id=word_to_id, doc_freq=doc_freq, total_documents=total_documents)


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    @property
    def oov_vector(self) -> np.ndarray:
        # zeros so padded cells contribute nothing to convolution sums
        return np.zeros(self.dimension, dtype=np.float64)


def load_embeddings(
    lines: Iterable[str], expected_k: int, vocab: Vocabulary | None = None
) -> EmbeddingTable:
    """Read ``word v1 .. vk`` text vectors, optionally restricted to a
    vocabulary. A leading ``V k`` count header is accepted."""
    vectors: dict[str, np.ndarray] = {}
    declared_k: int | None = None
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2:
            try:
                declared_k = int(parts[1])
                int(parts[0])
            except ValueError:
                declared_k = None
            if declared_k is not None:
                if declared_k != expected_k:
                    raise InputError(
                        f"embedding file declares k={declared_k}, expected {expected_k}"
                    )
                continue
        word, values = parts[0], parts[1:]
        if len(values) != expected_k:
            raise InputError(
                f"embedding line {lineno}: expected {expected_k} values, found {len(values)}"
            )
        if vocab is not None and word not in vocab:
            continue
        try:
            vectors[word] = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise InputError(f"embedding line {lineno}: bad value: {exc}") from exc
    return EmbeddingTable(dimension=expected_k, vectors=vectors)


def embed_word(table: EmbeddingTable, vocab: Vocabulary, word: str) -> np.ndarray:
    """Vector for an in-vocabulary word present in the table; OOV zeros otherwise."""
    if word in vocab and word in table.vectors:
        return table.vectors[word]
    return table.oov_vector
