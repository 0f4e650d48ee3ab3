"""CoNLL-U reader for dependency-annotated headline sentences.

Ten tab-separated columns per token line, blank line between sentences,
``#`` comment lines carried over as sentence metadata. Multiword-token
ranges (``1-2``) and empty nodes (``1.1``) are skipped: the pipeline works
at the syntactic-word level. Supersense annotations ride in MISC as
``Sense=<lexname>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import InputError

_COLUMNS = 10
_SKIP_ID = re.compile(r"^\d+[-.]\d+$")


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    upos: str
    deprel: str
    head: int
    sense: str | None = None


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def headline_id(self) -> str | None:
        return self.metadata.get("headline_id")

    @property
    def date(self) -> str | None:
        return self.metadata.get("date")

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def text(self, span: tuple[int, int] | None = None) -> str:
        lo, hi = span if span is not None else (1, len(self.tokens))
        return " ".join(t.form for t in self.tokens[lo - 1 : hi])


def _sense_from_misc(misc: str) -> str | None:
    if misc == "_":
        return None
    for part in misc.split("|"):
        if part.startswith("Sense="):
            return part[len("Sense=") :]
    return None


def _validate_tree(tokens: list[Token], first_line: int) -> None:
    n = len(tokens)
    roots = [t.index for t in tokens if t.head == 0]
    for t in tokens:
        if not 0 <= t.head <= n:
            raise InputError(
                f"sentence at line {first_line}: token {t.index} head {t.head} out of range"
            )
    if len(roots) != 1:
        raise InputError(
            f"sentence at line {first_line}: expected exactly one root, found {len(roots)}"
        )
    # walk each head chain; revisiting a token within one walk means a cycle
    heads = {t.index: t.head for t in tokens}
    for start in heads:
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                raise InputError(f"sentence at line {first_line}: cyclic head chain at token {node}")
            seen.add(node)
            node = heads[node]


def parse_conllu(lines: Iterable[str]) -> list[Sentence]:
    """Parse a CoNLL-U stream into sentences, one per blank-line block."""
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    metadata: dict = {}
    block_start: int | None = None

    def flush() -> None:
        nonlocal tokens, metadata, block_start
        if tokens:
            _validate_tree(tokens, block_start or 1)
            expected = list(range(1, len(tokens) + 1))
            if [t.index for t in tokens] != expected:
                raise InputError(f"sentence at line {block_start}: token ids not 1..n")
            sentences.append(Sentence(tokens=tuple(tokens), metadata=dict(metadata)))
        tokens = []
        metadata = {}
        block_start = None

    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            flush()
            continue
        if block_start is None:
            block_start = lineno
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if value:
                metadata[key.strip()] = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != _COLUMNS:
            raise InputError(f"line {lineno}: expected {_COLUMNS} columns, found {len(cols)}")
        if _SKIP_ID.match(cols[0]):
            continue  # multiword-token range or empty node
        try:
            index = int(cols[0])
            head = int(cols[6])
        except ValueError as exc:
            raise InputError(f"line {lineno}: bad token id or head: {exc}") from exc
        if not cols[3] or cols[3] == "_":
            raise InputError(f"line {lineno}: empty UPOS")
        tokens.append(
            Token(
                index=index,
                form=cols[1],
                lemma=cols[2],
                upos=cols[3],
                deprel=cols[7],
                head=head,
                sense=_sense_from_misc(cols[9]),
            )
        )
    flush()
    return sentences


def serialize(sentences: Iterable[Sentence]) -> str:
    """Render sentences back to CoNLL-U; parse(serialize(parse(x))) == parse(x)."""
    blocks = []
    for sentence in sentences:
        lines = [f"# {key} = {value}" for key, value in sentence.metadata.items()]
        for t in sentence.tokens:
            misc = f"Sense={t.sense}" if t.sense else "_"
            lines.append(
                "\t".join(
                    [str(t.index), t.form, t.lemma, t.upos, "_", "_", str(t.head), t.deprel, "_", misc]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def children_map(sentence: Sentence) -> dict[int, list[int]]:
    kids: dict[int, list[int]] = {t.index: [] for t in sentence.tokens}
    for t in sentence.tokens:
        if t.head != 0:
            kids[t.head].append(t.index)
    return kids


def subtree_span(sentence: Sentence, index: int) -> tuple[int, int]:
    """Contiguous [min, max] token range covering the token and its dependency
    descendants."""
    if not 1 <= index <= len(sentence.tokens):
        raise InputError(f"token index {index} out of range")
    kids = children_map(sentence)
    lo = hi = index
    stack = [index]
    while stack:
        node = stack.pop()
        lo = min(lo, node)
        hi = max(hi, node)
        stack.extend(kids[node])
    return lo, hi
