"""Lemma-to-supersense lookups backed by the WordNet database files.

Reads the plain-text ``index.sense`` and ``lexnames`` files of a WordNet 3.x
distribution. A sense key looks like ``rise%2:38:00::``; the two digits after
the first colon are the lexicographer-file number, which ``lexnames`` maps to
a name such as ``verb.motion``. Sense numbers order each lemma's senses by
corpus frequency, so the first entry per (lemma, POS class) is the
most-frequent-sense fallback used when a token carries no annotation.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

from .conllu import Token
from .errors import InputError

log = logging.getLogger(__name__)

# ss_type digit of a sense key -> POS class; 5 marks adjective satellites
_SS_TYPE_CLASS = {"1": "noun", "2": "verb", "3": "adj", "4": "adv", "5": "adj"}

_UPOS_CLASS = {"NOUN": "noun", "PROPN": "noun", "VERB": "verb", "ADJ": "adj", "ADV": "adv"}

_SENSE_KEY = re.compile(r"^(?P<lemma>[^%]+)%(?P<ss>\d):(?P<lexfile>\d\d):")


def bundled_lexnames_text() -> str:
    return resources.files("gasflow.data").joinpath("lexnames").read_text()


def load_lexnames(lines: Iterable[str]) -> dict[int, str]:
    """Parse the ``lexnames`` table into file-number -> supersense name."""
    table: dict[int, str] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise InputError(f"lexnames line {lineno}: expected tab-separated columns")
        try:
            table[int(parts[0])] = parts[1]
        except ValueError as exc:
            raise InputError(f"lexnames line {lineno}: bad file number {parts[0]!r}") from exc
    if not table:
        raise InputError("empty lexnames table")
    return table


VALID_SUPERSENSES = frozenset(
    name for name in (line.split("\t")[1] for line in bundled_lexnames_text().splitlines() if line)
)


@dataclass(frozen=True)
class SenseIndex:
    """Immutable (lemma, POS class) -> supersenses map, most frequent first."""

    entries: dict[tuple[str, str], tuple[str, ...]]
    skipped: int = 0

    def lookup(self, lemma: str, pos_class: str) -> tuple[str, ...]:
        return self.entries.get((lemma.lower(), pos_class), ())


def load_wordnet(index_sense_lines: Iterable[str], lexnames_lines: Iterable[str]) -> SenseIndex:
    """Build a SenseIndex from ``index.sense`` and ``lexnames`` streams.

    Malformed sense keys are skipped and counted; an index with no usable
    entries is an error.
    """
    lexnames = load_lexnames(lexnames_lines)
    raw: dict[tuple[str, str], list[tuple[int, str]]] = {}
    skipped = 0
    for line in index_sense_lines:
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        match = _SENSE_KEY.match(fields[0])
        if match is None or len(fields) < 3:
            skipped += 1
            continue
        pos_class = _SS_TYPE_CLASS.get(match.group("ss"))
        lexfile = int(match.group("lexfile"))
        if pos_class is None or lexfile not in lexnames:
            skipped += 1
            continue
        try:
            sense_number = int(fields[2])
        except ValueError:
            skipped += 1
            continue
        lemma = match.group("lemma").lower()
        raw.setdefault((lemma, pos_class), []).append((sense_number, lexnames[lexfile]))
    if not raw:
        raise InputError("index.sense contained no usable entries")
    if skipped:
        log.warning("skipped %d malformed index.sense line(s)", skipped)
    entries = {
        key: tuple(name for _, name in sorted(values)) for key, values in raw.items()
    }
    return SenseIndex(entries=entries, skipped=skipped)


def supersense_of(index: SenseIndex, token: Token) -> str | None:
    """Supersense for a token: its annotation when valid, otherwise the
    most-frequent WordNet sense for (lemma, POS class), otherwise None."""
    if token.sense and token.sense in VALID_SUPERSENSES:
        return token.sense
    pos_class = _UPOS_CLASS.get(token.upos)
    if pos_class is None:
        return None
    senses = index.lookup(token.lemma, pos_class)
    return senses[0] if senses else None
