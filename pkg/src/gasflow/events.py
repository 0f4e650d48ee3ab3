"""Event extraction over dependency-annotated headlines.

A token is an event indicator when its POS is ADP or VERB, or its dependency
relation (base label, subtypes stripped) is one of acl, advcl, ccomp, rcmod,
xcomp. Each indicator's dependency subtree, projected to a contiguous token
range, is a candidate phrase; nested or identical candidates are collapsed to
the longest. A candidate becomes an event when it contains a token whose
supersense falls in the gate set (phenomena, acts, events, and the
attribute-change classes).

Verb-only mode restricts indicators to VERB tokens and never falls back to
the whole sentence, so verbless headlines yield nothing in that mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .conllu import Sentence, subtree_span
from .errors import InvariantError
from .wordnet import SenseIndex, supersense_of

INDICATOR_UPOS = frozenset({"ADP", "VERB"})
INDICATOR_DEPRELS = frozenset({"acl", "advcl", "ccomp", "rcmod", "xcomp"})
GATE_SUPERSENSES = frozenset(
    {"noun.phenomenon", "noun.act", "noun.event", "adj.all", "adv.all", "noun.attribute"}
)

WHOLE_SENTENCE = "whole_sentence"


class ExtractionMode(Enum):
    FULL_PIPELINE = "full"
    VERB_ONLY = "verb-only"


@dataclass(frozen=True)
class Candidate:
    span: tuple[int, int]
    trigger: int | str  # indicator token index, or WHOLE_SENTENCE


@dataclass(frozen=True)
class EventSpan:
    sentence: Sentence
    span: tuple[int, int]
    trigger: int | str
    gate_token: int
    gate_supersense: str

    @property
    def text(self) -> str:
        return self.sentence.text(self.span)


def base_deprel(deprel: str) -> str:
    return deprel.split(":", 1)[0]


def find_indicators(sentence: Sentence, mode: ExtractionMode = ExtractionMode.FULL_PIPELINE) -> list[int]:
    """Indices of event-indicator tokens under the given mode."""
    indices = []
    for token in sentence.tokens:
        if mode is ExtractionMode.VERB_ONLY:
            if token.upos == "VERB":
                indices.append(token.index)
        elif token.upos in INDICATOR_UPOS or base_deprel(token.deprel) in INDICATOR_DEPRELS:
            indices.append(token.index)
    return indices


def _contains(outer: tuple[int, int], inner: tuple[int, int]) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def candidate_phrases(
    sentence: Sentence, indicators: Iterable[int], whole_sentence_fallback: bool = True
) -> list[Candidate]:
    """Subtree spans of the indicators, nested/identical spans collapsed to the
    longest (ties to the leftmost), ordered by span start.

    With no indicators the whole sentence is the single candidate, so purely
    nominal headlines still reach the sense gate; verb-only extraction turns
    that fallback off.
    """
    raw: list[Candidate] = []
    for index in indicators:
        raw.append(Candidate(span=subtree_span(sentence, index), trigger=index))
    if not raw:
        if not whole_sentence_fallback or len(sentence) == 0:
            return []
        return [Candidate(span=(1, len(sentence)), trigger=WHOLE_SENTENCE)]
    # longest first, leftmost breaking ties; keep spans not nested in a kept one
    raw.sort(key=lambda c: (-(c.span[1] - c.span[0]), c.span[0], c.trigger if isinstance(c.trigger, int) else 0))
    kept: list[Candidate] = []
    for candidate in raw:
        if not any(_contains(k.span, candidate.span) for k in kept):
            kept.append(candidate)
    kept.sort(key=lambda c: c.span)
    return kept


def gate_by_sense(
    candidate: Candidate, sentence: Sentence, sense_index: SenseIndex
) -> EventSpan | None:
    """Promote a candidate to an event iff some token in its span carries a
    gate supersense; evidence is the first such token in span order."""
    lo, hi = candidate.span
    for token in sentence.tokens[lo - 1 : hi]:
        sense = supersense_of(sense_index, token)
        if sense in GATE_SUPERSENSES:
            return EventSpan(
                sentence=sentence,
                span=candidate.span,
                trigger=candidate.trigger,
                gate_token=token.index,
                gate_supersense=sense,
            )
    return None


def extract_events(
    sentence: Sentence, mode: ExtractionMode, sense_index: SenseIndex
) -> list[EventSpan]:
    """Full pipeline: indicators -> candidate phrases -> sense gate."""
    indicators = find_indicators(sentence, mode)
    candidates = candidate_phrases(
        sentence, indicators, whole_sentence_fallback=mode is ExtractionMode.FULL_PIPELINE
    )
    events = []
    for candidate in candidates:
        event = gate_by_sense(candidate, sentence, sense_index)
        if event is not None:
            events.append(event)
    events.sort(key=lambda e: e.span)
    return events


@dataclass(frozen=True)
class CoverageStats:
    headlines_total: int
    headlines_with_events: int

    @property
    def fraction(self) -> float:
        return self.headlines_with_events / self.headlines_total


def coverage_stats(
    sentences: Iterable[Sentence], mode: ExtractionMode, sense_index: SenseIndex
) -> CoverageStats:
    """Headline-level coverage: a headline counts as covered when any of its
    sentences yields at least one event."""
    covered: dict[str, bool] = {}
    for position, sentence in enumerate(sentences):
        key = sentence.headline_id or f"sentence-{position}"
        has_events = bool(extract_events(sentence, mode, sense_index))
        covered[key] = covered.get(key, False) or has_events
    if not covered:
        raise InvariantError("coverage undefined for an empty corpus")
    total = len(covered)
    with_events = sum(covered.values())
    return CoverageStats(headlines_total=total, headlines_with_events=with_events)
