"""Deterministic rule-based tokenizer, POS tagger and lemmatizer.

No statistical models and no downloads: closed-class lexicons, a verb list
tuned for market headlines, and suffix rules. Output quality is best-effort
headline tagging; what matters downstream is that the annotation is valid,
deterministic and reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

TAGGER_NAME = "rule-based-headline-tagger"
TAGGER_VERSION = "1"

_WORD = re.compile(r"[A-Za-z0-9]+(?:[-'][A-Za-z0-9]+)*|'s|[^\sA-Za-z0-9]")

ADPOSITIONS = frozenset(
    """about above across after against amid among around at before behind below
    beneath beside between beyond by despite down during for from in inside into
    near of off on onto out outside over past per since through throughout till
    to toward towards under until up upon via vs within without with""".split()
)
DETERMINERS = frozenset("a an the this that these those each every some any no another".split())
PRONOUNS = frozenset("i you he she it we they who whom what which whose them him her us me".split())
AUXILIARIES = frozenset(
    "is are was were be been being am has have had do does did will would can could may might must shall should".split()
)
COORDINATORS = frozenset("and but or nor yet".split())
SUBORDINATORS = frozenset("as because if while when although though unless whether".split())
ADVERBS = frozenset("now then here there soon again still yet already perhaps never always often".split())

VERB_BASES = frozenset(
    """say rise fall surge jump drop slip climb gain lose cut boost hit push pull
    open close buy sell pause halt stop start launch plan expect warn report
    approve reject probe disrupt trigger spark ease soar slump tumble rally
    rebound slide dip expand shrink grow raise lower lift sink stumble face see
    seek eye weigh mull set win beat miss top meet delay resume suspend sign
    agree deny confirm announce unveil reveal show keep hold leave move come go
    make take get give find call turn run lead bring send pay offer need want
    help play become begin end continue remain stay threaten vow urge back lift
    curb spur fuel stoke dampen roil rock shake revive falter surpass exceed""".split()
)

_PUNCT = re.compile(r"^[^\sA-Za-z0-9]+$")
_NUMBER = re.compile(r"^\d[\d,.]*$")


@dataclass(frozen=True)
class TaggedToken:
    form: str
    lemma: str
    upos: str


def tokenize(text: str) -> list[str]:
    tokens = []
    for raw in _WORD.findall(text):
        if len(raw) > 2 and raw.lower().endswith("'s"):
            tokens.extend([raw[:-2], "'s"])
        else:
            tokens.append(raw)
    return tokens


def _verb_base(word: str) -> str | None:
    """Base verb for an inflected form, or None if not in the verb list."""
    if word in VERB_BASES:
        return word
    for suffix in ("ies", "es", "s", "ing", "ed"):
        if not word.endswith(suffix) or len(word) <= len(suffix) + 1:
            continue
        stem = word[: -len(suffix)]
        candidates = [stem]
        if suffix == "ies":
            candidates = [stem + "y"]
        if suffix in ("ing", "ed"):
            candidates.append(stem + "e")
            if len(stem) >= 2 and stem[-1] == stem[-2]:
                candidates.append(stem[:-1])
        for candidate in candidates:
            if candidate in VERB_BASES:
                return candidate
    return None


def _noun_lemma(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    for suffix in ("ches", "shes", "sses", "xes", "zes"):
        if word.endswith(suffix) and len(word) > len(suffix) + 1:
            return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")) and len(word) > 3:
        return word[:-1]
    return word


def tag(tokens: list[str]) -> list[TaggedToken]:
    """Assign UPOS and lemma to each token."""
    tagged: list[TaggedToken] = []
    for position, form in enumerate(tokens):
        lower = form.lower()
        previous = tagged[-1].upos if tagged else None
        if _PUNCT.match(form):
            upos, lemma = "PUNCT", form
        elif _NUMBER.match(form):
            upos, lemma = "NUM", form
        elif lower == "'s":
            upos, lemma = "PART", "'s"
        elif lower in ADPOSITIONS:
            upos, lemma = "ADP", lower
        elif lower in DETERMINERS:
            upos, lemma = "DET", lower
        elif lower in PRONOUNS:
            upos, lemma = "PRON", lower
        elif lower in AUXILIARIES:
            upos, lemma = "AUX", lower
        elif lower in COORDINATORS:
            upos, lemma = "CCONJ", lower
        elif lower in SUBORDINATORS:
            upos, lemma = "SCONJ", lower
        elif lower in ADVERBS or (lower.endswith("ly") and len(lower) > 4):
            upos, lemma = "ADV", lower
        elif _verb_base(lower) is not None and previous != "DET":
            upos, lemma = "VERB", _verb_base(lower)
        elif position > 0 and form[:1].isupper():
            upos, lemma = "PROPN", form
        else:
            upos, lemma = "NOUN", _noun_lemma(lower)
        tagged.append(TaggedToken(form=form, lemma=lemma, upos=upos))
    return tagged
