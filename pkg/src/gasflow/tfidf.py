"""TF-IDF word rankings over three corpus views.

Raw counts for tf, natural-log idf, and a word's score is its best tf*idf
over all documents; a document is one trading day's concatenated normalized
text. The variant is recorded alongside results so rankings stay comparable
across runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import date as Date
from enum import Enum
from typing import Mapping, Sequence

from .backtest import PurchaseLedger
from .errors import InputError

log = logging.getLogger(__name__)

VARIANT = "tf=raw,idf=ln(N/df),pool=max-over-documents"


class View(Enum):
    RAW = "raw"
    EVENTS = "events"
    PRE_PURCHASE = "pre_purchase"


@dataclass(frozen=True)
class TfidfRanking:
    view: View
    entries: tuple[tuple[str, float], ...]  # (stem, score), scores non-increasing
    date_range: tuple[Date, Date] | None = None
    variant: str = VARIANT


def rank_tfidf(
    documents: Sequence[Sequence[str]],
    top_n: int,
    view: View = View.RAW,
    date_range: tuple[Date, Date] | None = None,
) -> TfidfRanking:
    """Top-n stems by max tf*idf across documents; ties alphabetical."""
    n = len(documents)
    if n < 1:
        raise InputError("at least one document required")
    df: dict[str, int] = {}
    for document in documents:
        for word in set(document):
            df[word] = df.get(word, 0) + 1
    scores: dict[str, float] = {}
    for document in documents:
        counts: dict[str, int] = {}
        for word in document:
            counts[word] = counts.get(word, 0) + 1
        for word, tf in counts.items():
            idf = math.log(n / df[word])
            score = tf * idf
            if score > scores.get(word, -math.inf):
                scores[word] = score
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return TfidfRanking(
        view=view, entries=tuple(ordered[:top_n]), date_range=date_range
    )


def pre_purchase_view(
    day_documents: Mapping[Date, Sequence[str]],
    trading_dates: Sequence[Date],
    ledger: PurchaseLedger,
    window: int = 10,
) -> list[tuple[Date, Sequence[str]]]:
    """Documents for the trading days inside the ``window`` days before each
    purchase; overlapping windows contribute each day once."""
    if not ledger.purchases:
        log.warning("empty ledger: pre-purchase view is empty")
        return []
    position = {day: i for i, day in enumerate(trading_dates)}
    selected: set[Date] = set()
    for purchase in ledger.purchases:
        if purchase.date not in position:
            raise InputError(f"purchase date {purchase.date} not in the trading calendar")
        t = position[purchase.date]
        for i in range(max(0, t - window), t):
            selected.add(trading_dates[i])
    out = []
    for day in sorted(selected):
        out.append((day, day_documents.get(day, [])))
    return out


def serialize_ranking(ranking: TfidfRanking) -> str:
    """CSV with a variant header comment: rank,stem,score."""
    lines = [f"# view={ranking.view.value} variant={ranking.variant}"]
    if ranking.date_range:
        lines.append(f"# from={ranking.date_range[0]} to={ranking.date_range[1]}")
    lines.append("rank,stem,score")
    for rank, (word, score) in enumerate(ranking.entries, start=1):
        lines.append(f"{rank},{word},{score!r}")
    return "\n".join(lines) + "\n"
