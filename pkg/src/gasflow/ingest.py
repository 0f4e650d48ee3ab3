"""Headline and price ingestion.

Headlines arrive as line-delimited JSON objects with ``date`` (ISO-8601 day),
``source``, ``title`` and an optional ``body``. Prices arrive as ``date,price``
CSV. Both are aligned onto the trading-day calendar of the price series;
headlines dated to non-trading days are dropped and counted.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from datetime import date as Date
from enum import Enum
from typing import Iterable

from .errors import InputError, InvariantError

KNOWN_SOURCES = ("TG", "FT", "NYTf", "NYTu")


class Source(Enum):
    TG = "TG"
    FT = "FT"
    NYTf = "NYTf"
    NYTu = "NYTu"
    OTHER = "OTHER"

    @classmethod
    def from_string(cls, raw: str) -> "Source":
        for name in KNOWN_SOURCES:
            if raw == name:
                return cls(name)
        return cls.OTHER


class Market(Enum):
    FUTURE = "future"
    SPOT = "spot"


@dataclass(frozen=True)
class HeadlineRecord:
    date: Date
    source: Source
    title: str
    body: str | None = None


@dataclass(frozen=True)
class RecordError:
    """A non-fatal problem with one input line, reported instead of dropped silently."""

    line: int
    message: str


@dataclass(frozen=True)
class PriceSeries:
    points: tuple[tuple[Date, float], ...]
    market: Market = Market.FUTURE

    def __post_init__(self):
        previous = None
        for day, price in self.points:
            if price <= 0:
                raise InvariantError(f"non-positive price {price} on {day}")
            if previous is not None and day <= previous:
                raise InvariantError(f"dates not strictly increasing at {day}")
            if self.market is Market.FUTURE and day.weekday() >= 5:
                raise InvariantError(f"weekend date {day} in weekday-only future series")
            previous = day

    @property
    def dates(self) -> list[Date]:
        return [d for d, _ in self.points]

    @property
    def prices(self) -> list[float]:
        return [p for _, p in self.points]


@dataclass(frozen=True)
class TradingDay:
    date: Date
    price: float
    headlines: tuple[HeadlineRecord, ...]


@dataclass(frozen=True)
class AlignedCorpus:
    """Trading-day calendar with the day's price and its headlines attached."""

    days: tuple[TradingDay, ...]
    market: Market
    dropped_headlines: int = 0
    split_index: int | None = None

    def __len__(self) -> int:
        return len(self.days)

    @property
    def dates(self) -> list[Date]:
        return [d.date for d in self.days]

    @property
    def prices(self) -> list[float]:
        return [d.price for d in self.days]

    def day(self, when: Date) -> TradingDay:
        for d in self.days:
            if d.date == when:
                return d
        raise KeyError(when)


def _parse_iso_day(raw: str) -> Date:
    try:
        return Date.fromisoformat(raw)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad date {raw!r}: {exc}") from exc


def parse_headlines(lines: Iterable[str]) -> tuple[list[HeadlineRecord], list[RecordError]]:
    """Parse line-delimited headline records.

    Returns the good records in input order plus a list of per-line errors;
    malformed lines never vanish silently.
    """
    records: list[HeadlineRecord] = []
    errors: list[RecordError] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(RecordError(lineno, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(obj, dict):
            errors.append(RecordError(lineno, "record is not an object"))
            continue
        title = str(obj.get("title", "") or "").strip()
        if not title:
            errors.append(RecordError(lineno, "empty title"))
            continue
        try:
            day = _parse_iso_day(str(obj.get("date", "")))
        except ValueError as exc:
            errors.append(RecordError(lineno, str(exc)))
            continue
        body = obj.get("body")
        records.append(
            HeadlineRecord(
                date=day,
                source=Source.from_string(str(obj.get("source", ""))),
                title=title,
                body=str(body) if body is not None else None,
            )
        )
    return records, errors


def keyword_filter(records: Iterable[HeadlineRecord], keyword: str) -> list[HeadlineRecord]:
    """Keep records whose body (falling back to the title) contains the keyword.

    The body, when present, is what the upstream news APIs matched against, so
    it takes precedence over the title.
    """
    if not keyword:
        raise InputError("keyword must be non-empty")
    needle = keyword.lower()
    kept = []
    for record in records:
        haystack = record.body if record.body is not None else record.title
        if needle in haystack.lower():
            kept.append(record)
    return kept


def parse_prices(lines: Iterable[str], market: Market = Market.FUTURE) -> PriceSeries:
    """Parse ``date,price`` rows (header optional) into a sorted series."""
    rows: list[tuple[Date, float, int]] = []
    seen: dict[Date, int] = {}
    reader = csv.reader(lines)
    for rowno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 2:
            raise InputError(f"row {rowno}: expected date,price, got {row!r}")
        raw_date, raw_price = row[0].strip(), row[1].strip()
        if rowno == 1 and not _looks_like_date(raw_date):
            continue  # header row
        try:
            day = _parse_iso_day(raw_date)
        except ValueError as exc:
            raise InputError(f"row {rowno}: {exc}") from exc
        try:
            price = float(raw_price)
        except ValueError as exc:
            raise InputError(f"row {rowno}: bad price {raw_price!r}") from exc
        if price <= 0:
            raise InputError(f"row {rowno}: non-positive price {price}")
        if day in seen:
            raise InputError(f"row {rowno}: duplicate date {day} (first at row {seen[day]})")
        seen[day] = rowno
        rows.append((day, price, rowno))
    rows.sort(key=lambda r: r[0])
    try:
        return PriceSeries(points=tuple((d, p) for d, p, _ in rows), market=market)
    except InvariantError as exc:
        raise InputError(str(exc)) from exc


def _looks_like_date(raw: str) -> bool:
    try:
        _parse_iso_day(raw)
        return True
    except ValueError:
        return False


def align(prices: PriceSeries, headlines: Iterable[HeadlineRecord]) -> AlignedCorpus:
    """Attach each headline to its trading day; non-trading-day headlines are
    dropped and counted rather than rolled forward."""
    trading_dates = {d for d, _ in prices.points}
    per_day: dict[Date, list[HeadlineRecord]] = {d: [] for d in trading_dates}
    dropped = 0
    for record in headlines:
        if record.date in trading_dates:
            per_day[record.date].append(record)
        else:
            dropped += 1
    days = tuple(
        TradingDay(date=d, price=p, headlines=tuple(per_day[d])) for d, p in prices.points
    )
    return AlignedCorpus(days=days, market=prices.market, dropped_headlines=dropped)


def split_train_test(corpus: AlignedCorpus, fraction: float) -> tuple[AlignedCorpus, AlignedCorpus]:
    """Chronological split: oldest floor(fraction*N) days train, rest test."""
    if not 0 < fraction < 1:
        raise InputError(f"fraction must be in (0, 1), got {fraction}")
    n = len(corpus)
    if n < 2:
        raise InvariantError(f"cannot split a corpus of {n} day(s)")
    cut = int(fraction * n)
    train = replace(corpus, days=corpus.days[:cut], dropped_headlines=0, split_index=None)
    test = replace(corpus, days=corpus.days[cut:], dropped_headlines=0, split_index=None)
    return train, test


def with_split_marker(corpus: AlignedCorpus, fraction: float) -> AlignedCorpus:
    """Record the train/test boundary on the corpus itself."""
    if not 0 < fraction < 1:
        raise InputError(f"fraction must be in (0, 1), got {fraction}")
    if len(corpus) < 2:
        raise InvariantError(f"cannot split a corpus of {len(corpus)} day(s)")
    return replace(corpus, split_index=int(fraction * len(corpus)))
