"""Per-day price+event tensors and stacked training windows.

A day is a 15x5x(k+1) array: 15 word slots x 5 event slots x word-embedding
channels plus one price channel, the scaled price broadcast to every cell.
Events beyond five are cut (first five in extraction order), long events are
truncated to their first 15 words, short ones right-padded with the OOV
vector, and missing event columns are inserted at seeded-random positions.
Consecutive days stack into windows of m inputs and h target prices.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from datetime import date as Date
from typing import BinaryIO, Sequence

import numpy as np

from .errors import InputError, InvariantError
from .vocab import EmbeddingTable, Vocabulary, embed_word

WORDS_PER_EVENT = 15
EVENTS_PER_DAY = 5


@dataclass(frozen=True)
class PriceScaler:
    mean: float
    std: float

    def scale(self, price: float) -> float:
        return (price - self.mean) / self.std

    def inverse_scale(self, z: float) -> float:
        return z * self.std + self.mean


def fit_scaler(prices: Sequence[float]) -> PriceScaler:
    """Standard scaler over the training prices (population std)."""
    if len(prices) < 2:
        raise InputError(f"need at least 2 prices to fit a scaler, got {len(prices)}")
    arr = np.asarray(prices, dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std())
    if std == 0.0:
        raise InvariantError("constant price series: standard deviation is zero")
    return PriceScaler(mean=mean, std=std)


@dataclass(frozen=True)
class DayTensor:
    date: Date
    data: np.ndarray  # (WORDS_PER_EVENT, EVENTS_PER_DAY, k+1)


def day_rng(seed: int, day: Date) -> np.random.Generator:
    """Per-day generator derived from the global seed, stable across runs."""
    return np.random.default_rng(np.random.SeedSequence((seed, day.toordinal())))


def build_day(
    events: Sequence[Sequence[str]],
    scaled_price: float,
    table: EmbeddingTable,
    vocab: Vocabulary,
    rng: np.random.Generator,
    date: Date | None = None,
) -> DayTensor:
    """Assemble one day's tensor from its normalized event word lists."""
    k = table.dimension
    kept = list(events[:EVENTS_PER_DAY])
    columns: list[list[str]] = [list(event[:WORDS_PER_EVENT]) for event in kept]
    for _ in range(EVENTS_PER_DAY - len(columns)):
        position = int(rng.integers(0, len(columns) + 1))
        columns.insert(position, [])
    data = np.zeros((WORDS_PER_EVENT, EVENTS_PER_DAY, k + 1), dtype=np.float64)
    for event_slot, words in enumerate(columns):
        for word_slot, word in enumerate(words):
            data[word_slot, event_slot, :k] = embed_word(table, vocab, word)
    data[:, :, k] = scaled_price
    return DayTensor(date=date or Date.min, data=data)


@dataclass(frozen=True)
class WindowSample:
    input: np.ndarray  # (m, WORDS_PER_EVENT, EVENTS_PER_DAY, k+1)
    target: np.ndarray  # (h,) scaled prices
    anchor_date: Date
    input_dates: tuple[Date, ...]
    target_dates: tuple[Date, ...]


def build_windows(
    days: Sequence[tuple[Date, float, Sequence[Sequence[str]]]],
    m: int,
    h: int,
    scaler: PriceScaler,
    table: EmbeddingTable,
    vocab: Vocabulary,
    seed: int = 0,
    split_index: int | None = None,
) -> list[WindowSample]:
    """Stride-1 sliding windows over consecutive trading days.

    ``days`` are (date, raw price, normalized events) in chronological order.
    When ``split_index`` marks a train/test boundary, any window whose
    m+h-day footprint would straddle it is excluded.
    """
    n = len(days)
    if n < m + h:
        raise InputError(f"need at least m+h={m + h} days, got {n}")
    tensors: list[DayTensor] = []
    scaled: list[float] = []
    for day, price, events in days:
        z = scaler.scale(price)
        tensors.append(build_day(events, z, table, vocab, day_rng(seed, day), date=day))
        scaled.append(z)
    windows: list[WindowSample] = []
    for t in range(n - m - h + 1):
        end = t + m + h  # exclusive end of the window footprint
        if split_index is not None and t < split_index < end:
            continue
        stack = np.stack([tensors[i].data for i in range(t, t + m)])
        target = np.array(scaled[t + m : end], dtype=np.float64)
        windows.append(
            WindowSample(
                input=stack,
                target=target,
                anchor_date=days[t + m - 1][0],
                input_dates=tuple(days[i][0] for i in range(t, t + m)),
                target_dates=tuple(days[i][0] for i in range(t + m, end)),
            )
        )
    return windows


_MAGIC = b"GFWIN001"


def save_windows(fh: BinaryIO, windows: Sequence[WindowSample]) -> None:
    """Flat binary cache: header (m, h, k, count) then row-major float64 blocks."""
    if not windows:
        raise InputError("refusing to save an empty window list")
    m, words, events, channels = windows[0].input.shape
    h = windows[0].target.shape[0]
    if (words, events) != (WORDS_PER_EVENT, EVENTS_PER_DAY):
        raise InvariantError("window tensor has unexpected word/event extents")
    fh.write(_MAGIC)
    fh.write(struct.pack("<qqqq", m, h, channels - 1, len(windows)))
    for w in windows:
        if w.input.shape != (m, words, events, channels) or w.target.shape != (h,):
            raise InvariantError("inconsistent window shapes")
        fh.write(struct.pack("<q", w.anchor_date.toordinal()))
        fh.write(np.ascontiguousarray(w.input, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(w.target, dtype="<f8").tobytes())


def load_windows(fh: BinaryIO) -> list[WindowSample]:
    magic = fh.read(len(_MAGIC))
    if magic != _MAGIC:
        raise InputError("not a window cache file")
    m, h, k, count = struct.unpack("<qqqq", fh.read(32))
    shape = (m, WORDS_PER_EVENT, EVENTS_PER_DAY, k + 1)
    per_input = int(np.prod(shape))
    windows = []
    for _ in range(count):
        (ordinal,) = struct.unpack("<q", fh.read(8))
        anchor = Date.fromordinal(ordinal)
        data = np.frombuffer(fh.read(per_input * 8), dtype="<f8").reshape(shape).astype(np.float64)
        target = np.frombuffer(fh.read(h * 8), dtype="<f8").astype(np.float64)
        windows.append(
            WindowSample(
                input=data,
                target=target,
                anchor_date=anchor,
                input_dates=(),
                target_dates=(),
            )
        )
    return windows


def checksum_windows(windows: Sequence[WindowSample]) -> str:
    digest = hashlib.sha256()
    for w in windows:
        digest.update(np.ascontiguousarray(w.input, dtype="<f8").tobytes())
        digest.update(np.ascontiguousarray(w.target, dtype="<f8").tobytes())
    return digest.hexdigest()
