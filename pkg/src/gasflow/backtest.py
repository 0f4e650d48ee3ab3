"""Mock natural-gas purchasing simulation.

A buyer must acquire a total volume across D trading days, accruing an equal
daily quota. On each day the forecaster supplies the next L predicted prices;
when every prediction is strictly above today's price the buyer purchases the
entire accrued unbought quota at today's price, otherwise the debt carries to
the next opportunity. The benchmark simply buys the daily quota every day.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date as Date
from typing import Callable, Sequence

from .errors import InputError

log = logging.getLogger(__name__)

# day index -> predicted prices for the next L days
LookaheadForecaster = Callable[[int], Sequence[float]]


@dataclass(frozen=True)
class BacktestConfig:
    total_volume: float = 1200.0
    days: int = 1
    lookahead: int = 10
    force_final: bool = False

    def validate(self) -> None:
        if self.total_volume <= 0:
            raise InputError("total volume must be positive")
        if self.days < 1:
            raise InputError("backtest needs at least one day")
        if self.lookahead < 1:
            raise InputError("lookahead must be at least one day")


@dataclass(frozen=True)
class Purchase:
    date: Date
    volume: float
    price: float

    @property
    def cost(self) -> float:
        return self.volume * self.price


@dataclass(frozen=True)
class PurchaseLedger:
    purchases: tuple[Purchase, ...]
    debt_by_day: tuple[float, ...]  # end-of-day unbought quota, one entry per day

    @property
    def total_volume(self) -> float:
        return sum(p.volume for p in self.purchases)

    @property
    def total_cost(self) -> float:
        return sum(p.cost for p in self.purchases)


@dataclass(frozen=True)
class CostReport:
    total_volume: float
    total_cost: float
    weighted_average: float
    unweighted_average: float


class ForecastFailure(InputError):
    def __init__(self, day_index: int, cause: Exception):
        super().__init__(f"forecaster failed on day {day_index}: {cause}")
        self.day_index = day_index


def run_backtest(
    prices: Sequence[tuple[Date, float]],
    forecaster: LookaheadForecaster,
    config: BacktestConfig,
) -> PurchaseLedger:
    """Simulate the buy rule over the first ``config.days`` trading days."""
    config.validate()
    if len(prices) < config.days:
        raise InputError(f"need {config.days} trading days, got {len(prices)}")
    quota = config.total_volume / config.days
    purchases: list[Purchase] = []
    debt_by_day: list[float] = []
    bought = 0.0
    for d in range(config.days):
        day, price = prices[d]
        try:
            predicted = list(forecaster(d))[: config.lookahead]
        except Exception as exc:  # noqa: BLE001 - abort with the failing day index
            raise ForecastFailure(d, exc) from exc
        if len(predicted) < config.lookahead:
            raise ForecastFailure(
                d, InputError(f"expected {config.lookahead} predictions, got {len(predicted)}")
            )
        accrued = quota * (d + 1)
        outstanding = accrued - bought
        fire = all(price < y for y in predicted)
        if fire and outstanding > 0:
            purchases.append(Purchase(date=day, volume=outstanding, price=price))
            bought += outstanding
            outstanding = accrued - bought
        if config.force_final and d == config.days - 1 and outstanding > 0:
            purchases.append(Purchase(date=day, volume=outstanding, price=price))
            bought += outstanding
            outstanding = accrued - bought
        debt_by_day.append(outstanding)
    return PurchaseLedger(purchases=tuple(purchases), debt_by_day=tuple(debt_by_day))


def baseline_ledger(prices: Sequence[tuple[Date, float]], config: BacktestConfig) -> PurchaseLedger:
    """Buy the same amount every day at the market price."""
    config.validate()
    if len(prices) < config.days:
        raise InputError(f"need {config.days} trading days, got {len(prices)}")
    quota = config.total_volume / config.days
    purchases = []
    bought = 0.0
    debt = []
    for d in range(config.days):
        day, price = prices[d]
        accrued = quota * (d + 1)
        volume = accrued - bought
        purchases.append(Purchase(date=day, volume=volume, price=price))
        bought += volume
        debt.append(accrued - bought)
    return PurchaseLedger(purchases=tuple(purchases), debt_by_day=tuple(debt))


def report(ledger: PurchaseLedger) -> CostReport:
    """Volume, cost, and volume-weighted vs per-purchase-day average prices."""
    if not ledger.purchases:
        log.warning("empty ledger: reporting zeros")
        return CostReport(total_volume=0.0, total_cost=0.0, weighted_average=0.0, unweighted_average=0.0)
    volume = ledger.total_volume
    cost = ledger.total_cost
    unweighted = sum(p.price for p in ledger.purchases) / len(ledger.purchases)
    return CostReport(
        total_volume=volume,
        total_cost=cost,
        weighted_average=cost / volume,
        unweighted_average=unweighted,
    )


def always_fire_forecaster(prices: Sequence[tuple[Date, float]], lookahead: int) -> LookaheadForecaster:
    """Diagnostic stub that forecasts one unit above today's price, so the buy
    rule fires every day and the ledger must equal the baseline."""

    def forecast(day_index: int) -> Sequence[float]:
        return [prices[day_index][1] + 1.0] * lookahead

    return forecast
