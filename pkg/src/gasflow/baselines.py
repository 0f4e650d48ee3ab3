"""Reference predictors: persistence and ridge linear autoregression.

Both share the forecaster contract used by the evaluator and backtester:
given the last m prices, produce h future prices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError

Forecaster = Callable[[Sequence[float]], np.ndarray]


def persistence_predict(window_prices: Sequence[float], h: int) -> np.ndarray:
    """Repeat the last observed price for every horizon day."""
    if len(window_prices) == 0:
        raise InputError("persistence needs at least one observed price")
    return np.full(h, float(window_prices[-1]))


@dataclass(frozen=True)
class LinearARParams:
    weights: np.ndarray  # (h, m)
    intercept: np.ndarray  # (h,)
    ridge: float

    @property
    def m(self) -> int:
        return self.weights.shape[1]

    def predict(self, window_prices: Sequence[float]) -> np.ndarray:
        x = np.asarray(window_prices, dtype=np.float64)
        if x.shape != (self.m,):
            raise InputError(f"expected {self.m} prices, got {x.shape}")
        return self.weights @ x + self.intercept


def fit_linear_ar(x: np.ndarray, y: np.ndarray, ridge: float = 0.0) -> LinearARParams:
    """Ridge least squares per horizon, intercept unpenalized.

    ``x`` is (n, m) windows of past prices, ``y`` is (n, h) future prices.
    Solved on centered data so the ridge limit shrinks weights to zero and
    the intercept to the target mean.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise InputError(f"incompatible shapes {x.shape} and {y.shape}")
    if ridge < 0:
        raise InputError("ridge penalty must be non-negative")
    n, m = x.shape
    x_mean = x.mean(axis=0)
    y_mean = y.mean(axis=0)
    xc = x - x_mean
    yc = y - y_mean
    normal = xc.T @ xc + ridge * np.eye(m)
    if ridge == 0.0:
        cond = np.linalg.cond(normal)
        if not np.isfinite(cond) or cond > 1e12:
            raise InputError(
                "normal matrix is singular or near-singular; pass a ridge penalty > 0"
            )
    weights = np.linalg.solve(normal, xc.T @ yc).T  # (h, m)
    intercept = y_mean - weights @ x_mean
    return LinearARParams(weights=weights, intercept=intercept, ridge=ridge)


def price_windows(prices: Sequence[float], m: int, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Stride-1 (past m, next h) windows over a price sequence."""
    prices = list(prices)
    n = len(prices)
    if n < m + h:
        raise InputError(f"need at least m+h={m + h} prices, got {n}")
    x = np.array([prices[t : t + m] for t in range(n - m - h + 1)], dtype=np.float64)
    y = np.array([prices[t + m : t + m + h] for t in range(n - m - h + 1)], dtype=np.float64)
    return x, y


def chain_forecast(forecaster: Forecaster, window_prices: Sequence[float], lookahead: int) -> np.ndarray:
    """Extend an h-step forecaster to any lookahead by feeding its own
    predictions back into a shifted window (recursive forecasting)."""
    window = [float(p) for p in window_prices]
    m = len(window)
    out: list[float] = []
    while len(out) < lookahead:
        preds = np.asarray(forecaster(window), dtype=np.float64)
        if preds.size == 0:
            raise InputError("forecaster returned no predictions")
        out.extend(preds.tolist())
        window = (window + preds.tolist())[-m:]
    return np.array(out[:lookahead])
