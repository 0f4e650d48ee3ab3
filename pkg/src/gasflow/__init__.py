"""Headline-event extraction, tensor embedding, 3D-conv price forecasting
and a mock natural-gas purchasing backtest."""

__version__ = "0.1.0"
