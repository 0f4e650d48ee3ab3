"""From-scratch 3D-convolution regressor over stacked day tensors.

One valid (no padding) 3D convolution over the (day, word, event) axes with
full channel depth, ReLU, non-overlapping max-pool, then a ReLU hidden layer
and a linear output of one prediction per horizon day. Gradients are
hand-derived; training is SGD with Nesterov momentum and inverse-time
learning-rate decay, deterministic under a fixed seed.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Sequence

import numpy as np

from .errors import InputError, InvariantError
from .tensors import EVENTS_PER_DAY, WORDS_PER_EVENT, PriceScaler, WindowSample


@dataclass(frozen=True)
class ModelConfig:
    m: int = 10
    h: int = 5
    k: int = 300
    filters: int = 8
    kernel: tuple[int, int, int] = (3, 3, 3)  # (day, word, event) extents
    pool: tuple[int, int, int] = (2, 2, 2)
    hidden: int = 64
    seed: int = 0

    @property
    def channels(self) -> int:
        return self.k + 1

    def conv_shape(self) -> tuple[int, int, int]:
        dims = (self.m, WORDS_PER_EVENT, EVENTS_PER_DAY)
        out = tuple(d - e + 1 for d, e in zip(dims, self.kernel))
        if any(x < 1 for x in out):
            raise InputError(f"kernel {self.kernel} larger than input extents {dims}")
        return out  # type: ignore[return-value]

    def pool_shape(self) -> tuple[int, int, int]:
        out = tuple(c // p for c, p in zip(self.conv_shape(), self.pool))
        if any(x < 1 for x in out):
            raise InputError(f"pool {self.pool} leaves an empty dimension")
        return out  # type: ignore[return-value]

    @property
    def flat_size(self) -> int:
        return int(np.prod(self.pool_shape())) * self.filters

    def validate(self) -> None:
        if self.filters < 1:
            raise InputError("need at least one filter")
        self.pool_shape()


@dataclass
class ModelParams:
    config: ModelConfig
    conv_w: np.ndarray  # (F, d_day, d_word, d_event, channels)
    conv_b: np.ndarray  # (F,)
    w1: np.ndarray  # (hidden, flat)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (h, hidden)
    b2: np.ndarray  # (h,)
    velocity: dict = field(default_factory=dict)

    PARAM_NAMES = ("conv_w", "conv_b", "w1", "b1", "w2", "b2")

    def items(self):
        for name in self.PARAM_NAMES:
            yield name, getattr(self, name)

    def copy(self) -> "ModelParams":
        return ModelParams(
            config=self.config,
            **{name: arr.copy() for name, arr in self.items()},
            velocity={k: v.copy() for k, v in self.velocity.items()},
        )

    def assert_finite(self) -> None:
        for name, arr in self.items():
            if not np.all(np.isfinite(arr)):
                raise InvariantError(f"non-finite values in parameter {name}")


def init_params(config: ModelConfig) -> ModelParams:
    """Seeded uniform init scaled by fan-in; biases start at zero."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    dd, dw, de = config.kernel

    def uniform(shape, fan_in):
        limit = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-limit, limit, size=shape)

    conv_w = uniform((config.filters, dd, dw, de, config.channels), dd * dw * de * config.channels)
    w1 = uniform((config.hidden, config.flat_size), config.flat_size)
    w2 = uniform((config.h, config.hidden), config.hidden)
    return ModelParams(
        config=config,
        conv_w=conv_w,
        conv_b=np.zeros(config.filters),
        w1=w1,
        b1=np.zeros(config.hidden),
        w2=w2,
        b2=np.zeros(config.h),
    )


@dataclass
class ForwardCache:
    x: np.ndarray
    patches: np.ndarray
    z1: np.ndarray
    pooled: np.ndarray
    argmax: np.ndarray
    flat: np.ndarray
    z2: np.ndarray
    r2: np.ndarray
    y: np.ndarray


def _conv_patches(x: np.ndarray, kernel: tuple[int, int, int]) -> np.ndarray:
    # (D1, W1, E1, C, dd, dw, de) view of all kernel-sized blocks
    return np.lib.stride_tricks.sliding_window_view(x, kernel, axis=(0, 1, 2))


def forward(params: ModelParams, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    """Run the network on one window input of shape (m, 15, 5, k+1)."""
    cfg = params.config
    expected = (cfg.m, WORDS_PER_EVENT, EVENTS_PER_DAY, cfg.channels)
    if x.shape != expected:
        raise InputError(f"input shape {x.shape} does not match config {expected}")
    patches = _conv_patches(x, cfg.kernel)
    # conv_w is (F, dd, dw, de, C); contract channel and kernel axes
    z1 = np.tensordot(patches, params.conv_w, axes=([3, 4, 5, 6], [4, 1, 2, 3]))
    z1 = z1 + params.conv_b
    r1 = np.maximum(z1, 0.0)
    pooled, argmax = _max_pool(r1, cfg.pool)
    flat = pooled.reshape(-1)
    z2 = params.w1 @ flat + params.b1
    r2 = np.maximum(z2, 0.0)
    y = params.w2 @ r2 + params.b2
    cache = ForwardCache(
        x=x, patches=patches, z1=z1, pooled=pooled, argmax=argmax, flat=flat, z2=z2, r2=r2, y=y
    )
    return y, cache


def _max_pool(r1: np.ndarray, pool: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
    pd, pw, pe = pool
    d1, w1, e1, f = r1.shape
    d2, w2, e2 = d1 // pd, w1 // pw, e1 // pe
    cropped = r1[: d2 * pd, : w2 * pw, : e2 * pe, :]
    blocks = (
        cropped.reshape(d2, pd, w2, pw, e2, pe, f)
        .transpose(0, 2, 4, 1, 3, 5, 6)
        .reshape(d2, w2, e2, pd * pw * pe, f)
    )
    argmax = blocks.argmax(axis=3)
    pooled = np.take_along_axis(blocks, argmax[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return pooled, argmax


def _unpool(grad_pooled: np.ndarray, argmax: np.ndarray, conv_shape: tuple[int, int, int, int], pool) -> np.ndarray:
    pd, pw, pe = pool
    d1, w1, e1, f = conv_shape
    d2, w2, e2, _ = grad_pooled.shape
    blocks = np.zeros((d2, w2, e2, pd * pw * pe, f))
    np.put_along_axis(blocks, argmax[:, :, :, None, :], grad_pooled[:, :, :, None, :], axis=3)
    grad = np.zeros(conv_shape)
    grad[: d2 * pd, : w2 * pw, : e2 * pe, :] = (
        blocks.reshape(d2, w2, e2, pd, pw, pe, f).transpose(0, 3, 1, 4, 2, 5, 6).reshape(d2 * pd, w2 * pw, e2 * pe, f)
    )
    return grad


def loss_mse(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error over the horizon outputs."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape:
        raise InputError(f"shape mismatch {predictions.shape} vs {targets.shape}")
    diff = predictions - targets
    return float(np.mean(diff * diff))


def backward(params: ModelParams, cache: ForwardCache, targets: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of the per-sample MSE loss for every parameter tensor."""
    cfg = params.config
    h = cfg.h
    dy = 2.0 * (cache.y - targets) / h
    grads: dict[str, np.ndarray] = {}
    grads["w2"] = np.outer(dy, cache.r2)
    grads["b2"] = dy
    dr2 = params.w2.T @ dy
    dz2 = dr2 * (cache.z2 > 0)
    grads["w1"] = np.outer(dz2, cache.flat)
    grads["b1"] = dz2
    dflat = params.w1.T @ dz2
    dpooled = dflat.reshape(cache.pooled.shape)
    dr1 = _unpool(dpooled, cache.argmax, cache.z1.shape, cfg.pool)
    dz1 = dr1 * (cache.z1 > 0)
    # dW[f,i,j,l,c] = sum over output positions of patch * dz1
    dw = np.tensordot(dz1, cache.patches, axes=([0, 1, 2], [0, 1, 2]))
    grads["conv_w"] = dw.transpose(0, 2, 3, 4, 1)
    grads["conv_b"] = dz1.sum(axis=(0, 1, 2))
    return grads


def batch_loss_and_grads(
    params: ModelParams, batch: Sequence[WindowSample]
) -> tuple[float, dict[str, np.ndarray]]:
    total = {name: np.zeros_like(arr) for name, arr in params.items()}
    losses = 0.0
    for sample in batch:
        y, cache = forward(params, sample.input)
        losses += loss_mse(y, sample.target)
        for name, grad in backward(params, cache, sample.target).items():
            total[name] += grad
    n = len(batch)
    return losses / n, {name: g / n for name, g in total.items()}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-7
    momentum: float = 0.9
    decay: float = 1e-6
    epochs: int = 10
    batch_size: int = 16

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise InputError("learning rate must be positive")
        if not 0 <= self.momentum < 1:
            raise InputError("momentum must be in [0, 1)")
        if self.decay < 0:
            raise InputError("decay must be non-negative")


def learning_rate_at(train: TrainConfig, update: int) -> float:
    """Inverse-time decay; the first update (update=0) uses the base rate."""
    return train.learning_rate / (1.0 + train.decay * update)


def train(
    windows: Sequence[WindowSample],
    config: ModelConfig,
    train_config: TrainConfig,
) -> tuple[ModelParams, list[float]]:
    """Nesterov-momentum SGD; returns trained params and per-epoch mean loss."""
    if not windows:
        raise InputError("no training windows")
    train_config.validate()
    params = init_params(config)
    velocity = {name: np.zeros_like(arr) for name, arr in params.items()}
    rng = np.random.default_rng(config.seed)
    order = np.arange(len(windows))
    history: list[float] = []
    update = 0
    for epoch in range(train_config.epochs):
        rng.shuffle(order)
        epoch_loss = 0.0
        seen = 0
        for start in range(0, len(order), train_config.batch_size):
            batch = [windows[i] for i in order[start : start + train_config.batch_size]]
            # evaluate the gradient at the momentum lookahead point
            lookahead = params.copy()
            for name, arr in lookahead.items():
                arr += train_config.momentum * velocity[name]
            loss, grads = batch_loss_and_grads(lookahead, batch)
            if not np.isfinite(loss):
                raise InvariantError(
                    f"non-finite loss at epoch {epoch} update {update}: "
                    f"learning_rate={learning_rate_at(train_config, update):.3e}; "
                    "lower the learning rate or re-check initialization"
                )
            eta = learning_rate_at(train_config, update)
            for name, arr in params.items():
                velocity[name] = train_config.momentum * velocity[name] - eta * grads[name]
                arr += velocity[name]
            update += 1
            epoch_loss += loss * len(batch)
            seen += len(batch)
        history.append(epoch_loss / seen)
    params.velocity = velocity
    params.assert_finite()
    return params, history


def predict(params: ModelParams, window: WindowSample, scaler: PriceScaler) -> np.ndarray:
    """Forward pass mapped back to prices in EUR per cubic meter."""
    y, _ = forward(params, window.input)
    return np.array([scaler.inverse_scale(z) for z in y])


_CKPT_MAGIC = b"GFC3D001"


def save_checkpoint(fh: BinaryIO, params: ModelParams) -> None:
    """Versioned binary checkpoint with a trailing integrity checksum."""
    cfg = params.config
    header = {
        "version": 1,
        "config": {
            "m": cfg.m,
            "h": cfg.h,
            "k": cfg.k,
            "filters": cfg.filters,
            "kernel": list(cfg.kernel),
            "pool": list(cfg.pool),
            "hidden": cfg.hidden,
            "seed": cfg.seed,
        },
        "arrays": [[name, list(arr.shape)] for name, arr in params.items()],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    payload = _CKPT_MAGIC + struct.pack("<I", len(blob)) + blob
    body = b"".join(np.ascontiguousarray(arr, dtype="<f8").tobytes() for _, arr in params.items())
    payload += body
    fh.write(payload)
    fh.write(hashlib.sha256(payload).digest())


def load_checkpoint(fh: BinaryIO) -> ModelParams:
    raw = fh.read()
    if len(raw) < len(_CKPT_MAGIC) + 36 or raw[: len(_CKPT_MAGIC)] != _CKPT_MAGIC:
        raise InputError("not a model checkpoint")
    payload, digest = raw[:-32], raw[-32:]
    if hashlib.sha256(payload).digest() != digest:
        raise InputError("checkpoint checksum mismatch: file is corrupt")
    (header_len,) = struct.unpack("<I", payload[8:12])
    header = json.loads(payload[12 : 12 + header_len])
    cfg_raw = header["config"]
    config = ModelConfig(
        m=cfg_raw["m"],
        h=cfg_raw["h"],
        k=cfg_raw["k"],
        filters=cfg_raw["filters"],
        kernel=tuple(cfg_raw["kernel"]),
        pool=tuple(cfg_raw["pool"]),
        hidden=cfg_raw["hidden"],
        seed=cfg_raw["seed"],
    )
    offset = 12 + header_len
    arrays = {}
    for name, shape in header["arrays"]:
        size = int(np.prod(shape)) * 8
        arrays[name] = (
            np.frombuffer(payload[offset : offset + size], dtype="<f8")
            .reshape([int(s) for s in shape])
            .astype(np.float64)
        )
        offset += size
    return ModelParams(config=config, **arrays)
