"""Fidelity-cost training with Adam.

The cost of a batch is the mean infidelity ``1 - <Y_c|rho(x)|Y_c>`` between
each point's final state and the label state of its true class. Gradients
are exact: the state is pushed forward through the chain of 2x2 rotations
and an adjoint vector is pulled back through the same chain.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import qmath
from .data import Dataset, make_rng
from .model import (
    PARAMS_PER_LAYER,
    LabelSet,
    UqcParams,
    classify_exact,
    label_states,
    layer_angles,
    random_params,
)

log = logging.getLogger(__name__)

_HALF_I_Z = -0.5j * np.array([1.0, -1.0])  # diagonal of -iZ/2


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.6
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, size: int) -> "AdamState":
        return cls(np.zeros(size), np.zeros(size), 0)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 100
    shuffle_seed: int = 0
    keep_best: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


@dataclass
class TrainMetrics:
    best_epoch: int = 0
    batch_costs: list[float] = field(default_factory=list)
    epoch_costs: list[float] = field(default_factory=list)
    test_accuracy: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)

    def records(self, with_time: bool = True) -> list[dict]:
        out = []
        for e, (c, a) in enumerate(zip(self.epoch_costs, self.test_accuracy), start=1):
            rec = {"epoch": e, "mean_batch_cost": c, "test_accuracy": a}
            if with_time:
                rec["seconds"] = self.seconds[e - 1]
            out.append(rec)
        return out


def _unpack_batch(batch):
    if isinstance(batch, Dataset):
        return batch.points, batch.labels
    pts, labs = batch
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    labs = np.asarray(labs, dtype=int).reshape(-1)
    if len(pts) == 0:
        raise ValueError("empty batch")
    if len(pts) != len(labs):
        raise ValueError("points and labels differ in length")
    return pts, labs


def _forward(values: np.ndarray, pts: np.ndarray, keep: bool):
    """Push ``|0>`` through every layer; optionally keep per-layer intermediates."""
    v = layer_angles(values, pts)  # (N, L, 3)
    n, num_layers = v.shape[:2]
    psi = np.zeros((n, 2), dtype=complex)
    psi[:, 0] = 1.0
    inter = []
    for layer in range(num_layers):
        e1 = np.exp(-0.5j * v[:, layer, 0])
        a = psi * np.stack([e1, np.conj(e1)], axis=-1)
        b = qmath.apply(qmath.ry(v[:, layer, 1]), a)
        e3 = np.exp(-0.5j * v[:, layer, 2])
        psi = b * np.stack([e3, np.conj(e3)], axis=-1)
        if keep:
            inter.append((a, b, psi))
    return v, psi, inter


def _check_batch_labels(labs, labels: LabelSet):
    if np.any((labs < 0) | (labs >= labels.num_classes)):
        raise ValueError("batch label out of range for the label set")


def cost(params: UqcParams, batch, labels: LabelSet | None = None) -> float:
    """Mean infidelity over the batch; lies in ``[0, 1]``."""
    labels = labels or label_states(params.num_classes)
    pts, labs = _unpack_batch(batch)
    _check_batch_labels(labs, labels)
    _, psi, _ = _forward(params.values, pts, keep=False)
    fid = qmath.overlap_fidelity(labels.states[labs], psi)
    return float(np.mean(1.0 - fid))


def cost_and_grad(params: UqcParams, batch, labels: LabelSet | None = None):
    """Cost and its exact gradient, flattened in ``params.flat()`` order."""
    labels = labels or label_states(params.num_classes)
    pts, labs = _unpack_batch(batch)
    _check_batch_labels(labs, labels)
    n = len(pts)
    v, psi, inter = _forward(params.values, pts, keep=True)
    y = labels.states[labs]  # (N, 2)
    amp = np.sum(np.conj(y) * psi, axis=-1)  # <Y|psi>
    fid = np.abs(amp) ** 2
    # d fid = 2 Re(lam^dagger d psi), lam = |Y><Y|psi>
    lam = y * amp[:, None]

    grad_v = np.zeros(v.shape)
    for layer in range(params.num_layers - 1, -1, -1):
        a, b, c = inter[layer]
        grad_v[:, layer, 2] = 2.0 * np.real(np.sum(np.conj(lam) * (_HALF_I_Z * c), axis=-1))
        e3 = np.exp(-0.5j * v[:, layer, 2])
        lam = lam * np.stack([np.conj(e3), e3], axis=-1)  # RZ(v3)^dagger
        dy = -0.5j * (qmath.PAULI_Y @ b[..., None])[..., 0]
        grad_v[:, layer, 1] = 2.0 * np.real(np.sum(np.conj(lam) * dy, axis=-1))
        lam = qmath.apply(qmath.dagger(qmath.ry(v[:, layer, 1])), lam)
        grad_v[:, layer, 0] = 2.0 * np.real(np.sum(np.conj(lam) * (_HALF_I_Z * a), axis=-1))
        e1 = np.exp(-0.5j * v[:, layer, 0])
        lam = lam * np.stack([np.conj(e1), e1], axis=-1)

    # chain rule v -> (theta1, theta2, omega1, omega2, omega3); cost = 1 - fid
    g = np.empty((n, params.num_layers, PARAMS_PER_LAYER))
    g[..., 0] = grad_v[..., 0] * pts[:, None, 0]
    g[..., 1] = grad_v[..., 1] * pts[:, None, 1]
    g[..., 2] = grad_v[..., 0]
    g[..., 3] = grad_v[..., 1]
    g[..., 4] = grad_v[..., 2]
    grad = -np.sum(g, axis=0) / n  # fixed-order reduction over the batch
    return float(np.mean(1.0 - fid)), grad.ravel()


def grad(params: UqcParams, batch, labels: LabelSet | None = None) -> np.ndarray:
    return cost_and_grad(params, batch, labels)[1]


def adam_step(state: AdamState, g, params: UqcParams, cfg: AdamConfig):
    """One bias-corrected Adam update. Returns ``(new_state, new_params)``.

    ``params`` may be a :class:`UqcParams` or a plain float array; the
    returned parameters have the same type.
    """
    g = np.asarray(g, dtype=float).ravel()
    theta = params.flat() if isinstance(params, UqcParams) else np.asarray(params, dtype=float).ravel()
    if not (g.shape == theta.shape == state.m.shape == state.v.shape):
        raise ValueError(
            f"dimension mismatch: grad {g.shape}, params {theta.shape}, "
            f"state {state.m.shape}/{state.v.shape}"
        )
    t = state.t + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g * g
    m_hat = m / (1.0 - cfg.beta1 ** t)
    v_hat = v / (1.0 - cfg.beta2 ** t)
    theta = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    if isinstance(params, UqcParams):
        return AdamState(m, v, t), params.with_values(theta)
    return AdamState(m, v, t), theta.reshape(np.shape(params))


def evaluate_accuracy(params: UqcParams, dataset: Dataset,
                      classify: Callable | None = None) -> float:
    """Fraction of points whose predicted class equals the stored label.

    ``classify(params, points)`` must return one class per point; it
    defaults to the exact statevector classifier.
    """
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    classify = classify or classify_exact
    pred = np.asarray(classify(params, dataset.points)).reshape(-1)
    return float(np.mean(pred == dataset.labels))


def train(train_set: Dataset, test_set: Dataset, num_layers: int,
          acfg: AdamConfig | None = None, tcfg: TrainConfig | None = None,
          init_seed: int = 0, callback: Callable | None = None):
    """Train a classifier; returns ``(params, metrics)``.

    Every epoch reshuffles the training set from ``tcfg.shuffle_seed``,
    takes one Adam step per batch and records the exact test accuracy.
    With ``tcfg.keep_best`` the returned parameters are those of the epoch
    with the highest test accuracy (earliest on ties), otherwise those of
    the last epoch.
    """
    acfg = acfg or AdamConfig()
    tcfg = tcfg or TrainConfig()
    if train_set.problem is not test_set.problem:
        raise ValueError(
            f"train set is {train_set.problem.value} but test set is {test_set.problem.value}"
        )
    if tcfg.batch_size > len(train_set):
        raise ValueError("batch_size exceeds the training set size")
    num_classes = train_set.num_classes
    labels = label_states(num_classes)
    params = random_params(num_layers, num_classes, init_seed)
    state = AdamState.zeros(params.flat().size)
    shuffle_rng = make_rng(tcfg.shuffle_seed)
    metrics = TrainMetrics()
    n = len(train_set)
    best = (-1.0, params)
    for epoch in range(1, tcfg.epochs + 1):
        start = time.perf_counter()
        order = shuffle_rng.permutation(n)
        costs = []
        for lo in range(0, n, tcfg.batch_size):
            idx = order[lo:lo + tcfg.batch_size]
            c, g = cost_and_grad(params, (train_set.points[idx], train_set.labels[idx]), labels)
            state, params = adam_step(state, g, params, acfg)
            costs.append(c)
        metrics.batch_costs.extend(costs)
        metrics.epoch_costs.append(float(np.mean(costs)))
        metrics.test_accuracy.append(evaluate_accuracy(params, test_set))
        metrics.seconds.append(time.perf_counter() - start)
        if metrics.test_accuracy[-1] > best[0]:
            best = (metrics.test_accuracy[-1], params)
            metrics.best_epoch = epoch
        log.info("epoch %d cost %.4f test accuracy %.4f", epoch,
                 metrics.epoch_costs[-1], metrics.test_accuracy[-1])
        if callback is not None:
            callback(epoch, params, metrics)
    if tcfg.keep_best:
        return best[1], metrics
    metrics.best_epoch = tcfg.epochs
    return params, metrics


def num_batches(n: int, batch_size: int) -> int:
    return math.ceil(n / batch_size)
