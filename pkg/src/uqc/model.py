"""The single-qubit data re-uploading classifier.

Each layer uploads a 2D point ``x`` through three rotation angles

    v = (theta1 * x1 + omega1, theta2 * x2 + omega2, omega3)
    U = RZ(v3) RY(v2) RZ(v1)

and the full model applies layer 1 first to ``|0>``. Classes are read out by
fidelity against a fixed set of maximally separated label states.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import qmath

log = logging.getLogger(__name__)

PARAMS_PER_LAYER = 5
SUPPORTED_CLASS_COUNTS = (2, 3)


@dataclass(frozen=True)
class LayerParams:
    theta: tuple[float, float]
    omega: tuple[float, float, float]

    def __post_init__(self):
        vals = (*self.theta, *self.omega)
        if len(self.theta) != 2 or len(self.omega) != 3:
            raise ValueError("a layer needs 2 data weights and 3 biases")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("layer parameters must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([*self.theta, *self.omega], dtype=float)


@dataclass(frozen=True, eq=False)
class UqcParams:
    """Trainable parameters of an ``L``-layer classifier.

    ``values`` has shape ``(L, 5)``; each row is
    ``(theta1, theta2, omega1, omega2, omega3)``.
    """

    values: np.ndarray
    num_classes: int = 2
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != PARAMS_PER_LAYER or v.shape[0] < 1:
            raise ValueError(f"expected an (L, 5) parameter array with L >= 1, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("parameters must be finite")
        if self.num_classes not in SUPPORTED_CLASS_COUNTS:
            raise ValueError(f"unsupported class count {self.num_classes}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_layers(cls, layers: Sequence[LayerParams], num_classes: int = 2) -> "UqcParams":
        return cls(np.array([lp.as_array() for lp in layers]), num_classes)

    @classmethod
    def zeros(cls, num_layers: int, num_classes: int = 2) -> "UqcParams":
        return cls(np.zeros((num_layers, PARAMS_PER_LAYER)), num_classes)

    @classmethod
    def from_flat(cls, flat, num_classes: int = 2, meta: dict | None = None) -> "UqcParams":
        flat = np.asarray(flat, dtype=float)
        if flat.ndim != 1 or flat.size % PARAMS_PER_LAYER:
            raise ValueError(f"flat parameter vector length {flat.size} is not a multiple of 5")
        return cls(flat.reshape(-1, PARAMS_PER_LAYER), num_classes, dict(meta or {}))

    @property
    def num_layers(self) -> int:
        return self.values.shape[0]

    @property
    def layers(self) -> list[LayerParams]:
        return [LayerParams(tuple(row[:2]), tuple(row[2:])) for row in self.values]

    def flat(self) -> np.ndarray:
        return self.values.ravel().copy()

    def with_values(self, values) -> "UqcParams":
        return UqcParams(np.asarray(values, dtype=float).reshape(self.values.shape),
                         self.num_classes, dict(self.meta))

    def __eq__(self, other):
        if not isinstance(other, UqcParams):
            return NotImplemented
        return (self.num_classes == other.num_classes
                and self.values.shape == other.values.shape
                and np.array_equal(self.values, other.values))

    # serialization -----------------------------------------------------

    def to_json(self, **meta) -> str:
        """Serialize as ``{"params": [...5L floats...], "num_layers", "num_classes", ...}``.

        Python's float repr is the shortest string that round-trips, so
        the output is bit-exact.
        """
        body = {
            "num_layers": self.num_layers,
            "num_classes": self.num_classes,
            "problem_name": None,
            "seed": None,
        }
        body.update(self.meta)
        body.update(meta)
        body["params"] = [float(v) for v in self.values.ravel()]
        return json.dumps(body, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "UqcParams":
        body = json.loads(text)
        try:
            flat = body.pop("params")
            num_layers = body.pop("num_layers")
            num_classes = body.pop("num_classes")
        except KeyError as err:
            raise ValueError(f"model file is missing field {err.args[0]!r}") from None
        params = cls.from_flat(flat, num_classes, body)
        if params.num_layers != num_layers:
            raise ValueError(f"num_layers={num_layers} but {len(flat)} parameters given")
        return params

    def save(self, path, **meta) -> None:
        Path(path).write_text(self.to_json(**meta) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "UqcParams":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError(f"points must have 2 coordinates, got shape {x.shape}")
    if np.any(np.abs(x) > 1.0):
        log.warning("input outside [-1, 1]^2 passed to the classifier")
    return x


def layer_angles(values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rotation angles ``v`` of every layer for every point.

    ``values`` is ``(L, 5)`` and ``x`` is ``(..., 2)``; the result has shape
    ``(..., L, 3)``.
    """
    x = np.asarray(x, dtype=float)[..., None, :]
    v1 = values[:, 0] * x[..., 0] + values[:, 2]
    v2 = values[:, 1] * x[..., 1] + values[:, 3]
    v3 = np.broadcast_to(values[:, 4], v1.shape)
    return np.stack([v1, v2, v3], axis=-1)


def layer_unitary(p: LayerParams, x) -> np.ndarray:
    """``RZ(v3) RY(v2) RZ(v1)`` for one layer at point(s) ``x``."""
    v = layer_angles(p.as_array()[None, :], _as_points(x))[..., 0, :]
    return qmath.rz(v[..., 2]) @ qmath.ry(v[..., 1]) @ qmath.rz(v[..., 0])


def layer_unitaries(params: UqcParams, x) -> np.ndarray:
    """All layer unitaries, shape ``(..., L, 2, 2)``."""
    v = layer_angles(params.values, _as_points(x))
    return qmath.rz(v[..., 2]) @ qmath.ry(v[..., 1]) @ qmath.rz(v[..., 0])


def model_unitary(params: UqcParams, x) -> np.ndarray:
    """Condensed circuit ``U_L ... U_2 U_1`` (layer 1 acts first)."""
    us = layer_unitaries(params, x)
    out = us[..., 0, :, :]
    for layer in range(1, params.num_layers):
        out = us[..., layer, :, :] @ out
    return out


def forward_state(params: UqcParams, x) -> np.ndarray:
    """State after the full circuit acting on ``|0>``."""
    u = model_unitary(params, x)
    return u[..., :, 0].copy()


@dataclass(frozen=True, eq=False)
class LabelSet:
    states: np.ndarray  # (C, 2)
    bloch: np.ndarray = None  # (C, 3), exact coordinates so symmetric ties stay ties

    def __post_init__(self):
        if self.bloch is None:
            object.__setattr__(self, "bloch", qmath.bloch_of(self.states))

    @property
    def num_classes(self) -> int:
        return self.states.shape[0]

    def __len__(self):
        return self.num_classes

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.states)

    def __getitem__(self, c):
        return self.states[c]


def label_states(num_classes: int) -> LabelSet:
    """Maximally separated label states.

    Two classes sit on the poles ``|0>``, ``|1>``. Three classes lie on a
    great circle of the X-Z plane at polar angles 0, 120 and 240 degrees,
    starting from ``|0>``, so a Z and an X measurement fix the class.
    """
    if num_classes == 2:
        bloch = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    elif num_classes == 3:
        h = math.sqrt(3.0) / 2.0
        bloch = np.array([[0.0, 0.0, 1.0], [h, 0.0, -0.5], [-h, 0.0, -0.5]])
    else:
        raise ValueError(f"label states are defined for 2 or 3 classes, not {num_classes}")
    states = qmath.state_from_bloch(bloch)
    states.setflags(write=False)
    bloch.setflags(write=False)
    return LabelSet(states, bloch)


def classify_bloch(r: np.ndarray, labels: LabelSet) -> np.ndarray:
    """Index of the label state with the largest fidelity to Bloch vector(s) ``r``.

    ``np.argmax`` returns the first maximum, so ties go to the lowest class.
    """
    fids = 0.5 * (1.0 + np.asarray(r, dtype=float) @ labels.bloch.T)
    return np.argmax(fids, axis=-1)


def classify_exact(params: UqcParams, x, labels: LabelSet | None = None):
    """Predicted class(es) from the exact final state."""
    if labels is None:
        labels = label_states(params.num_classes)
    r = qmath.bloch_of(forward_state(params, x))
    out = classify_bloch(r, labels)
    return int(out) if np.ndim(out) == 0 else out


def random_params(num_layers: int, num_classes: int, seed: int) -> UqcParams:
    """I.i.d. uniform initialisation on ``[-pi, pi]``."""
    rng = np.random.Generator(np.random.Philox(seed))
    return UqcParams(rng.uniform(-np.pi, np.pi, size=(num_layers, PARAMS_PER_LAYER)), num_classes)
