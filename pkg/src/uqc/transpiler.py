"""Condensation and RX-RY-RX synthesis.

A trained model evaluated at one point is a single 2x2 unitary. It is
rewritten, up to global phase, as ``RX(a) RY(b) RX(c)`` and emitted as a
three-gate native program in time order ``RX(c), RY(b), RX(a)``. An X-basis
measurement appends ``RY(-pi/2)``, which turns the Bloch X axis into Z.

Native programs serialize to JSON::

    {"gates": [{"g": "RX", "theta": 0.1}, ...],
     "basis": "Z", "shots": 100,
     "meta": {"point": [x1, x2], "model_id": "..."}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import jsonschema
import numpy as np

from . import qmath
from .model import UqcParams, model_unitary

BASES = ("Z", "X")
DEFAULT_SHOTS = 100
GIMBAL_TOL = 1e-9
INPUT_UNITARY_TOL = 1e-9

_TO_X_FRAME = qmath.ry(np.pi / 2)  # RY(pi/2) RZ(t) RY(-pi/2) = RX(t)


class NonUnitaryError(ValueError):
    pass


class ProgramSchemaError(ValueError):
    """A native program document violates the schema.

    ``path`` is the JSON path of the offending field, e.g. ``$.gates[1].theta``.
    """

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsupportedGateError(ValueError):
    pass


def _wrap(t: float) -> float:
    w = math.pi - (math.pi - t) % (2.0 * math.pi)
    return math.pi if w <= -math.pi else w


@dataclass(frozen=True)
class XyxAngles:
    """``RX(a) RY(b) RX(c) = exp(i global_phase) U``."""

    a: float
    b: float
    c: float
    global_phase: float = 0.0

    def unitary(self) -> np.ndarray:
        return qmath.rx(self.a) @ qmath.ry(self.b) @ qmath.rx(self.c)


def _zyz(v: np.ndarray):
    """Euler angles with ``v ~ RZ(phi) RY(theta) RZ(lam)`` up to phase."""
    theta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(math.sin(theta)) < GIMBAL_TOL:
        if abs(v[0, 0]) >= abs(v[1, 0]):
            # RZ(phi + lam)
            return cmath_arg(v[1, 1]) - cmath_arg(v[0, 0]), 0.0, 0.0
        # RY(pi) RZ(lam) = RZ(-lam) RY(pi): only phi - lam is defined
        return cmath_arg(v[1, 0]) - cmath_arg(-v[0, 1]), math.pi, 0.0
    # the sum is best read off the diagonal and the difference off the
    # anti-diagonal; halving leaves a pi ambiguity, settled by the coarse
    # value of lam that v10 / v11 gives modulo 2 pi
    s = cmath_arg(v[1, 1]) - cmath_arg(v[0, 0])
    d = cmath_arg(v[1, 0]) - cmath_arg(-v[0, 1])
    phi, lam = 0.5 * (s + d), 0.5 * (s - d)
    coarse = cmath_arg(v[1, 1]) - cmath_arg(v[1, 0])
    if abs(_wrap(lam - coarse)) > 0.5 * math.pi:
        phi, lam = phi + math.pi, lam + math.pi
    return phi, theta, lam


def cmath_arg(z: complex) -> float:
    return math.atan2(z.imag, z.real)


def decompose_xyx(u) -> XyxAngles:
    """Decompose a single-qubit unitary into ``RX(a) RY(b) RX(c)``.

    ``b`` lies in ``[0, pi]`` and ``a``, ``c`` in ``(-pi, pi]``. When
    ``sin b`` vanishes only ``a`` carries the rotation and ``c = 0``.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not qmath.is_unitary(u, INPUT_UNITARY_TOL):
        raise NonUnitaryError("decompose_xyx needs a 2x2 unitary matrix")
    v = qmath.dagger(_TO_X_FRAME) @ u @ _TO_X_FRAME
    a, b, c = _zyz(v)
    a, c = _wrap(a), _wrap(c)
    recon = qmath.rx(a) @ qmath.ry(b) @ qmath.rx(c)
    phase = cmath_arg(np.trace(qmath.dagger(u) @ recon))
    return XyxAngles(a, b, c, phase)


def reconstruction_error(u, angles: XyxAngles) -> float:
    """Frobenius norm of ``RX(a) RY(b) RX(c) - exp(i phase) U``."""
    target = np.exp(1j * angles.global_phase) * np.asarray(u)
    return float(np.linalg.norm(angles.unitary() - target))


# native programs --------------------------------------------------------

@dataclass(frozen=True)
class RX:
    theta: float


@dataclass(frozen=True)
class RY:
    theta: float


@dataclass(frozen=True)
class CZ:
    control: int = 0
    target: int = 1


NativeGate = Union[RX, RY, CZ]


@dataclass(frozen=True)
class NativeProgram:
    gates: tuple
    basis: str = "Z"
    shots: int = DEFAULT_SHOTS
    meta: dict = field(default_factory=dict, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        if int(self.shots) < 1:
            raise ValueError("shots must be at least 1")
        for g in self.gates:
            if isinstance(g, (RX, RY)) and not math.isfinite(g.theta):
                raise ValueError("gate angles must be finite")

    def unitary(self) -> np.ndarray:
        """Product of the single-qubit gates (time order, so last gate leftmost)."""
        u = qmath.I2.copy()
        for g in self.gates:
            if isinstance(g, RX):
                u = qmath.rx(g.theta) @ u
            elif isinstance(g, RY):
                u = qmath.ry(g.theta) @ u
            else:
                raise UnsupportedGateError(f"{type(g).__name__} is not a single-qubit gate")
        return u


def compile_unitary(u, basis: str = "Z", shots: int = DEFAULT_SHOTS, meta=None) -> NativeProgram:
    ang = decompose_xyx(u)
    gates = [RX(ang.c), RY(ang.b), RX(ang.a)]
    if basis == "X":
        gates.append(RY(-math.pi / 2))
    elif basis != "Z":
        raise ValueError(f"basis must be one of {BASES}")
    return NativeProgram(tuple(gates), basis, shots, dict(meta or {}))


def compile_point(params: UqcParams, x, basis: str = "Z", shots: int = DEFAULT_SHOTS,
                  model_id: str = "") -> NativeProgram:
    """Condense the model at point ``x`` and emit the native program."""
    x = np.asarray(x, dtype=float).reshape(2)
    meta = {"point": [float(x[0]), float(x[1])], "model_id": model_id}
    return compile_unitary(model_unitary(params, x), basis, shots, meta)


# JSON wire format -------------------------------------------------------

PROGRAM_SCHEMA = {
    "type": "object",
    "required": ["gates", "basis", "shots"],
    "properties": {
        "gates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["g"],
                "properties": {
                    "g": {"enum": ["RX", "RY", "CZ"]},
                    "theta": {"type": "number"},
                    "control": {"type": "integer", "minimum": 0},
                    "target": {"type": "integer", "minimum": 0},
                },
                "allOf": [
                    {"if": {"properties": {"g": {"enum": ["RX", "RY"]}}},
                     "then": {"required": ["theta"]}},
                    {"if": {"properties": {"g": {"const": "CZ"}}},
                     "then": {"required": ["control", "target"]}},
                ],
            },
        },
        "basis": {"enum": list(BASES)},
        "shots": {"type": "integer", "minimum": 1},
        "meta": {
            "type": "object",
            "properties": {
                "point": {"type": "array", "items": {"type": "number"},
                          "minItems": 2, "maxItems": 2},
                "model_id": {"type": "string"},
            },
        },
    },
}

_validator = jsonschema.Draft202012Validator(PROGRAM_SCHEMA)


def _gate_to_json(g) -> dict:
    if isinstance(g, RX):
        return {"g": "RX", "theta": float(g.theta)}
    if isinstance(g, RY):
        return {"g": "RY", "theta": float(g.theta)}
    return {"g": "CZ", "control": g.control, "target": g.target}


def to_dict(p: NativeProgram) -> dict:
    out = {"gates": [_gate_to_json(g) for g in p.gates], "basis": p.basis, "shots": int(p.shots)}
    if p.meta:
        out["meta"] = p.meta
    return out


def serialize(p: NativeProgram) -> str:
    return json.dumps(to_dict(p))


def _json_path(parts) -> str:
    path = "$"
    for part in parts:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def from_dict(doc) -> NativeProgram:
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        if err.validator == "required":
            missing = next((f for f in err.validator_value if f not in err.instance), None)
            if missing is not None:
                path.append(missing)
                raise ProgramSchemaError(f"missing required field {missing!r}", _json_path(path))
        raise ProgramSchemaError(err.message, _json_path(path))
    gates = []
    for g in doc["gates"]:
        if g["g"] == "RX":
            gates.append(RX(float(g["theta"])))
        elif g["g"] == "RY":
            gates.append(RY(float(g["theta"])))
        else:
            gates.append(CZ(g["control"], g["target"]))
    return NativeProgram(tuple(gates), doc["basis"], doc["shots"], dict(doc.get("meta", {})))


def deserialize(text: str) -> NativeProgram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ProgramSchemaError(f"invalid JSON: {err}") from None
    return from_dict(doc)
