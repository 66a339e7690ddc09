"""Executing native programs and reading classes from measurement counts.

Two interchangeable backends run a :class:`~uqc.transpiler.NativeProgram`:

* :class:`ExactBackend` computes the outcome probability from the
  statevector and reports rounded counts together with the exact ``p0``.
* :class:`SamplerBackend` shrinks the final Bloch vector by a depolarizing
  factor, applies asymmetric readout flips and draws binomial shot counts
  from a Philox substream keyed by ``(seed, point index, basis)``, so
  results do not depend on evaluation order.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional, Sequence, Union

import numpy as np

from . import qmath
from .model import LabelSet, UqcParams, classify_bloch, label_states
from .transpiler import CZ, DEFAULT_SHOTS, NativeProgram, UnsupportedGateError, compile_point

BASIS_INDEX = {"Z": 0, "X": 1}


class BasisError(ValueError):
    pass


@dataclass(frozen=True)
class Counts:
    basis: str
    n0: int
    n1: int
    prob0: Optional[float] = None  # exact probability, exact backend only

    def __post_init__(self):
        if self.basis not in BASIS_INDEX:
            raise BasisError(f"unknown basis {self.basis!r}")
        if self.n0 < 0 or self.n1 < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n0 + self.n1

    def expectation(self, use_exact: bool = True) -> float:
        """Estimate of ``<sigma>`` in this basis: ``(n0 - n1) / total``."""
        if use_exact and self.prob0 is not None:
            return 2.0 * self.prob0 - 1.0
        if self.total == 0:
            raise ValueError("no shots recorded")
        return (self.n0 - self.n1) / self.total


@dataclass(frozen=True)
class NoiseModel:
    depolarizing_p: float = 0.0
    readout_flip_0to1: float = 0.0
    readout_flip_1to0: float = 0.0

    def __post_init__(self):
        for name, val in asdict(self).items():
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")

    @property
    def is_noiseless(self) -> bool:
        return not any(asdict(self).values())

    def measured_p0(self, z: float) -> float:
        """Probability of reading 0 given the ideal Z expectation ``z``."""
        z = (1.0 - self.depolarizing_p) * z
        p0 = 0.5 * (1.0 + z)
        p0 = p0 * (1.0 - self.readout_flip_0to1) + (1.0 - p0) * self.readout_flip_1to0
        return min(max(p0, 0.0), 1.0)


def default_noise() -> NoiseModel:
    """The calibrated noise model shipped with the package."""
    text = resources.files("uqc").joinpath("noise_default.json").read_text(encoding="utf-8")
    cfg = json.loads(text)
    return NoiseModel(**{k: cfg[k] for k in ("depolarizing_p", "readout_flip_0to1",
                                             "readout_flip_1to0")})


@dataclass(frozen=True)
class ExactBackend:
    kind: str = field(default="exact", init=False)

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class SamplerBackend:
    seed: int = 0
    noise: NoiseModel = NoiseModel()
    kind: str = field(default="sampler", init=False)

    def rng(self, point_index: int, basis: str) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed),
                                    spawn_key=(int(point_index), BASIS_INDEX[basis]))
        return np.random.Generator(np.random.Philox(ss))

    def describe(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "noise": asdict(self.noise)}


Backend = Union[ExactBackend, SamplerBackend]


def final_state(prog: NativeProgram) -> np.ndarray:
    for g in prog.gates:
        if isinstance(g, CZ):
            raise UnsupportedGateError("CZ needs two qubits; this backend simulates one")
    return prog.unitary()[:, 0]


def run_program(prog: NativeProgram, backend, point_index: int = 0) -> Counts:
    """Measure ``prog.shots`` times in the Z basis after its gates."""
    psi = final_state(prog)
    z = float(qmath.bloch_of(psi)[2])
    total = int(prog.shots)
    if isinstance(backend, ExactBackend):
        p0 = min(max(0.5 * (1.0 + z), 0.0), 1.0)
        n0 = int(round(total * p0))
        return Counts(prog.basis, n0, total - n0, p0)
    if isinstance(backend, SamplerBackend):
        p0 = backend.noise.measured_p0(z)
        n0 = int(backend.rng(point_index, prog.basis).binomial(total, p0))
        return Counts(prog.basis, n0, total - n0)
    raise TypeError(f"unknown backend {backend!r}")


def estimate_bloch(z_counts: Counts, x_counts: Counts | None = None,
                   use_exact: bool = True) -> np.ndarray:
    """Bloch vector in the X-Z plane from Z (and optionally X) counts; ``y = 0``."""
    if z_counts.basis != "Z":
        raise BasisError(f"z_counts were measured in basis {z_counts.basis}")
    if x_counts is not None and x_counts.basis != "X":
        raise BasisError(f"x_counts were measured in basis {x_counts.basis}")
    z = z_counts.expectation(use_exact)
    x = 0.0 if x_counts is None else x_counts.expectation(use_exact)
    return np.array([x, 0.0, z])


def classify_from_counts(z_counts: Counts, x_counts: Counts | None,
                         labels: LabelSet, use_exact: bool = True) -> int:
    if labels.num_classes > 2 and x_counts is None:
        raise BasisError("three-class readout needs X-basis counts as well")
    return int(classify_bloch(estimate_bloch(z_counts, x_counts, use_exact), labels))


def bases_for(num_classes: int) -> tuple[str, ...]:
    return ("Z",) if num_classes == 2 else ("Z", "X")


@dataclass
class InferenceResult:
    labels: np.ndarray
    counts: list
    bloch: np.ndarray
    total_measurements: int

    def records(self, points, true_labels=None) -> list[dict]:
        out = []
        for i, (pt, cs) in enumerate(zip(np.asarray(points), self.counts)):
            rec = {
                "point": [float(pt[0]), float(pt[1])],
                "basis_counts": {c.basis: [c.n0, c.n1] for c in cs},
                "bloch_estimate": [float(v) for v in self.bloch[i]],
                "predicted_label": int(self.labels[i]),
            }
            if true_labels is not None:
                rec["true_label"] = int(true_labels[i])
            out.append(rec)
        return out


def infer_dataset(params: UqcParams, points: Sequence, labels: LabelSet | None = None,
                  backend=None, shots: int = DEFAULT_SHOTS, model_id: str = "",
                  use_exact: bool = True) -> InferenceResult:
    """Compile, run and classify every point.

    Binary problems measure only Z; three-class problems measure Z and X.
    ``total_measurements`` is ``points x bases x shots``.
    """
    labels = labels or label_states(params.num_classes)
    backend = backend or ExactBackend()
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    bases = bases_for(labels.num_classes)
    preds = np.empty(len(pts), dtype=int)
    blochs = np.empty((len(pts), 3))
    all_counts = []
    total = 0
    for i, x in enumerate(pts):
        cs = []
        for basis in bases:
            prog = compile_point(params, x, basis, shots, model_id)
            cs.append(run_program(prog, backend, point_index=i))
            total += cs[-1].total
        x_counts = cs[1] if len(cs) > 1 else None
        blochs[i] = estimate_bloch(cs[0], x_counts, use_exact)
        preds[i] = int(classify_bloch(blochs[i], labels))
        all_counts.append(cs)
    return InferenceResult(preds, all_counts, blochs, total)


def mean_accuracy(params: UqcParams, points, true_labels, backend_factory, seeds,
                  shots: int = DEFAULT_SHOTS) -> float:
    accs = [np.mean(infer_dataset(params, points, backend=backend_factory(s),
                                  shots=shots).labels == np.asarray(true_labels))
            for s in seeds]
    return float(np.mean(accs))


def calibrate_depolarizing(cases, target_gap: float = 0.02, readout=(0.0, 0.0),
                           seeds=range(10), shots: int = DEFAULT_SHOTS,
                           iters: int = 12) -> NoiseModel:
    """Bisect the depolarizing strength so the sampler loses ``target_gap``
    accuracy relative to the exact backend, averaged over ``cases``.

    ``cases`` is a sequence of ``(params, points, true_labels)``. The gap is
    monotone in ``p`` only on average, so the result is a calibration for
    those particular models, not a device characterisation.
    """
    exact = [np.mean(infer_dataset(p, pts).labels == np.asarray(y)) for p, pts, y in cases]

    def gap(p):
        noise = NoiseModel(p, *readout)
        accs = [mean_accuracy(par, pts, y, lambda s: SamplerBackend(s, noise), seeds, shots)
                for par, pts, y in cases]
        return float(np.mean(exact) - np.mean(accs))

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if gap(mid) < target_gap:
            lo = mid
        else:
            hi = mid
    return NoiseModel(round(0.5 * (lo + hi), 4), *readout)
