"""Synthetic 2D classification problems.

Points are drawn uniformly from ``[-1, 1]^2`` with numpy's Philox-4x64-10
counter-based bit generator, keyed directly by the dataset seed, and labelled
by fixed geometric margins:

* ``circle``: class 1 inside the circle of radius ``sqrt(2/pi)`` at the origin.
* ``sine``: class 1 on or above ``x2 = 0.8 sin(pi x1)``.
* ``two-circles``: class 1 inside the unit circle at ``(-1, -1)``, class 2
  inside the circle of radius 0.4 at ``(0.3, 0.3)``, class 0 elsewhere.

Boundary points count as inside.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CIRCLE_RADIUS = math.sqrt(2.0 / math.pi)
SINE_AMPLITUDE = 0.8
BIG_CENTER, BIG_RADIUS = (-1.0, -1.0), 1.0
SMALL_CENTER, SMALL_RADIUS = (0.3, 0.3), 0.4

CSV_HEADER = ("x1", "x2", "label")


class DatasetFormatError(ValueError):
    """A CSV row or header could not be parsed."""


class LabelRangeError(ValueError):
    """A stored label is not a valid class for the problem."""


class DatasetIOError(OSError):
    """Reading or writing a dataset file failed."""


class Problem(enum.Enum):
    CIRCLE = "circle"
    SINE = "sine"
    TWO_CIRCLES = "two-circles"

    @property
    def num_classes(self) -> int:
        return 3 if self is Problem.TWO_CIRCLES else 2

    @classmethod
    def parse(cls, name) -> "Problem":
        if isinstance(name, Problem):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for p in cls:
            if p.value == key or p.name.lower().replace("_", "-") == key:
                return p
        raise ValueError(f"unknown problem {name!r}; choose from {[p.value for p in cls]}")


def label_of(problem: Problem, points) -> np.ndarray | int:
    """Ground-truth class of one point or an ``(n, 2)`` array of points."""
    problem = Problem.parse(problem)
    p = np.asarray(points, dtype=float)
    x1, x2 = p[..., 0], p[..., 1]
    if problem is Problem.CIRCLE:
        labels = (x1 ** 2 + x2 ** 2 <= CIRCLE_RADIUS ** 2).astype(int)
    elif problem is Problem.SINE:
        labels = (x2 >= SINE_AMPLITUDE * np.sin(np.pi * x1)).astype(int)
    else:
        big = (x1 - BIG_CENTER[0]) ** 2 + (x2 - BIG_CENTER[1]) ** 2 <= BIG_RADIUS ** 2
        small = (x1 - SMALL_CENTER[0]) ** 2 + (x2 - SMALL_CENTER[1]) ** 2 <= SMALL_RADIUS ** 2
        labels = np.where(big, 1, np.where(small, 2, 0))
    return int(labels) if labels.ndim == 0 else labels


@dataclass(frozen=True, eq=False)
class Dataset:
    problem: Problem
    points: np.ndarray  # (n, 2) float
    labels: np.ndarray  # (n,) int
    seed: int | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        lab = np.array(self.labels, dtype=int).reshape(-1)
        if len(pts) == 0:
            raise ValueError("a dataset needs at least one point")
        if len(pts) != len(lab):
            raise ValueError("points and labels differ in length")
        bad = (lab < 0) | (lab >= self.problem.num_classes)
        if np.any(bad):
            raise LabelRangeError(
                f"label {lab[bad][0]} out of range for {self.problem.value} "
                f"({self.problem.num_classes} classes)"
            )
        pts.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.problem is other.problem
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.labels, other.labels))

    @property
    def num_classes(self) -> int:
        return self.problem.num_classes

    def subset(self, idx) -> "Dataset":
        return Dataset(self.problem, self.points[idx], self.labels[idx], self.seed)


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFF_FFFF_FFFF_FFFF))


def generate(problem, n: int, seed: int) -> Dataset:
    problem = Problem.parse(problem)
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = make_rng(seed).uniform(-1.0, 1.0, size=(n, 2))
    return Dataset(problem, pts, label_of(problem, pts), seed)


def save_csv(d: Dataset, path) -> None:
    lines = [",".join(CSV_HEADER)]
    for (a, b), lab in zip(d.points, d.labels):
        lines.append(f"{a:.17g},{b:.17g},{lab:d}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as err:
        raise DatasetIOError(f"cannot write {path}: {err}") from err


def load_csv(path, problem, seed: int | None = None) -> Dataset:
    problem = Problem.parse(problem)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise DatasetIOError(f"cannot read {path}: {err}") from err
    if not rows or tuple(h.strip() for h in rows[0]) != CSV_HEADER:
        raise DatasetFormatError(f"{path}: expected header {','.join(CSV_HEADER)}")
    pts, labs = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise DatasetFormatError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            a, b, lab = float(row[0]), float(row[1]), int(row[2])
        except ValueError:
            raise DatasetFormatError(f"{path}:{lineno}: cannot parse {row!r}") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DatasetFormatError(f"{path}:{lineno}: non-finite coordinate")
        if not 0 <= lab < problem.num_classes:
            raise LabelRangeError(
                f"{path}:{lineno}: label {lab} out of range for {problem.value}"
            )
        pts.append((a, b))
        labs.append(lab)
    if not pts:
        raise DatasetFormatError(f"{path}: no data rows")
    return Dataset(problem, np.array(pts), np.array(labs), seed)


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
