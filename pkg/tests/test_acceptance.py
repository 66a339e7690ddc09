"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured numbers and
then asserts at the stated tolerance.
"""

import filecmp
import json
import math
import time

import numpy as np
import pytest

from uqc import cli, data, qmath, trainer
from uqc.backend import (
    ExactBackend,
    NoiseModel,
    SamplerBackend,
    default_noise,
    infer_dataset,
)
from uqc.model import UqcParams, classify_exact, label_states, random_params
from uqc.transpiler import decompose_xyx, reconstruction_error

pytestmark = pytest.mark.acceptance

PROBLEMS = ("circle", "sine", "two-circles")
BINARY = ("circle", "sine")
# ideal-simulator inference accuracies quoted for the three problems
REFERENCE_INFERENCE = {"circle": 0.95, "sine": 0.97, "two-circles": 0.873}


@pytest.fixture
def report(capsys):
    def _report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok
    return _report


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    """Two independent ``reproduce`` runs with the default seeds."""
    runs = []
    for name in ("run_a", "run_b"):
        out = tmp_path_factory.mktemp(name)
        assert cli.main(["reproduce", "--out", str(out)]) == 0
        runs.append(out)
    return runs


def _load(run, problem):
    params = UqcParams.load(run / problem / "model.json")
    sets = {k: data.load_csv(run / problem / f"{k}.csv", problem) for k in ("test", "infer")}
    return params, sets


def test_criterion_1_training(report):
    lines, ok = [], True
    for problem in PROBLEMS:
        cfg = cli.RunConfig(problem=problem).resolved()
        sets = cli.generate_sets(cfg)
        runs = []
        for seed in range(3):
            t0 = time.perf_counter()
            _, m = trainer.train(sets["train"], sets["test"], cfg.layers, cfg.adam(),
                                 trainer.TrainConfig(cfg.epochs, cfg.batch_size, seed),
                                 init_seed=seed)
            runs.append((max(m.test_accuracy), max(m.test_accuracy[:10]),
                         time.perf_counter() - t0))
        best = max(r[0] for r in runs)
        early = max(r[1] for r in runs)
        slowest = max(r[2] for r in runs)
        need = 0.90 if problem in BINARY else 0.88
        good = best >= need and slowest <= 60.0
        if problem in BINARY:
            good = good and early >= 0.90
        ok &= good
        lines.append(f"{problem} best={best:.3f} (>= {need}) first10={early:.3f} "
                     f"slowest={slowest:.1f}s")
    report(1, ok, "; ".join(lines))
    assert ok


def test_criterion_2_inference_accuracy(bundle, report):
    rows = {r["problem"]: r for r in json.loads((bundle[0] / "summary.json").read_text())["rows"]}
    parts, ok = [], True
    for problem in PROBLEMS:
        acc = rows[problem]["ideal_accuracy"]
        ref = REFERENCE_INFERENCE[problem]
        good = abs(acc - ref) <= 0.05
        ok &= good
        parts.append(f"{problem} {acc:.3f} vs {ref}±0.05 {'ok' if good else 'OUT'}")
    report(2, ok, "; ".join(parts))
    assert ok


def test_criterion_3_shot_consistency(bundle, report):
    parts, ok = [], True
    for problem in PROBLEMS:
        params, sets = _load(bundle[0], problem)
        pts = sets["infer"].points
        exact = classify_exact(params, pts)
        few = infer_dataset(params, pts, backend=SamplerBackend(0, NoiseModel()), shots=100)
        many = infer_dataset(params, pts, backend=SamplerBackend(0, NoiseModel()), shots=100_000)
        a100 = float(np.mean(few.labels == exact))
        a1e5 = float(np.mean(many.labels == exact))
        ok &= a100 >= 0.95 and a1e5 >= 0.99
        parts.append(f"{problem} 100 shots {a100:.3f}, 1e5 shots {a1e5:.3f}")
    report(3, ok, "; ".join(parts) + " (need >= 0.95 / 0.99)")
    assert ok


def test_criterion_4_device_gap(bundle, report):
    noise = default_noise()
    parts, ok = [], True
    for problem in BINARY:
        params, sets = _load(bundle[0], problem)
        pts, y = sets["infer"].points, sets["infer"].labels
        exact = float(np.mean(infer_dataset(params, pts).labels == y))
        noisy = float(np.mean([np.mean(infer_dataset(params, pts, backend=SamplerBackend(s, noise))
                                       .labels == y) for s in range(10)]))
        gap = exact - noisy
        ok &= 0.01 <= gap <= 0.04
        parts.append(f"{problem} exact {exact:.3f} sampler {noisy:.4f} gap {100 * gap:.2f}%")
    report(4, ok, "; ".join(parts) + f" (depolarizing_p={noise.depolarizing_p}, need 1-4%)")
    assert ok


def test_criterion_5_transpiler(bundle, report):
    rng = np.random.default_rng(5)
    worst = max(reconstruction_error(u, decompose_xyx(u)) for u in qmath.random_su2(rng, 10_000))
    mismatches = 0
    total = 0
    for problem in PROBLEMS:
        params, sets = _load(bundle[0], problem)
        pts = sets["test"].points
        compiled = infer_dataset(params, pts, backend=ExactBackend()).labels
        mismatches += int(np.sum(compiled != classify_exact(params, pts)))
        total += len(pts)
    ok = worst <= 1e-10 and mismatches == 0
    report(5, ok, f"max reconstruction error {worst:.2e} (<= 1e-10); "
                  f"{mismatches}/{total} label mismatches on test points")
    assert ok


def test_criterion_6_gradient(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    h = 1e-5
    for i in range(100):
        num_classes = 2 + i % 2
        p = random_params(int(rng.integers(1, 11)), num_classes, 600 + i)
        batch = (rng.uniform(-1, 1, (20, 2)), rng.integers(0, num_classes, 20))
        g = trainer.grad(p, batch)
        flat = p.flat()
        fd = np.empty_like(flat)
        for k in range(flat.size):
            e = np.zeros_like(flat)
            e[k] = h
            fd[k] = (trainer.cost(p.with_values(flat + e), batch)
                     - trainer.cost(p.with_values(flat - e), batch)) / (2 * h)
        worst = max(worst, np.max(np.abs(g - fd)) / max(np.max(np.abs(fd)), 1e-12))
    ok = worst <= 1e-5
    report(6, ok, f"max relative error {worst:.2e} over 100 instances (<= 1e-5)")
    assert ok


def test_criterion_7_measurements(bundle, report):
    rows = {r["problem"]: r for r in json.loads((bundle[0] / "summary.json").read_text())["rows"]}
    got = {p: (rows[p]["exact_measurements"], rows[p]["sampler_measurements"]) for p in PROBLEMS}
    want = {"circle": 20_000, "sine": 20_000, "two-circles": 30_000}
    ok = all(got[p] == (want[p], want[p]) for p in PROBLEMS)
    report(7, ok, ", ".join(f"{p} {got[p][0]}/{got[p][1]}" for p in PROBLEMS)
           + " (want 20000, 20000, 30000)")
    assert ok


def test_criterion_8_label_geometry(report):
    two, three = label_states(2), label_states(3)
    f2 = qmath.overlap_fidelity(two[0], two[1])
    f3 = [qmath.overlap_fidelity(three[i], three[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    total = np.abs(three.bloch.sum(axis=0)).max()
    ok = (abs(f2) <= 1e-12 and all(abs(f - 0.25) <= 1e-9 for f in f3) and total <= 1e-12)
    report(8, ok, f"binary fidelity {f2:.1e}; trinary fidelities "
                  f"{', '.join(f'{f:.12f}' for f in f3)}; |sum of Bloch vectors| {total:.1e}")
    assert ok


def test_criterion_9_determinism(bundle, report):
    a, b = bundle
    cmp = filecmp.dircmp(a, b)
    diffs = []

    def walk(c, prefix=""):
        names = c.left_list
        _, mismatch, errors = filecmp.cmpfiles(c.left, c.right, [n for n in names
                                                                 if n not in c.subdirs],
                                               shallow=False)
        diffs.extend(prefix + n for n in mismatch + errors + c.left_only + c.right_only)
        for name, sub in c.subdirs.items():
            walk(sub, prefix + name + "/")

    walk(cmp)
    n_files = sum(1 for p in a.rglob("*") if p.is_file())
    ok = not diffs and n_files > 0
    report(9, ok, f"{n_files} files compared, {len(diffs)} differ {diffs[:5]}")
    assert ok
