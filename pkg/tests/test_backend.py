import math

import numpy as np
import pytest

from uqc import qmath
from uqc.backend import (
    BasisError,
    Counts,
    ExactBackend,
    NoiseModel,
    SamplerBackend,
    classify_from_counts,
    default_noise,
    estimate_bloch,
    infer_dataset,
    run_program,
)
from uqc.model import UqcParams, classify_exact, forward_state, label_states, random_params
from uqc.transpiler import CZ, RX, RY, NativeProgram, UnsupportedGateError, compile_point, \
    compile_unitary

ZERO_PROG = NativeProgram((RX(0.0), RY(0.0), RX(0.0)), "Z", 100)


def test_exact_zero_program():
    c = run_program(ZERO_PROG, ExactBackend())
    assert (c.n0, c.n1, c.prob0) == (100, 0, 1.0)


def test_exact_counts_round_probability():
    prog = compile_unitary(qmath.ry(2 * math.acos(math.sqrt(0.337))), "Z", 1000)
    c = run_program(prog, ExactBackend())
    assert c.prob0 == pytest.approx(0.337, abs=1e-12)
    assert (c.n0, c.n1) == (337, 663)


def test_fully_depolarized_is_fair_coin():
    prog = NativeProgram(ZERO_PROG.gates, "Z", 100_000)
    c = run_program(prog, SamplerBackend(3, NoiseModel(depolarizing_p=1.0)))
    assert c.total == 100_000
    assert c.n0 / c.total == pytest.approx(0.5, abs=0.01)


def test_measured_p0_formula():
    nm = NoiseModel(0.2, 0.05, 0.1)
    z = 0.6
    p0 = 0.5 * (1 + 0.8 * z)
    assert nm.measured_p0(z) == pytest.approx(p0 * 0.95 + (1 - p0) * 0.1, abs=1e-15)
    assert NoiseModel().measured_p0(-1.0) == 0.0


def test_readout_flips_only():
    prog = NativeProgram(ZERO_PROG.gates, "Z", 200_000)
    c = run_program(prog, SamplerBackend(1, NoiseModel(0.0, 0.1, 0.0)))
    assert c.n1 / c.total == pytest.approx(0.1, abs=0.005)


def test_sampler_is_deterministic():
    prog = compile_point(random_params(6, 2, 1), [0.2, 0.3], shots=500)
    be = SamplerBackend(42, default_noise())
    assert run_program(prog, be, 7) == run_program(prog, be, 7)
    draws = {run_program(prog, SamplerBackend(s), 7).n0 for s in range(20)}
    assert len(draws) > 1


def test_substreams_are_keyed_by_point_and_basis():
    be = SamplerBackend(5)
    a = be.rng(0, "Z").random(4)
    assert np.array_equal(a, be.rng(0, "Z").random(4))
    assert not np.array_equal(a, be.rng(1, "Z").random(4))
    assert not np.array_equal(a, be.rng(0, "X").random(4))


def test_noise_validation():
    with pytest.raises(ValueError):
        NoiseModel(depolarizing_p=1.5)
    with pytest.raises(ValueError):
        NoiseModel(readout_flip_0to1=-0.1)


def test_default_noise_is_packaged():
    nm = default_noise()
    assert 0 < nm.depolarizing_p < 1
    assert (nm.readout_flip_0to1, nm.readout_flip_1to0) == (0.01, 0.03)


@pytest.mark.parametrize("n0, n1, z", [(100, 0, 1.0), (0, 100, -1.0), (50, 50, 0.0), (3, 1, 0.5)])
def test_estimate_from_z_counts(n0, n1, z):
    np.testing.assert_array_equal(estimate_bloch(Counts("Z", n0, n1)), [0.0, 0.0, z])


def test_estimate_with_x_counts():
    r = estimate_bloch(Counts("Z", 50, 50), Counts("X", 75, 25))
    np.testing.assert_array_equal(r, [0.5, 0.0, 0.0])


def test_estimate_prefers_exact_probability():
    c = Counts("Z", 67, 33, prob0=0.6666)
    assert estimate_bloch(c)[2] == pytest.approx(0.3332)
    assert estimate_bloch(c, use_exact=False)[2] == pytest.approx(0.34)


def test_estimate_basis_mismatch():
    with pytest.raises(BasisError):
        estimate_bloch(Counts("X", 1, 1))
    with pytest.raises(BasisError):
        estimate_bloch(Counts("Z", 1, 1), Counts("Z", 1, 1))
    with pytest.raises(BasisError):
        Counts("Y", 1, 1)


def test_estimate_converges_at_binomial_rate(rng):
    shots = 100_000
    bound = 3 / math.sqrt(shots)
    for i in range(20):
        u = qmath.random_su2(rng)
        r = qmath.bloch_of(u[:, 0])
        be = SamplerBackend(i)
        zc = run_program(compile_unitary(u, "Z", shots), be, i)
        xc = run_program(compile_unitary(u, "X", shots), be, i)
        est = estimate_bloch(zc, xc)
        assert abs(est[2] - r[2]) <= bound
        assert abs(est[0] - r[0]) <= bound


def test_classify_binary_and_trinary_counts():
    assert classify_from_counts(Counts("Z", 100, 0), None, label_states(2)) == 0
    assert classify_from_counts(Counts("Z", 0, 100), None, label_states(2)) == 1
    # exact label direction (sin 120, 0, cos 120)
    x, z = math.sin(2 * math.pi / 3), math.cos(2 * math.pi / 3)
    zc = Counts("Z", 25, 75, prob0=0.5 * (1 + z))
    xc = Counts("X", 93, 7, prob0=0.5 * (1 + x))
    assert classify_from_counts(zc, xc, label_states(3)) == 1
    assert classify_from_counts(Counts("Z", 25, 75), Counts("X", 7, 93), label_states(3)) == 2


def test_trinary_requires_x_counts():
    with pytest.raises(BasisError):
        classify_from_counts(Counts("Z", 10, 0), None, label_states(3))


def test_exact_counts_agree_with_direct_classification(rng):
    for i in range(1000):
        num_classes = 2 + i % 2
        p = random_params(int(rng.integers(1, 11)), num_classes, i)
        x = rng.uniform(-1, 1, 2)
        cs = [run_program(compile_point(p, x, b), ExactBackend()) for b in ("Z", "X")]
        got = classify_from_counts(cs[0], cs[1] if num_classes == 3 else None,
                                   label_states(num_classes))
        assert got == classify_exact(p, x)


def test_noiseless_sampler_agrees_at_many_shots(rng):
    agree = 0
    cases = 1000
    for i in range(cases):
        num_classes = 2 + i % 2
        p = random_params(int(rng.integers(1, 11)), num_classes, 10_000 + i)
        x = rng.uniform(-1, 1, 2)
        be = SamplerBackend(i)
        zc = run_program(compile_point(p, x, "Z", 100_000), be, i)
        xc = run_program(compile_point(p, x, "X", 100_000), be, i) if num_classes == 3 else None
        agree += classify_from_counts(zc, xc, label_states(num_classes)) == classify_exact(p, x)
    assert agree / cases >= 0.99


def test_binary_label_follows_hemisphere(rng):
    labels = label_states(2)
    for u in qmath.random_su2(rng, 500):
        r = qmath.bloch_of(u[:, 0])
        c = run_program(compile_unitary(u, "Z", 100), ExactBackend())
        assert classify_from_counts(c, None, labels) == (0 if r[2] > 0 else 1)


def test_measurement_accounting():
    pts2 = np.random.default_rng(0).uniform(-1, 1, (200, 2))
    pts3 = np.random.default_rng(1).uniform(-1, 1, (150, 2))
    assert infer_dataset(random_params(6, 2, 0), pts2, shots=100).total_measurements == 20_000
    res = infer_dataset(random_params(10, 3, 0), pts3, backend=SamplerBackend(0), shots=100)
    assert res.total_measurements == 30_000
    assert all(c.total == 100 for cs in res.counts for c in cs)


def test_exact_inference_equals_direct_labels(small_sets):
    for tr, te in small_sets.values():
        p = random_params(4, tr.problem.num_classes, 2)
        np.testing.assert_array_equal(infer_dataset(p, te.points).labels,
                                      classify_exact(p, te.points))


def test_inference_is_order_independent(rng):
    p = random_params(6, 3, 4)
    pts = rng.uniform(-1, 1, (30, 2))
    be = SamplerBackend(9, default_noise())
    full = infer_dataset(p, pts, backend=be)
    # each point's substream depends only on its index, not on the others
    for i in (0, 13, 29):
        counts = [run_program(compile_point(p, pts[i], b), be, i) for b in ("Z", "X")]
        assert counts == full.counts[i]


def test_depolarizing_is_monotone(small_sets):
    tr, te = small_sets["circle"]
    from uqc.trainer import TrainConfig, train
    params, _ = train(tr, te, 6, tcfg=TrainConfig(epochs=3, batch_size=50))
    pts, y = te.points[:200], te.labels[:200]
    accs = []
    for p in (0.0, 0.1, 0.3, 1.0):
        noise = NoiseModel(depolarizing_p=p)
        accs.append(np.mean([np.mean(infer_dataset(params, pts, backend=SamplerBackend(s, noise))
                                     .labels == y) for s in range(10)]))
    assert all(a >= b - 0.005 for a, b in zip(accs, accs[1:]))
    # fully mixed: every point is a fair coin, so accuracy is the coin-flip baseline
    assert accs[-1] == pytest.approx(0.5, abs=0.05)


def test_cz_rejected_by_backends():
    prog = NativeProgram((CZ(),), "Z", 10)
    for be in (ExactBackend(), SamplerBackend(0)):
        with pytest.raises(UnsupportedGateError):
            run_program(prog, be)


def test_records_layout():
    p = UqcParams.zeros(2, 3)
    res = infer_dataset(p, [[0.1, 0.2]], shots=10)
    rec = res.records([[0.1, 0.2]], [0])[0]
    assert rec == {"point": [0.1, 0.2], "basis_counts": {"Z": [10, 0], "X": [5, 5]},
                   "bloch_estimate": rec["bloch_estimate"], "predicted_label": 0,
                   "true_label": 0}
