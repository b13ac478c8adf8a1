import random
from fractions import Fraction as F
from math import log, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jetmorse import DomainError
from jetmorse.gg_tower import (
    EpsilonSchedule,
    FiberSample,
    VBundleCurvature,
    bound_5_11,
    certify_bigness,
    eta_forms,
    fiber_sampler,
    fiber_volume,
    gg_morse_mc,
    harmonic,
    k1_calibration,
    polar_decompose,
    reconstruct_jet,
    rhs_coefficient,
    sphere_average,
    taut_curvature,
    taut_norm,
    taut_norm_power,
)
from jetmorse.jet_algebra import JetPoint, scale_jet
from jetmorse.morse_engine import ModelManifold, MorseSpectrum, morse_integrals, parse_field


# -- schedule and metric ---------------------------------------------------------


def test_schedule_defaults_and_validation():
    s = EpsilonSchedule.default(3)
    assert s.eps == (1, F(1, 9), F(1, 81)) and s.p == 6 and s.k == 3
    assert EpsilonSchedule.default(5).p == 60
    for bad in [(), (F(1, 2),), (1, 1), (1, F(1, 2), F(3, 4)), (1, 0)]:
        with pytest.raises(DomainError):
            EpsilonSchedule(bad)


def test_taut_norm_examples():
    jet = JetPoint((0,), ((F(3), F(4)),))
    assert taut_norm(jet, EpsilonSchedule((1,))) == pytest.approx(25.0)
    e2 = F(1, 7)
    sched = EpsilonSchedule((1, e2))
    jet2 = JetPoint((0,), ((F(1), F(2)), (F(3), F(-1))))
    want = (1 * 5**2 + float(e2) * 10) ** 0.5
    assert taut_norm(jet2, sched) == pytest.approx(want, rel=1e-14)
    assert taut_norm(JetPoint((0,), ((0, 0), (0, 0))), sched) == 0.0
    assert taut_norm(jet, EpsilonSchedule((1,)), phi=log(2)) == pytest.approx(50.0)
    with pytest.raises(DomainError):
        taut_norm(jet, sched)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_metric_descends_exactly(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 4)
    r = rng.randint(1, 3)
    sched = EpsilonSchedule.default(k)
    jet = JetPoint((0,) * r, tuple(tuple(F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(r)) for _ in range(k)))
    lam = F(rng.choice([-3, -2, -1, 1, 2, 5]), rng.randint(1, 4))
    # p-th power of the norm scales by |lam|^(2p)
    assert taut_norm_power(scale_jet(lam, jet), sched) == lam ** (2 * sched.p) * taut_norm_power(jet, sched)
    if any(any(x for x in xi) for xi in jet.xis):
        assert taut_norm(scale_jet(lam, jet), sched) == pytest.approx(float(lam) ** 2 * taut_norm(jet, sched), rel=1e-12)


# -- polar coordinates ---------------------------------------------------------


def test_polar_examples():
    s = polar_decompose(JetPoint((0,), ((3, 4),)), EpsilonSchedule((1,)))
    # radial coordinate is eps |xi|^(2p/s): 5^2
    assert s.xs == (25.0,)
    assert np.allclose(s.us[0], (0.6, 0.8), rtol=0, atol=1e-15)
    z = polar_decompose(JetPoint((0,), ((1, 0), (0, 0))), EpsilonSchedule.default(2))
    assert z.xs[1] == 0.0 and z.flags == (False, True)
    assert np.linalg.norm(z.us[1]) == pytest.approx(1.0)


def test_polar_round_trip():
    rng = np.random.default_rng(4)
    for k in range(1, 6):
        sched = EpsilonSchedule.default(k)
        for _ in range(20):
            r = int(rng.integers(1, 4))
            xi = rng.normal(size=(k, r)) + 1j * rng.normal(size=(k, r))
            xi /= max(1.0, np.abs(xi).max())
            jet = JetPoint((), tuple(tuple(row) for row in xi))
            back = reconstruct_jet(polar_decompose(jet, sched), sched)
            assert np.max(np.abs(np.array(back.xis) - xi)) < 1e-12


def test_polar_sum_is_norm_power():
    rng = np.random.default_rng(1)
    sched = EpsilonSchedule.default(3)
    xi = rng.normal(size=(3, 2))
    jet = JetPoint((), tuple(tuple(row) for row in xi))
    s = polar_decompose(jet, sched)
    assert sum(s.xs) == pytest.approx(taut_norm(jet, sched) ** sched.p, rel=1e-12)


def test_fiber_sample_requires_unit_vectors():
    with pytest.raises(DomainError):
        FiberSample((1.0,), ((0.5, 0.5),), (False,))


# -- curvature -----------------------------------------------------------------


def _c11(value, n=1, r=1):
    return VBundleCurvature.constant(np.full((n, n, r, r), value, dtype=complex))


def test_taut_curvature_examples():
    z = ModelManifold("P1", 2).grid().points[0]
    one = FiberSample((1.0,), ((1.0,),), (False,))
    out = taut_curvature(z, one, _c11(-1.0))
    assert out.horizontal.entries[0, 0] == pytest.approx(1 / (2 * pi))
    assert out.vertical == "positive"
    assert np.all(taut_curvature(z, one, VBundleCurvature.zero(1, 1)).horizontal.entries == 0)
    s = FiberSample((0.3, 0.7), ((1.0,), (1.0,)), (False, False))
    s2 = FiberSample((0.6, 1.4), ((1.0,), (1.0,)), (False, False))
    h = taut_curvature(z, s, _c11(-2.0)).horizontal.entries
    h2 = taut_curvature(z, s2, _c11(-2.0)).horizontal.entries
    assert np.allclose(h2, 2 * h, rtol=1e-15, atol=0)


def test_vbundle_symmetry_check():
    bad = np.zeros((2, 2, 1, 1), dtype=complex)
    bad[0, 1, 0, 0] = 1.0
    with pytest.raises(DomainError):
        VBundleCurvature.constant(bad).at(np.zeros((1, 2, 2)))
    with pytest.raises(DomainError):
        VBundleCurvature.from_forms(ModelManifold("P2", 2), {"w1": 1.0})


@pytest.mark.parametrize("model,forms,theta", [
    ("P1", {"w": [[-2, 0], [0, 1]]}, "3*w+y"),
    ("P1xP1", {"w1": [[1, 1j], [-1j, 2]], "y2": [[0.5, 0], [0, -1]]}, "2*w1-w2"),
    ("P2", {"w": -1.5}, "w"),
])
def test_eta_forms_consistency(model, forms, theta):
    field = parse_field(model, theta, 6)
    vb = VBundleCurvature.from_forms(field.model, forms)
    eta = eta_forms(vb, field)
    pts = field.model.grid().points
    diff = eta.eta.sample(pts) + eta.eta_star.sample(pts) - 2 * field.sample(pts)
    assert np.max(np.abs(diff)) <= 1e-12


def test_eta_of_negative_line_bundle():
    field = parse_field("P1", "0*w", 8)
    vb = VBundleCurvature.from_forms(field.model, {"w": -2.0})
    spec = morse_integrals(eta_forms(vb, field).eta)
    assert spec.integrals == pytest.approx((2.0, 0.0))


# -- sphere and fiber Monte-Carlo ----------------------------------------------------


def test_sphere_average_examples():
    for r in (1, 2, 4):
        est, _ = sphere_average(np.eye(r), 100, seed=3)
        assert est == 1.0
    est, err = sphere_average(np.diag([1.0, 0.0]), 10_000, seed=0)
    assert abs(est - 0.5) < 3 * err and err < 0.01
    with pytest.raises(DomainError):
        sphere_average(np.eye(2), 0)


def test_sphere_average_is_seeded():
    A = np.array([[1, 2 + 1j], [2 - 1j, -3]])
    assert sphere_average(A, 500, 7) == sphere_average(A, 500, 7)
    assert sphere_average(A, 500, 7) != sphere_average(A, 500, 8)


def test_fiber_volume_and_weights():
    assert fiber_volume(3, 2) == F(1, 36)
    for k, r in [(1, 3), (2, 1), (3, 2)]:
        b = fiber_sampler(k, r, size=2000, seed=5)
        assert np.all(b.weights >= 0)
        assert np.sum(b.weights) == pytest.approx(float(fiber_volume(k, r)), rel=1e-12)
        assert np.allclose(b.xs.sum(axis=1), 1.0)
        assert np.allclose(np.linalg.norm(b.us, axis=2), 1.0)


def test_fiber_k1_reduces_to_sphere():
    A = np.array([[2.0, 1j], [-1j, -1.0]])
    b = fiber_sampler(1, 2, size=20_000, seed=2)
    vals = np.einsum("na,ab,nb->n", np.conj(b.us[:, 0]), A, b.us[:, 0]).real
    est, err = sphere_average(A, 20_000, 9)
    assert np.allclose(b.xs, 1.0, rtol=0, atol=1e-14)
    assert abs(np.mean(vals) - 0.5) < 4 * np.std(vals) / np.sqrt(len(vals))
    assert abs(est - 0.5) < 4 * err


def test_fiber_effective_sample_size():
    b = fiber_sampler(2, 1, size=10_000, seed=0)
    assert b.effective_sample_size() >= 1000
    skew = fiber_sampler(2, 1, size=10_000, seed=0, shape=(0.7, 1.6))
    assert np.all(skew.weights >= 0)
    assert skew.effective_sample_size() >= 1000
    assert np.sum(skew.weights) == pytest.approx(0.5, rel=0.05)


def test_fiber_moment_two_seed_consistency():
    k, r = 3, 2
    means, errs = [], []
    for seed in (0, 1):
        b = fiber_sampler(k, r, size=20_000, seed=seed)
        v = (b.xs / np.arange(1, k + 1)).sum(axis=1)
        means.append(v.mean())
        errs.append(v.std(ddof=1) / np.sqrt(len(v)))
    assert means[0] > 0
    assert abs(means[0] - means[1]) < 3 * np.hypot(*errs)
    # Dirichlet(r,..,r) mean of x_s is 1/k, so the expectation is H_k / k
    assert means[0] == pytest.approx(float(harmonic(k)) / k, rel=0.02)


def test_k1_calibration_is_one():
    for r in (1, 2, 3):
        assert k1_calibration(r, 1000) == pytest.approx(1.0, rel=1e-12)


# -- tower Morse integrals ---------------------------------------------------------------


def test_gg_positive_base_only_index_zero():
    field = parse_field("P1xP1", "w1+2*w2", 4)
    vb = VBundleCurvature.zero(2, 1)
    e0 = gg_morse_mc(2, 0, vb, field, N=20_000, seed=1)
    assert e0.value > 0
    for q in (1, 2, 3):
        e = gg_morse_mc(2, q, vb, field, N=20_000, seed=1)
        assert abs(e.value) <= 3 * e.stderr + 1e-15


def test_gg_constant_line_bundle_closed_form():
    # theta = (H_k/k) d w constant: integral C(k, 1) (H_k/k) d / k!; with N a
    # multiple of the cell count every cell gets the same number of samples
    field = parse_field("P1", "3*w", 8)
    for k in (2, 3):
        e = gg_morse_mc(k, 0, VBundleCurvature.zero(1, 1), field, N=64 * 160, seed=0)
        want = k * float(harmonic(k)) / k * 3 / float(np.prod(range(1, k + 1)))
        assert e.value == pytest.approx(want, rel=1e-10)


def test_gg_rejects_out_of_range_q():
    field = parse_field("P1", "w", 4)
    with pytest.raises(DomainError):
        gg_morse_mc(2, 3, VBundleCurvature.zero(1, 1), field, N=100)
    with pytest.raises(DomainError):
        gg_morse_mc(2, -1, VBundleCurvature.zero(1, 1), field, N=100)


@pytest.mark.parametrize("n_model,r,k", [("P1", 1, 2), ("P1", 2, 2), ("P1xP1", 1, 2), ("P1xP1", 2, 2)])
def test_gg_vanishing_above_base_dimension(n_model, r, k):
    theta = "w+y" if n_model == "P1" else "w1-w2+y1"
    field = parse_field(n_model, theta, 6)
    forms = {"w": -np.eye(r) + 0.5 * np.diag(np.arange(r))}
    vb = VBundleCurvature.from_forms(field.model, forms)
    n = field.model.n
    for q in range(n + 1, n + k * r):
        e = gg_morse_mc(k, q, vb, field, N=5_000, seed=3)
        assert e.value == 0.0 and e.stderr == 0.0


def test_gg_deterministic_across_threads_and_shards():
    field = parse_field("P1xP1", "w1-w2+y1", 6)
    vb = VBundleCurvature.from_forms(field.model, {"w": [[-1, 0.5], [0.5, 0.3]]})
    ref = gg_morse_mc(2, 1, vb, field, N=30_000, seed=11, shards=4, workers=1, chunk=4096)
    for w in (2, 8):
        got = gg_morse_mc(2, 1, vb, field, N=30_000, seed=11, shards=4, workers=w, chunk=4096)
        assert (got.value, got.stderr) == (ref.value, ref.stderr)
    other = gg_morse_mc(2, 1, vb, field, N=30_000, seed=12, shards=4)
    assert abs(other.value - ref.value) < 4 * np.hypot(other.stderr, ref.stderr)


def test_gg_index_estimates_sum_to_signed_total():
    field = parse_field("P1", "w", 8)
    vb = VBundleCurvature.from_forms(field.model, {"w": [[-2, 0], [0, 1]]})
    e0 = gg_morse_mc(3, 0, vb, field, N=40_000, seed=2)
    e1 = gg_morse_mc(3, 1, vb, field, N=40_000, seed=2)
    assert e0.value > 0 and e1.value > 0
    # same samples: the difference is the unpartitioned integral, which only
    # sees the trace of the curvature on average
    tr = gg_morse_mc(3, 0, vb, field, N=40_000, seed=2, trace_model=True)
    assert abs((e0.value - e1.value) - tr.value) < 4 * np.hypot(e0.stderr, e1.stderr) + 0.02 * tr.value


@pytest.mark.slow
def test_trace_model_gap_shrinks_with_k():
    field = parse_field("P1", "0*w", 16)
    vb = VBundleCurvature.from_forms(field.model, {"w": [[-2, 0], [0, 1]]})
    gaps, errs = [], []
    for k in (2, 3, 4, 5):
        full = gg_morse_mc(k, 0, vb, field, N=100_000, seed=0)
        trace = gg_morse_mc(k, 0, vb, field, N=100_000, seed=0, trace_model=True)
        gaps.append(abs(full.value - trace.value) / trace.value)
        errs.append(full.stderr / trace.value)
    for a, b, ea, eb in zip(gaps, gaps[1:], errs, errs[1:]):
        assert b < a + 2 * np.hypot(ea, eb)
    assert gaps[-1] < gaps[0]


# -- right sides and certificates -------------------------------------------------------


def test_rhs_examples():
    assert rhs_coefficient(2, 1, 1, [3.0, 0.0], 0) == pytest.approx(log(2) / 2 * 3)
    assert rhs_coefficient(3, 1, 1, [1.5, 0.0], 0) == pytest.approx(log(3) / 6 * 1.5)
    assert rhs_coefficient(3, 1, 1, [1.5, 0.0], 1) == 0.0
    assert rhs_coefficient(3, 1, 1, [1.5, 0.0], 2) == 0.0


def test_bound_examples():
    b = bound_5_11("jet_differentials", 0, 5, 2, 1.0, [2.0, 0.0])
    assert b.lower == b.upper > 0
    star = morse_integrals(parse_field("P1xP1", "w1+w2", 4))
    for q in (1, 2):
        assert bound_5_11("duals", q, 5, 3, 1.0, star).upper == 0.0
    # n=2, k=2, r=1, m=6: 6^3/3! (log 2)^2 / (2! 2!)
    got = bound_5_11("jet_differentials", 1, 6, 2, 1.0, [0.0, 1.0, 0.0], r=1)
    assert got.upper == pytest.approx(36 * log(2) ** 2 / 4, rel=1e-14)
    with pytest.raises(DomainError):
        bound_5_11("other", 0, 1, 2, 1.0, [1.0])


def test_certify_examples():
    for a, b in [(1, 1), (2, 3)]:
        pos = certify_bigness(morse_integrals(parse_field("P1xP1", f"{a}*w1+{b}*w2", 4)))
        assert pos.positive and pos.margin == pytest.approx(2 * a * b) and pos.kahler_current_mode
        neg = certify_bigness(morse_integrals(parse_field("P1xP1", f"{a}*w1-{b}*w2", 4)))
        assert not neg.positive and neg.margin == pytest.approx(-2 * a * b) and not neg.kahler_current_mode
    zero = certify_bigness(MorseSpectrum.from_integrals([0.0, 0.0, 0.0]))
    assert not zero.positive and zero.margin == 0.0
