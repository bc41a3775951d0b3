"""Invariant checks over randomized inputs."""
import random
from fractions import Fraction

import mpmath as mp
from hypothesis import given, settings, strategies as st

from momprob import (
    JacobiMatrix,
    Measure,
    PrecisionConfig,
    classify,
    ClassifyPolicy,
    gauss_damp,
    jacobi_to_moments,
    moments_to_jacobi,
    pi_eval,
    power_reweight,
    truncation_spectrum,
    weyl_radius,
)

CFG = PrecisionConfig.bigfloat(192)

finite_q = st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=10)


def jacobi_from_seed(seed, n=10):
    rng = random.Random(seed)
    with mp.workprec(192):
        q = [mp.mpf(rng.uniform(-2, 2)) for _ in range(n)]
        b = [mp.mpf(rng.uniform(0.1, 3)) for _ in range(n - 1)]
    return JacobiMatrix(q=q, b=b, precision=CFG)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 9))
def test_radius_monotone_in_depth(seed, n):
    J = jacobi_from_seed(seed)
    r_prev = None
    for k in range(1, n + 1):
        r = weyl_radius(J, 1j, k)
        assert r > 0
        if r_prev is not None:
            assert r <= r_prev
        r_prev = r


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000),
       st.floats(-3, 3, allow_nan=False),
       st.floats(0.1, 3, allow_nan=False))
def test_conjugation_symmetry(seed, re, im):
    J = jacobi_from_seed(seed)
    z = mp.mpc(re, im)
    up = pi_eval(J, z, 10)
    down = pi_eval(J, mp.conj(z), 10)
    with mp.workprec(192):
        for a, b in zip(up, down):
            assert abs(mp.conj(a) - b) <= mp.mpf(2) ** -150 * max(1, abs(a))


def test_conjugation_symmetry_hundred_pairs():
    rng = random.Random(123)
    for trial in range(100):
        J = jacobi_from_seed(rng.randrange(10 ** 6), n=8)
        z = mp.mpc(rng.uniform(-3, 3), rng.uniform(0.1, 3) * rng.choice([1, -1]))
        up = pi_eval(J, z, 8)
        down = pi_eval(J, mp.conj(z), 8)
        with mp.workprec(192):
            for a, b in zip(up, down):
                assert abs(mp.conj(a) - b) <= mp.mpf(2) ** -150 * max(1, abs(a))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_moment_roundtrip(seed):
    J = jacobi_from_seed(seed, n=6)
    s = jacobi_to_moments(J, 11)
    J2 = moments_to_jacobi(s, 6)
    with mp.workprec(192):
        for a, b in zip(list(J._q) + list(J._b), list(J2._q) + list(J2._b)):
            assert abs(a - b) <= mp.mpf(10) ** -30 * max(1, abs(a))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8))
def test_quadrature_exactness(seed, N):
    J = jacobi_from_seed(seed, n=N)
    mu = truncation_spectrum(J, N)
    atom_moms = mu.moments(2 * N - 1)
    s = jacobi_to_moments(J, 2 * N - 1)
    with mp.workprec(192):
        for a, b in zip(atom_moms, s.values):
            assert abs(a - b) <= mp.mpf(10) ** -30 * max(1, abs(b))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5), min_size=2, max_size=8,
                unique=True),
       st.integers(1, 3))
def test_power_lift_inverse_exact(points, n):
    pts = sorted(points)
    wts = [Fraction(1, len(pts))] * len(pts)
    mu = Measure.atomic(pts, wts, precision=PrecisionConfig.rational())
    down, Cd = power_reweight(mu, -n)
    up, Cu = power_reweight(down, n)
    assert up.effective_atoms() == mu.effective_atoms()
    assert Cd * Cu == 1


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_damping_composition(a1, a2):
    mu = Measure.atomic([-1, 0, 2], [1, 2, 1], precision=CFG)
    two_steps = gauss_damp(gauss_damp(mu, a1), a2)
    one_step = gauss_damp(mu, mp.mpf(a1) + mp.mpf(a2))
    p1, w1 = two_steps.effective_atoms()
    p2, w2 = one_step.effective_atoms()
    with mp.workprec(192):
        for x, y in zip(w1, w2):
            assert abs(x - y) <= mp.mpf(2) ** -150


def test_normalize_idempotent_float():
    mu = Measure.atomic([0.0, 1.0, 2.5], [0.2, 0.3, 0.1], precision=CFG)
    nu, C1 = mu.normalize()
    nu2, C2 = nu.normalize()
    with mp.workprec(192):
        assert abs(C2 - 1) < mp.mpf(2) ** -150
        for a, b in zip(nu.effective_atoms()[1], nu2.effective_atoms()[1]):
            assert abs(a - b) < mp.mpf(2) ** -150


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_verdict_traces_positive_nonincreasing(seed):
    J = jacobi_from_seed(seed, n=10)
    v = classify(J, ClassifyPolicy(n_max=10, start=2, eps_zero=1e-40))
    assert all(r > 0 for r in v.radii)
    assert all(x >= y for x, y in zip(v.radii, v.radii[1:]))
