import numpy as np

from fokas_heat._accel import USING_NUMBA, phase_sum, phase_sum_numpy


def test_phase_sum_backends_agree():
    rng = np.random.default_rng(5)
    x = rng.uniform(-2, 2, 137)
    k = rng.uniform(-30, 30, 411) + 1j * rng.uniform(-1, 1, 411)
    c = rng.standard_normal(411) + 1j * rng.standard_normal(411)
    a = phase_sum(x, k, c)
    b = phase_sum_numpy(x, k, c)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_phase_sum_is_deterministic():
    rng = np.random.default_rng(6)
    x = rng.uniform(-1, 1, 64)
    k = rng.uniform(-5, 5, 200) + 0.3j
    c = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    a = phase_sum(x, k, c)
    b = phase_sum(x, k, c)
    assert np.array_equal(a, b)


def test_backend_flag_exposed():
    assert isinstance(USING_NUMBA, bool)
