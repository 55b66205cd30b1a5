import numpy as np
import pytest

from ctrnnlab.errors import TrainingError
from ctrnnlab.optim import AdamState, adam_step, lr_schedule, power_iteration, spectral_norm_sq


class TestLrSchedule:
    def test_initial_value(self):
        assert lr_schedule(0, 0.004, 1500.0) == 0.004

    def test_halves_at_half_life(self):
        np.testing.assert_allclose(lr_schedule(2500, 0.001, 2500.0), 0.0005, rtol=1e-15)

    def test_quarters_at_two_half_lives(self):
        np.testing.assert_allclose(lr_schedule(5000, 0.001, 2500.0), 0.00025, rtol=1e-15)

    def test_strictly_decreasing_and_positive(self):
        lrs = [lr_schedule(k, 0.07, 1386.0) for k in range(0, 60_000, 500)]
        assert all(lr > 0 for lr in lrs)
        assert all(a > b for a, b in zip(lrs, lrs[1:]))


class TestAdam:
    def test_zero_gradient_is_noop(self):
        params = {"w": np.array([1.0, -2.0])}
        state = AdamState.zeros_like(params)
        adam_step(params, state, {"w": np.zeros(2)}, lr=0.1)
        np.testing.assert_array_equal(params["w"], [1.0, -2.0])
        assert state.t == 1

    def test_single_step_matches_straight_line_arithmetic(self):
        # Scalar case, g = 1, lr = 0.1, defaults: m1 = 0.1, v1 = 0.001, both
        # bias corrections cancel exactly at t = 1, so the update is
        # lr * 1 / (1 + eps).
        beta1, beta2, eps = 0.9, 0.999, 1e-7
        m1 = (1 - beta1) * 1.0
        v1 = (1 - beta2) * 1.0
        expected = -0.1 * (m1 / (1 - beta1)) / (np.sqrt(v1 / (1 - beta2)) + eps)
        params = {"w": np.array([0.0])}
        state = AdamState.zeros_like(params)
        adam_step(params, state, {"w": np.array([1.0])}, lr=0.1, beta1=beta1, beta2=beta2, epsilon=eps)
        np.testing.assert_allclose(params["w"][0], expected, atol=1e-12)
        np.testing.assert_allclose(params["w"][0], -0.1 / (1 + 1e-7), atol=1e-12)

    def test_two_steps_match_straight_line_arithmetic(self):
        beta1, beta2, eps, lr = 0.9, 0.999, 1e-7, 0.1
        # Hand-rolled two-step trace with g = 1 at both steps.
        m, v, theta = 0.0, 0.0, 0.0
        for t in (1, 2):
            m = beta1 * m + (1 - beta1) * 1.0
            v = beta2 * v + (1 - beta2) * 1.0
            theta -= lr * (m / (1 - beta1**t)) / (np.sqrt(v / (1 - beta2**t)) + eps)

        params = {"w": np.array([0.0])}
        state = AdamState.zeros_like(params)
        for _ in range(2):
            adam_step(params, state, {"w": np.array([1.0])}, lr=lr, beta1=beta1, beta2=beta2, epsilon=eps)
        np.testing.assert_allclose(params["w"][0], theta, atol=1e-12)

    def test_first_update_invariant_to_gradient_scale_at_zero_eps(self):
        # With eps = 0 the first bias-corrected update is lr * sign(g).
        for scale in (1e-6, 1.0, 1e6):
            params = {"w": np.array([0.0, 0.0])}
            state = AdamState.zeros_like(params)
            g = scale * np.array([0.5, -3.0])
            adam_step(params, state, {"w": g}, lr=0.2, epsilon=0.0)
            np.testing.assert_allclose(params["w"], [-0.2, 0.2], rtol=1e-12)

    def test_nonfinite_gradient_names_tensor(self):
        params = {"ok": np.zeros(1), "bad": np.zeros(1)}
        state = AdamState.zeros_like(params)
        with pytest.raises(TrainingError, match="bad"):
            adam_step(params, state, {"ok": np.zeros(1), "bad": np.array([np.nan])}, lr=0.1)


class TestSpectralNorm:
    def test_identity(self):
        np.testing.assert_allclose(spectral_norm_sq(np.eye(5)), 1.0, rtol=1e-10)

    def test_diagonal(self):
        np.testing.assert_allclose(spectral_norm_sq(np.diag([3.0, 1.0, 0.5])), 9.0, rtol=1e-10)

    def test_zero_matrix(self):
        assert spectral_norm_sq(np.zeros((4, 4))) == 0.0

    def test_matches_dense_svd(self):
        w = np.random.Generator(np.random.Philox(key=42)).standard_normal((10, 10))
        oracle = np.linalg.svd(w, compute_uv=False)[0] ** 2
        np.testing.assert_allclose(spectral_norm_sq(w), oracle, rtol=1e-6)

    def test_gradient_matches_finite_differences(self):
        gen = np.random.Generator(np.random.Philox(key=43))
        w = gen.standard_normal((6, 6))
        sn = power_iteration(w, iters=400)
        grad = sn.grad_sq()
        h = 1e-6
        for idx in [(0, 0), (2, 3), (5, 1)]:
            wp, wm = w.copy(), w.copy()
            wp[idx] += h
            wm[idx] -= h
            fd = (np.linalg.svd(wp, compute_uv=False)[0] ** 2 - np.linalg.svd(wm, compute_uv=False)[0] ** 2) / (2 * h)
            np.testing.assert_allclose(grad[idx], fd, rtol=1e-5)

    def test_warm_start_converges_faster(self):
        gen = np.random.Generator(np.random.Philox(key=44))
        w = gen.standard_normal((30, 30))
        exact = np.linalg.svd(w, compute_uv=False)[0] ** 2
        v = power_iteration(w, iters=200).v
        warm = power_iteration(w, iters=2, v0=v).value_sq
        np.testing.assert_allclose(warm, exact, rtol=1e-9)
