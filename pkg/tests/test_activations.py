import numpy as np
import pytest

from ctrnnlab.activations import ActivationSpec, activation_apply, activation_deriv


class TestRelu:
    def test_rectifies(self):
        act = ActivationSpec(kind="relu")
        np.testing.assert_array_equal(activation_apply(act, np.array([-1.0, 0.0, 2.0])), [0.0, 0.0, 2.0])

    def test_subgradient_at_zero_is_zero(self):
        act = ActivationSpec(kind="relu")
        assert activation_deriv(act, np.array([0.0]))[0] == 0.0


class TestSoftplus:
    def test_value_at_zero(self):
        act = ActivationSpec(kind="softplus", alpha=10.0)
        np.testing.assert_allclose(activation_apply(act, np.array([0.0])), np.log(2.0) / 10.0, rtol=1e-14)

    def test_large_argument_is_identity(self):
        act = ActivationSpec(kind="softplus", alpha=10.0)
        np.testing.assert_allclose(activation_apply(act, np.array([100.0])), 100.0, atol=1e-12)

    def test_no_overflow_for_huge_arguments(self):
        act = ActivationSpec(kind="softplus", alpha=10.0)
        x = np.array([-1e6, -100.0, 0.0, 100.0, 1e6])
        with np.errstate(over="raise"):
            y = activation_apply(act, x)
        assert np.isfinite(y).all()
        assert y[0] == 0.0 and y[-1] == 1e6

    def test_approaches_relu_for_sharp_alpha(self):
        sharp = ActivationSpec(kind="softplus", alpha=1e4)
        relu = ActivationSpec(kind="relu")
        x = np.linspace(-10.0, 10.0, 2001)
        assert np.max(np.abs(activation_apply(sharp, x) - activation_apply(relu, x))) < 1e-3

    def test_derivative_matches_finite_differences(self):
        act = ActivationSpec(kind="softplus", alpha=10.0)
        x = np.linspace(-3.0, 3.0, 301)
        h = 1e-6
        fd = (activation_apply(act, x + h) - activation_apply(act, x - h)) / (2 * h)
        np.testing.assert_allclose(activation_deriv(act, x), fd, atol=1e-7)

    def test_derivative_stable_at_extremes(self):
        act = ActivationSpec(kind="softplus", alpha=10.0)
        d = activation_deriv(act, np.array([-1e8, 1e8]))
        np.testing.assert_allclose(d, [0.0, 1.0], atol=1e-300)


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        ActivationSpec(kind="tanh")
    with pytest.raises(ValueError):
        ActivationSpec(kind="softplus", alpha=0.0)
