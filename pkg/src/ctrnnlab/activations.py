"""Rectifying activation functions.

Two activations are supported: ReLU and its smooth approximation

    softplus(x) = ln(1 + exp(alpha * x)) / alpha,

where ``alpha`` controls the sharpness of the kink; softplus converges to
ReLU pointwise as alpha grows.  Both are evaluated elementwise and must be
safe for large arguments (naive exp overflows for alpha*x > ~709).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RELU = "relu"
SOFTPLUS = "softplus"


@dataclass(frozen=True)
class ActivationSpec:
    kind: str = SOFTPLUS
    alpha: float = 10.0

    def __post_init__(self):
        if self.kind not in (RELU, SOFTPLUS):
            raise ValueError(f"unknown activation kind: {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


def activation_apply(act: ActivationSpec, x: np.ndarray) -> np.ndarray:
    """Apply the activation elementwise.

    The softplus branch uses max(x, 0) + log1p(exp(-|alpha*x|))/alpha, which
    is algebraically the large-argument rewrite x + log1p(exp(-alpha*x))/alpha
    on the positive side and the direct form on the negative side, so no
    intermediate can overflow.
    """
    x = np.asarray(x, dtype=np.float64)
    if act.kind == RELU:
        return np.maximum(x, 0.0)
    z = act.alpha * x
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(z))) / act.alpha


def activation_deriv(act: ActivationSpec, x: np.ndarray) -> np.ndarray:
    """Elementwise derivative; the ReLU subgradient at exactly 0 is taken as 0."""
    x = np.asarray(x, dtype=np.float64)
    if act.kind == RELU:
        return (x > 0.0).astype(np.float64)
    # logistic(alpha*x), evaluated from the negative side for stability
    z = -np.abs(act.alpha * x)
    ez = np.exp(z)
    sig = ez / (1.0 + ez)
    return np.where(x > 0, 1.0 - sig, sig)
