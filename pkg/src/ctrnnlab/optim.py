"""ADAM with exponential learning-rate decay, and the spectral-norm penalty.

The learning rate halves every ``half_life`` steps:

    lr(k) = lr0 * 2 ** (-k / half_life).

ADAM follows the standard bias-corrected form,

    m <- b1 m + (1 - b1) g        mhat = m / (1 - b1^t)
    v <- b2 v + (1 - b2) g^2      vhat = v / (1 - b2^t)
    theta <- theta - lr * mhat / (sqrt(vhat) + eps),

applied tensor-by-tensor over named parameter dictionaries so the same
implementation drives network training and the fixed-point searches.

The spectral penalty is the squared largest singular value of a square
matrix, estimated by power iteration on W^T W.  Its gradient through the
converged singular pair (u, v) is 2 * sigma * u v^T; at convergence this is
the exact gradient of sigma^2 (the inner maximization is stationary in u, v).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ctrnnlab.errors import TrainingError


def lr_schedule(batch_index: int, lr0: float, half_life: float) -> float:
    """Learning rate after ``batch_index`` completed steps; lr(0) = lr0."""
    if batch_index < 0:
        raise ValueError("batch_index must be non-negative")
    return lr0 * 2.0 ** (-batch_index / half_life)


@dataclass
class AdamState:
    """First/second-moment accumulators, shape-matched to the parameter set."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(a) for k, a in params.items()},
            v={k: np.zeros_like(a) for k, a in params.items()},
        )


def adam_step(
    params: dict[str, np.ndarray],
    state: AdamState,
    grads: dict[str, np.ndarray],
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-7,
) -> None:
    """One ADAM update, in place on ``params`` and ``state``.

    Raises TrainingError naming the offending tensor if a gradient entry is
    non-finite.
    """
    state.t += 1
    t = state.t
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for name, theta in params.items():
        g = grads[name]
        if not np.isfinite(g).all():
            raise TrainingError(f"non-finite gradient for tensor {name!r} at step {t}")
        m = state.m[name]
        v = state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * np.square(g)
        theta -= lr * (m / c1) / (np.sqrt(v / c2) + epsilon)


@dataclass
class SpectralNorm:
    """Largest singular value of a square matrix with its singular pair."""

    sigma: float
    u: np.ndarray
    v: np.ndarray

    @property
    def value_sq(self) -> float:
        return self.sigma**2

    def grad_sq(self) -> np.ndarray:
        """Gradient of sigma^2 with respect to the matrix."""
        return 2.0 * self.sigma * np.outer(self.u, self.v)


# Fixed start vector seed: power iteration needs a generic direction, and the
# result must not depend on any experiment stream.
_POWER_ITER_KEY = 0x5EED


def power_iteration(w: np.ndarray, iters: int = 30, v0: np.ndarray | None = None) -> SpectralNorm:
    """Estimate the top singular triple of ``w`` by alternating u/v updates.

    ``v0`` warm-starts the right singular vector (training reuses the vector
    across batches, after which 30 iterations keep it converged).  A zero
    matrix yields sigma = 0.
    """
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("power_iteration expects a square matrix")
    if iters < 1:
        raise ValueError("need at least one iteration")
    n = w.shape[0]
    if v0 is None:
        gen = np.random.Generator(np.random.Philox(key=_POWER_ITER_KEY))
        v = gen.standard_normal(n)
    else:
        v = np.asarray(v0, dtype=np.float64).copy()
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.ones(n)
        nv = np.sqrt(n)
    v /= nv
    u = np.zeros(n)
    for _ in range(iters):
        wu = w @ v
        nu = np.linalg.norm(wu)
        if nu == 0.0:
            return SpectralNorm(sigma=0.0, u=np.zeros(n), v=v)
        u = wu / nu
        wv = w.T @ u
        nw = np.linalg.norm(wv)
        if nw == 0.0:
            return SpectralNorm(sigma=0.0, u=u, v=np.zeros(n))
        v = wv / nw
    return SpectralNorm(sigma=float(u @ (w @ v)), u=u, v=v)


def spectral_norm_sq(w: np.ndarray, iters: int = 30, v0: np.ndarray | None = None) -> float:
    """Squared largest singular value of ``w``."""
    return power_iteration(w, iters=iters, v0=v0).value_sq
