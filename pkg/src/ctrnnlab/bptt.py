"""Reverse-mode gradients through the unrolled stochastic update.

The noise samples of a forward pass are treated as constants, so the
gradients are exact pathwise derivatives for the realized draws (additive
noise makes this estimator unbiased).  Writing g_t for dL/dh_t and
d_t = gamma * f'(a_t) * g_{t+1}, the recursion below runs once backward
over time,

    g_t = (1 - gamma) g_{t+1} + W_rec^T d_t + W_out^T dL/dz_t,

and the parameter gradients are sums of outer products accumulated as a
handful of flattened matrix products:

    dW_rec = sum_t d_t h_t^T      dW_in = sum_t d_t u_t^T     dB_in = sum_t d_t
    dW_out = sum_t dL/dz_t h_t^T  dB_out = sum_t dL/dz_t      dh0   = g_0.

The training loss is the mean squared readout error over masked entries;
the mask holds per-(step, trial) readout counts, so a step drawn twice as a
readout time simply carries weight two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ctrnnlab.errors import ConfigurationError, SimulationDivergenceError
from ctrnnlab.network import NetworkParams, NoiseConfig, first_bad_step, rollout_batch
from ctrnnlab.optim import SpectralNorm, power_iteration


@dataclass
class TrialBatch:
    """One batch of open-loop trials.

    inputs   (T, m, B) per-step input rows; the final row drives no update
    targets  (T, p, B) desired readout, defined wherever the mask is nonzero
    mask     (T, B)    readout counts per step and trial
    h0_index (B,)      which trainable initial state each trial starts from
    """

    inputs: np.ndarray
    targets: np.ndarray
    mask: np.ndarray
    h0_index: np.ndarray

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=np.float64)
        if (self.mask < 0).any():
            raise ConfigurationError("mask counts must be non-negative")
        if (self.mask.sum(axis=0) <= 0).any():
            raise ConfigurationError("every trial needs at least one readout step")

    @property
    def size(self) -> int:
        return self.inputs.shape[2]

    @property
    def steps(self) -> int:
        return self.inputs.shape[0]


def loss_mse_readout(outputs: np.ndarray, targets: np.ndarray, mask: np.ndarray) -> float:
    """Mean of (z - target)^2 over all masked (trial, step, output-dim) entries."""
    mask = np.asarray(mask, dtype=np.float64)
    total_weight = mask.sum()
    if total_weight <= 0:
        raise ConfigurationError("readout mask is empty")
    p = outputs.shape[1]
    sq = np.square(outputs - targets).sum(axis=1)  # (T, B)
    return float((mask * sq).sum() / (total_weight * p))


@dataclass
class BpttResult:
    loss: float                        # masked mean squared readout error
    grads: dict[str, np.ndarray]       # matches NetworkParams.tensors()
    reg_value: float                   # squared top singular value of w_rec
    power_v: np.ndarray | None         # converged right singular vector, for warm starts


def bptt_gradient(
    params: NetworkParams,
    noise: NoiseConfig,
    batch: TrialBatch,
    eps: np.ndarray,
    *,
    reg_coeff: float = 0.0,
    power_v: np.ndarray | None = None,
    power_iters: int = 30,
) -> BpttResult:
    """Loss and exact gradients for one batch under frozen noise draws ``eps``.

    ``eps`` has shape (2, T-1, n, B) with the standard-normal tape of each
    trial in its trailing column; see the network module for the layout.
    With ``reg_coeff`` > 0 the spectral penalty on w_rec is added to the
    gradient (not to the returned loss, which stays the data term).
    """
    T, _, B = batch.inputs.shape
    n, p = params.n, params.p
    g = params.gamma

    h_init = params.h0[batch.h0_index].T  # (n, B)
    states, fprime = rollout_batch(params, noise, batch.inputs, h_init, eps)
    bad = first_bad_step(states)
    if bad is not None:
        raise SimulationDivergenceError(bad)

    mask = batch.mask
    total_weight = mask.sum() * p
    masked_steps = np.nonzero(mask.any(axis=1))[0]

    # Readout errors and their pull on the states, only where masked.
    loss = 0.0
    dz = np.zeros((T, p, B))
    r = np.zeros((T, n, B))
    for t in masked_steps:
        z_t = params.w_out @ states[t] + params.b_out[:, None]
        err = z_t - batch.targets[t]
        loss += float((mask[t] * np.square(err).sum(axis=0)).sum())
        dz[t] = (2.0 / total_weight) * mask[t] * err
        r[t] = params.w_out.T @ dz[t]
    loss /= total_weight

    # Backward sweep over time.
    d = np.empty((T - 1, n, B))
    g_h = r[T - 1].copy()
    for t in range(T - 2, -1, -1):
        d_t = g * fprime[t] * g_h
        d[t] = d_t
        g_h *= 1.0 - g
        g_h += params.w_rec.T @ d_t
        g_h += r[t]

    # Accumulate parameter gradients with flattened matrix products.
    d_flat = d.transpose(1, 0, 2).reshape(n, (T - 1) * B)
    h_prev = states[: T - 1].transpose(0, 2, 1).reshape((T - 1) * B, n)
    grads: dict[str, np.ndarray] = {}
    grads["w_rec"] = d_flat @ h_prev
    if params.m:
        u_flat = batch.inputs[: T - 1].transpose(0, 2, 1).reshape((T - 1) * B, params.m)
        grads["w_in"] = d_flat @ u_flat
    else:
        grads["w_in"] = np.zeros((n, 0))
    grads["b_in"] = d.sum(axis=(0, 2))

    dz_masked = dz[masked_steps].transpose(1, 0, 2).reshape(p, len(masked_steps) * B)
    h_masked = states[masked_steps].transpose(0, 2, 1).reshape(len(masked_steps) * B, n)
    grads["w_out"] = dz_masked @ h_masked
    grads["b_out"] = dz.sum(axis=(0, 2))

    dh0 = np.zeros_like(params.h0)
    np.add.at(dh0, batch.h0_index, g_h.T)
    grads["h0"] = dh0

    reg_value = 0.0
    pv = power_v
    if reg_coeff > 0.0:
        sn: SpectralNorm = power_iteration(params.w_rec, iters=power_iters, v0=power_v)
        reg_value = sn.value_sq
        grads["w_rec"] += reg_coeff * sn.grad_sq()
        pv = sn.v

    return BpttResult(loss=loss, grads=grads, reg_value=reg_value, power_v=pv)
