"""Network parameterization and the discrete-time stochastic state update.

The state of an n-neuron leaky-integrator network evolves as

    h_{t+1} = (1 - gamma) * h_t
              + gamma * ( f(W_rec h_t + W_in u_t + B_in + eps_in)
                          + eps_out ),

with gamma = dt / tau, activation f applied elementwise, and two
independent Gaussian noise streams: eps_in ~ N(0, sigma_in^2 I) injected
before the activation (pre-activation noise) and eps_out ~ N(0,
sigma_out^2 I) injected after it (post-activation noise).  Fresh draws are
made for every neuron at every step.  Setting one of the two standard
deviations to zero recovers the pure noise-in or noise-out variants; both
streams live in the one update rule and are configuration, not code paths.

Noise tape layout: one trial of T states consumes a (2, T-1, n) block of
standard normal draws from its stream -- block 0 is the pre-activation
noise for steps 1..T-1 in order, block 1 the post-activation noise.  Draws
are standard normals scaled by sigma at the point of use, so sweeping the
noise level with a fixed seed reuses the same underlying randomness and
doubling sigma exactly doubles every noise sample.

Outputs are an affine readout of the state, z = W_out h + B_out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ctrnnlab.activations import ActivationSpec, activation_apply, activation_deriv
from ctrnnlab.errors import ConfigurationError, SimulationDivergenceError


@dataclass(frozen=True)
class NoiseConfig:
    """Standard deviations of the pre- and post-activation noise streams."""

    sigma_in: float = 0.0
    sigma_out: float = 0.0

    def __post_init__(self):
        if self.sigma_in < 0 or self.sigma_out < 0:
            raise ConfigurationError("noise standard deviations must be non-negative")


@dataclass
class NetworkParams:
    """All tensors and time constants of one network.

    ``h0`` holds one or more trainable initial-state row vectors; tasks that
    start from several conditions (one per maze vertex, say) index into it.
    """

    w_rec: np.ndarray          # (n, n)
    w_in: np.ndarray           # (n, m); m may be 0 for input-free networks
    b_in: np.ndarray           # (n,)
    w_out: np.ndarray          # (p, n)
    b_out: np.ndarray          # (p,)
    h0: np.ndarray             # (k, n), k >= 1
    tau: float = 0.1
    dt: float = 0.02
    activation: ActivationSpec = field(default_factory=ActivationSpec)

    def __post_init__(self):
        self.w_rec = np.asarray(self.w_rec, dtype=np.float64)
        self.w_in = np.asarray(self.w_in, dtype=np.float64)
        self.b_in = np.asarray(self.b_in, dtype=np.float64)
        self.w_out = np.asarray(self.w_out, dtype=np.float64)
        self.b_out = np.asarray(self.b_out, dtype=np.float64)
        self.h0 = np.atleast_2d(np.asarray(self.h0, dtype=np.float64))
        n = self.w_rec.shape[0]
        if self.w_rec.shape != (n, n):
            raise ConfigurationError("w_rec must be square")
        if self.w_in.ndim != 2 or self.w_in.shape[0] != n:
            raise ConfigurationError("w_in must have shape (n, m)")
        if self.b_in.shape != (n,):
            raise ConfigurationError("b_in must have shape (n,)")
        if self.w_out.ndim != 2 or self.w_out.shape[1] != n:
            raise ConfigurationError("w_out must have shape (p, n)")
        if self.b_out.shape != (self.w_out.shape[0],):
            raise ConfigurationError("b_out must have shape (p,)")
        if self.h0.shape[1] != n:
            raise ConfigurationError("h0 rows must have length n")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigurationError(f"dt/tau must lie in (0, 1], got {self.gamma}")

    @property
    def n(self) -> int:
        return self.w_rec.shape[0]

    @property
    def m(self) -> int:
        return self.w_in.shape[1]

    @property
    def p(self) -> int:
        return self.w_out.shape[0]

    @property
    def gamma(self) -> float:
        return self.dt / self.tau

    def tensors(self) -> dict[str, np.ndarray]:
        """Named views of every trainable-capable tensor."""
        return {
            "w_rec": self.w_rec,
            "w_in": self.w_in,
            "b_in": self.b_in,
            "w_out": self.w_out,
            "b_out": self.b_out,
            "h0": self.h0,
        }

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            w_rec=self.w_rec.copy(),
            w_in=self.w_in.copy(),
            b_in=self.b_in.copy(),
            w_out=self.w_out.copy(),
            b_out=self.b_out.copy(),
            h0=self.h0.copy(),
            tau=self.tau,
            dt=self.dt,
            activation=self.activation,
        )


@dataclass
class TrialRecord:
    """Full record of one rollout: states[0] is the initial state."""

    states: np.ndarray   # (T, n)
    outputs: np.ndarray  # (T, p)
    inputs: np.ndarray   # (T, m)


def init_params(
    n: int,
    m: int,
    p: int,
    gen: np.random.Generator,
    *,
    tau: float = 0.1,
    dt: float = 0.02,
    activation: ActivationSpec | None = None,
    h0_count: int = 1,
    weight_scale: float = 0.8,
) -> NetworkParams:
    """Fresh network: weights i.i.d. N(0, (weight_scale/sqrt(n))^2), zero biases.

    Initial states start at zero and are trainable.  Draw order from ``gen``
    is w_rec, w_in, w_out.
    """
    if min(n, p) < 1 or m < 0 or h0_count < 1:
        raise ConfigurationError("need n >= 1, p >= 1, m >= 0, h0_count >= 1")
    std = weight_scale / np.sqrt(n)
    return NetworkParams(
        w_rec=std * gen.standard_normal((n, n)),
        w_in=std * gen.standard_normal((n, m)),
        b_in=np.zeros(n),
        w_out=std * gen.standard_normal((p, n)),
        b_out=np.zeros(p),
        h0=np.zeros((h0_count, n)),
        tau=tau,
        dt=dt,
        activation=activation or ActivationSpec(),
    )


def readout(params: NetworkParams, h: np.ndarray) -> np.ndarray:
    """Affine readout z = W_out h + B_out; accepts (n,) or (n, batch)."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim == 1:
        return params.w_out @ h + params.b_out
    return params.w_out @ h + params.b_out[:, None]


def step(
    params: NetworkParams,
    noise: NoiseConfig,
    h: np.ndarray,
    u: np.ndarray,
    gen: np.random.Generator,
) -> np.ndarray:
    """One state update; draws the pre-activation then post-activation noise from ``gen``."""
    h = np.asarray(h, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if h.shape != (params.n,) or u.shape != (params.m,):
        raise ConfigurationError(
            f"expected state ({params.n},) and input ({params.m},), got {h.shape} and {u.shape}"
        )
    eps_in = gen.standard_normal(params.n)
    eps_out = gen.standard_normal(params.n)
    a = params.w_rec @ h + params.w_in @ u + params.b_in + noise.sigma_in * eps_in
    g = params.gamma
    return (1.0 - g) * h + g * (activation_apply(params.activation, a) + noise.sigma_out * eps_out)


def draw_trial_noise(gen: np.random.Generator, steps: int, n: int) -> np.ndarray:
    """Standard-normal tape (2, steps, n) for one trial: [0]=pre-, [1]=post-activation."""
    return gen.standard_normal((2, steps, n))


def rollout_batch(
    params: NetworkParams,
    noise: NoiseConfig,
    inputs: np.ndarray,   # (T, m, B)
    h_init: np.ndarray,   # (n, B)
    eps: np.ndarray,      # (2, T-1, n, B) standard normals
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized rollout over a batch of trials.

    Returns states (T, n, B) and the activation derivative at each
    pre-activation, fprime (T-1, n, B), which the backward pass consumes.
    The input row at the final step is recorded but drives no transition.
    """
    T = inputs.shape[0]
    n, B = h_init.shape
    act = params.activation
    g = params.gamma
    states = np.empty((T, n, B))
    fprime = np.empty((T - 1, n, B))
    states[0] = h_init
    b_col = params.b_in[:, None]
    h = h_init
    for t in range(T - 1):
        a = params.w_rec @ h
        if params.m:
            a += params.w_in @ inputs[t]
        a += b_col
        if noise.sigma_in:
            a += noise.sigma_in * eps[0, t]
        fa = activation_apply(act, a)
        fprime[t] = activation_deriv(act, a)
        if noise.sigma_out:
            fa += noise.sigma_out * eps[1, t]
        h = (1.0 - g) * h + g * fa
        states[t + 1] = h
    return states, fprime


def first_bad_step(states: np.ndarray) -> int | None:
    """Index of the first timestep with a non-finite entry, or None."""
    finite = np.isfinite(states).all(axis=tuple(range(1, states.ndim)))
    if finite.all():
        return None
    return int(np.argmin(finite))


def simulate_trial(
    params: NetworkParams,
    noise: NoiseConfig,
    inputs: np.ndarray,
    gen: np.random.Generator,
    *,
    h_init: np.ndarray | None = None,
) -> TrialRecord:
    """Roll one trial of T = len(inputs) states from h0 (exact, un-noised).

    Noise enters from the first update onward.  Deterministic given
    (params, noise, inputs, generator state); raises
    SimulationDivergenceError if the state leaves the finite range.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != params.m:
        raise ConfigurationError(f"inputs must have shape (T, {params.m})")
    T = inputs.shape[0]
    if T < 1:
        raise ConfigurationError("need at least one timestep")
    h_init = params.h0[0] if h_init is None else np.asarray(h_init, dtype=np.float64)
    eps = draw_trial_noise(gen, T - 1, params.n)
    states, _ = rollout_batch(params, noise, inputs[:, :, None], h_init[:, None], eps[:, :, :, None])
    states = states[:, :, 0]
    bad = first_bad_step(states)
    if bad is not None:
        raise SimulationDivergenceError(bad)
    outputs = (params.w_out @ states.T).T + params.b_out
    return TrialRecord(states=states, outputs=outputs, inputs=inputs)
