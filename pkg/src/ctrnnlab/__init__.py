"""Stochastic continuous-time RNN laboratory.

Trains leaky-integrator recurrent networks with Gaussian noise injected
either inside (pre-activation) or outside (post-activation) the activation
function, and provides the analysis tooling to characterize how the trained
networks depend on the noise level: noise sweeps with bias/variance splits,
fixed-point location with and without noise, and stationary statistics of
the related piecewise Ornstein-Uhlenbeck process.
"""

__version__ = "0.1.0"

from ctrnnlab.activations import ActivationSpec, activation_apply
from ctrnnlab.network import NetworkParams, NoiseConfig, TrialRecord, init_params, readout, simulate_trial, step
from ctrnnlab.rng import RngStreams

__all__ = [
    "ActivationSpec",
    "NetworkParams",
    "NoiseConfig",
    "RngStreams",
    "TrialRecord",
    "activation_apply",
    "init_params",
    "readout",
    "simulate_trial",
    "step",
    "__version__",
]
