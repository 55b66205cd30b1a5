"""Training loop: fresh noise per batch, BPTT, ADAM with decaying rate.

Tasks plug in through two callables (see FunctionTask, MazeTask,
RegulatorTask): one generates a batch from a task stream, the other runs the
forward/backward pass and returns the data loss with parameter gradients.
The loop owns everything task-independent: the learning-rate schedule, the
spectral penalty warm start, the optimizer step restricted to the trainable
subset, and the per-batch history (batch, loss, lr, reg).

Noise stream addressing: the trials of batch k draw their tapes from
(PURPOSE_TRAIN, k * batch_size + i), so any scheduling of trials within a
batch sees identical randomness.  Batch generation itself draws from
(PURPOSE_TASK, k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ctrnnlab.errors import TrainingError
from ctrnnlab.network import NetworkParams, NoiseConfig, draw_trial_noise
from ctrnnlab.optim import AdamState, adam_step, lr_schedule
from ctrnnlab.rng import PURPOSE_TASK, PURPOSE_TRAIN, RngStreams

# Consecutive non-finite batch losses tolerated before aborting.
DIVERGENCE_PATIENCE = 10


@dataclass
class TrainConfig:
    lr0: float = 0.001
    half_life: float = 2500.0
    batches: int = 10_000
    batch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7
    reg_coeff: float = 0.0
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int = 0
    trainable: tuple[str, ...] | None = None  # None trains every tensor

    @classmethod
    def for_function_task(cls, **overrides) -> "TrainConfig":
        base = dict(lr0=0.001, half_life=2500.0, batches=10_000, batch_size=32, reg_coeff=0.0)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def for_maze_task(cls, **overrides) -> "TrainConfig":
        base = dict(lr0=0.004, half_life=1500.0, batches=6_000, batch_size=36, reg_coeff=0.001)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def for_regulator_task(cls, **overrides) -> "TrainConfig":
        base = dict(
            lr0=0.001, half_life=4545.0, batches=10_000, batch_size=1, reg_coeff=0.0,
            trainable=("b_in",),
        )
        base.update(overrides)
        return cls(**base)


class Task(Protocol):
    def generate_batch(self, batch_size: int, gen: np.random.Generator): ...

    def batch_gradients(
        self,
        params: NetworkParams,
        noise: NoiseConfig,
        batch,
        streams: RngStreams,
        trial_base: int,
        *,
        reg_coeff: float,
        power_v: np.ndarray | None,
    ): ...  # returns (loss, grads, reg_value, power_v)


@dataclass
class TrainResult:
    params: NetworkParams
    history: np.ndarray  # columns: batch, loss, lr, reg term
    aborted: bool = False

    @property
    def final_loss(self) -> float:
        return float(self.history[-1, 1])


def draw_batch_noise(
    streams: RngStreams, purpose: int, trial_base: int, batch_size: int, steps: int, n: int
) -> np.ndarray:
    """Stack per-trial standard-normal tapes into (2, steps, n, batch_size)."""
    eps = np.empty((2, steps, n, batch_size))
    for i in range(batch_size):
        eps[:, :, :, i] = draw_trial_noise(streams.stream(purpose, trial_base + i), steps, n)
    return eps


def train(task: Task, params: NetworkParams, cfg: TrainConfig) -> TrainResult:
    """Run the full schedule of batches; returns trained params and history.

    Aborts with TrainingError (history attached) after DIVERGENCE_PATIENCE
    consecutive non-finite losses.
    """
    params = params.copy()
    streams = RngStreams(cfg.seed)
    trainable = cfg.trainable or tuple(params.tensors().keys())
    tensors = params.tensors()
    opt_params = {name: tensors[name] for name in trainable}
    opt_state = AdamState.zeros_like(opt_params)
    history = np.zeros((cfg.batches, 4))
    power_v: np.ndarray | None = None
    bad_streak = 0

    for k in range(cfg.batches):
        batch = task.generate_batch(cfg.batch_size, streams.stream(PURPOSE_TASK, k))
        loss, grads, reg_value, power_v = task.batch_gradients(
            params, cfg.noise, batch, streams, k * cfg.batch_size,
            reg_coeff=cfg.reg_coeff, power_v=power_v,
        )
        lr = lr_schedule(k, cfg.lr0, cfg.half_life)
        history[k] = (k, loss, lr, cfg.reg_coeff * reg_value)

        if not np.isfinite(loss):
            bad_streak += 1
            if bad_streak > DIVERGENCE_PATIENCE:
                raise TrainingError(
                    f"loss non-finite for {bad_streak} consecutive batches (batch {k})",
                    history=history[: k + 1],
                )
            continue
        bad_streak = 0
        adam_step(
            opt_params, opt_state, {name: grads[name] for name in trainable},
            lr, cfg.beta1, cfg.beta2, cfg.epsilon,
        )

    return TrainResult(params=params, history=history)
