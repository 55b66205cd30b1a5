"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
runtime failures (divergence, training aborts, bad checkpoints) with 3.
"""


class CtrnnLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CtrnnLabError):
    """Invalid configuration: bad dimensions, empty masks, unknown keys."""


class SimulationDivergenceError(CtrnnLabError):
    """A rollout produced a non-finite state."""

    def __init__(self, first_bad_step: int, message: str | None = None):
        self.first_bad_step = first_bad_step
        super().__init__(message or f"non-finite state first appeared at step {first_bad_step}")


class TrainingError(CtrnnLabError):
    """Training could not continue (non-finite gradients or sustained non-finite loss)."""

    def __init__(self, message: str, history=None):
        self.history = history
        super().__init__(message)


class EvaluationError(CtrnnLabError):
    """Too many divergent trials during an evaluation sweep."""


class CheckpointFormatError(CtrnnLabError):
    """Checkpoint file is unreadable or has an unsupported format version."""
