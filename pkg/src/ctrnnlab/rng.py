"""Counter-based random streams.

Every stochastic quantity in the package is drawn from a Philox generator
keyed by (seed, purpose, index).  Philox is a counter-mode block cipher, so
distinct keys give independent streams and a stream's draws depend only on
its key, never on how many other streams were consumed first.  This is what
makes results reproducible under any work scheduling: parallel workers each
derive their own stream from the shared seed and the index of the work item
(trial, grid cell, input) they handle.

Within one stream the draw order is part of the contract of whichever
function owns the stream; those layouts are documented at the draw site.
"""

from __future__ import annotations

import numpy as np

# Purpose tags keep unrelated subsystems on disjoint streams even when they
# share index ranges.
PURPOSE_INIT = 1
PURPOSE_TASK = 2
PURPOSE_TRAIN = 3
PURPOSE_EVAL = 4
PURPOSE_FIXED_POINT = 5
PURPOSE_OU = 6
PURPOSE_LANDSCAPE_EVAL = 7

_INDEX_BITS = 48
_MAX_INDEX = 1 << _INDEX_BITS
_MAX_PURPOSE = 1 << (64 - _INDEX_BITS)


class RngStreams:
    """Factory of independent, addressable generators for one experiment seed."""

    def __init__(self, seed: int):
        if not 0 <= int(seed) < (1 << 64):
            raise ValueError("seed must fit in 64 bits")
        self.seed = int(seed)

    def stream(self, purpose: int, index: int = 0) -> np.random.Generator:
        """Generator for (purpose, index); same arguments always give the same draws."""
        if not 0 <= purpose < _MAX_PURPOSE:
            raise ValueError(f"purpose out of range: {purpose}")
        if not 0 <= index < _MAX_INDEX:
            raise ValueError(f"stream index out of range: {index}")
        key = np.array([self.seed, (purpose << _INDEX_BITS) | index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, offset: int) -> "RngStreams":
        """Streams object with a derived seed, for nested experiments."""
        mixed = np.random.SeedSequence([self.seed, offset]).generate_state(1, np.uint64)[0]
        return RngStreams(int(mixed))
