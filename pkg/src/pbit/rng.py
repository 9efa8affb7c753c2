"""Per-p-bit pseudo random number streams.

Two generators mirror the hardware options: a maximal-length 32-bit
Fibonacci LFSR (taps 32, 22, 2, 1) and xoshiro128+.  Both emit uniform
floats in [0, 1) with exactly 24 bits of resolution, taken from the top
24 bits of the 32-bit output word.

Stream i is seeded from (master_seed, i) through splitmix64 so that the
sequence of any stream is independent of how many worker threads consume
the others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LFSR32 = "lfsr32"
XOSHIRO128PLUS = "xoshiro128+"
PRNG_KINDS = (LFSR32, XOSHIRO128PLUS)

# kind codes used by the numba kernels
KIND_CODE = {LFSR32: 0, XOSHIRO128PLUS: 1}

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int):
    """One splitmix64 step; returns (new_state, output)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x, z ^ (z >> 31)


def stream_seed64(master_seed: int, i: int) -> int:
    """64-bit mix of (master_seed, stream index)."""
    s, a = _splitmix64(master_seed & _MASK64)
    _, b = _splitmix64((s ^ (i + 1) * 0xD1B54A32D192ED03) & _MASK64)
    return b


@dataclass
class PrngStreams:
    """A bank of independent PRNG streams, one per p-bit index.

    ``xstate`` has shape (n, 4) and is used by xoshiro128+; ``lstate``
    has shape (n,) and is used by the LFSR.  Only the selected kind's
    state advances.
    """

    kind: str
    xstate: np.ndarray  # uint32 (n, 4)
    lstate: np.ndarray  # uint32 (n,)

    @property
    def n_streams(self) -> int:
        return self.lstate.shape[0]

    @property
    def kind_code(self) -> int:
        return KIND_CODE[self.kind]

    @classmethod
    def seeded(cls, kind: str, master_seed: int, n_streams: int) -> "PrngStreams":
        if kind not in PRNG_KINDS:
            raise ValueError(f"unknown PRNG kind {kind!r}; choose from {PRNG_KINDS}")
        xstate = np.empty((n_streams, 4), dtype=np.uint32)
        lstate = np.empty(n_streams, dtype=np.uint32)
        for i in range(n_streams):
            s = stream_seed64(master_seed, i)
            words = []
            for _ in range(4):
                s, out = _splitmix64(s)
                words.append(out & 0xFFFFFFFF)
            if not any(words):
                words[0] = 1  # xoshiro state must not be all-zero
            xstate[i] = words
            lstate[i] = words[0] or 1  # LFSR state must not be zero
        return cls(kind, xstate, lstate)

    def copy(self) -> "PrngStreams":
        return PrngStreams(self.kind, self.xstate.copy(), self.lstate.copy())

    def next_floats(self) -> np.ndarray:
        """Advance every stream once; return uniforms in [0, 1)."""
        from . import _kernels

        out24 = np.empty(self.n_streams, dtype=np.uint32)
        _kernels.draw_block(self.kind_code, self.xstate, self.lstate,
                            0, self.n_streams, out24)
        return out24 * np.float64(2.0 ** -24)


def prng_next(streams: PrngStreams, i: int = 0) -> float:
    """Advance stream i once and return its uniform output in [0, 1)."""
    from . import _kernels

    out24 = np.empty(1, dtype=np.uint32)
    _kernels.draw_one(streams.kind_code, streams.xstate, streams.lstate, i, out24)
    return float(out24[0] * 2.0 ** -24)
