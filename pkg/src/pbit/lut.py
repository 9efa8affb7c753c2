"""Fixed-point activation lookup table for the autonomous update rule.

The table stores stay-probabilities exp(-s0 * exp(-beta * u)) over a
uniform grid of the aligned input u = m_i * (sum_j W_ij m_j + h_i).
Beta is folded into the entries, so an annealing stage is a table
rebuild, mirroring a broadcast LUT update in hardware.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng


class LutError(ValueError):
    pass


@dataclass(frozen=True)
class ActivationLut:
    s0: float
    beta: float
    input_bits: int
    output_bits: int
    u_max: float
    entries: np.ndarray  # uint32 fixed point, output_bits fractional bits
    s_table: np.ndarray  # float64 flip scale s at each grid point

    @property
    def n_entries(self) -> int:
        return 1 << self.input_bits

    @property
    def u_lo(self) -> float:
        return -self.u_max

    @property
    def u_step(self) -> float:
        return 2.0 * self.u_max / (self.n_entries - 1)

    @property
    def values(self) -> np.ndarray:
        """Dequantized stay-probabilities."""
        return self.entries * (2.0 ** -self.output_bits)

    def grid(self) -> np.ndarray:
        return np.linspace(-self.u_max, self.u_max, self.n_entries)

    def lookup(self, u: float) -> float:
        """Stay-probability at aligned input u (clamped, truncated index)."""
        idx = int((u - self.u_lo) / self.u_step)
        idx = min(max(idx, 0), self.n_entries - 1)
        return float(self.values[idx])

    def fixed_for_kernel(self) -> np.ndarray:
        """Entries rescaled to 24 fractional bits for the integer compare."""
        shift = 24 - self.output_bits
        if shift >= 0:
            return (self.entries.astype(np.uint32)) << np.uint32(shift)
        return (self.entries >> np.uint32(-shift)).astype(np.uint32)


def lut_build(s0: float, beta: float, input_bits: int = 16,
              output_bits: int = 24, u_max: float = 8.0) -> ActivationLut:
    """Quantize exp(-s0 * exp(-beta*u)) over 2^input_bits grid points.

    Entries are round-to-nearest fixed point with output_bits fractional
    bits, clamped to at least one output quantum so every stored
    stay-probability remains strictly positive.
    """
    if not (0.0 < s0 <= 1.0):
        raise LutError(f"s0 must be in (0, 1], got {s0}")
    if beta <= 0:
        raise LutError("beta must be positive")
    if u_max <= 0:
        raise LutError("u_max must be positive")
    if input_bits < 2 or output_bits < 2:
        raise LutError("input_bits and output_bits must be >= 2")
    u = np.linspace(-u_max, u_max, 1 << input_bits)
    # s can overflow exp() at strongly misaligned inputs; that limit is a
    # stay-probability of 0, clamped below to one quantum
    with np.errstate(over="ignore"):
        s = s0 * np.exp(-beta * u)
    stay = np.exp(-s)
    scale = float(1 << output_bits)
    q = np.rint(stay * scale).astype(np.uint64)
    q = np.clip(q, 1, 1 << output_bits).astype(np.uint32)
    return ActivationLut(float(s0), float(beta), int(input_bits),
                         int(output_bits), float(u_max), q, s)


@dataclass(frozen=True)
class AutonomousParams:
    """Knobs of the autonomous update rule (flip scale, LUT, PRNG)."""

    s0: float
    master_seed: int = 0
    prng_kind: str = rng.XOSHIRO128PLUS
    input_bits: int = 16
    output_bits: int = 24
    u_max: float = 8.0

    def __post_init__(self):
        if not (0.0 < self.s0 <= 1.0):
            raise LutError(f"s0 must be in (0, 1], got {self.s0}")
        if self.prng_kind not in rng.PRNG_KINDS:
            raise ValueError(f"unknown PRNG kind {self.prng_kind!r}")

    def build_lut(self, beta: float) -> ActivationLut:
        return lut_build(self.s0, beta, self.input_bits, self.output_bits,
                         self.u_max)

    def make_streams(self, n_spins: int) -> rng.PrngStreams:
        return rng.PrngStreams.seeded(self.prng_kind, self.master_seed, n_spins)
