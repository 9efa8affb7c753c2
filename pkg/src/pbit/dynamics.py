"""Update dynamics: autonomous parallel steps, sequential Gibbs sweeps,
and checkerboard (two-color) parallel sweeps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels
from .lut import ActivationLut, AutonomousParams
from .network import CouplingNetwork, NetworkError, check_state, csr_matvec
from .rng import PrngStreams


def compute_inputs(net: CouplingNetwork, state: np.ndarray,
                   beta: float | None = None) -> np.ndarray:
    """Synaptic inputs I_i = beta * (sum_j W_ij m_j + h_i)."""
    m = check_state(state, net).astype(np.float64)
    b = net.beta if beta is None else beta
    return b * (csr_matvec(net, m) + net.bias)


def _check_streams(streams: PrngStreams, n: int) -> None:
    if streams.n_streams != n:
        raise NetworkError(
            f"need one PRNG stream per p-bit: got {streams.n_streams}, want {n}"
        )


def autonomous_step(net: CouplingNetwork, state: np.ndarray,
                    lut: ActivationLut, streams: PrngStreams,
                    n_threads: int = 1) -> np.ndarray:
    """One synchronous autonomous step over all p-bits.

    Every p-bit reads the frozen input state and its own PRNG stream, so
    the result is independent of how the index range is sharded across
    threads.
    """
    state = check_state(state, net)
    _check_streams(streams, net.n_spins)
    out = np.empty_like(state)
    lut_fix = lut.fixed_for_kernel()
    ell_idx, ell_w = net.ell()
    args = (state, out, ell_idx, ell_w, net.bias,
            lut_fix, lut.u_lo, 1.0 / lut.u_step,
            streams.kind_code, streams.xstate, streams.lstate)
    if n_threads <= 1:
        _kernels.autonomous_block(*args, 0, net.n_spins)
    else:
        bounds = np.linspace(0, net.n_spins, n_threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futs = [pool.submit(_kernels.autonomous_block, *args, lo, hi)
                    for lo, hi in zip(bounds[:-1], bounds[1:])]
            for f in futs:
                f.result()
    return out


def gibbs_sweep(net: CouplingNetwork, state: np.ndarray, order: np.ndarray,
                stream: PrngStreams, beta: float | None = None) -> np.ndarray:
    """One strictly sequential Gibbs sweep in the given visit order."""
    state = check_state(state, net).copy()
    order = np.asarray(order, dtype=np.int64)
    if not np.array_equal(np.sort(order), np.arange(net.n_spins)):
        raise NetworkError("order must be a permutation of [0, N)")
    b = net.beta if beta is None else beta
    samples = np.empty((0, net.n_spins), dtype=np.int8)
    ell_idx, ell_w = net.ell()
    _kernels.gibbs_run(state, ell_idx, ell_w, net.bias,
                       b, order, stream.kind_code, stream.xstate,
                       stream.lstate, 1, 0, 1, samples)
    return state


def check_coloring(net: CouplingNetwork, colors: np.ndarray) -> np.ndarray:
    """Validate a proper 2-coloring (no bond inside a color class)."""
    colors = np.asarray(colors, dtype=np.uint8)
    if colors.shape != (net.n_spins,) or colors.max(initial=0) > 1:
        raise NetworkError("coloring must assign 0/1 to every p-bit")
    for i, j, _ in net.edges():
        if colors[i] == colors[j]:
            raise NetworkError(
                f"invalid 2-coloring: bond ({i},{j}) joins two "
                f"color-{colors[i]} p-bits (simultaneous-update hazard)"
            )
    return colors


def checkerboard_sweep(net: CouplingNetwork, state: np.ndarray,
                       colors: np.ndarray, streams: PrngStreams,
                       beta: float | None = None) -> np.ndarray:
    """Parallel update of color class 0, then class 1 (Gibbs semantics)."""
    state = check_state(state, net).copy()
    _check_streams(streams, net.n_spins)
    colors = check_coloring(net, colors)
    b = net.beta if beta is None else beta
    samples = np.empty((0, net.n_spins), dtype=np.int8)
    ell_idx, ell_w = net.ell()
    _kernels.checkerboard_run(state, ell_idx, ell_w,
                              net.bias, b, colors, streams.kind_code,
                              streams.xstate, streams.lstate, 1, 0, 1, samples)
    return state
