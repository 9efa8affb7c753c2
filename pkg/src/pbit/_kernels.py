"""Numba kernels for the sampling engine.

All hot loops live here: PRNG advancement, autonomous parallel updates,
sequential Gibbs sweeps, checkerboard sweeps, and the Gray-code energy
enumeration used by the exact Boltzmann oracle.

The autonomous kernels take weights in padded fixed-width (ELL) form and
compare against the activation LUT in 24-bit fixed point, so a step over
one spin is pure integer work plus a short dot product.  The step kernel
and the run kernel accumulate inputs in the same neighbor order, keeping
single-step and whole-run trajectories bit-identical.

Each kernel is compiled once per PRNG kind through a closure factory and
dispatched in Python.  Keeping the generator choice out of the inner loop
matters: a runtime branch over the 32-clock LFSR body defeats the
optimizer and costs about 4x on the xoshiro path.
"""

import math

import numpy as np
from numba import njit, uint32

KIND_LFSR = 0
KIND_XOSHIRO = 1

_INV23 = 2.0 ** -23


@njit(cache=True, inline="always", nogil=True)
def _xoshiro_next(xs, i):
    s0 = xs[i, 0]
    s1 = xs[i, 1]
    s2 = xs[i, 2]
    s3 = xs[i, 3]
    result = uint32(s0 + s3)
    t = uint32(s1 << uint32(9))
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = uint32((s3 << uint32(11)) | (s3 >> uint32(21)))  # rotl(s3, 11)
    xs[i, 0] = s0
    xs[i, 1] = s1
    xs[i, 2] = s2
    xs[i, 3] = s3
    return result


@njit(cache=True, inline="always", nogil=True)
def _lfsr_next(ls, i):
    # Fibonacci LFSR, taps at bits 32, 22, 2, 1 (1-indexed); 32 clocks/draw
    s = ls[i]
    for _ in range(32):
        bit = ((s >> uint32(31)) ^ (s >> uint32(21)) ^ (s >> uint32(1)) ^ s) & uint32(1)
        s = uint32((s << uint32(1)) | bit)
    ls[i] = s
    return s


@njit(cache=True, inline="always", nogil=True)
def _draw24_xoshiro(xs, ls, i):
    return _xoshiro_next(xs, i) >> uint32(8)


@njit(cache=True, inline="always", nogil=True)
def _draw24_lfsr(xs, ls, i):
    return _lfsr_next(ls, i) >> uint32(8)


def _make_draw_block(draw):
    @njit(cache=True, nogil=True)
    def kern(xs, ls, lo, hi, out24):
        for i in range(lo, hi):
            out24[i] = draw(xs, ls, i)
    return kern


def _make_draw_one(draw):
    @njit(cache=True, nogil=True)
    def kern(xs, ls, i, out24):
        out24[0] = draw(xs, ls, i)
    return kern


_DRAWS = {KIND_LFSR: _draw24_lfsr, KIND_XOSHIRO: _draw24_xoshiro}
_DRAW_BLOCKS = {k: _make_draw_block(d) for k, d in _DRAWS.items()}
_DRAW_ONES = {k: _make_draw_one(d) for k, d in _DRAWS.items()}


def draw_one(kind, xs, ls, i, out24):
    _DRAW_ONES[kind](xs, ls, i, out24)


def draw_block(kind, xs, ls, lo, hi, out24):
    _DRAW_BLOCKS[kind](xs, ls, lo, hi, out24)


# --- autonomous dynamics ----------------------------------------------------

@njit(cache=True, inline="always", nogil=True)
def _aligned_input(spins, ell_idx, ell_w, h, i):
    x = h[i]
    for k in range(ell_idx.shape[1]):
        x += ell_w[i, k] * spins[ell_idx[i, k]]
    return spins[i] * x


@njit(cache=True, inline="always", nogil=True)
def _lut_index(u, u_lo, inv_step, n_lut):
    idx = int((u - u_lo) * inv_step)
    if idx < 0:
        idx = 0
    elif idx >= n_lut:
        idx = n_lut - 1
    return idx


def _make_autonomous_block(draw):
    @njit(cache=True, nogil=True)
    def kern(spins_in, spins_out, ell_idx, ell_w, h,
             lut_fix, u_lo, inv_step, xs, ls, lo, hi):
        n_lut = lut_fix.shape[0]
        for i in range(lo, hi):
            u = _aligned_input(spins_in, ell_idx, ell_w, h, i)
            keep = lut_fix[_lut_index(u, u_lo, inv_step, n_lut)]
            r = draw(xs, ls, i)
            if r >= keep:
                spins_out[i] = -spins_in[i]
            else:
                spins_out[i] = spins_in[i]
    return kern


def _make_autonomous_run(draw):
    @njit(cache=True, nogil=True)
    def kern(spins, ell_idx, ell_w, h, lut_fix, s_tab, u_lo, inv_step,
             xs, ls, burn_in, n_samples, spacing, samples_out):
        n = spins.shape[0]
        n_lut = lut_fix.shape[0]
        work = spins.copy()
        total = burn_in + n_samples * spacing
        flips = 0
        attempts = 0.0
        rec = 0
        for step in range(total):
            for i in range(n):
                u = _aligned_input(spins, ell_idx, ell_w, h, i)
                idx = _lut_index(u, u_lo, inv_step, n_lut)
                attempts += s_tab[idx]
                r = draw(xs, ls, i)
                if r >= lut_fix[idx]:
                    work[i] = -spins[i]
                    flips += 1
                else:
                    work[i] = spins[i]
            spins[:] = work
            if step >= burn_in and (step - burn_in + 1) % spacing == 0:
                if rec < n_samples:
                    samples_out[rec] = spins
                    rec += 1
        return flips, attempts
    return kern


_AUTONOMOUS_BLOCKS = {k: _make_autonomous_block(d) for k, d in _DRAWS.items()}
_AUTONOMOUS_RUNS = {k: _make_autonomous_run(d) for k, d in _DRAWS.items()}


def autonomous_block(spins_in, spins_out, ell_idx, ell_w, h,
                     lut_fix, u_lo, inv_step, kind, xs, ls, lo, hi):
    """One synchronous autonomous step for p-bits in [lo, hi).

    Reads only the frozen input state; writes only its own slice of the
    output buffer, so disjoint slices may run on concurrent threads.
    """
    _AUTONOMOUS_BLOCKS[kind](spins_in, spins_out, ell_idx, ell_w, h,
                             lut_fix, u_lo, inv_step, xs, ls, lo, hi)


def autonomous_run(spins, ell_idx, ell_w, h,
                   lut_fix, s_tab, u_lo, inv_step, kind, xs, ls,
                   burn_in, n_samples, spacing, samples_out):
    """Run burn_in + n_samples*spacing autonomous steps in place.

    Records the state after every `spacing` post-burn-in steps.  Returns
    (realized_flips, attempt_equivalent_flips) where the latter is the
    accumulated sum of per-p-bit flip scales s_i.
    """
    return _AUTONOMOUS_RUNS[kind](spins, ell_idx, ell_w, h,
                                  lut_fix, s_tab, u_lo, inv_step, xs, ls,
                                  burn_in, n_samples, spacing, samples_out)


# --- sequenced dynamics -----------------------------------------------------

def _make_gibbs_run(draw):
    @njit(cache=True, nogil=True)
    def kern(spins, ell_idx, ell_w, h, beta, order, xs, ls,
             burn_in, n_samples, spacing, samples_out):
        n = spins.shape[0]
        total = burn_in + n_samples * spacing
        flips = 0
        rec = 0
        for step in range(total):
            for k in range(n):
                i = order[k]
                x = h[i]
                for p in range(ell_idx.shape[1]):
                    x += ell_w[i, p] * spins[ell_idx[i, p]]
                r = draw(xs, ls, 0) * _INV23 - 1.0
                old = spins[i]
                if math.tanh(beta * x) - r > 0.0:
                    spins[i] = 1
                else:
                    spins[i] = -1
                if spins[i] != old:
                    flips += 1
            if step >= burn_in and (step - burn_in + 1) % spacing == 0:
                if rec < n_samples:
                    samples_out[rec] = spins
                    rec += 1
        return flips
    return kern


def _make_checkerboard_run(draw):
    @njit(cache=True, nogil=True)
    def kern(spins, ell_idx, ell_w, h, beta, colors, xs, ls,
             burn_in, n_samples, spacing, samples_out):
        n = spins.shape[0]
        total = burn_in + n_samples * spacing
        flips = 0
        rec = 0
        for step in range(total):
            for color in range(2):
                for i in range(n):
                    if colors[i] != color:
                        continue
                    x = h[i]
                    for p in range(ell_idx.shape[1]):
                        x += ell_w[i, p] * spins[ell_idx[i, p]]
                    r = draw(xs, ls, i) * _INV23 - 1.0
                    old = spins[i]
                    if math.tanh(beta * x) - r > 0.0:
                        spins[i] = 1
                    else:
                        spins[i] = -1
                    if spins[i] != old:
                        flips += 1
            if step >= burn_in and (step - burn_in + 1) % spacing == 0:
                if rec < n_samples:
                    samples_out[rec] = spins
                    rec += 1
        return flips
    return kern


_GIBBS_RUNS = {k: _make_gibbs_run(d) for k, d in _DRAWS.items()}
_CHECKERBOARD_RUNS = {k: _make_checkerboard_run(d) for k, d in _DRAWS.items()}


def gibbs_run(spins, ell_idx, ell_w, h, beta, order, kind, xs, ls,
              burn_in, n_samples, spacing, samples_out):
    """Sequential Gibbs sweeps; one sweep visits every p-bit in `order`.

    The single driving stream is stream index 0 of (xs, ls).  Returns
    realized flips.
    """
    return _GIBBS_RUNS[kind](spins, ell_idx, ell_w, h, beta, order, xs, ls,
                             burn_in, n_samples, spacing, samples_out)


def checkerboard_run(spins, ell_idx, ell_w, h, beta, colors,
                     kind, xs, ls, burn_in, n_samples, spacing, samples_out):
    """Two-phase parallel sweeps over a proper 2-coloring.

    Within a phase all updated p-bits are mutually unconnected, so
    immediate in-place writes equal a synchronous parallel update.
    """
    return _CHECKERBOARD_RUNS[kind](spins, ell_idx, ell_w, h, beta, colors,
                                    xs, ls, burn_in, n_samples, spacing,
                                    samples_out)


# --- exact enumeration ------------------------------------------------------

@njit(cache=True)
def gray_energies(n, indptr, indices, data, h):
    """Energies of all 2^n configurations, indexed little-endian.

    Walks configurations in Gray-code order so each step flips a single
    spin and the energy update costs one CSR row.
    """
    total = 1 << n
    energies = np.empty(total, dtype=np.float64)
    m = np.full(n, -1.0)
    e = 0.0
    for i in range(n):
        e += h[i]  # -h_i * (-1)
        for p in range(indptr[i], indptr[i + 1]):
            e -= 0.5 * data[p]  # -0.5 * w * (-1)(-1)
    energies[0] = e
    for k in range(1, total):
        kk = k
        j = 0
        while kk & 1 == 0:
            kk >>= 1
            j += 1
        x = h[j]
        for p in range(indptr[j], indptr[j + 1]):
            x += data[p] * m[indices[p]]
        e += 2.0 * m[j] * x
        m[j] = -m[j]
        energies[k ^ (k >> 1)] = e
    return energies
