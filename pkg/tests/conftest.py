"""Shared helpers for the test suite."""

import numpy as np


def lockstep_stationary(w, h, beta, s0):
    """Exact stationary distribution of the synchronous update chain.

    Builds the full 2^N x 2^N transition matrix of the parallel update
    rule (flip probability 1 - exp(-s0 * exp(-beta * m_i * I_i)) per
    p-bit, all applied simultaneously) and returns (states, pi) with the
    dominant left eigenvector normalized to a distribution.  States are
    ordered little-endian to match DistributionTable indexing.
    """
    w = np.asarray(w, dtype=float)
    h = np.asarray(h, dtype=float)
    n = len(h)
    states = np.array(
        [[1.0 if (k >> i) & 1 else -1.0 for i in range(n)]
         for k in range(1 << n)]
    )
    inputs = beta * (states @ w + h)
    s = s0 * np.exp(-states * inputs)
    p_flip = 1.0 - np.exp(-s)
    size = 1 << n
    t = np.empty((size, size))
    for a in range(size):
        for b in range(size):
            diff = states[a] != states[b]
            t[a, b] = np.prod(np.where(diff, p_flip[a], 1.0 - p_flip[a]))
    vals, vecs = np.linalg.eig(t.T)
    k = np.argmax(vals.real)
    pi = np.abs(vecs[:, k].real)
    return states, pi / pi.sum()


def boltzmann_ref(w, h, beta, states):
    """Independent Boltzmann reference over explicitly listed states."""
    w = np.asarray(w, dtype=float)
    h = np.asarray(h, dtype=float)
    e = -0.5 * np.einsum("si,ij,sj->s", states, w, states) - states @ h
    p = np.exp(-beta * (e - e.min()))
    return p / p.sum()


def all_states(n):
    """All spin configurations of n spins; row k has bit i of k as spin i."""
    return np.array(
        [[1 if (k >> i) & 1 else -1 for i in range(n)]
         for k in range(1 << n)], dtype=np.int8)


def translation_corr(samples, mapping):
    """Chain correlation averaged over samples, replicas, and sites."""
    lat = np.asarray(samples, dtype=np.float64).reshape(
        samples.shape[0], mapping.n_replicas, mapping.m_spins)
    return np.array([
        float((lat * np.roll(lat, -L, axis=2)).mean())
        for L in range(mapping.m_spins)
    ])
