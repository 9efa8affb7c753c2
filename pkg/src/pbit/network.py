"""Coupling network representation and spin-state helpers.

The network is a symmetric, zero-diagonal weight matrix W plus an on-site
bias vector h and an inverse pseudo-temperature beta.  Internally weights
are held in CSR form (raw numpy arrays) so the numba sampling kernels can
consume them without conversion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class NetworkError(ValueError):
    """Raised when a network violates its structural invariants."""


@dataclass(frozen=True)
class CouplingNetwork:
    """Symmetric spin-coupling network: weights W (CSR), bias h, beta."""

    n_spins: int
    indptr: np.ndarray   # int64, length n_spins + 1
    indices: np.ndarray  # int32, column index per stored weight
    data: np.ndarray     # float64, weight values
    bias: np.ndarray     # float64, length n_spins
    beta: float = 1.0

    def __post_init__(self):
        if self.n_spins < 1:
            raise NetworkError("n_spins must be positive")
        if self.beta <= 0:
            raise NetworkError("beta must be positive")
        if len(self.bias) != self.n_spins:
            raise NetworkError("bias length does not match n_spins")
        if len(self.indptr) != self.n_spins + 1:
            raise NetworkError("bad CSR indptr length")
        if self.indices.size and (
            self.indices.min() < 0 or self.indices.max() >= self.n_spins
        ):
            raise NetworkError("weight index out of range")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_dense(cls, w: np.ndarray, bias=None, beta: float = 1.0) -> "CouplingNetwork":
        w = np.asarray(w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise NetworkError("weight matrix must be square")
        if not np.allclose(w, w.T, rtol=0, atol=1e-12):
            raise NetworkError("weight matrix must be symmetric")
        if np.any(np.diagonal(w) != 0.0):
            raise NetworkError("weight matrix must have zero diagonal")
        n = w.shape[0]
        indptr = np.zeros(n + 1, dtype=np.int64)
        cols, vals = [], []
        for i in range(n):
            nz = np.nonzero(w[i])[0]
            cols.append(nz.astype(np.int32))
            vals.append(w[i, nz])
            indptr[i + 1] = indptr[i] + len(nz)
        indices = np.concatenate(cols) if cols else np.zeros(0, np.int32)
        data = np.concatenate(vals) if vals else np.zeros(0, np.float64)
        bias = np.zeros(n) if bias is None else np.asarray(bias, dtype=np.float64).copy()
        return cls(n, indptr, indices, data, bias, float(beta))

    @classmethod
    def from_edges(cls, n_spins, edges, bias=None, beta: float = 1.0) -> "CouplingNetwork":
        """Build from (i, j, w) triplets; duplicates accumulate, symmetrized."""
        acc: dict[tuple[int, int], float] = {}
        for i, j, w in edges:
            i, j = int(i), int(j)
            if i == j:
                raise NetworkError("self-coupling (i == j) not allowed")
            if not (0 <= i < n_spins and 0 <= j < n_spins):
                raise NetworkError(f"edge index ({i},{j}) out of range")
            key = (min(i, j), max(i, j))
            acc[key] = acc.get(key, 0.0) + float(w)
        rows: list[list[tuple[int, float]]] = [[] for _ in range(n_spins)]
        for (i, j), w in acc.items():
            if w != 0.0:
                rows[i].append((j, w))
                rows[j].append((i, w))
        indptr = np.zeros(n_spins + 1, dtype=np.int64)
        cols, vals = [], []
        for i, row in enumerate(rows):
            row.sort()
            cols.extend(j for j, _ in row)
            vals.extend(w for _, w in row)
            indptr[i + 1] = len(cols)
        indices = np.asarray(cols, dtype=np.int32)
        data = np.asarray(vals, dtype=np.float64)
        bias = np.zeros(n_spins) if bias is None else np.asarray(bias, dtype=np.float64).copy()
        return cls(n_spins, indptr, indices, data, bias, float(beta))

    # -- views -------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        w = np.zeros((self.n_spins, self.n_spins))
        for i in range(self.n_spins):
            sl = slice(self.indptr[i], self.indptr[i + 1])
            w[i, self.indices[sl]] = self.data[sl]
        return w

    def with_beta(self, beta: float) -> "CouplingNetwork":
        return CouplingNetwork(
            self.n_spins, self.indptr, self.indices, self.data, self.bias, float(beta)
        )

    def edges(self):
        """Yield each undirected bond once as (i, j, w) with i < j."""
        for i in range(self.n_spins):
            for p in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[p])
                if i < j:
                    yield i, j, float(self.data[p])

    def ell(self):
        """Padded fixed-width (ELL) weight layout for the step kernels.

        Rows keep CSR neighbor order and pad with (self index, weight 0),
        so input sums are bit-identical to the CSR order.
        """
        degrees = np.diff(self.indptr)
        width = max(int(degrees.max(initial=0)), 1)
        ell_idx = np.repeat(np.arange(self.n_spins, dtype=np.int32),
                            width).reshape(self.n_spins, width)
        ell_w = np.zeros((self.n_spins, width))
        for i in range(self.n_spins):
            d = degrees[i]
            sl = slice(self.indptr[i], self.indptr[i + 1])
            ell_idx[i, :d] = self.indices[sl]
            ell_w[i, :d] = self.data[sl]
        return ell_idx, ell_w

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n_spins,
            "beta": self.beta,
            "weights": [[i, j, w] for i, j, w in self.edges()],
            "bias": self.bias.tolist(),
        }

    def save_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CouplingNetwork":
        n = int(doc["n"])
        bias = doc.get("bias") or np.zeros(n)
        return cls.from_edges(n, doc.get("weights", []), bias=bias,
                              beta=float(doc.get("beta", 1.0)))

    @classmethod
    def load_json(cls, path) -> "CouplingNetwork":
        with open(path) as f:
            return cls.from_json_dict(json.load(f))


# -- spin states -----------------------------------------------------------

def random_state(n_spins: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random spin vector in {-1, +1}^N."""
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=n_spins)


def check_state(state: np.ndarray, net: CouplingNetwork) -> np.ndarray:
    state = np.ascontiguousarray(state, dtype=np.int8)
    if state.shape != (net.n_spins,):
        raise NetworkError(
            f"state length {state.shape} does not match network size {net.n_spins}"
        )
    if not np.all(np.abs(state) == 1):
        raise NetworkError("spin values must be exactly -1 or +1")
    return state


def csr_matvec(net: CouplingNetwork, m: np.ndarray) -> np.ndarray:
    """W @ m for the stored CSR weights."""
    prod = net.data * m[net.indices]
    out = np.zeros(net.n_spins)
    nonempty = net.indptr[:-1] < net.indptr[1:]
    if prod.size:
        sums = np.add.reduceat(prod, net.indptr[:-1][nonempty])
        out[nonempty] = sums
    return out


def energy(net: CouplingNetwork, state: np.ndarray) -> float:
    """Configuration energy E = -0.5 sum_ij W_ij m_i m_j - sum_i h_i m_i."""
    m = check_state(state, net).astype(np.float64)
    return float(-0.5 * m @ csr_matvec(net, m) - net.bias @ m)


def config_index(state: np.ndarray) -> int:
    """Little-endian configuration index: bit i set iff spin i is +1."""
    idx = 0
    for i, m in enumerate(state):
        if m > 0:
            idx |= 1 << i
    return idx


def state_from_index(idx: int, n_spins: int) -> np.ndarray:
    m = np.empty(n_spins, dtype=np.int8)
    for i in range(n_spins):
        m[i] = 1 if (idx >> i) & 1 else -1
    return m
