"""Exact references and statistical metrics.

Brute-force Boltzmann enumeration (Gray-code walk), Euclidean distance
between configuration distributions, importance-sampling free energy,
and dense exact diagonalization of the 1D transverse-field Ising chain.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .network import CouplingNetwork
from .problems import TrotterMapping

MAX_ENUM_SPINS = 24   # 2^24 probabilities; memory guard
MAX_ED_SPINS = 12     # dense 2^M x 2^M diagonalization


class OracleError(ValueError):
    pass


class FreeEnergyEstimateError(RuntimeError):
    """No configuration probability exceeded the threshold."""


# --- configuration distributions --------------------------------------------

@dataclass(frozen=True)
class DistributionTable:
    """Probabilities over all 2^N spin configurations.

    Configuration index is little-endian: bit i set iff spin i is +1.
    """

    probs: np.ndarray

    def __post_init__(self):
        n = self.probs.shape[0]
        if n == 0 or n & (n - 1):
            raise OracleError("distribution length must be a power of two")
        if n > (1 << MAX_ENUM_SPINS):
            raise OracleError(f"enumeration limited to N <= {MAX_ENUM_SPINS}")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-9:
            raise OracleError("probabilities must be nonnegative and sum to 1")

    @property
    def n_spins(self) -> int:
        return int(self.probs.shape[0]).bit_length() - 1

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["index", "probability"])
            for i, p in enumerate(self.probs):
                w.writerow([i, repr(float(p))])

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump({"probs": self.probs.tolist()}, f)


def config_energies(net: CouplingNetwork) -> np.ndarray:
    """Energy of every configuration, indexed little-endian."""
    if net.n_spins > MAX_ENUM_SPINS:
        raise OracleError(f"enumeration limited to N <= {MAX_ENUM_SPINS}")
    return _kernels.gray_energies(net.n_spins, net.indptr, net.indices,
                                  net.data, net.bias)


def boltzmann_exact(net: CouplingNetwork) -> DistributionTable:
    """P_k proportional to exp(-beta * E_k), exactly normalized."""
    e = config_energies(net)
    logp = -net.beta * e
    logp -= logsumexp(logp)
    return DistributionTable(np.exp(logp))


def euclidean_distance(p: DistributionTable, q: DistributionTable) -> float:
    if p.probs.shape != q.probs.shape:
        raise OracleError("distribution lengths differ")
    return float(np.sqrt(np.sum((p.probs - q.probs) ** 2)))


def config_indices(samples: np.ndarray) -> np.ndarray:
    """Little-endian configuration index of each sample row."""
    samples = np.asarray(samples)
    if samples.ndim != 2:
        raise OracleError("samples must be a 2D (n_samples, N) array")
    n = samples.shape[1]
    if n > MAX_ENUM_SPINS:
        raise OracleError(f"enumeration limited to N <= {MAX_ENUM_SPINS}")
    bits = (samples > 0).astype(np.uint32)
    weights = (1 << np.arange(n, dtype=np.uint32)).astype(np.uint32)
    return bits @ weights


def empirical_distribution(samples: np.ndarray) -> DistributionTable:
    """Normalized histogram of sampled spin configurations."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise OracleError("empty sample set")
    idx = config_indices(samples)
    counts = np.bincount(idx, minlength=1 << samples.shape[1])
    return DistributionTable(counts / counts.sum())


# --- free energy -------------------------------------------------------------

def free_energy_exact(net: CouplingNetwork) -> float:
    """-ln(Z)/beta via a numerically stable log-sum-exp."""
    e = config_energies(net)
    return float(-logsumexp(-net.beta * e) / net.beta)


def free_energy_from_samples(samples: np.ndarray, net: CouplingNetwork,
                             p_th: float | None = None) -> float:
    """Importance-sampling free-energy estimate.

    Builds the empirical distribution, keeps configurations with
    P_i > p_th (default 4/n_samples, excluding shot-noise outliers),
    forms Z_i = exp(-beta E_i)/P_i and averages FE_i = -ln(Z_i)/beta.
    """
    samples = np.asarray(samples)
    if p_th is None:
        p_th = 4.0 / samples.shape[0]
    if not (0.0 < p_th < 1.0):
        raise OracleError("p_th must be in (0, 1)")
    table = empirical_distribution(samples)
    keep = np.nonzero(table.probs > p_th)[0]
    if keep.size == 0:
        raise FreeEnergyEstimateError(
            f"no configuration probability exceeds p_th={p_th}"
        )
    energies = config_energies(net)[keep]
    # FE_i = -ln(Z_i)/beta with Z_i = exp(-beta E_i)/P_i
    fe = energies + np.log(table.probs[keep]) / net.beta
    return float(fe.mean())


# --- exact quantum observables ------------------------------------------------

@dataclass(frozen=True)
class QuantumObservables:
    """Thermal observables of a periodic quantum spin chain."""

    mz_avg: float
    correlations: np.ndarray  # <sigma^z_1 sigma^z_{1+L}>, L = 0 .. M-1
    diag_probs: np.ndarray    # diagonal of rho / tr(rho)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["L", "correlation"])
            for L, c in enumerate(self.correlations):
                w.writerow([L, repr(float(c))])

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump({"mz_avg": self.mz_avg,
                       "correlations": self.correlations.tolist(),
                       "diag_probs": self.diag_probs.tolist()}, f)


def _site_z(m: int) -> np.ndarray:
    """z eigenvalues per (basis state, site): bit set -> +1."""
    b = np.arange(1 << m, dtype=np.int64)
    return np.where((b[:, None] >> np.arange(m)) & 1 > 0, 1.0, -1.0)


def tfim_exact(m: int, j: float, gx: float, gz: float,
               beta: float) -> QuantumObservables:
    """Dense thermal solution of the periodic transverse-field chain.

    H = -(sum_i J sz_i sz_{i+1} + gx sum_i sx_i + gz sum_i sz_i);
    rho = exp(-beta H) via eigendecomposition.
    """
    if not (2 <= m <= MAX_ED_SPINS):
        raise OracleError(f"exact diagonalization limited to 2 <= M <= {MAX_ED_SPINS}")
    if beta <= 0:
        raise OracleError("beta must be positive")
    dim = 1 << m
    z = _site_z(m)
    ring = z * np.roll(z, -1, axis=1)
    diag = -(j * ring.sum(axis=1) + gz * z.sum(axis=1))
    ham = np.zeros((dim, dim))
    np.fill_diagonal(ham, diag)
    basis = np.arange(dim)
    for i in range(m):
        ham[basis, basis ^ (1 << i)] = -gx
    evals, evecs = np.linalg.eigh(ham)
    logw = -beta * (evals - evals[0])
    w = np.exp(logw)
    w /= w.sum()
    # probability of each computational basis state under rho
    diag_probs = (evecs ** 2) @ w
    mz = float(diag_probs @ z.mean(axis=1))
    corr = np.array([float(diag_probs @ (z[:, 0] * z[:, L % m]))
                     for L in range(m)])
    return QuantumObservables(mz, corr, diag_probs)


def replica_observables(samples: np.ndarray,
                        mapping: TrotterMapping) -> QuantumObservables:
    """Magnetization and chain correlations from replica-lattice samples.

    Averages over samples, replicas (and sites, for the magnetization);
    correlation(L) pairs chain site 1 with site 1+L inside each replica.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != mapping.n_spins:
        raise OracleError(
            f"samples have {samples.shape} spins, mapping expects "
            f"{mapping.n_spins}"
        )
    lattice = samples.reshape(samples.shape[0], mapping.n_replicas,
                              mapping.m_spins)
    mz = float(lattice.mean())
    first = lattice[:, :, :1]
    corr = np.array([float((first * lattice[:, :, [L]]).mean())
                     for L in range(mapping.m_spins)])
    counts = np.bincount(
        config_indices(lattice[:, 0, :].astype(np.int8)),
        minlength=1 << mapping.m_spins,
    ) if mapping.m_spins <= MAX_ENUM_SPINS else np.zeros(1)
    diag = counts / counts.sum() if counts.sum() else counts
    return QuantumObservables(mz, corr, diag)
