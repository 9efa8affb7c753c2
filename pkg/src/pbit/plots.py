"""Figure rendering for CLI outputs.

Every plot function takes already-computed arrays and writes a PNG next
to the CSV the data came from; nothing here recomputes physics.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_series(path, x, curves: dict, xlabel: str, ylabel: str,
                logy: bool = False, title: str | None = None) -> None:
    """Line plot of one or more named curves over a shared x axis."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in curves.items():
        ax.plot(x, y, marker=".", label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_quantum_mz(path, ratios, mz_by_s0: dict, oracle=None) -> None:
    """Mean z magnetization vs transverse-field ratio, one curve per s0."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if oracle is not None:
        ax.plot(ratios, oracle, "k-", lw=2, label="exact")
    for s0, mz in mz_by_s0.items():
        ax.plot(ratios, mz, "o--", label=f"s0={s0:g}")
    ax.set_xlabel("transverse field / coupling")
    ax.set_ylabel("mean z magnetization")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_correlations(path, ls, corr_by_s0: dict, oracle=None) -> None:
    """Chain correlation vs separation L, one curve per s0."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if oracle is not None:
        ax.plot(ls, oracle, "k-", lw=2, label="exact")
    for s0, corr in corr_by_s0.items():
        ax.plot(ls, corr, "o--", ms=3, label=f"s0={s0:g}")
    ax.set_xlabel("separation L")
    ax.set_ylabel("z-z correlation")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_distribution(path, probs_model: np.ndarray,
                      probs_exact: np.ndarray) -> None:
    """Empirical vs exact configuration probabilities (scatter)."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    lim = max(probs_model.max(), probs_exact.max()) * 1.1
    ax.plot([0, lim], [0, lim], "k-", lw=0.8)
    ax.plot(probs_exact, probs_model, ".", ms=3, alpha=0.6)
    ax.set_xlabel("exact probability")
    ax.set_ylabel("sampled probability")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
