"""Annealing orchestration: geometric temperature schedules, staged runs
with per-stage LUT rebuilds, and fixed-temperature sampling runs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import check_coloring
from .lut import AutonomousParams
from .network import CouplingNetwork, check_state, energy, random_state
from .problems import save_pgm

MODES = ("autonomous", "gibbs", "checkerboard")


class AnnealError(ValueError):
    pass


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling: T(k+1) = ratio * T(k), truncated at t_floor."""

    t_initial: float = 10.0
    ratio: float = 0.9
    steps_per_stage: int = 200
    t_floor: float = 0.1
    max_stages: int = 10_000

    def __post_init__(self):
        if self.t_initial <= 0:
            raise AnnealError("t_initial must be positive")
        if not (0.0 < self.ratio < 1.0):
            raise AnnealError("ratio must be in (0, 1)")
        if self.steps_per_stage < 1 or self.max_stages < 1:
            raise AnnealError("steps_per_stage and max_stages must be >= 1")
        if self.t_floor < 0:
            raise AnnealError("t_floor must be nonnegative")

    def temperatures(self) -> list[float]:
        temps = []
        t = self.t_initial
        while len(temps) < self.max_stages and t >= self.t_floor:
            temps.append(t)
            t *= self.ratio
        if not temps:
            temps.append(self.t_initial)
        return temps


@dataclass(frozen=True)
class StageRecord:
    stage: int
    temperature: float
    beta: float
    steps: int
    energy: float
    realized_flips: int
    attempt_flips: float
    snapshot: np.ndarray | None = None


@dataclass
class RunTrajectory:
    records: list[StageRecord] = field(default_factory=list)
    final_state: np.ndarray | None = None

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["stage", "T", "beta", "steps", "energy",
                        "realized_flips", "attempt_flips"])
            for r in self.records:
                w.writerow([r.stage, repr(r.temperature), repr(r.beta),
                            r.steps, repr(r.energy), r.realized_flips,
                            repr(r.attempt_flips)])

    def write_snapshots(self, out_dir, shape) -> list[str]:
        paths = []
        for r in self.records:
            if r.snapshot is None:
                continue
            p = f"{out_dir}/stage_{r.stage:03d}.pgm"
            save_pgm(p, r.snapshot.reshape(shape))
            paths.append(p)
        return paths


def _no_samples(n):
    return np.empty((0, n), dtype=np.int8)


def _run_stage(net, state, mode, beta, steps, params, streams, colors):
    """Advance `steps` update steps at fixed beta; returns counters."""
    empty = _no_samples(net.n_spins)
    ell_idx, ell_w = net.ell()
    if mode == "autonomous":
        lut = params.build_lut(beta)
        return _kernels.autonomous_run(
            state, ell_idx, ell_w, net.bias,
            lut.fixed_for_kernel(), lut.s_table, lut.u_lo, 1.0 / lut.u_step,
            streams.kind_code, streams.xstate, streams.lstate,
            steps, 0, 1, empty)
    if mode == "gibbs":
        order = np.arange(net.n_spins, dtype=np.int64)
        flips = _kernels.gibbs_run(
            state, ell_idx, ell_w, net.bias, beta, order,
            streams.kind_code, streams.xstate, streams.lstate,
            steps, 0, 1, empty)
        return flips, float(steps * net.n_spins)
    if mode == "checkerboard":
        flips = _kernels.checkerboard_run(
            state, ell_idx, ell_w, net.bias, beta, colors,
            streams.kind_code, streams.xstate, streams.lstate,
            steps, 0, 1, empty)
        return flips, float(steps * net.n_spins)
    raise AnnealError(f"unknown mode {mode!r}; choose from {MODES}")


def run_anneal(net: CouplingNetwork, schedule: AnnealSchedule,
               params: AutonomousParams, mode: str = "autonomous",
               colors: np.ndarray | None = None,
               initial_state: np.ndarray | None = None,
               capture_snapshots: bool = False) -> RunTrajectory:
    """Staged geometric anneal; the LUT (or tanh scale) is rebuilt at
    beta = 1/T for every stage."""
    if mode not in MODES:
        raise AnnealError(f"unknown mode {mode!r}; choose from {MODES}")
    if mode == "checkerboard":
        if colors is None:
            raise AnnealError("checkerboard mode needs a 2-coloring")
        colors = check_coloring(net, colors)
    streams = params.make_streams(net.n_spins)
    host_rng = np.random.default_rng(params.master_seed)
    if initial_state is None:
        state = random_state(net.n_spins, host_rng)
    else:
        state = check_state(initial_state, net).copy()
    traj = RunTrajectory()
    for k, t in enumerate(schedule.temperatures()):
        beta = 1.0 / t
        flips, attempts = _run_stage(net, state, mode, beta,
                                     schedule.steps_per_stage, params,
                                     streams, colors)
        traj.records.append(StageRecord(
            stage=k, temperature=t, beta=beta,
            steps=schedule.steps_per_stage,
            energy=energy(net, state),
            realized_flips=int(flips), attempt_flips=float(attempts),
            snapshot=state.copy() if capture_snapshots else None))
    traj.final_state = state
    return traj


def sample_run(net: CouplingNetwork, params: AutonomousParams,
               mode: str = "autonomous", burn_in: int = 0,
               n_samples: int = 1, spacing: int = 1,
               colors: np.ndarray | None = None,
               initial_state: np.ndarray | None = None,
               beta: float | None = None) -> np.ndarray:
    """Fixed-temperature run collecting n_samples states `spacing` steps
    apart after burn_in steps.  Returns (n_samples, N) int8 array."""
    if spacing < 1:
        raise AnnealError("spacing must be >= 1")
    if n_samples < 1:
        raise AnnealError("n_samples must be >= 1")
    if mode not in MODES:
        raise AnnealError(f"unknown mode {mode!r}; choose from {MODES}")
    b = net.beta if beta is None else beta
    streams = params.make_streams(net.n_spins)
    host_rng = np.random.default_rng(params.master_seed)
    if initial_state is None:
        state = random_state(net.n_spins, host_rng)
    else:
        state = check_state(initial_state, net).copy()
    samples = np.empty((n_samples, net.n_spins), dtype=np.int8)
    ell_idx, ell_w = net.ell()
    if mode == "autonomous":
        lut = params.build_lut(b)
        _kernels.autonomous_run(
            state, ell_idx, ell_w, net.bias,
            lut.fixed_for_kernel(), lut.s_table, lut.u_lo, 1.0 / lut.u_step,
            streams.kind_code, streams.xstate, streams.lstate,
            burn_in, n_samples, spacing, samples)
    elif mode == "gibbs":
        order = np.arange(net.n_spins, dtype=np.int64)
        _kernels.gibbs_run(
            state, ell_idx, ell_w, net.bias, b, order,
            streams.kind_code, streams.xstate, streams.lstate,
            burn_in, n_samples, spacing, samples)
    else:
        if colors is None:
            raise AnnealError("checkerboard mode needs a 2-coloring")
        colors = check_coloring(net, colors)
        _kernels.checkerboard_run(
            state, ell_idx, ell_w, net.bias, b, colors,
            streams.kind_code, streams.xstate, streams.lstate,
            burn_in, n_samples, spacing, samples)
    return samples
