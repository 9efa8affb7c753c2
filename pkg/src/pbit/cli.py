"""Command-line front end for config-driven experiments.

`pbit <command> --config <file> [--seed N] [--out DIR] [--threads K]`

Commands: sample, anneal, quantum, quantum-corr, perf, validate-sk.
Every command is a pure function of (config, seed): outputs are CSV for
data, JSON for metadata and reports, PGM for lattice images, plus PNG
figures rendered from the same arrays the CSVs hold.  Exit codes:
0 success, 2 config error, 3 tolerance failure in validate modes.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import shutil
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import plots
from .anneal import AnnealSchedule, run_anneal, sample_run
from .lut import AutonomousParams
from .network import CouplingNetwork, energy
from .oracles import (MAX_ED_SPINS, MAX_ENUM_SPINS, FreeEnergyEstimateError,
                      boltzmann_exact, empirical_distribution,
                      euclidean_distance, free_energy_exact,
                      free_energy_from_samples, replica_observables,
                      tfim_exact)
from .perf import PRESETS, format_report_table, load_presets, run_report
from .problems import (LatticeSpec, TrotterMapping, demo_bitmap,
                       ground_state_energy, lattice_from_image, load_bitmap,
                       trotter_map)

KINDS = ("sample", "anneal", "quantum", "quantum-corr", "perf", "validate-sk")


class ConfigError(ValueError):
    pass


class ToleranceError(RuntimeError):
    """A validate-mode result missed its configured tolerance."""


# --- configuration -----------------------------------------------------------

@dataclass
class ExperimentConfig:
    """Everything a run needs; serializable and seed-complete."""

    kind: str
    problem: dict = field(default_factory=dict)
    dynamics: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    sampling: dict = field(default_factory=dict)
    master_seed: int = 0
    out_dir: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; "
                              f"choose from {KINDS}")

    def serialize(self) -> str:
        return json.dumps({
            "kind": self.kind, "problem": self.problem,
            "dynamics": self.dynamics, "schedule": self.schedule,
            "sampling": self.sampling, "master_seed": self.master_seed,
            "out_dir": self.out_dir,
        }, indent=2)

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        if not isinstance(doc, dict) or "kind" not in doc:
            raise ConfigError("config must be a JSON object with a 'kind' key")
        known = {"kind", "problem", "dynamics", "schedule", "sampling",
                 "master_seed", "out_dir"}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.parse(f.read())


def _dynamics_params(cfg: ExperimentConfig, seed: int,
                     s0: float | None = None) -> AutonomousParams:
    d = cfg.dynamics
    return AutonomousParams(
        s0=float(s0 if s0 is not None else d.get("s0", 1 / 12)),
        master_seed=int(seed),
        prng_kind=d.get("prng_kind", "xoshiro128+"),
        input_bits=int(d.get("input_bits", 16)),
        output_bits=int(d.get("output_bits", 24)),
        u_max=float(d.get("u_max", 8.0)),
    )


def _s0_list(cfg: ExperimentConfig, default: float) -> list[float]:
    d = cfg.dynamics
    if "s0_list" in d:
        return [float(s) for s in d["s0_list"]]
    return [float(d.get("s0", default))]


def _seed_bank(master_seed: int, count: int) -> list[int]:
    """Deterministic per-worker seeds derived from the master seed."""
    return [int(s) for s in
            np.random.SeedSequence(master_seed).generate_state(count)]


def _parallel_map(fn, items, threads: int):
    """Map preserving input order; fan out when threads > 1."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- problem construction ----------------------------------------------------

def build_problem(problem: dict):
    """Instantiate a network from a problem config dict.

    Returns (network, extras) where extras may hold a 2-coloring, a
    target state, or a Trotter mapping depending on the problem kind.
    """
    kind = problem.get("kind", "sk")
    beta = float(problem.get("beta", 1.0))
    if kind == "sk":
        from .problems import sk_random
        return sk_random(int(problem.get("n_spins", 16)),
                         int(problem.get("seed", 1)), beta=beta), {}
    if kind == "lattice":
        rows = int(problem.get("rows", 30))
        cols = int(problem.get("cols", 30))
        spec = LatticeSpec(rows, cols, wrap=bool(problem.get("wrap", False)))
        if "bitmap" in problem:
            bitmap = load_bitmap(problem["bitmap"])
        else:
            bitmap = demo_bitmap(rows, cols)
        net, colors, target = lattice_from_image(bitmap, spec, beta=beta)
        return net, {"colors": colors, "target": target, "spec": spec,
                     "bitmap": bitmap}
    if kind == "trotter":
        mapping = TrotterMapping(
            m_spins=int(problem.get("m_spins", 8)),
            n_replicas=int(problem.get("n_replicas", 250)),
            j_coupling=float(problem.get("j", 1.0)),
            gamma_x=float(problem.get("gamma_x", 0.5)),
            gamma_z=float(problem.get("gamma_z", 0.0)),
            beta=beta,
        )
        return trotter_map(mapping), {"mapping": mapping}
    if kind == "file":
        if "path" not in problem:
            raise ConfigError("problem kind 'file' needs a 'path'")
        return CouplingNetwork.load_json(problem["path"]), {}
    raise ConfigError(f"unknown problem kind {kind!r}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _write_json(path, doc):
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)


# --- commands -----------------------------------------------------------------

def cmd_sample(cfg: ExperimentConfig, out: str, threads: int) -> None:
    """Fixed-temperature sampling; emits samples, energies, and (for
    enumerable sizes) the empirical vs exact distribution."""
    net, extras = build_problem(cfg.problem)
    sp = cfg.sampling
    mode = sp.get("mode", "autonomous")
    params = _dynamics_params(cfg, cfg.master_seed)
    samples = sample_run(
        net, params, mode=mode,
        burn_in=int(sp.get("burn_in", 0)),
        n_samples=int(sp.get("n_samples", 1000)),
        spacing=int(sp.get("spacing", 1)),
        colors=extras.get("colors"),
        beta=float(sp["beta"]) if "beta" in sp else None,
    )
    _write_csv(os.path.join(out, "samples.csv"),
               [f"m{i}" for i in range(net.n_spins)], samples.tolist())
    energies = [energy(net, s) for s in samples]
    _write_csv(os.path.join(out, "energies.csv"), ["sample", "energy"],
               [(i, repr(e)) for i, e in enumerate(energies)])
    summary = {"n_spins": net.n_spins, "n_samples": int(samples.shape[0]),
               "mode": mode, "mean_energy": float(np.mean(energies))}
    if net.n_spins <= MAX_ENUM_SPINS:
        emp = empirical_distribution(samples)
        exact = boltzmann_exact(net)
        emp.write_csv(os.path.join(out, "distribution_empirical.csv"))
        exact.write_csv(os.path.join(out, "distribution_exact.csv"))
        summary["euclidean_distance"] = euclidean_distance(emp, exact)
        plots.plot_distribution(os.path.join(out, "distribution.png"),
                                emp.probs, exact.probs)
    _write_json(os.path.join(out, "summary.json"), summary)


def cmd_validate_sk(cfg: ExperimentConfig, out: str, threads: int) -> None:
    """Ensemble fidelity check on an SK instance.

    Runs E independent short trajectories per sampler, pools states at
    each recorded step, and tracks Euclidean distance to the exact
    Boltzmann distribution and the importance-sampling free energy.
    """
    prob = dict(cfg.problem)
    prob.setdefault("kind", "sk")
    if prob["kind"] != "sk":
        raise ConfigError("validate-sk requires an SK problem")
    net, _ = build_problem(prob)
    if net.n_spins > MAX_ENUM_SPINS:
        raise ConfigError(
            f"validate-sk needs N <= {MAX_ENUM_SPINS} for enumeration")
    sp = cfg.sampling
    ensembles = int(sp.get("ensembles", 4000))
    n_records = int(sp.get("n_records", 10))
    spacing = int(sp.get("record_spacing", 5))
    params0 = _dynamics_params(cfg, 0)
    seeds = _seed_bank(cfg.master_seed, ensembles)
    exact = boltzmann_exact(net)
    fe_exact = free_energy_exact(net)

    def run_mode(mode):
        def one(seed):
            p = AutonomousParams(
                s0=params0.s0, master_seed=seed,
                prng_kind=params0.prng_kind, input_bits=params0.input_bits,
                output_bits=params0.output_bits, u_max=params0.u_max)
            return sample_run(net, p, mode=mode, burn_in=0,
                              n_samples=n_records, spacing=spacing)
        return np.stack(_parallel_map(one, seeds, threads))

    pools = {mode: run_mode(mode) for mode in ("autonomous", "gibbs")}
    steps = [(t + 1) * spacing for t in range(n_records)]
    ed = {mode: [euclidean_distance(empirical_distribution(pool[:, t, :]),
                                    exact)
                 for t in range(n_records)]
          for mode, pool in pools.items()}
    fe = []
    for t in range(n_records):
        try:
            fe.append(free_energy_from_samples(pools["autonomous"][:, t, :],
                                               net))
        except FreeEnergyEstimateError:
            fe.append(float("nan"))
    _write_csv(os.path.join(out, "ed.csv"),
               ["step", "ed_autonomous", "ed_gibbs"],
               [(s, repr(a), repr(g)) for s, a, g
                in zip(steps, ed["autonomous"], ed["gibbs"])])
    _write_csv(os.path.join(out, "fe.csv"),
               ["step", "fe_autonomous", "fe_exact"],
               [(s, repr(v), repr(fe_exact)) for s, v in zip(steps, fe)])
    plots.plot_series(os.path.join(out, "ed.png"), steps,
                      {"autonomous": ed["autonomous"], "gibbs": ed["gibbs"]},
                      "step", "Euclidean distance to Boltzmann", logy=True)
    plots.plot_series(os.path.join(out, "fe.png"), steps,
                      {"estimate": fe, "exact": [fe_exact] * n_records},
                      "step", "free energy")
    fe_rel = abs(fe[-1] - fe_exact) / abs(fe_exact)
    summary = {
        "n_spins": net.n_spins, "ensembles": ensembles,
        "ed_autonomous_final": ed["autonomous"][-1],
        "ed_gibbs_final": ed["gibbs"][-1],
        "fe_estimate_final": fe[-1], "fe_exact": fe_exact,
        "fe_relative_error": fe_rel,
    }
    _write_json(os.path.join(out, "summary.json"), summary)
    ratio_max = sp.get("ed_ratio_max", 2.0)
    fe_rel_max = sp.get("fe_rel_max", 0.05)
    if ratio_max is not None and \
            ed["autonomous"][-1] > float(ratio_max) * ed["gibbs"][-1]:
        raise ToleranceError(
            f"autonomous ED {ed['autonomous'][-1]:.4g} exceeds "
            f"{ratio_max}x Gibbs ED {ed['gibbs'][-1]:.4g}")
    if fe_rel_max is not None and not (fe_rel <= float(fe_rel_max)):
        raise ToleranceError(
            f"free-energy relative error {fe_rel:.4g} exceeds {fe_rel_max}")


def cmd_anneal(cfg: ExperimentConfig, out: str, threads: int) -> None:
    """Geometric annealing runs, optionally sweeping s0 and seeds."""
    net, extras = build_problem(cfg.problem)
    sp = cfg.sampling
    mode = sp.get("mode", "autonomous")
    n_seeds = int(sp.get("n_seeds", 1))
    s0s = _s0_list(cfg, 1 / 4)
    seeds = _seed_bank(cfg.master_seed, n_seeds)
    snapshots = bool(sp.get("snapshots", "spec" in extras))
    gs = ground_state_energy(net) if "target" in extras else None
    summary = {"mode": mode, "n_spins": net.n_spins,
               "ground_state_energy": gs, "runs": []}
    energy_curves = {}
    for s0 in s0s:
        sched = _schedule_for(cfg.schedule, s0, mode)
        finals = []
        for k, seed in enumerate(seeds):
            traj = run_anneal(net, sched, _dynamics_params(cfg, seed, s0),
                              mode=mode, colors=extras.get("colors"),
                              capture_snapshots=snapshots and k == 0)
            tag = f"s0_{s0:g}_seed{k}"
            traj.write_csv(os.path.join(out, f"trajectory_{tag}.csv"))
            if snapshots and k == 0:
                snap_dir = os.path.join(out, f"snapshots_{tag}")
                os.makedirs(snap_dir, exist_ok=True)
                spec = extras["spec"]
                traj.write_snapshots(snap_dir, (spec.rows, spec.cols))
            final = traj.records[-1].energy
            finals.append(final)
            if k == 0:
                energy_curves[f"s0={s0:g}"] = traj.energies()
            summary["runs"].append({"s0": s0, "seed_index": k,
                                    "final_energy": final,
                                    "reached_ground": bool(
                                        gs is not None
                                        and abs(final - gs) < 1e-9)})
        summary.setdefault("mean_final_energy", {})[f"{s0:g}"] = \
            float(np.mean(finals))
    n_stages = max(len(c) for c in energy_curves.values())
    padded = {k: np.pad(v, (0, n_stages - len(v)), constant_values=np.nan)
              for k, v in energy_curves.items()}
    plots.plot_series(os.path.join(out, "energy.png"),
                      np.arange(n_stages), padded, "stage", "energy")
    _write_csv(os.path.join(out, "final_energies.csv"),
               ["s0", "seed_index", "final_energy"],
               [(r["s0"], r["seed_index"], repr(r["final_energy"]))
                for r in summary["runs"]])
    _write_json(os.path.join(out, "summary.json"), summary)


def _schedule_for(schedule: dict, s0: float, mode: str) -> AnnealSchedule:
    steps = schedule.get("steps_per_stage")
    if steps is None:
        # about 50 neuron relaxation times per stage
        steps = max(1, round(50 / s0)) if mode == "autonomous" else 50
    return AnnealSchedule(
        t_initial=float(schedule.get("t_initial", 10.0)),
        ratio=float(schedule.get("ratio", 0.9)),
        steps_per_stage=int(steps),
        t_floor=float(schedule.get("t_floor", 0.1)),
        max_stages=int(schedule.get("max_stages", 10_000)),
    )


def _quantum_setup(cfg: ExperimentConfig):
    p = cfg.problem
    m = int(p.get("m_spins", 8))
    n = int(p.get("n_replicas", 250))
    j = float(p.get("j", 1.0))
    gz = float(p.get("gamma_z", 0.0))
    beta = float(p.get("beta", 1.0))
    return m, n, j, gz, beta


def _sample_mapping(cfg, mapping, s0, seed):
    sp = cfg.sampling
    net = trotter_map(mapping)
    spacing = int(sp.get("spacing", 30_000))
    params = _dynamics_params(cfg, seed, s0)
    return sample_run(net, params, mode="autonomous",
                      burn_in=int(sp.get("burn_in", spacing)),
                      n_samples=int(sp.get("n_samples", 200)),
                      spacing=spacing)


def cmd_quantum(cfg: ExperimentConfig, out: str, threads: int) -> None:
    """Mean z magnetization vs transverse field, with the exact thermal
    oracle column when the chain is small enough to diagonalize."""
    m, n, j, gz, beta = _quantum_setup(cfg)
    ratios = [float(r) for r in
              cfg.sampling.get("ratios", [0.05, 0.25, 0.5, 0.75, 1.0])]
    s0s = _s0_list(cfg, 1 / 12)
    oracle = None
    if m <= MAX_ED_SPINS:
        oracle = [tfim_exact(m, j, r * j, gz, beta).mz_avg for r in ratios]
    seeds = _seed_bank(cfg.master_seed, len(s0s) * len(ratios))
    tasks = [(si, ri) for si in range(len(s0s)) for ri in range(len(ratios))]

    def one(task):
        si, ri = task
        mapping = TrotterMapping(m, n, j, ratios[ri] * j, gz, beta)
        samples = _sample_mapping(cfg, mapping, s0s[si],
                                  seeds[si * len(ratios) + ri])
        obs = replica_observables(samples, mapping)
        per_sample = samples.reshape(samples.shape[0], -1).mean(axis=1)
        return obs.mz_avg, per_sample

    results = _parallel_map(one, tasks, threads)
    rows, box_rows = [], []
    mz_by_s0 = {s0: [] for s0 in s0s}
    max_dev = {s0: 0.0 for s0 in s0s}
    for (si, ri), (mz, per_sample) in zip(tasks, results):
        s0, r = s0s[si], ratios[ri]
        ov = oracle[ri] if oracle is not None else float("nan")
        dev = abs(mz - ov) if oracle is not None else float("nan")
        rows.append((repr(s0), repr(r), repr(mz), repr(ov), repr(dev)))
        mz_by_s0[s0].append(mz)
        if oracle is not None:
            max_dev[s0] = max(max_dev[s0], dev)
        box_rows.extend((repr(s0), repr(r), k, repr(float(v)))
                        for k, v in enumerate(per_sample))
    _write_csv(os.path.join(out, "mz.csv"),
               ["s0", "gamma_x_over_j", "mz", "oracle", "abs_deviation"],
               rows)
    _write_csv(os.path.join(out, "mz_samples.csv"),
               ["s0", "gamma_x_over_j", "sample", "mz"], box_rows)
    plots.plot_quantum_mz(os.path.join(out, "mz.png"), ratios, mz_by_s0,
                          oracle)
    _write_json(os.path.join(out, "summary.json"), {
        "m_spins": m, "n_replicas": n, "j": j, "gamma_z": gz, "beta": beta,
        "max_abs_deviation": {f"{s0:g}": d for s0, d in max_dev.items()},
    })
    tol = cfg.sampling.get("max_dev")
    if tol is not None and oracle is not None:
        worst = max(max_dev.values())
        if worst > float(tol):
            raise ToleranceError(
                f"max |mz - oracle| {worst:.4g} exceeds {tol}")


def cmd_quantum_corr(cfg: ExperimentConfig, out: str, threads: int) -> None:
    """Chain z-z correlation vs separation L per s0; oracle column is
    auto-enabled for chains small enough to diagonalize."""
    m, n, j, gz, beta = _quantum_setup(cfg)
    gx = float(cfg.problem.get("gamma_x", 0.5))
    s0s = _s0_list(cfg, 1 / 8)
    oracle = None
    if m <= MAX_ED_SPINS:
        oracle = tfim_exact(m, j, gx, gz, beta).correlations
    seeds = _seed_bank(cfg.master_seed, len(s0s))

    def one(si):
        mapping = TrotterMapping(m, n, j, gx, gz, beta)
        samples = _sample_mapping(cfg, mapping, s0s[si], seeds[si])
        return replica_observables(samples, mapping).correlations

    corrs = _parallel_map(one, range(len(s0s)), threads)
    ls = list(range(m))
    rows = []
    for s0, corr in zip(s0s, corrs):
        for L in ls:
            ov = repr(float(oracle[L])) if oracle is not None else ""
            rows.append((repr(s0), L, repr(float(corr[L])), ov))
    _write_csv(os.path.join(out, "corr.csv"),
               ["s0", "L", "correlation", "oracle"], rows)
    plots.plot_correlations(os.path.join(out, "corr.png"), ls,
                            dict(zip(s0s, corrs)), oracle)
    summary = {"m_spins": m, "n_replicas": n, "j": j, "gamma_x": gx,
               "gamma_z": gz, "beta": beta}
    if oracle is not None:
        summary["max_abs_deviation"] = {
            f"{s0:g}": float(np.max(np.abs(corr - oracle)))
            for s0, corr in zip(s0s, corrs)}
    _write_json(os.path.join(out, "summary.json"), summary)
    tol = cfg.sampling.get("max_dev")
    if tol is not None and oracle is not None:
        worst = max(summary["max_abs_deviation"].values())
        if worst > float(tol):
            raise ToleranceError(
                f"max |corr - oracle| {worst:.4g} exceeds {tol}")


def cmd_perf(cfg: ExperimentConfig, out: str, threads: int) -> None:
    """Throughput/power report for hardware presets or a user JSON."""
    p = cfg.problem
    if "preset_file" in p:
        hws = load_presets(p["preset_file"])
    elif "presets" in p:
        try:
            hws = [PRESETS[name] for name in p["presets"]]
        except KeyError as e:
            raise ConfigError(f"unknown preset {e.args[0]!r}; "
                              f"choose from {sorted(PRESETS)}") from e
    else:
        hws = load_presets()
    reports = [run_report(None, hw) for hw in hws]
    table = format_report_table(reports)
    print(table)
    with open(os.path.join(out, "report.txt"), "w") as f:
        f.write(table + "\n")
    _write_json(os.path.join(out, "report.json"), reports)


_COMMANDS = {
    "sample": cmd_sample,
    "anneal": cmd_anneal,
    "quantum": cmd_quantum,
    "quantum-corr": cmd_quantum_corr,
    "perf": cmd_perf,
    "validate-sk": cmd_validate_sk,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pbit",
        description="Autonomous p-bit network simulator and analysis toolkit")
    parser.add_argument("command", choices=KINDS)
    parser.add_argument("--config", required=True,
                        help="experiment config (JSON)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config master_seed")
    parser.add_argument("--out", default=None,
                        help="override the config output directory")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("PBIT_THREADS", "1")),
                        help="worker threads for independent runs")
    args = parser.parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config)
        if cfg.kind != args.command:
            raise ConfigError(
                f"config kind {cfg.kind!r} does not match command "
                f"{args.command!r}")
        if args.seed is not None:
            cfg.master_seed = args.seed
        out = args.out or cfg.out_dir or os.path.join("runs", cfg.kind)
        os.makedirs(out, exist_ok=True)
        shutil.copyfile(args.config, os.path.join(out, "config.json"))
        with open(os.path.join(out, "config_resolved.json"), "w") as f:
            f.write(cfg.serialize())
        _COMMANDS[args.command](cfg, out, max(1, args.threads))
    except ToleranceError as e:
        print(f"tolerance failure: {e}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
