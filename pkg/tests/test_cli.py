import json
import os

import numpy as np
import pytest

from pbit.cli import ConfigError, ExperimentConfig, build_problem, main


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return path


def run(tmp_path, command, doc, extra=()):
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "out"
    code = main([command, "--config", str(cfg), "--out", str(out), *extra])
    return code, out, cfg


class TestConfig:
    def test_round_trip(self):
        cfg = ExperimentConfig(kind="sample", problem={"kind": "sk"},
                               dynamics={"s0": 0.25}, master_seed=7)
        assert ExperimentConfig.parse(cfg.serialize()) == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.parse('{"kind": "sample", "extra": 1}')

    def test_bad_json_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.parse("{not json")
        with pytest.raises(ConfigError):
            ExperimentConfig.parse('["kind"]')

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(kind="train")

    def test_build_problem_kinds(self, tmp_path):
        net, extras = build_problem({"kind": "sk", "n_spins": 6, "seed": 2})
        assert net.n_spins == 6
        net, extras = build_problem({"kind": "lattice", "rows": 4, "cols": 5})
        assert net.n_spins == 20
        assert "colors" in extras and "target" in extras
        net, extras = build_problem({"kind": "trotter", "m_spins": 4,
                                     "n_replicas": 6, "beta": 2.0})
        assert net.n_spins == 24
        path = tmp_path / "net.json"
        net2, _ = build_problem({"kind": "sk", "n_spins": 5, "seed": 0})
        net2.save_json(path)
        net3, _ = build_problem({"kind": "file", "path": str(path)})
        assert net3.n_spins == 5
        with pytest.raises(ConfigError):
            build_problem({"kind": "file"})
        with pytest.raises(ConfigError):
            build_problem({"kind": "qubo"})


class TestExitCodes:
    def test_kind_mismatch_is_config_error(self, tmp_path):
        code, _, _ = run(tmp_path, "anneal", {"kind": "sample"})
        assert code == 2

    def test_missing_config_file(self, tmp_path):
        code = main(["sample", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "out")])
        assert code == 2

    def test_invalid_config_contents(self, tmp_path):
        code, _, _ = run(tmp_path, "sample",
                         {"kind": "sample", "problem": {"kind": "qubo"}})
        assert code == 2

    def test_tolerance_failure_is_exit_3(self, tmp_path):
        doc = {"kind": "validate-sk",
               "problem": {"kind": "sk", "n_spins": 8, "seed": 1},
               "dynamics": {"s0": 1 / 12},
               "sampling": {"ensembles": 200, "ed_ratio_max": 1e-6,
                            "fe_rel_max": None}}
        code, _, _ = run(tmp_path, "validate-sk", doc)
        assert code == 3


class TestSampleCommand:
    def test_outputs(self, tmp_path):
        doc = {"kind": "sample",
               "problem": {"kind": "sk", "n_spins": 8, "seed": 3},
               "dynamics": {"s0": 0.25},
               "sampling": {"n_samples": 2000, "burn_in": 500},
               "master_seed": 5}
        code, out, cfg = run(tmp_path, "sample", doc)
        assert code == 0
        for name in ("samples.csv", "energies.csv", "summary.json",
                     "distribution_empirical.csv", "distribution_exact.csv",
                     "distribution.png", "config.json",
                     "config_resolved.json"):
            assert (out / name).exists(), name
        # the input config is copied verbatim
        assert (out / "config.json").read_bytes() == cfg.read_bytes()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_samples"] == 2000
        assert summary["euclidean_distance"] < 1.0

    def test_deterministic_outputs(self, tmp_path):
        doc = {"kind": "sample",
               "problem": {"kind": "sk", "n_spins": 6, "seed": 1},
               "sampling": {"n_samples": 500}}
        cfg = write_config(tmp_path, doc)
        outs = []
        for k in range(2):
            out = tmp_path / f"out{k}"
            assert main(["sample", "--config", str(cfg),
                         "--out", str(out)]) == 0
            outs.append(out)
        for name in ("samples.csv", "energies.csv", "summary.json"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_seed_override_changes_samples(self, tmp_path):
        doc = {"kind": "sample",
               "problem": {"kind": "sk", "n_spins": 6, "seed": 1},
               "sampling": {"n_samples": 200}}
        cfg = write_config(tmp_path, doc)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["sample", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["sample", "--config", str(cfg), "--out", str(out2),
                     "--seed", "99"]) == 0
        assert (out1 / "samples.csv").read_bytes() != \
            (out2 / "samples.csv").read_bytes()


class TestValidateSkCommand:
    def test_small_run_passes(self, tmp_path):
        doc = {"kind": "validate-sk",
               "problem": {"kind": "sk", "n_spins": 8, "seed": 1},
               "dynamics": {"s0": 1 / 12},
               "sampling": {"ensembles": 400, "n_records": 10,
                            "record_spacing": 5, "ed_ratio_max": 5.0,
                            "fe_rel_max": 0.25},
               "master_seed": 7}
        code, out, _ = run(tmp_path, "validate-sk", doc)
        assert code == 0
        for name in ("ed.csv", "fe.csv", "ed.png", "fe.png", "summary.json"):
            assert (out / name).exists(), name
        summary = json.loads((out / "summary.json").read_text())
        assert summary["ed_autonomous_final"] <= 5.0 * summary["ed_gibbs_final"]
        ed_lines = (out / "ed.csv").read_text().strip().splitlines()
        assert ed_lines[0] == "step,ed_autonomous,ed_gibbs"
        assert len(ed_lines) == 11

    def test_non_sk_problem_rejected(self, tmp_path):
        doc = {"kind": "validate-sk", "problem": {"kind": "lattice"}}
        code, _, _ = run(tmp_path, "validate-sk", doc)
        assert code == 2


class TestAnnealCommand:
    def test_outputs_and_snapshots(self, tmp_path):
        doc = {"kind": "anneal",
               "problem": {"kind": "lattice", "rows": 12, "cols": 12},
               "dynamics": {"s0_list": [0.25]},
               "schedule": {"t_initial": 10.0, "ratio": 0.9, "t_floor": 0.1,
                            "steps_per_stage": 140},
               "sampling": {"n_seeds": 2},
               "master_seed": 3}
        code, out, _ = run(tmp_path, "anneal", doc)
        assert code == 0
        for name in ("final_energies.csv", "energy.png", "summary.json",
                     "trajectory_s0_0.25_seed0.csv",
                     "trajectory_s0_0.25_seed1.csv"):
            assert (out / name).exists(), name
        snaps = list((out / "snapshots_s0_0.25_seed0").glob("*.pgm"))
        assert snaps
        summary = json.loads((out / "summary.json").read_text())
        assert summary["ground_state_energy"] is not None
        assert len(summary["runs"]) == 2
        assert all(r["final_energy"] >= summary["ground_state_energy"] - 1e-9
                   for r in summary["runs"])


class TestQuantumCommands:
    def quantum_doc(self):
        return {"kind": "quantum",
                "problem": {"kind": "trotter", "m_spins": 4, "n_replicas": 8,
                            "j": 1.0, "gamma_z": 0.2, "beta": 2.0},
                "dynamics": {"s0_list": [1 / 12]},
                "sampling": {"ratios": [0.5, 1.0], "n_samples": 50,
                             "spacing": 200, "burn_in": 200},
                "master_seed": 1}

    def test_quantum_outputs(self, tmp_path):
        code, out, _ = run(tmp_path, "quantum", self.quantum_doc())
        assert code == 0
        for name in ("mz.csv", "mz_samples.csv", "mz.png", "summary.json"):
            assert (out / name).exists(), name
        lines = (out / "mz.csv").read_text().strip().splitlines()
        assert lines[0] == "s0,gamma_x_over_j,mz,oracle,abs_deviation"
        assert len(lines) == 3  # 1 s0 x 2 grid points
        summary = json.loads((out / "summary.json").read_text())
        assert "max_abs_deviation" in summary

    def test_thread_fanout_is_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, self.quantum_doc())
        outs = []
        for k, threads in enumerate(("1", "2")):
            out = tmp_path / f"out{k}"
            assert main(["quantum", "--config", str(cfg), "--out", str(out),
                         "--threads", threads]) == 0
            outs.append(out)
        assert (outs[0] / "mz.csv").read_bytes() == \
            (outs[1] / "mz.csv").read_bytes()

    def test_quantum_corr_outputs(self, tmp_path):
        doc = {"kind": "quantum-corr",
               "problem": {"kind": "trotter", "m_spins": 4, "n_replicas": 8,
                           "j": 1.0, "gamma_x": 0.5, "beta": 2.0},
               "dynamics": {"s0_list": [1 / 8, 1 / 2]},
               "sampling": {"n_samples": 50, "spacing": 200, "burn_in": 200}}
        code, out, _ = run(tmp_path, "quantum-corr", doc)
        assert code == 0
        for name in ("corr.csv", "corr.png", "summary.json"):
            assert (out / name).exists(), name
        lines = (out / "corr.csv").read_text().strip().splitlines()
        assert lines[0] == "s0,L,correlation,oracle"
        assert len(lines) == 1 + 2 * 4  # 2 s0 values x L = 0..3


class TestPerfCommand:
    def test_default_presets(self, tmp_path):
        code, out, _ = run(tmp_path, "perf", {"kind": "perf"})
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report) == 5
        text = (out / "report.txt").read_text()
        assert "hitachi" in text and "mtj_projected" in text

    def test_named_presets(self, tmp_path):
        doc = {"kind": "perf", "problem": {"presets": ["hitachi"]}}
        code, out, _ = run(tmp_path, "perf", doc)
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report) == 1
        assert report[0]["power_w"] == pytest.approx(0.05, rel=0.02)

    def test_unknown_preset(self, tmp_path):
        doc = {"kind": "perf", "problem": {"presets": ["cray"]}}
        code, _, _ = run(tmp_path, "perf", doc)
        assert code == 2

    def test_preset_file(self, tmp_path):
        hw_path = tmp_path / "hw.json"
        hw_path.write_text(json.dumps(
            {"name": "lab", "n_spins": 100, "n_parallel": 10,
             "tau_clock": 1e-9}))
        doc = {"kind": "perf", "problem": {"preset_file": str(hw_path)}}
        code, out, _ = run(tmp_path, "perf", doc)
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report[0]["name"] == "lab"
        assert report[0]["flips_per_second"] == pytest.approx(1e10)


class TestThreadsEnv:
    def test_env_default_threads(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PBIT_THREADS", "2")
        doc = {"kind": "perf", "problem": {"presets": ["hitachi"]}}
        code, _, _ = run(tmp_path, "perf", doc)
        assert code == 0
