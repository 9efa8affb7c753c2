"""Autonomous (sequencerless) p-bit network simulator and analysis toolkit."""

from .network import CouplingNetwork, energy, random_state
from .lut import ActivationLut, AutonomousParams, lut_build
from .rng import PrngStreams, prng_next, LFSR32, XOSHIRO128PLUS
from .dynamics import (autonomous_step, checkerboard_sweep, compute_inputs,
                       gibbs_sweep)
from .problems import (LatticeSpec, TrotterMapping, lattice_from_image,
                       sk_random, trotter_map)
from .oracles import (DistributionTable, QuantumObservables, boltzmann_exact,
                      empirical_distribution, euclidean_distance,
                      free_energy_exact, free_energy_from_samples,
                      replica_observables, tfim_exact)
from .anneal import AnnealSchedule, RunTrajectory, run_anneal, sample_run
from .perf import (HardwareParams, PRESETS, autonomous_advantage,
                   flips_autonomous, flips_sequenced, run_report)

__version__ = "0.1.0"
