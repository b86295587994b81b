"""Post-processing of Ising samples by single- and multi-qubit correction."""

from .bench import BenchConfig, ComparisonOutcome, compare_methods, robustness_report, run_suite, sign_test_p
from .correction import TunnelPartition, influence, mqc, reduce, rmqc, sqc, sqc_batch, sub_tunnels, tunnel_partition
from .errors import ContractError, DimensionError, IsingError, ParseError
from .formats import SuiteManifest, read_instance, read_samples, write_instance, write_samples
from .ising import IsingModel, energies, energy, energy_delta_flip, flip, validate
from .problems import ChimeraSpec, CoefficientClass, chimera_edges, chimera_instance, generate_instance
from .sampler import CorrelationMode, SamplerConfig, brute_force_ground, draw_samples, is_local_minimum

__version__ = "0.1.0"
