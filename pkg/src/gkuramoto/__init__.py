"""Coupled phase oscillators with offset-plus-sine coupling.

Simulation (direct ODE integration, mean-field and sparse-network forms),
stationary-state analysis (self-consistency roots, linear stability,
reduced-field dynamics), hysteresis sweep harnesses, and network
generation utilities for studying abrupt synchronization transitions under
heterogeneous coupling strengths.
"""

from .errors import UsageError, NumericalError, ConfigError
from .distributions import (CouplingDistribution, TruncGaussian, Uniform,
                            TruncPowerLaw, Empirical, distribution_from_dict)
from .model import (CouplingParams, PhaseState, MeanField, Network, RunConfig,
                    SimResult, OrderParameter, order_parameter, simulate,
                    random_phases)
from .selfconsistency import (StationaryState, LockPartition, lock_partition,
                              residual, find_states, boundary_c0)
from .stability import (critical_c0, incoherent_modes, locked_kernel,
                        char_residual, classify_stability, oa_evolve,
                        incoherent_field, field_from_kernel)
from .hysteresis import (SweepConfig, HysteresisCurve, PlaneScan, sweep,
                         plane_scan, detect_hysteresis)
from .networks import (Graph, er_generate, weight_scheme_I, weight_scheme_II,
                       degree_to_strength, degree_preserving_shuffle,
                       configuration_graph, load_edge_list, save_edge_list,
                       graph_summary)

__version__ = "0.1.0"
