"""Replicator dynamics on rescaled zero-sum polymatrix games and time-evolving systems."""

from .analysis import (AnalysisReport, RecurrenceStats, SectionCrossing, analyze,
                       constant_of_motion, poincare_section, recurrence_stats, regret,
                       regret_all, time_average, time_average_utility, weighted_kl)
from .dynamics import (IntegrationError, IntegratorConfig, Trajectory, divergence_estimate,
                       from_z, integrate, replicator_field, to_z, z_field)
from .equilibrium import (NashResult, NotRescaledZeroSumError, SolverError, compute_nash,
                          is_nash, verify_nash)
from .game import (EdgeGame, GameError, PolymatrixGame, SelfLoop, utilities, utility,
                   validate, verify_rescaled_zero_sum)
from .presets import (build_butterfly, build_chain, build_generalized_rps_reduced,
                      matching_pennies, rps_matrix)
from .reduction import (Coupling, SystemState, TimeEvolvingSystem, build_generalized_rps_system,
                        raw_field, reduce_to_polymatrix)

__version__ = "0.1.0"
