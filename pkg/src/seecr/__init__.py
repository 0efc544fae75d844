"""Secrecy-energy-efficient beamforming for an underlay MISO link.

A transmitter shapes its covariance to maximize secrecy rate per watt of
consumed power while keeping a harvesting receiver powered, a primary
receiver unharmed, and the power amplifier within budget. The solver
couples a ratio (Dinkelbach) outer iteration with convexified inner
subproblems run on a self-contained barrier method; an exhaustive
rank-two grid serves as an optimizer-free reference for two antennas.
"""

from .backend import BACKEND, NUMBA_ENABLED
from .baselines import power_min, rate_max
from .barrier import (LinearizedSubproblem, Phase1Result, SolverReport,
                      minimize_trace, phase1_feasible_point, solve_linearized)
from .certification import CertReport, certify
from .hermitian import HermitianMatrix, StructuralError, eig_hermitian, \
    numeric_rank, quadratic_form
from .model import (ChannelSet, ContractViolationError, FeasibilityReport,
                    SystemParams, db_to_linear, dump_instance, harvested_energy,
                    interference_leakage, is_feasible, linear_to_db,
                    load_instance, params_from_dict, secrecy_rate, see,
                    transmit_power)
from .optimizer import InnerIterate, OuterIterate, Solution, SolveTrace, \
    maximize_see
from .oracle import (GridSpec, OracleResult, grid_feasibility, grid_search,
                     rank_two_candidate)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "NUMBA_ENABLED", "CertReport", "ChannelSet",
    "ContractViolationError", "FeasibilityReport", "GridSpec",
    "HermitianMatrix", "InnerIterate", "LinearizedSubproblem",
    "OracleResult", "OuterIterate", "Phase1Result", "Solution",
    "SolveTrace", "SolverReport", "StructuralError", "SystemParams",
    "certify", "db_to_linear", "dump_instance", "eig_hermitian",
    "grid_feasibility", "grid_search", "harvested_energy",
    "interference_leakage", "is_feasible", "linear_to_db", "load_instance",
    "maximize_see", "minimize_trace", "numeric_rank", "params_from_dict",
    "phase1_feasible_point", "power_min", "quadratic_form",
    "rank_two_candidate", "rate_max", "secrecy_rate", "see",
    "solve_linearized", "transmit_power", "__version__",
]
