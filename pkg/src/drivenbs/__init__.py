"""Simulation and analysis toolkit for driven boson sampling.

Builds the layered photon-injection network, computes exact permanent-based
output distributions for small instances, and evaluates the PDC-source rate
and heralding-noise formulas in closed form and by Monte Carlo.
"""
from ._backend import NAME as backend
from .errors import (ConfigurationError, ConservationError, DimensionError, DomainError,
                     DrivenBSError, NumericError, SizeLimitError)
from .fock import OutcomeDistribution, full_distribution, outcome_weight, sample_outcomes
from .linalg import gram_matrix, haar_unitary, permanent_naive, permanent_ryser
from .montecarlo import TrialRecord, TrialSummary, geometric_photon_count, simulate_trials
from .network import (BeamSplitterLayer, EvolutionMatrix, GenerationNetwork, block,
                      coupling_matrix, evolution_matrix, random_network, submatrix)
from .rng import RandomSeed
from .source import (PdcSource, Scheme, SchemeParams, asymptotic_pmax, lambda_opt,
                     min_layers_for_unit_snr, min_modes_for_unit_snr, p_single,
                     p_single_given_herald, p_vacuum, snr, success_probability)

__version__ = "0.1.0"
