"""Security thresholds and key rates for the SARG04 and BB84 protocols.

Submodules
----------
entropy
    Binary entropy, Bell-diagonal states and one-way key rates.
geometry
    The four SARG04 states, the filtering operator and initial error states.
distill
    Two-way B/P-step recurrences, tolerable bit error rates and sequence search.
eigen
    A small Jacobi eigensolver for Hermitian matrices.
attack
    Intercept-resend attack bounds from generalized eigenvalue problems.
decoy
    Decoy-state key rates, optimal mean photon numbers and secure distances.
presets
    Named channel parameter sets.
cli
    The ``sargqkd`` command.
"""
__version__ = "0.1.0"

from .errors import DegenerateInputError, DomainError, NoSecureRegionError
from .entropy import BellDiag, cond_entropy_z_given_x, h2, rate_one_way
from .distill import (b_step, evolve, p_step, search_best_sequence, tolerable_ber,
                      tolerable_ber_many)
from .attack import induced_ber, min_ber_over_states, optimal_povm
from .decoy import (ChannelParams, optimal_mu, rate_decoy, rate_gllp, secure_distance,
                    upper_bound_distance)
from .presets import BRANCIARD, GYS

__all__ = [
    "__version__", "DomainError", "DegenerateInputError", "NoSecureRegionError",
    "BellDiag", "h2", "cond_entropy_z_given_x", "rate_one_way",
    "b_step", "p_step", "evolve", "tolerable_ber", "tolerable_ber_many",
    "search_best_sequence", "min_ber_over_states", "optimal_povm", "induced_ber",
    "ChannelParams", "rate_decoy", "rate_gllp", "optimal_mu", "secure_distance",
    "upper_bound_distance", "GYS", "BRANCIARD",
]
