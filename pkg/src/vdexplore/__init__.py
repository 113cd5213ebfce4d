"""Value-dependent exploration for Gaussian policies in sparse-reward bandits."""

from .gauss_math import ClipBounds, clipped_gaussian_entropy, erf, gaussian_interval_mass
from .mdp_theory import QProfile, hdr_bound_check, hdr_interval, mdp_optimal_sigma, mdp_value
from .variance_theory import (
    RewardInterval,
    batch_success_probability,
    inverse_value_sigma,
    optimal_sigma_closed,
    optimal_sigma_numeric,
    policy_value,
)

__version__ = "0.1.0"
