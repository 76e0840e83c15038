"""Exact and Monte Carlo checks of the protocol's secrecy and of its supporting bounds."""

from .codes import CodeEntropyReport, code_entropy_experiment, restricted_entropy
from .leakage import LeakageReport, exact_leakage, monte_carlo_leakage
from .privacy import amplification_profile, toeplitz_collision_probability
from .provisioning import bob_provisioning, eve_erasure_provisioning, provisioning_probability

__all__ = [
    "CodeEntropyReport",
    "LeakageReport",
    "amplification_profile",
    "bob_provisioning",
    "code_entropy_experiment",
    "eve_erasure_provisioning",
    "exact_leakage",
    "monte_carlo_leakage",
    "provisioning_probability",
    "restricted_entropy",
    "toeplitz_collision_probability",
]
