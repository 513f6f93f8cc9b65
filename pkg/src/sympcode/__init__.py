"""Symplectic (stabilizer) codes over F_d: Weyl operators, channels, fidelity identities,
distillation and random-coding exponents."""

from .channels import ErrorDistribution, KrausChannel, choi, weyl_channel, weyl_error_distribution
from .codes import SymplecticCodeFamily, build_code, recovery
from .fflin import FSubspace, HyperbolicFrame, PreconditionError, hyperbolic_complete
from .fidelity import FidelityReport, entanglement_fidelity, fe_pauli_closed_form, theorem1_check
from .weyl import bell_basis, weyl

__version__ = "0.1.0"

__all__ = [
    "ErrorDistribution",
    "FSubspace",
    "FidelityReport",
    "HyperbolicFrame",
    "KrausChannel",
    "PreconditionError",
    "SymplecticCodeFamily",
    "bell_basis",
    "build_code",
    "choi",
    "entanglement_fidelity",
    "fe_pauli_closed_form",
    "hyperbolic_complete",
    "recovery",
    "theorem1_check",
    "weyl",
    "weyl_channel",
    "weyl_error_distribution",
]
