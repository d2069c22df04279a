"""Elliptic-background solutions of the derivative nonlinear Schrodinger equation.

The main entry points are :func:`derive_background` for the genus-one seed,
:func:`make_node` for spectral data, :func:`build_kit` with
:func:`uN_derivative_free` for dressed solutions and the
:mod:`asymptotics` helpers for their large-time behaviour.
"""

from .asymptotics import build_frame, build_region_frame, sigma_cauchy_det, u_asym_line, u_asym_region
from .background import BackgroundParams, derive_background, log_u0, u0
from .dressing import DressingSpec, bt0, bt_inf
from .elliptic_kernel import ScaledComplex, build_lattice, sigma, wp, wp_prime, zeta
from .errors import BranchError, ConfigurationError, DnlsError, HypothesisError, PoleError, SingularityError
from .sigma_forms import build_kit, uN_derivative_form, uN_derivative_free, uN_modulus
from .spectral import make_node

__version__ = "0.1.0"

__all__ = [
    "BackgroundParams",
    "BranchError",
    "ConfigurationError",
    "DnlsError",
    "DressingSpec",
    "HypothesisError",
    "PoleError",
    "ScaledComplex",
    "SingularityError",
    "bt0",
    "bt_inf",
    "build_frame",
    "build_kit",
    "build_lattice",
    "build_region_frame",
    "derive_background",
    "log_u0",
    "make_node",
    "sigma",
    "sigma_cauchy_det",
    "u0",
    "uN_derivative_form",
    "uN_derivative_free",
    "uN_modulus",
    "u_asym_line",
    "u_asym_region",
    "wp",
    "wp_prime",
    "zeta",
]
