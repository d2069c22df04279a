"""Uniform spectral parameter, Lax pair and fundamental solution matrix.

A point ``z`` of the period cell parameterizes the spectral curve
``y^2 = P(lambda)``.  Its companions are ``zhat = -kappa - rho - z``
(same ``lambda``, opposite ``y``) and ``zcheck = kappa + rho - conj(z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import elliptic_kernel as ek
from .background import BackgroundParams, nu as nu_fn
from .elliptic_kernel import ScaledComplex
from .errors import BranchError, SingularityError

__all__ = [
    "SpectralNode",
    "LaxMatrices",
    "make_node",
    "spectral_poly_P",
    "lax_U",
    "lax_V",
    "lax_matrices",
    "fundamental_matrix",
    "log_fundamental_matrix",
    "phi_vector",
    "log_phi_vector",
    "Ij_factor",
    "log_I0",
]

SIGMA3 = np.diag([1.0, -1.0]).astype(complex)


def _wrap(x):
    """Wrap an angle into (-pi, pi]."""
    return x - 2.0 * math.pi * np.ceil((x - math.pi) / (2.0 * math.pi))


BRANCH_CUT_TOL = 1e-9


def _log_d0(w, bg):
    """Logarithm of ``d0(w) = sqrt(sigma(rho+w) sigma(w+2kappa+rho))``.

    The square root takes the argument of the product in ``[-pi, pi)``.
    Products within ``BRANCH_CUT_TOL`` of the negative real axis go on the
    lower lip, so the choice never depends on rounding noise.
    """
    lat = bg.lat
    s = ek.log_sigma(bg.rho + w, lat) + ek.log_sigma(w + 2 * bg.kappa + bg.rho, lat)
    arg = _wrap(s.imag)
    if arg > math.pi - BRANCH_CUT_TOL:
        arg -= 2.0 * math.pi
    return complex(0.5 * s.real + 0.5j * arg)


def Ij_factor(zj, bg: BackgroundParams):
    """Case factor ``I_j`` attached to node ``zj`` (depends on the real-part class)."""
    k, r, w1, z1 = bg.kappa, bg.rho, bg.lat.omega1, bg.zeta_w1
    zc = np.conj(zj)
    if bg.re_class == "ZZ":
        return -1.0 + 0j
    if bg.re_class == "ZW":
        return complex(np.exp(-2 * z1 * (k + r - w1 - zc)))
    return complex(-np.exp(-2 * z1 * (2 * k + 2 * r - 4 * w1 - 2 * zc)))


def log_I0(xi, bg: BackgroundParams):
    """Logarithm of ``I_0(xi)``: 0, ``2 zeta(w1) xi`` or ``4 zeta(w1) xi`` by class."""
    factor = {"ZZ": 0.0, "ZW": 2.0, "WW": 4.0}[bg.re_class]
    return factor * bg.zeta_w1 * np.asarray(xi)


@dataclass(frozen=True)
class SpectralNode:
    """One uniform parameter with all derived spectral data.

    ``e_xi`` and ``e_t`` are the ``xi``- and ``t``-coefficients of ``log E(xi,t;z)``;
    ``eh_xi``, ``eh_t`` the same for ``zhat``.
    """

    z: complex
    zhat: complex
    zcheck: complex
    lam: complex
    y: complex
    log_d0_z: complex
    log_d0_zhat: complex
    Ij: complex
    beta: complex
    velocity: float
    e_xi: complex
    e_t: complex
    eh_xi: complex
    eh_t: complex
    y_matches_f: bool
    d0_flipped: bool = False

    @property
    def d0_z(self):
        return complex(np.exp(self.log_d0_z))

    @property
    def d0_zhat(self):
        return complex(np.exp(self.log_d0_zhat))

    @property
    def period(self):
        """Temporal period ``pi / (8 |Im y|)`` of a stationary node."""
        return math.pi / (8.0 * abs(self.y.imag))


def _lambda_log(z, log_d0_z, log_d0_zhat, bg):
    lat, k, r = bg.lat, bg.kappa, bg.rho
    ls = ek.log_sigma
    return (
        ls(z - k, lat) + ls(r, lat) - math.log(2.0) - bg.log_sqrt_nu0
        - ls(r + z, lat) - ls(-r - k, lat) - ls(k, lat)
        + log_d0_z - log_d0_zhat
    )


def make_node(z, bg: BackgroundParams) -> SpectralNode:
    """Build the :class:`SpectralNode` for uniform parameter ``z``.

    Both square roots in ``d0`` start on the principal branch.  ``lambda`` is
    computed from the sigma quotient and checked against ``lambda^2 = mu(z)``.
    Since ``lambda`` and the fundamental matrix depend on the branch only
    through the ratio ``d0(z)/d0(zhat)``, ``d0(z)`` is negated when needed to
    put ``lambda`` in the closed right half plane (``d0_flipped`` records it).
    Reversing that choice is the same as ``alpha -> -alpha``.
    """
    z = complex(z)
    lat, k, r = bg.lat, bg.kappa, bg.rho
    zhat = -k - r - z
    zcheck = k + r - z.conjugate()
    if abs(complex(ek.sigma(z - zhat, lat).to_complex())) < 1e-12:
        raise SingularityError("degenerate node: z and zhat are congruent modulo the lattice", z)
    ld_z = _log_d0(z, bg)
    ld_zh = _log_d0(zhat, bg)
    lam = -complex(np.exp(_lambda_log(z, ld_z, ld_zh, bg)))
    # Only the relative sign of d0(z) and d0(zhat) matters; fix it so that
    # lambda lies in the right half plane; on the imaginary axis (up to
    # rounding) the upper half is used.
    on_axis = abs(lam.real) <= 1e-12 * abs(lam)
    flipped = (lam.imag < 0) if on_axis else (lam.real < 0)
    if flipped:
        ld_z = ld_z + 1j * math.pi
        lam = -lam
    mu_z = 0.25j * (complex(ek.zeta(k + z, lat)) - complex(ek.zeta(z + r, lat)) + bg.zeta_rk - bg.zeta_2k)
    if abs(lam * lam - mu_z) > 1e-8 * (1.0 + abs(mu_z)):
        raise BranchError(f"lambda^2 = {lam * lam} does not match mu(z) = {mu_z}")
    y = 1j / 16.0 * (complex(ek.wp(z + r, lat)) - complex(ek.wp(z + k, lat)))

    # y(z) = f(lambda(z)) with f evaluated at xi = z
    nu_z = complex(bg.nu0 * np.exp(
        ek.log_sigma(z + r, lat) + ek.log_sigma(z - r, lat) + 2 * ek.log_sigma(k, lat)
        - ek.log_sigma(z + k, lat) - ek.log_sigma(z - k, lat) - 2 * ek.log_sigma(r, lat)
    ))
    l2 = lam * lam
    f = -1j * l2 * l2 + 0.5j * (bg.s1 + nu_z) * l2 + 1j * bg.alpha4
    y_matches_f = abs(y - f) <= abs(y + f)

    zw1 = bg.zeta_w1 / lat.omega1
    beta = (k + r + 2 * z) * zw1 - complex(ek.zeta(k + z, lat)) - complex(ek.zeta(r + z, lat))
    velocity = -16.0 * y.real / beta.real if beta.real != 0 else math.inf

    def ecoef(w, yw):
        return (
            0.5 * (complex(ek.zeta(k + w, lat)) + complex(ek.zeta(r + w, lat)) - bg.zeta_rk - bg.zeta_2k),
            -8.0 * (1j * bg.alpha4 + yw),
        )

    e_xi, e_t = ecoef(z, y)
    eh_xi, eh_t = ecoef(zhat, -y)
    return SpectralNode(
        z=z,
        zhat=zhat,
        zcheck=zcheck,
        lam=lam,
        y=y,
        log_d0_z=ld_z,
        log_d0_zhat=ld_zh,
        Ij=Ij_factor(z, bg),
        beta=beta,
        velocity=float(velocity),
        e_xi=e_xi,
        e_t=e_t,
        eh_xi=eh_xi,
        eh_t=eh_t,
        y_matches_f=bool(y_matches_f),
        d0_flipped=bool(flipped),
    )


def spectral_poly_P(lam, bg: BackgroundParams):
    """``P(lambda) = -lambda^8 + s1 lambda^6 - s2 lambda^4 + s3 lambda^2 - s4``."""
    l2 = np.asarray(lam) ** 2
    out = -(l2**4) + bg.s1 * l2**3 - bg.s2 * l2**2 + bg.s3 * l2 - bg.s4
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LaxMatrices:
    U: np.ndarray
    V: np.ndarray


def _Q(u):
    u = complex(u)
    return np.array([[0, 1j * u], [1j * u.conjugate(), 0]], dtype=complex)


def lax_U(u, lam):
    """Spatial Lax matrix ``U = -2i sigma3 lambda^2 + 2 Q lambda``."""
    return -2j * SIGMA3 * lam * lam + 2.0 * _Q(u) * lam


def lax_V(u, u_x, lam):
    """Temporal Lax matrix ``V = (4 lambda^2 + 2 Q^2) U + 2i sigma3 Q_x lambda``."""
    Q = _Q(u)
    Qx = _Q(u_x)
    return (4 * lam * lam * np.eye(2) + 2.0 * Q @ Q) @ lax_U(u, lam) + 2j * SIGMA3 @ Qx * lam


def lax_matrices(u, u_x, lam) -> LaxMatrices:
    return LaxMatrices(lax_U(u, lam), lax_V(u, u_x, lam))


def log_fundamental_matrix(xi, t, node: SpectralNode, bg: BackgroundParams):
    """Entrywise logarithm of the fundamental matrix, shape ``(..., 2, 2)``."""
    lat, k = bg.lat, bg.kappa
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    ls = ek.log_sigma
    z, zh = node.z, node.zhat
    lE = node.e_xi * xi + node.e_t * t
    lEh = node.eh_xi * xi + node.eh_t * t
    lF = bg.F_xi * xi + 16j * bg.alpha4 * t
    den_p = np.asarray(ls(xi - k, lat))
    den_m = np.asarray(ls(-xi - k, lat))
    a11 = np.asarray(ls(z - xi, lat)) - den_p + node.log_d0_z + lE
    a12 = np.asarray(ls(zh - xi, lat)) - den_p + node.log_d0_zhat + lEh
    a21 = 0.5j * math.pi + np.asarray(ls(zh + xi, lat)) - den_m + node.log_d0_zhat + lE + lF
    a22 = 0.5j * math.pi + np.asarray(ls(z + xi, lat)) - den_m + node.log_d0_z + lEh + lF
    out = np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)
    return out


def fundamental_matrix(xi, t, node: SpectralNode, bg: BackgroundParams) -> ScaledComplex:
    """Fundamental solution matrix of the Lax pair at ``lambda(z)``."""
    return ScaledComplex.from_log(log_fundamental_matrix(xi, t, node, bg))


def _logaddexp(a, b):
    m = np.maximum(a.real, b.real)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return m + np.log(np.exp(a - m) + np.exp(b - m))


def log_phi_vector(xi, t, node: SpectralNode, alpha, bg: BackgroundParams):
    """Logarithm of ``phi = column1 + alpha * column2``, shape ``(..., 2)``."""
    L = log_fundamental_matrix(xi, t, node, bg)
    alpha = complex(alpha)
    if alpha == 0:
        return L[..., :, 0]
    la = np.log(alpha)
    return _logaddexp(L[..., :, 0], L[..., :, 1] + la)


def phi_vector(xi, t, node: SpectralNode, alpha, bg: BackgroundParams) -> ScaledComplex:
    """Lax eigenvector ``phi = column1 + alpha * column2`` of the fundamental matrix."""
    return ScaledComplex.from_log(log_phi_vector(xi, t, node, alpha, bg))
