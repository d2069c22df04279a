"""N-fold Darboux-Backlund transformations of the DNLS equation.

Two routes are provided.  ``bt0`` expands the Darboux matrix at
``lambda = 0`` and needs an ``x``-derivative, which is taken numerically on
purpose: this module is the slow reference against which the sigma-function
closed forms are tested.  ``bt_inf`` expands at infinity and is purely
algebraic.

Eigenvectors enter every formula only through combinations that are
invariant under ``phi_i -> c_i phi_i``, so each vector may be rescaled
independently before the linear algebra.  That is how the huge dynamic range
of the elliptic eigenfunctions is tamed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .background import BackgroundParams, log_u0
from .errors import SingularityError
from .spectral import SpectralNode, log_phi_vector

__all__ = [
    "DressingSpec",
    "MMatrixData",
    "build_M",
    "bt0",
    "bt_inf",
    "bt_inf_modulus",
    "unimodular_factor",
    "normalized_phis",
    "equivalence_report",
    "RESONANCE_TOL",
]

RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class DressingSpec:
    """Spectral nodes and combination coefficients of one dressing."""

    nodes: tuple
    alphas: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "alphas", tuple(complex(a) for a in self.alphas))
        if len(self.nodes) != len(self.alphas):
            raise ValueError("nodes and alphas must have the same length")

    @property
    def N(self):
        return len(self.nodes)

    @property
    def lambdas(self):
        return np.array([n.lam for n in self.nodes], dtype=complex)


@dataclass(frozen=True)
class MMatrixData:
    entries: np.ndarray
    condition: np.ndarray = field(default=None)


def _check_resonance(lambdas):
    lam = np.asarray(lambdas, dtype=complex)
    lc = np.conj(lam)[None, :]
    li = lam[:, None]
    if np.any(np.abs(lc - li) < RESONANCE_TOL) or np.any(np.abs(lc + li) < RESONANCE_TOL):
        raise SingularityError("resonant spectrum: lambda_j* = +-lambda_i")


def build_M(phis, lambdas) -> MMatrixData:
    """Assemble ``M_ij = (phi_j^H phi_i/(l_j* - l_i) - phi_j^H s3 phi_i/(l_j* + l_i)) l_i l_j*``.

    Parameters
    ----------
    phis : ndarray, shape (..., N, 2)
        Eigenvectors, one row per node.
    lambdas : ndarray, shape (N,)
    """
    phis = np.asarray(phis, dtype=complex)
    lam = np.asarray(lambdas, dtype=complex)
    _check_resonance(lam)
    a = phis[..., :, 0]
    b = phis[..., :, 1]
    # element [i, j] uses phi_i and conj(phi_j)
    dot = a[..., :, None] * np.conj(a[..., None, :]) + b[..., :, None] * np.conj(b[..., None, :])
    dot3 = a[..., :, None] * np.conj(a[..., None, :]) - b[..., :, None] * np.conj(b[..., None, :])
    li = lam[:, None]
    lj = np.conj(lam)[None, :]
    M = (dot / (lj - li) - dot3 / (lj + li)) * li * lj
    cond = np.linalg.cond(M) if M.shape[-1] else None
    return MMatrixData(M, cond)


def normalized_phis(xi, t, spec: DressingSpec, bg: BackgroundParams):
    """Eigenvectors ``phi_i(xi,t)`` each divided by its largest component modulus.

    Returns an array of shape ``(..., N, 2)``.
    """
    logs = [log_phi_vector(xi, t, n, a, bg) for n, a in zip(spec.nodes, spec.alphas)]
    L = np.stack(logs, axis=-2)
    m = np.max(L.real, axis=-1, keepdims=True)
    return np.exp(L - m)


def _solve(M, rhs):
    try:
        return np.linalg.solve(M, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularityError("singular M matrix") from exc


def _inf_pieces(phis, lambdas):
    lam = np.asarray(lambdas, dtype=complex)
    M = build_M(phis, lam).entries
    p1 = phis[..., :, 0]
    p2 = phis[..., :, 1]
    lc = np.conj(lam)
    x1 = _solve(M, p1)  # M^-1 phi1
    y2 = _solve(np.conj(np.swapaxes(M, -1, -2)), p2)  # (M^H)^-1 phi2
    a = 1.0 + 2.0 * np.sum(np.conj(p1) * lc * x1, axis=-1)
    b = 1.0 - 2.0 * np.sum(np.conj(p2) * lc * y2, axis=-1)
    c = 4.0 * np.sum(np.conj(p2) * lc * lc * x1, axis=-1)
    return a, b, c


def bt_inf(u, spec: DressingSpec, phis):
    """Derivative-free dressing ``u[N]`` from seed values and eigenvectors.

    Parameters
    ----------
    u : complex or ndarray
        Seed solution at the evaluation points.
    spec : DressingSpec
    phis : ndarray, shape (..., N, 2)
    """
    if spec.N == 0:
        return u
    a, b, c = _inf_pieces(np.asarray(phis, dtype=complex), spec.lambdas)
    if np.any(np.abs(b) < 1e-300):
        raise SingularityError("vanishing denominator in BT_inf")
    out = (a * u + c) / b
    return complex(out) if np.ndim(out) == 0 else out


def unimodular_factor(spec: DressingSpec, phis):
    """``1 + 2 phi1^H Lambda^H M^-1 phi1``; has unit modulus on Lax data."""
    a, _, _ = _inf_pieces(np.asarray(phis, dtype=complex), spec.lambdas)
    return a


def bt_inf_modulus(u, spec: DressingSpec, phis):
    """``|u + 4 phi2^H (Lambda^H)^2 M^-1 phi1 / (1 + 2 phi1^H Lambda^H M^-1 phi1)|``."""
    if spec.N == 0:
        return np.abs(u)
    a, _, c = _inf_pieces(np.asarray(phis, dtype=complex), spec.lambdas)
    return np.abs(u + c / a)


def _s_value(phis, lambdas):
    M = build_M(phis, lambdas).entries
    x1 = _solve(M, phis[..., :, 0])
    return np.sum(np.conj(phis[..., :, 1]) * x1, axis=-1)


def bt0(u_sampler: Callable, spec: DressingSpec, x, t, h=1e-4, phi_sampler: Callable = None, richardson=False):
    """Dressing ``u + i d/dx (phi2^H M^-1 phi1)`` with a central difference.

    Parameters
    ----------
    u_sampler : callable ``(x, t) -> complex``
        Seed solution.
    spec : DressingSpec
    x, t : float or ndarray
    h : float
        Finite-difference step.
    phi_sampler : callable ``(x, t) -> ndarray (..., N, 2)``
        Lax eigenvectors of the seed at ``spec.lambdas``.
    richardson : bool
        Combine steps ``h`` and ``2h`` for a fourth-order derivative.
    """
    x = np.asarray(x, dtype=float)
    u = u_sampler(x, t)
    if spec.N == 0:
        return u
    if phi_sampler is None:
        raise ValueError("phi_sampler is required for N > 0")
    lam = spec.lambdas

    def s(xx):
        return _s_value(phi_sampler(xx, t), lam)

    d1 = (s(x + h) - s(x - h)) / (2 * h)
    if richardson:
        d2 = (s(x + 2 * h) - s(x - 2 * h)) / (4 * h)
        d1 = (4 * d1 - d2) / 3
    out = u + 1j * d1
    return complex(out) if np.ndim(out) == 0 else out


def _samplers(bg, spec):
    def u_s(xi, t):
        return np.exp(np.asarray(log_u0(xi, t, bg)))

    def p_s(xi, t):
        return normalized_phis(xi, t, spec, bg)

    return u_s, p_s


def equivalence_report(spec: DressingSpec, bg: BackgroundParams, samples: Sequence, h=1e-4):
    """Maximum of ``|bt0 - bt_inf| / (1 + |bt_inf|)`` over ``(xi, t)`` samples."""
    if spec.N == 0 or len(samples) == 0:
        return 0.0
    pts = np.asarray(samples, dtype=float)
    xi, t = pts[:, 0], pts[:, 1]
    u_s, p_s = _samplers(bg, spec)
    v0 = bt0(u_s, spec, xi, t, h=h, phi_sampler=p_s)
    vi = bt_inf(u_s(xi, t), spec, p_s(xi, t))
    return float(np.max(np.abs(v0 - vi) / (1 + np.abs(vi))))
