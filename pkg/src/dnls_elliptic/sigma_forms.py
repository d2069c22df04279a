"""Sigma-function determinant forms of the N-elliptic localized solution.

Two closed forms are evaluated:

* the derivative form ``u_N = d/dxi [ prefactor * det B1 / det B2 * e^{-F} ]``,
  whose derivative is taken analytically through ``d log det B = tr(B^-1 B')``;
* the derivative-free form, a product of the ratios ``det B3/det B4`` and
  ``det B5/det B6`` with a background factor.

Every matrix entry is a four-term sum over the branches ``(m, n)`` in
``{0, 1}^2``: ``m`` selects ``z_i`` or ``zhat_i`` for the row and ``n`` selects
``conj(z_j)`` or ``zcheck_j`` for the column.  Entries are built in the log
domain and each row and column is divided by its largest modulus before the
determinant, so exponentials such as ``exp(8 y t)`` at ``|t| ~ 30`` never
overflow.  The scaling exponents are carried along and cancel exactly in the
ratios.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import elliptic_kernel as ek
from .background import BackgroundParams
from .dressing import DressingSpec
from .elliptic_kernel import ScaledComplex
from .errors import SingularityError
from .spectral import log_I0

__all__ = [
    "SigmaEntryKit",
    "DetRatioState",
    "build_kit",
    "r_factor",
    "s_factor",
    "entry_B12",
    "entry_B3456",
    "det_state",
    "G_derivative_form",
    "uN_derivative_form",
    "uN_derivative_free",
    "uN_modulus",
    "POLE_THRESHOLD",
]

POLE_THRESHOLD = 1e-10
_IPI = 1j * math.pi
_I0_FACTOR = {"ZZ": 0.0, "ZW": 2.0, "WW": 4.0}


def _ls(z, lat):
    return np.asarray(ek.log_sigma(z, lat))


def _clog(x):
    x = complex(x)
    if x == 0:
        return complex(-np.inf, 0.0)
    return complex(np.log(x))


def r_factor(w, bg: BackgroundParams):
    """``r(w) = sigma(kappa - w) / sigma(rho + 2 kappa + w)``."""
    lat, k, r = bg.lat, bg.kappa, bg.rho
    return complex(np.exp(ek.log_sigma(k - w, lat) - ek.log_sigma(r + 2 * k + w, lat)))


def s_factor(w, bg: BackgroundParams):
    """``s(w) = sigma(kappa + w) / sigma(2 kappa + rho - w)``."""
    lat, k, r = bg.lat, bg.kappa, bg.rho
    return complex(np.exp(ek.log_sigma(k + w, lat) - ek.log_sigma(2 * k + r - w, lat)))


@dataclass(frozen=True)
class SigmaEntryKit:
    """Per-node constants shared by all determinant entries.

    Arrays are indexed by node.  ``log_r`` is ``log r(z_i)`` and ``log_s`` is
    ``log s(conj(z_i))``.
    """

    bg: BackgroundParams
    spec: DressingSpec
    z: np.ndarray
    zhat: np.ndarray
    zcheck: np.ndarray
    log_r: np.ndarray
    log_s: np.ndarray
    ld0_z: np.ndarray
    ld0_zhat: np.ndarray
    e_xi: np.ndarray
    e_t: np.ndarray
    eh_xi: np.ndarray
    eh_t: np.ndarray
    log_alpha: np.ndarray
    log_Ij: np.ndarray

    @property
    def N(self):
        return len(self.z)


def build_kit(spec: DressingSpec, bg: BackgroundParams) -> SigmaEntryKit:
    """Precompute the per-node data for ``spec`` on background ``bg``."""
    lat, k, r = bg.lat, bg.kappa, bg.rho
    nodes = spec.nodes
    z = np.array([n.z for n in nodes], dtype=complex)
    zc = np.conj(z)
    log_r = np.array([ek.log_sigma(k - w, lat) - ek.log_sigma(r + 2 * k + w, lat) for w in z], dtype=complex)
    log_s = np.array([ek.log_sigma(k + w, lat) - ek.log_sigma(2 * k + r - w, lat) for w in zc], dtype=complex)
    for i, zi in enumerate(z):
        for j, zj in enumerate(zc):
            if abs(complex(ek.sigma(zi + zj, lat).to_complex())) < 1e-12:
                raise SingularityError(f"degenerate node pair ({i}, {j}): sigma(z_i + conj z_j) = 0", (i, j))
    return SigmaEntryKit(
        bg=bg,
        spec=spec,
        z=z,
        zhat=np.array([n.zhat for n in nodes], dtype=complex),
        zcheck=np.array([n.zcheck for n in nodes], dtype=complex),
        log_r=log_r,
        log_s=log_s,
        ld0_z=np.array([n.log_d0_z for n in nodes], dtype=complex),
        ld0_zhat=np.array([n.log_d0_zhat for n in nodes], dtype=complex),
        e_xi=np.array([n.e_xi for n in nodes], dtype=complex),
        e_t=np.array([n.e_t for n in nodes], dtype=complex),
        eh_xi=np.array([n.eh_xi for n in nodes], dtype=complex),
        eh_t=np.array([n.eh_t for n in nodes], dtype=complex),
        log_alpha=np.array([_clog(a) for a in spec.alphas], dtype=complex),
        log_Ij=np.array([_clog(n.Ij) for n in nodes], dtype=complex),
    )


def _sigma_kernel(which, a, b, k, r):
    """Factors of ``Sigma^(which)(xi; a, b)`` as ``(power, constant, xi coefficient)``.

    Returns the factor list and an additive log constant.
    """
    if which == 1:
        return [(1, a - k, 0), (1, a + b - r - 2 * k, -1), (1, r + 2 * k - b, 0), (-1, a + b, 0)], _IPI
    if which == 2:
        return [(1, a - k, 0), (1, a + b + k, -1), (1, r + 2 * k - b, 0), (-1, a + b, 0)], 0j
    if which == 3:
        return [(1, -a - b + k, 1), (1, -2 * k - r - a, 0), (1, k + b, 0), (-1, a + b, 0)], 0j
    if which == 4:
        return [(1, -a - b - k, 1), (1, 2 * k + r - b, 0), (1, k - a, 0), (-1, a + b, 0)], 0j
    if which == 5:
        return [
            (1, a + b - r, -1), (1, k - b, 0), (1, k + b, 0), (1, a + r, 0),
            (-1, a + b, 0), (-1, b - r, 0),
        ], 0j
    if which == 6:
        return [(1, -a - b - k, 1), (1, 2 * k + r - b, 0), (1, -r - a, 0), (-1, a + b, 0)], 0j
    raise ValueError(f"unknown Sigma index {which}")


def _term_choices(which, m, n):
    """Node selections of one ``(m, n)`` branch.

    Returns ``(d0 row uses zhat, conj-d0 column uses zhat, I_j power)``.
    For B1/B2 the choices follow the four-term entry display; for B3..B6 they
    follow the ``(s mod 5)`` template, which reproduces the long-hand B4
    (``M0``), B5 and B6 matrices term by term.
    """
    if which in (1, 2):
        return bool(m), n == 0, 1 - n
    row_hat = (m + which % 5) % 2 == 1
    col_hat = (-((-1) ** (which + n))) < 0
    ipow = (1 + (-1) ** which) // 2 + (-1) ** (which + 1) * n
    return row_hat, col_hat, ipow


def _log_terms(which, xi, t, kit: SigmaEntryKit, derivative=False, xi_shift=0.0):
    """Log of the four branch terms of every entry of ``B^(which)``.

    Returns ``L`` (and ``dL = d/dxi log term`` when ``derivative``) with shape
    ``xi.shape + (N, N, 4)``.  ``xi_shift`` moves the ``xi`` argument of the
    Sigma factors and of ``I_0`` but not of ``E``; the asymptotic frames use it.
    """
    bg, lat, k, r = kit.bg, kit.bg.lat, kit.bg.kappa, kit.bg.rho
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    xi, t = np.broadcast_arrays(xi, t)
    X = xi[..., None, None]
    T = t[..., None, None]
    i0f = _I0_FACTOR[bg.re_class] * bg.zeta_w1
    lI0 = np.asarray(log_I0(xi + xi_shift, bg))[..., None, None]
    XS = X + xi_shift

    L_all, dL_all = [], []
    for m in (0, 1):
        a = (kit.z if m == 0 else kit.zhat)[:, None]
        la = kit.log_alpha[:, None] if m else 0j
        lE = (kit.e_xi if m == 0 else kit.eh_xi)[:, None] * X + (kit.e_t if m == 0 else kit.eh_t)[:, None] * T
        dE = (kit.e_xi if m == 0 else kit.eh_xi)[:, None]
        for n in (0, 1):
            b = (np.conj(kit.z) if n == 0 else kit.zcheck)[None, :]
            lb = np.conj(kit.log_alpha)[None, :] if n else 0j
            ex_c = np.conj(kit.e_xi if n == 0 else kit.eh_xi)[None, :]
            et_c = np.conj(kit.e_t if n == 0 else kit.eh_t)[None, :]
            row_hat, col_hat, ipow = _term_choices(which, m, n)
            ld0 = (kit.ld0_zhat if row_hat else kit.ld0_z)[:, None]
            ld0c = np.conj(kit.ld0_zhat if col_hat else kit.ld0_z)[None, :]
            base = la + lb + ld0 + ld0c + ipow * kit.log_Ij[None, :] + n * _IPI
            if which == 1:
                base = base + (2 * m - 1) * kit.log_r[:, None] + (1 - 2 * n) * kit.log_s[None, :]
            factors, c0 = _sigma_kernel(which, a, b, k, r)
            Lt = base + c0 + lE + ex_c * X + et_c * T + n * lI0
            dLt = dE + ex_c + n * i0f
            for p, const, cx in factors:
                arg = const + cx * XS
                Lt = Lt + p * _ls(arg, lat)
                if derivative and cx != 0:
                    dLt = dLt + p * cx * np.asarray(ek.zeta(arg, lat))
            L_all.append(np.broadcast_to(Lt, X.shape[:-2] + (kit.N, kit.N)))
            dL_all.append(np.broadcast_to(dLt, X.shape[:-2] + (kit.N, kit.N)))
    L = np.stack(L_all, axis=-1)
    if derivative:
        return L, np.stack(dL_all, axis=-1)
    return L


def _entry(which, i, j, xi, t, kit):
    L = _log_terms(which, xi, t, kit)[..., i, j, :]
    m = np.max(L.real, axis=-1, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.sum(np.exp(L - m), axis=-1)
    with np.errstate(divide="ignore"):
        return ScaledComplex.from_log(m[..., 0] + np.log(s.astype(complex)))


def entry_B12(i, j, xi, t, kit: SigmaEntryKit, which=1) -> ScaledComplex:
    """Entry ``(i, j)`` of ``B^(1)`` or ``B^(2)`` of the derivative form."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    return _entry(which, i, j, xi, t, kit)


def entry_B3456(i, j, xi, t, kit: SigmaEntryKit, which=5) -> ScaledComplex:
    """Entry ``(i, j)`` of ``B^(3)`` .. ``B^(6)`` of the derivative-free form."""
    if which not in (3, 4, 5, 6):
        raise ValueError("which must be one of 3, 4, 5, 6")
    return _entry(which, i, j, xi, t, kit)


@dataclass(frozen=True)
class DetRatioState:
    """Row/column-scaled determinant of one ``B`` matrix at a batch of points.

    ``log_det = log det(scaled) + sum(row_scale) + sum(col_scale)``;
    ``dlog_det`` is ``tr(B^-1 dB/dxi)`` when requested.
    """

    which: int
    scaled: np.ndarray
    row_scale: np.ndarray
    col_scale: np.ndarray
    log_det: np.ndarray
    dlog_det: np.ndarray = None


def det_state(which, xi, t, kit: SigmaEntryKit, derivative=False, xi_shift=0.0) -> DetRatioState:
    """Assemble ``B^(which)`` with exponential rescaling and take its log-determinant."""
    if derivative:
        L, dL = _log_terms(which, xi, t, kit, derivative=True, xi_shift=xi_shift)
    else:
        L, dL = _log_terms(which, xi, t, kit, xi_shift=xi_shift), None
    R = np.max(L.real, axis=(-1, -2))
    R = np.where(np.isfinite(R), R, 0.0)
    Cs = np.max(L.real - R[..., :, None, None], axis=(-1, -3))
    Cs = np.where(np.isfinite(Cs), Cs, 0.0)
    W = np.exp(L - R[..., :, None, None] - Cs[..., None, :, None])
    B = np.sum(W, axis=-1)
    sign, logabs = np.linalg.slogdet(B)
    if np.any(sign == 0):
        raise SingularityError(f"singular B^({which}) matrix")
    log_det = np.log(sign) + logabs + R.sum(-1) + Cs.sum(-1)
    dlog = None
    if derivative:
        dB = np.sum(W * dL, axis=-1)
        try:
            dlog = np.trace(np.linalg.solve(B, dB), axis1=-2, axis2=-1)
        except np.linalg.LinAlgError as exc:
            raise SingularityError(f"singular B^({which}) matrix") from exc
    return DetRatioState(which, B, R, Cs, log_det, dlog)


def _guard(xi, bg):
    lat, k = bg.lat, bg.kappa
    small = np.real(_ls(np.asarray(xi, dtype=float) - k, lat)) < math.log(POLE_THRESHOLD)
    if np.any(small):
        bad = np.asarray(xi, dtype=float)[small] if np.ndim(xi) else xi
        raise SingularityError("sigma(xi - kappa) vanishes at the requested points", bad)


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


def _log_G(xi, t, kit, derivative):
    bg, lat, k, r = kit.bg, kit.bg.lat, kit.bg.kappa, kit.bg.rho
    N = kit.N
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    lpre = (
        (1 - N) * (_IPI + _ls(xi + r + 2 * k, lat) - _ls(xi - k, lat))
        + bg.log_sqrt_nu0 + ek.log_sigma(k, lat) + ek.log_sigma(r + k, lat) + ek.log_sigma(2 * k, lat)
        - ek.log_sigma(r, lat) - ek.log_sigma(r + 3 * k, lat)
    )
    lF = bg.F_xi * xi + 16j * bg.alpha4 * t
    s1 = det_state(1, xi, t, kit, derivative)
    s2 = det_state(2, xi, t, kit, derivative)
    logG = lpre + s1.log_det - s2.log_det - lF
    if not derivative:
        return logG, None
    dpre = (1 - N) * (np.asarray(ek.zeta(xi + r + 2 * k, lat)) - np.asarray(ek.zeta(xi - k, lat)))
    return logG, dpre + s1.dlog_det - s2.dlog_det - bg.F_xi


def G_derivative_form(xi, t, kit: SigmaEntryKit):
    """The primitive ``G`` whose ``xi``-derivative is ``u_N``."""
    _guard(xi, kit.bg)
    logG, _ = _log_G(xi, t, kit, False)
    return _out(np.exp(logG))


def uN_derivative_form(xi, t, kit: SigmaEntryKit, method="analytic", h=1e-3):
    """``u_N`` from the derivative form.

    Parameters
    ----------
    method : {"analytic", "numeric"}
        ``analytic`` uses the trace identity; ``numeric`` applies a five-point
        stencil of step ``h`` to ``G`` and warns, for diagnosis only.
    """
    _guard(xi, kit.bg)
    if kit.N == 0:
        from .background import u0

        return u0(xi, t, kit.bg)
    if method == "numeric":
        warnings.warn("numerical xi-derivative requested for the derivative form", RuntimeWarning, stacklevel=2)
        x = np.asarray(xi, dtype=float)
        g = [np.exp(_log_G(x + d * h, t, kit, False)[0]) for d in (-2, -1, 1, 2)]
        return _out((g[0] - 8 * g[1] + 8 * g[2] - g[3]) / (12 * h))
    if method != "analytic":
        raise ValueError("method must be 'analytic' or 'numeric'")
    logG, dlogG = _log_G(xi, t, kit, True)
    return _out(np.exp(logG) * dlogG)


def _log_background_factor(xi, t, kit):
    bg, lat, k, r = kit.bg, kit.bg.lat, kit.bg.kappa, kit.bg.rho
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    return (
        bg.log_sqrt_nu0 + ek.log_sigma(k, lat) - ek.log_sigma(r, lat)
        - (bg.F_xi * xi + 16j * bg.alpha4 * t)
    )


def uN_derivative_free(xi, t, kit: SigmaEntryKit):
    """``u_N`` from the derivative-free form (product of two determinant ratios)."""
    _guard(xi, kit.bg)
    lat, k, r = kit.bg.lat, kit.bg.kappa, kit.bg.rho
    N = kit.N
    x = np.asarray(xi, dtype=float)
    lxk, lxr, lxpk = _ls(x - k, lat), _ls(x + r, lat), _ls(x + k, lat)
    out = (
        N * (_IPI + 2 * lxk - lxpk - lxr) + lxr + lxpk - 2 * lxk
        + _log_background_factor(xi, t, kit)
    )
    if N:
        out = out + (
            det_state(3, xi, t, kit).log_det - det_state(4, xi, t, kit).log_det
            + det_state(5, xi, t, kit).log_det - det_state(6, xi, t, kit).log_det
        )
    return _out(np.exp(out))


def uN_modulus(xi, t, kit: SigmaEntryKit):
    """``|u_N|`` from the ``B5/B6`` ratio alone.

    The ratio ``|det B3/det B4|`` dropped here equals
    ``|sigma(xi+kappa)/sigma(xi-kappa)|^(N-1)`` when ``Re kappa = 0``.  When
    ``Re kappa = omega1`` the two differ by ``exp(2 zeta(omega1) xi)``, which
    is restored explicitly.
    """
    _guard(xi, kit.bg)
    bg, lat, k, r = kit.bg, kit.bg.lat, kit.bg.kappa, kit.bg.rho
    N = kit.N
    x = np.asarray(xi, dtype=float)
    out = (N - 1) * (_ls(x - k, lat) - _ls(x + r, lat)) + _log_background_factor(xi, t, kit)
    if bg.re_class == "WW":
        out = out + 2.0 * bg.zeta_w1.real * x
    if N:
        out = out + det_state(5, xi, t, kit).log_det - det_state(6, xi, t, kit).log_det
    res = np.exp(out.real)
    return float(res) if np.ndim(res) == 0 else res
