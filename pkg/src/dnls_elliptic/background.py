"""Elliptic background solutions of the DNLS equation.

The background is fixed by two points ``kappa``, ``rho`` of the period cell
and the lattice.  Its squared modulus is

    nu(xi) = nu0 (wp(xi) - wp(rho)) / (wp(xi) - wp(kappa))

and the solution itself is a ratio of sigma functions times ``exp(-F)``
with ``xi = x + 2 s1 t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ellipj

from . import elliptic_kernel as ek
from .elliptic_kernel import LatticeData
from .errors import ConfigurationError

__all__ = [
    "BackgroundParams",
    "derive_background",
    "nu",
    "mu",
    "u0",
    "log_u0",
    "F",
    "R_poly",
    "jacobi_cross_check",
    "real_tol",
]


def real_tol(value):
    """Tolerance used to accept a computed complex number as real."""
    return 1e-9 + 1e-9 * abs(value)


@dataclass(frozen=True)
class BackgroundParams:
    """All constants describing one elliptic background.

    ``nu_roots`` lists the roots of the quartic ``R`` as ``(nu0, nu2, nu3, nu4)``
    where ``nu_{i+1}`` is attached to the half-period ``omega_i``.
    """

    kappa: complex
    rho: complex
    lat: LatticeData
    nu0: float
    nu_roots: tuple
    s1: float
    s2: float
    s3: float
    s4: float
    alpha4: float
    C: float
    re_class: str
    modulus_type: str
    # cached sigma/zeta constants
    zeta_rk: complex = 0j
    zeta_2k: complex = 0j
    zeta_w1: complex = 0j
    log_sqrt_nu0: float = 0.0

    @property
    def F_xi(self):
        """Coefficient of ``xi`` in ``F``."""
        return self.zeta_rk + self.zeta_2k

    def summary(self):
        """Plain-dict view suitable for JSON/YAML echo."""
        def c(z):
            z = complex(z)
            return [z.real, z.imag]

        return {
            "kappa": c(self.kappa),
            "rho": c(self.rho),
            "omega1": self.lat.omega1,
            "omega3": c(self.lat.omega3),
            "nu0": self.nu0,
            "nu_roots": [c(v) for v in self.nu_roots],
            "s1": self.s1,
            "s2": self.s2,
            "s3": self.s3,
            "s4": self.s4,
            "alpha4": self.alpha4,
            "C": self.C,
            "re_class": self.re_class,
            "modulus_type": self.modulus_type,
            "e": [c(self.lat.e1), c(self.lat.e2), c(self.lat.e3)],
        }


def _as_real(value, name, hard=True):
    value = complex(value)
    if abs(value.imag) > real_tol(value.real) * 1e3:
        if hard:
            raise ConfigurationError(
                f"parameters do not define an admissible background: {name} = {value} is not real"
            )
    return value.real


def _re_part_class(z, omega1):
    """Return 0 or 1 according to Re z = 0 or omega1 (mod 2*omega1), else None."""
    r = math.remainder(complex(z).real, 2.0 * omega1)
    tol = 1e-9 * max(1.0, omega1)
    if abs(r) < tol:
        return 0
    if abs(abs(r) - omega1) < tol:
        return 1
    return None


def derive_background(kappa, rho, lat: LatticeData) -> BackgroundParams:
    """Derive all background constants from ``(kappa, rho)`` on ``lat``.

    Raises
    ------
    ConfigurationError
        If ``nu0`` is not real and nonnegative, the points are degenerate, or
        the real parts of ``kappa``, ``rho`` do not fall in an admissible class.
    """
    kappa = complex(kappa)
    rho = complex(rho)
    pk = ek.wp(kappa, lat)
    pr = ek.wp(rho, lat)
    dpk = ek.wp_prime(kappa, lat)
    dpr = ek.wp_prime(rho, lat)
    ddpk = ek.wp_double_prime(kappa, lat)
    if abs(pr - pk) < 1e-12 * (1 + abs(pk)):
        raise ConfigurationError("wp(kappa) == wp(rho): degenerate background")
    es = (lat.e1, lat.e2, lat.e3)
    for e in es:
        if abs(pk - e) < 1e-12 * (1 + abs(e)):
            raise ConfigurationError("wp(kappa) coincides with a branch value e_i")

    nu0c = 1j * dpk / (pr - pk)
    nu0 = _as_real(nu0c, "nu0")
    if nu0 < -real_tol(nu0):
        raise ConfigurationError(f"parameters do not define an admissible background: nu0 = {nu0} < 0")
    nu0 = max(nu0, 0.0)
    roots = [nu0c] + [nu0c + 1j * dpk / (pk - e) for e in es]
    s1 = _as_real(-nu0c - 1j * ddpk / (2.0 * dpk), "s1")
    C = _as_real(dpr * dpk / (pr - pk) ** 2, "C")

    # elementary symmetric functions of the roots
    coeffs = np.poly(np.array(roots))  # [1, -E1, E2, -E3, E4]
    E2 = coeffs[2]
    E3 = -coeffs[3]
    alpha4 = _as_real((E2 - 4 * s1 * s1 + 2 * C) / 64.0, "alpha4")
    s2 = (C + s1 * s1 - 8 * alpha4) / 4.0
    s3 = _as_real((-4 * s1**3 + 16 * s1 * s2 - 32 * s1 * alpha4 - E3) / 64.0, "s3")
    s4 = alpha4 * alpha4

    ck = _re_part_class(kappa, lat.omega1)
    cr = _re_part_class(rho, lat.omega1)
    if ck is None or cr is None:
        raise ConfigurationError("Re(kappa) and Re(rho) must each be 0 or omega1")
    if ck == 1 and cr == 0:
        raise ConfigurationError("Re(kappa) = omega1 with Re(rho) = 0 is not an admissible combination")
    re_class = {(0, 0): "ZZ", (0, 1): "ZW", (1, 1): "WW"}[(ck, cr)]
    # rectangular lattices have three real branch values; rhombic ones have one
    rectangular = max(abs(complex(e).imag) for e in es) < 1e-9 * (1.0 + max(abs(e) for e in es))
    if not rectangular:
        modulus_type = "Type3"
    elif re_class == "ZW":
        modulus_type = "Type1"
    elif re_class == "ZZ":
        modulus_type = "Type2"
    else:
        raise ConfigurationError("Re(kappa) = Re(rho) = omega1 requires a non-rectangular lattice")

    zeta_rk, zeta_2k, zeta_w1 = (complex(ek.zeta(w, lat)) for w in (rho + kappa, 2 * kappa, lat.omega1))
    return BackgroundParams(
        kappa=kappa,
        rho=rho,
        lat=lat,
        nu0=nu0,
        nu_roots=tuple(complex(r) for r in roots),
        s1=s1,
        s2=s2,
        s3=s3,
        s4=s4,
        alpha4=alpha4,
        C=C,
        re_class=re_class,
        modulus_type=modulus_type,
        zeta_rk=zeta_rk,
        zeta_2k=zeta_2k,
        zeta_w1=zeta_w1,
        log_sqrt_nu0=0.5 * math.log(nu0) if nu0 > 0 else -math.inf,
    )


def R_poly(v, bg: BackgroundParams):
    """The quartic ``R(nu)`` whose roots are the extrema of ``nu``."""
    s1, s2, s3, a4 = bg.s1, bg.s2, bg.s3, bg.alpha4
    c = -s1 * s1 + 4 * s2 + 8 * a4
    return (
        v**4
        + 4 * s1 * v**3
        + (6 * s1 * s1 - 8 * s2 + 48 * a4) * v**2
        - (-4 * s1**3 + 16 * s1 * s2 - 64 * s3 - 32 * s1 * a4) * v
        + c * c
    )


def F(xi, t, bg: BackgroundParams):
    """Phase function ``F = (zeta(rho+kappa) + zeta(2 kappa)) xi + 16 i alpha4 t``."""
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    out = bg.F_xi * xi + 16j * bg.alpha4 * t
    return complex(out) if out.ndim == 0 else out


def nu(xi, bg: BackgroundParams):
    """Squared modulus ``nu(xi)`` of the background (real).

    Evaluated as the sigma-quotient form of ``(wp(xi)-wp(rho))/(wp(xi)-wp(kappa))``,
    which stays finite at the lattice points of ``xi``.
    """
    lat, k, r = bg.lat, bg.kappa, bg.rho
    xi = np.asarray(xi, dtype=float)
    ls = ek.log_sigma
    lg = (
        np.asarray(ls(xi + r, lat)) + ls(xi - r, lat) + 2 * ls(k, lat)
        - ls(xi + k, lat) - ls(xi - k, lat) - 2 * ls(r, lat)
    )
    out = (bg.nu0 * np.exp(lg)).real
    return float(out) if out.ndim == 0 else out


def mu(xi, bg: BackgroundParams):
    """Auxiliary spectrum ``mu(xi)``."""
    k, r = bg.kappa, bg.rho
    out = 0.25j * (
        np.asarray(ek.zeta(k + np.asarray(xi), bg.lat))
        - ek.zeta(np.asarray(xi) + r, bg.lat)
        + bg.zeta_rk
        - bg.zeta_2k
    )
    return complex(out) if out.ndim == 0 else out


def log_u0(xi, t, bg: BackgroundParams):
    """Logarithm of the background solution ``u0(xi, t)``."""
    lat, k, r = bg.lat, bg.kappa, bg.rho
    xi = np.asarray(xi, dtype=float)
    ls = ek.log_sigma
    out = (
        bg.log_sqrt_nu0
        + ls(k, lat)
        + ls(xi + r, lat)
        + ls(xi + k, lat)
        - ls(r, lat)
        - 2.0 * np.asarray(ls(xi - k, lat))
        - np.asarray(F(xi, t, bg))
    )
    return complex(out) if np.ndim(out) == 0 else out


def u0(xi, t, bg: BackgroundParams):
    """Background solution ``u0(xi, t)`` in the travelling coordinate ``xi``."""
    out = np.exp(np.asarray(log_u0(xi, t, bg)))
    return complex(out) if out.ndim == 0 else out


def _real_roots_sorted(bg):
    roots = np.array(bg.nu_roots)
    return np.sort(roots.real)[::-1]


def jacobi_cross_check(bg: BackgroundParams, xi):
    """Compare ``nu(xi)`` with its Jacobi sn (Types 1, 2) or cn (Type 3) form.

    Returns the maximum absolute residual over the supplied points.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    ref = np.atleast_1d(nu(xi, bg))
    if bg.modulus_type in ("Type1", "Type2"):
        v = _real_roots_sorted(bg)
        if abs(bg.nu0 - v[0]) <= abs(bg.nu0 - v[3]):
            n1, n2, n3, n4 = v
        else:
            # nu0 is the smallest root: exchange nu_i with nu_{5-i} for i = 1, 2
            n4, n3, n2, n1 = v
        a0 = 0.5 * math.sqrt(abs((n1 - n3) * (n2 - n4)))
        m = (n1 - n2) * (n3 - n4) / ((n1 - n3) * (n2 - n4))
        sn, _, _, _ = ellipj(a0 * xi, m)
        alt = n4 + (n1 - n4) * (n2 - n4) / ((n2 - n4) + (n1 - n2) * sn**2)
    else:
        roots = np.array(bg.nu_roots)
        real_mask = np.abs(roots.imag) <= 1e-7 * (1 + np.abs(roots))
        real_roots = np.sort(roots[real_mask].real)[::-1]
        cplx = roots[~real_mask]
        if len(real_roots) != 2 or len(cplx) != 2:
            raise ConfigurationError("cnoidal form needs two real and two complex roots")
        n1, n2 = real_roots
        if abs(bg.nu0 - n2) < abs(bg.nu0 - n1):
            n1, n2 = n2, n1
        n3 = cplx[0]
        a = (n1 - n3.real) ** 2 + n3.imag**2
        b = (n2 - n3.real) ** 2 + n3.imag**2
        th1 = math.sqrt(b) / math.sqrt(a)
        th2 = (a * b) ** 0.25
        m = 0.5 * (1.0 - ((n1 - n3.real) * (n2 - n3.real) + n3.imag**2) / math.sqrt(a * b))
        _, cn, _, _ = ellipj(th2 * xi, m)
        alt = n1 + (n2 - n1) * (1 - cn) / (1 + th1 + (th1 - 1) * cn)
    return float(np.max(np.abs(ref - alt)))
