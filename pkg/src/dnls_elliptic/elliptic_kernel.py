"""Weierstrass elliptic functions on an arbitrary period lattice.

Everything is evaluated through the Jacobi theta function ``theta_1`` with
nome ``q = exp(i pi tau)``, ``tau = omega3 / omega1``.  Arguments are first
reduced to the period parallelogram centred at the origin; the quasi-period
factors of sigma are carried in logarithmic form so that products of many
sigma values at large arguments never overflow.

All evaluators accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, PoleError

__all__ = [
    "LatticeData",
    "ScaledComplex",
    "build_lattice",
    "wp",
    "wp_prime",
    "wp_double_prime",
    "zeta",
    "sigma",
    "log_sigma",
    "legendre_residual",
    "POLE_GUARD",
    "SCALE_BITS",
]

POLE_GUARD = 1e-8
SCALE_BITS = 64
_LOG_BASE = SCALE_BITS * math.log(2.0)
_MAX_TERMS = 64


class ScaledComplex:
    """Complex number (or array) stored as ``mantissa * 2**(64 * exponent)``.

    The mantissa has modulus in ``[1, 2**64)`` unless the value is zero, in
    which case mantissa and exponent are both zero.

    Parameters
    ----------
    mantissa : complex or ndarray
    exponent : int or ndarray of int
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa, exponent=0):
        self.mantissa = mantissa
        self.exponent = exponent

    @classmethod
    def from_log(cls, logval):
        """Build from a complex logarithm ``log(value)`` (``-inf`` real part means zero)."""
        logval = np.asarray(logval, dtype=complex)
        re = logval.real
        finite = np.isfinite(re)
        safe_re = np.where(finite, re, 0.0)
        exp_ = np.floor(safe_re / _LOG_BASE).astype(np.int64)
        mag = np.exp(safe_re - exp_ * _LOG_BASE)
        # rounding in the subtraction can land the magnitude just outside [1, B)
        big = mag >= 2.0**SCALE_BITS
        mag = np.where(big, mag / 2.0**SCALE_BITS, mag)
        exp_ = np.where(big, exp_ + 1, exp_)
        small = mag < 1.0
        mag = np.where(small, mag * 2.0**SCALE_BITS, mag)
        exp_ = np.where(small, exp_ - 1, exp_)
        mag = np.clip(mag, 1.0, 2.0**SCALE_BITS * (1 - 2.0**-50))
        phase = np.exp(1j * logval.imag)
        mant = mag * phase
        # |exp(i theta)| may round below 1 (hypot implementations differ by an ulp);
        # off-axis phases near the lower edge get a few ulps of headroom
        low = (np.abs(mant) < 1.0 + 2.0**-50) & (phase.real != 0) & (phase.imag != 0)
        mant = np.where(low, (1.0 + 2.0**-49) * phase / np.abs(phase), mant)
        mant = np.where(finite, mant, 0.0)
        exp_ = np.where(finite, exp_, 0)
        if mant.ndim == 0:
            return cls(complex(mant), int(exp_))
        return cls(mant, exp_)

    @classmethod
    def from_complex(cls, value):
        value = np.asarray(value, dtype=complex)
        with np.errstate(divide="ignore"):
            return cls.from_log(np.log(value))

    def log(self):
        """Complex logarithm of the represented value."""
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.mantissa, dtype=complex)) + np.asarray(self.exponent) * _LOG_BASE

    def to_complex(self):
        """Plain complex value; may overflow to ``inf`` or underflow to zero."""
        with np.errstate(over="ignore", under="ignore"):
            out = np.asarray(self.mantissa, dtype=complex) * np.exp(np.asarray(self.exponent) * _LOG_BASE)
        return complex(out) if out.ndim == 0 else out

    def __mul__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return ScaledComplex.from_log(self.log() + other.log())

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return ScaledComplex.from_log(self.log() - other.log())

    def __neg__(self):
        return ScaledComplex(-np.asarray(self.mantissa) if np.ndim(self.mantissa) else -self.mantissa, self.exponent)

    def conj(self):
        return ScaledComplex(np.conj(self.mantissa), self.exponent)

    def __abs__(self):
        return np.abs(self.to_complex())

    def __repr__(self):
        return f"ScaledComplex(mantissa={self.mantissa!r}, exponent={self.exponent!r})"


@dataclass(frozen=True)
class LatticeData:
    """Period lattice generated by ``2*omega1`` and ``2*omega3``.

    ``internal_omega3`` is ``omega3`` or ``-omega3``, whichever has
    positive imaginary part relative to ``omega1``; it generates the same
    lattice and makes the nome satisfy ``|q| < 1``.
    """

    omega1: float
    omega3: complex
    internal_omega3: complex
    e1: complex
    e2: complex
    e3: complex
    eta1: complex
    eta3: complex
    g2: complex
    g3: complex
    tau: complex = field(repr=False)
    q: complex = field(repr=False)
    # theta_1 series coefficients (-1)^n q^{n(n+1)} and odd integers 2n+1
    coef: np.ndarray = field(repr=False, compare=False)
    odd: np.ndarray = field(repr=False, compare=False)
    log_theta1p0: complex = field(repr=False)
    orientation: int = field(repr=False)

    @property
    def half_periods(self):
        return (self.omega1, self.omega1 + self.omega3, self.omega3)


def _series_terms(tau):
    imt = tau.imag
    n = int(math.ceil(math.sqrt(40.0 / (math.pi * imt)))) + 2
    if n > _MAX_TERMS:
        warnings.warn(
            f"theta series needs {n} terms for Im(tau)={imt:.3g}; capped at {_MAX_TERMS}",
            RuntimeWarning,
            stacklevel=3,
        )
        n = _MAX_TERMS
    return n


def build_lattice(omega1, omega3) -> LatticeData:
    """Construct the lattice with half-periods ``omega1 > 0`` and ``omega3``.

    Parameters
    ----------
    omega1 : float
        Positive real half-period.
    omega3 : complex
        Second half-period, not real-collinear with ``omega1``.

    Returns
    -------
    LatticeData

    Raises
    ------
    ConfigurationError
        If ``omega1 <= 0`` or the periods are collinear.
    """
    omega1c = complex(omega1)
    if abs(omega1c.imag) > 1e-14 * max(1.0, abs(omega1c)) or omega1c.real <= 0:
        raise ConfigurationError(f"omega1 must be a positive real number, got {omega1!r}")
    omega1 = omega1c.real
    omega3 = complex(omega3)
    ratio = omega3 / omega1
    if abs(ratio.imag) < 1e-12:
        raise ConfigurationError("degenerate lattice: omega1 and omega3 are collinear")
    orientation = 1 if ratio.imag > 0 else -1
    w3 = omega3 * orientation
    tau = w3 / omega1
    q = np.exp(1j * math.pi * tau)
    nterms = _series_terms(tau)
    n = np.arange(nterms)
    coef = ((-1.0) ** n) * q ** (n * (n + 1))
    odd = (2 * n + 1).astype(float)
    th1p = np.sum(coef * odd)
    th1ppp = -np.sum(coef * odd**3)
    eta1 = -(math.pi**2) / (12.0 * omega1) * th1ppp / th1p

    partial = LatticeData(
        omega1=omega1,
        omega3=omega3,
        internal_omega3=w3,
        e1=0j, e2=0j, e3=0j,
        eta1=complex(eta1),
        eta3=0j,
        g2=0j, g3=0j,
        tau=complex(tau),
        q=complex(q),
        coef=coef,
        odd=odd,
        log_theta1p0=complex(np.log(th1p)),
        orientation=orientation,
    )
    e1 = complex(wp(omega1, partial))
    e2 = complex(wp(omega1 + omega3, partial))
    e3 = complex(wp(omega3, partial))
    eta3 = complex(zeta(w3, partial))
    g2 = 2.0 * (e1 * e1 + e2 * e2 + e3 * e3)
    g3 = 4.0 * e1 * e2 * e3
    return LatticeData(
        omega1=omega1,
        omega3=omega3,
        internal_omega3=w3,
        e1=e1, e2=e2, e3=e3,
        eta1=complex(eta1),
        eta3=eta3,
        g2=g2, g3=g3,
        tau=complex(tau),
        q=complex(q),
        coef=coef,
        odd=odd,
        log_theta1p0=complex(np.log(th1p)),
        orientation=orientation,
    )


def _reduce(z, lat):
    """Split ``z = z0 + 2a*omega1 + 2b*internal_omega3`` with ``z0`` centred."""
    z = np.asarray(z, dtype=complex)
    w1, w3 = lat.omega1, lat.internal_omega3
    y = z.imag / (2.0 * w3.imag)
    x = (z.real - y * 2.0 * w3.real) / (2.0 * w1)
    a = np.round(x)
    b = np.round(y)
    z0 = z - 2.0 * a * w1 - 2.0 * b * w3
    return z, z0, a, b


def _theta_sums(v0, lat, order):
    """Return theta_1 and its first ``order`` derivatives at ``v0`` (up to the common q^(1/4) factor)."""
    v = np.asarray(v0)[..., None]
    arg = v * lat.odd
    s = np.sin(arg)
    c = np.cos(arg)
    out = [np.sum(lat.coef * s, axis=-1)]
    if order >= 1:
        out.append(np.sum(lat.coef * lat.odd * c, axis=-1))
    if order >= 2:
        out.append(-np.sum(lat.coef * lat.odd**2 * s, axis=-1))
    if order >= 3:
        out.append(-np.sum(lat.coef * lat.odd**3 * c, axis=-1))
    return out


def _check_pole(z0, z):
    near = np.abs(z0) < POLE_GUARD
    if np.any(near):
        idx = np.flatnonzero(np.atleast_1d(near))[0]
        zz = complex(np.atleast_1d(z)[idx])
        lp = zz - complex(np.atleast_1d(z0)[idx])
        raise PoleError(f"argument {zz} is within {POLE_GUARD} of lattice point {lp}", zz, lp)


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


def log_sigma(z, lat: LatticeData):
    """Complex logarithm of ``sigma(z)`` on a consistent (non-principal) branch.

    Returns ``-inf`` real part at lattice points.
    """
    z, z0, a, b = _reduce(z, lat)
    scale = math.pi / (2.0 * lat.omega1)
    v0 = scale * z0
    (th,) = _theta_sums(v0, lat, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lth = np.log(th)
    tau = lat.tau
    out = (
        math.log(2.0 * lat.omega1 / math.pi)
        + lat.eta1 * z * z / (2.0 * lat.omega1)
        + lth
        + 1j * math.pi * (a + b)
        - 1j * math.pi * tau * b * b
        - 2j * b * v0
        - lat.log_theta1p0
    )
    return _out(out)


def sigma(z, lat: LatticeData) -> ScaledComplex:
    """Weierstrass sigma function as a :class:`ScaledComplex`."""
    return ScaledComplex.from_log(log_sigma(z, lat))


def _log_theta_derivs(z, lat, order):
    z, z0, a, b = _reduce(z, lat)
    _check_pole(z0, z)
    scale = math.pi / (2.0 * lat.omega1)
    sums = _theta_sums(scale * z0, lat, order)
    th = sums[0]
    l1 = sums[1] / th
    res = [z, scale, l1 - 2j * b]
    if order >= 2:
        l2 = sums[2] / th - l1 * l1
        res.append(l2)
    if order >= 3:
        l3 = sums[3] / th - 3.0 * sums[2] * sums[1] / th**2 + 2.0 * l1**3
        res.append(l3)
    return res


def zeta(z, lat: LatticeData):
    """Weierstrass zeta function ``sigma'/sigma``."""
    z, scale, l1 = _log_theta_derivs(z, lat, 1)
    return _out(lat.eta1 * z / lat.omega1 + scale * l1)


def wp(z, lat: LatticeData):
    """Weierstrass ``wp`` function."""
    z, scale, _, l2 = _log_theta_derivs(z, lat, 2)
    return _out(-lat.eta1 / lat.omega1 - scale**2 * l2)


def wp_prime(z, lat: LatticeData):
    """Derivative ``wp'(z)``."""
    z, scale, _, _, l3 = _log_theta_derivs(z, lat, 3)
    return _out(-(scale**3) * l3)


def wp_double_prime(z, lat: LatticeData):
    """Second derivative ``wp''(z) = 6 wp^2 - g2/2``."""
    p = np.asarray(wp(z, lat))
    return _out(6.0 * p * p - 0.5 * lat.g2)


def legendre_residual(lat: LatticeData) -> float:
    """Residual of the Legendre relation ``eta1*w3 - eta3*w1 = i*pi/2``.

    ``w3`` is the internal (positively oriented) half-period, so the sign of
    the right-hand side is fixed.
    """
    return abs(lat.eta1 * lat.internal_omega3 - lat.eta3 * lat.omega1 - 0.5j * math.pi)
