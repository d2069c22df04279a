"""Large-|t| behaviour of N-elliptic localized solutions.

As ``t -> +-inf`` the solution splits into single waves travelling along the
lines ``xi = v_k t - c_k`` and shifted copies of the background between them.
This module provides the sigma-Cauchy determinant identity behind the
reduction, the frame data (shift, effective coefficient, phase) of every line
and region, both forms of the one-wave and region formulas, and a fit of the
observed decay rate.

Indices ``k`` are 1-based, matching the usual labelling of waves by
increasing velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import elliptic_kernel as ek
from .background import BackgroundParams
from .dressing import DressingSpec
from .elliptic_kernel import ScaledComplex
from .errors import HypothesisError
from .sigma_forms import SigmaEntryKit, build_kit, det_state, uN_derivative_free

__all__ = [
    "AsymptoticFrame",
    "sigma_cauchy_det",
    "sigma_cauchy_brute",
    "check_hypotheses",
    "build_frame",
    "build_region_frame",
    "u_asym_line",
    "u_asym_region",
    "line_window",
    "regions_at",
    "core_width",
    "separation_time",
    "predicted_rate",
    "real_part_rate",
    "DecayFit",
    "decay_fit",
    "asymptotic_profile",
]

_IPI = 1j * math.pi


def sigma_cauchy_det(tau, m, n, lat) -> ScaledComplex:
    """Closed form of ``det[ sigma(tau+m_i+n_j) / sigma(m_i+n_j) ]``.

    Equals ``sigma(tau)^(N-1) sigma(tau + sum(m+n)) prod_{i<j} sigma(m_i-m_j)
    sigma(n_i-n_j) / prod_{i,j} sigma(m_i+n_j)``.  Coincident ``m`` or ``n``
    values give an exact zero.
    """
    m = np.asarray(m, dtype=complex).ravel()
    n = np.asarray(n, dtype=complex).ravel()
    if m.shape != n.shape:
        raise ValueError("m and n must have the same length")
    N = len(m)
    if N == 0:
        return ScaledComplex.from_complex(1.0)
    ls = ek.log_sigma
    out = (N - 1) * complex(ls(tau, lat)) + complex(ls(tau + m.sum() + n.sum(), lat))
    for i in range(N):
        for j in range(i + 1, N):
            out += complex(ls(m[i] - m[j], lat)) + complex(ls(n[i] - n[j], lat))
    out -= complex(np.sum(ls(m[:, None] + n[None, :], lat)))
    return ScaledComplex.from_log(out)


def sigma_cauchy_brute(tau, m, n, lat):
    """Direct determinant of the sigma-Cauchy matrix (test oracle)."""
    m = np.asarray(m, dtype=complex).ravel()
    n = np.asarray(n, dtype=complex).ravel()
    S = m[:, None] + n[None, :]
    A = np.exp(np.asarray(ek.log_sigma(tau + S, lat)) - np.asarray(ek.log_sigma(S, lat)))
    return complex(np.linalg.det(A))


@dataclass(frozen=True)
class AsymptoticFrame:
    """Data of one propagation line ``L_k^sign`` or region ``R_k^sign``.

    ``kind`` is ``"line"`` or ``"region"``; ``Delta`` and ``alpha_eff`` are
    only meaningful for lines.  ``line`` holds ``(v_k, c_k)``.
    """

    k: int
    sign: str
    kind: str
    z_shift: complex
    Delta: complex
    alpha_eff: complex
    C_factor: complex
    line: tuple


def check_hypotheses(spec: DressingSpec):
    """Reject specs with ``Re beta_i <= 0`` or velocities not strictly increasing."""
    bad_beta = [i + 1 for i, nd in enumerate(spec.nodes) if not nd.beta.real > 0]
    if bad_beta:
        raise HypothesisError(f"Re(beta_i) must be positive; violated for i = {bad_beta}", bad_beta)
    v = [nd.velocity for nd in spec.nodes]
    bad = [i + 1 for i in range(len(v) - 1) if not v[i] < v[i + 1]]
    if bad:
        raise HypothesisError(
            f"velocities must increase with the node index; violated after i = {bad}", bad
        )


def _sign(sign):
    if sign in ("-", "minus", -1):
        return "-"
    if sign in ("+", "plus", 1):
        return "+"
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _log_r(w, bg):
    return complex(ek.log_sigma(bg.kappa - w, bg.lat) - ek.log_sigma(bg.rho + 2 * bg.kappa + w, bg.lat))


def _log_s(w, bg):
    return complex(ek.log_sigma(bg.kappa + w, bg.lat) - ek.log_sigma(2 * bg.kappa + bg.rho - w, bg.lat))


def build_frame(k, sign, spec: DressingSpec, bg: BackgroundParams, offset=0.0) -> AsymptoticFrame:
    """Frame of the line ``L_k^sign`` (``k`` is 1-based)."""
    sign = _sign(sign)
    N = spec.N
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in 1..{N}")
    check_hypotheses(spec)
    lat = bg.lat
    ls = lambda w: complex(ek.log_sigma(w, lat))  # noqa: E731
    nodes = spec.nodes
    kk = k - 1
    zk, zkh = nodes[kk].z, nodes[kk].zhat
    shift = 0j
    lD = 0j
    lC = 0j
    for i, nd in enumerate(nodes):
        zi, zic, zih, zich = nd.z, nd.z.conjugate(), nd.zhat, nd.zcheck
        if i < kk:
            shift -= zi + zic
            lD += ls(zi - zkh) + ls(zk + zic) - ls(zkh + zic) - ls(zi - zk)
            lC += _log_s(zic, bg) - _log_r(zi, bg)
        elif i > kk:
            shift += zi + zic
            lD += ls(zkh - zih) + ls(zk + zich) - ls(zkh + zich) - ls(zk - zih)
            lC += _log_r(zi, bg) - _log_s(zic, bg)
    if sign == "+":
        shift, lD, lC = -shift, -lD, -lC
    Delta = complex(np.exp(lD))
    return AsymptoticFrame(
        k=k,
        sign=sign,
        kind="line",
        z_shift=complex(shift),
        Delta=Delta,
        alpha_eff=spec.alphas[kk] * Delta,
        C_factor=complex(np.exp(lC)),
        line=(nodes[kk].velocity, float(offset)),
    )


def build_region_frame(k, sign, spec: DressingSpec, bg: BackgroundParams) -> AsymptoticFrame:
    """Frame of the region ``R_k^sign``, lying between ``L_{k-1}`` and ``L_k``.

    ``R_1^sign`` is the outer region bounded by ``L_1^sign`` and ``L_N^(-sign)``.
    """
    sign = _sign(sign)
    N = spec.N
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in 1..{N}")
    check_hypotheses(spec)
    shift = 0j
    lC = 0j
    for i, nd in enumerate(spec.nodes):
        zi, zic = nd.z, nd.z.conjugate()
        if i < k - 1:
            shift -= zi + zic
            lC += _log_s(zic, bg) - _log_r(zi, bg)
        else:
            shift += zi + zic
            lC += _log_r(zi, bg) - _log_s(zic, bg)
    if sign == "+":
        shift, lC = -shift, -lC
    return AsymptoticFrame(
        k=k, sign=sign, kind="region", z_shift=complex(shift), Delta=1.0 + 0j,
        alpha_eff=0j, C_factor=complex(np.exp(lC)), line=(math.nan, 0.0),
    )


def _frame_kit(frame: AsymptoticFrame, spec: DressingSpec, bg) -> SigmaEntryKit:
    node = spec.nodes[frame.k - 1]
    return build_kit(DressingSpec([node], [frame.alpha_eff]), bg)


def _lF(xi, t, bg):
    return bg.F_xi * np.asarray(xi, dtype=float) + 16j * bg.alpha4 * np.asarray(t, dtype=float)


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


def u_asym_line(frame: AsymptoticFrame, xi, t, spec: DressingSpec, bg: BackgroundParams, form="free"):
    """One-wave asymptotic profile along ``L_k^sign``.

    Parameters
    ----------
    form : {"free", "derivative"}
        ``free`` is the product of the ``D3/D4`` and ``D5/D6`` ratios;
        ``derivative`` differentiates the ``D1/D2`` primitive analytically.
    """
    if frame.kind != "line":
        raise ValueError("u_asym_line needs a line frame")
    kit = _frame_kit(frame, spec, bg)
    lat, k, r = bg.lat, bg.kappa, bg.rho
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    zs = frame.z_shift.real
    lC = np.log(frame.C_factor)
    if form == "free":
        ld = sum(
            sgn * det_state(s, xi, t, kit, xi_shift=zs).log_det
            for s, sgn in ((3, 1), (4, -1), (5, 1), (6, -1))
        )
        out = _IPI + bg.log_sqrt_nu0 + ek.log_sigma(k, lat) - ek.log_sigma(r, lat) + ld + lC - _lF(xi, t, bg)
        return _out(np.exp(out))
    if form != "derivative":
        raise ValueError("form must be 'free' or 'derivative'")
    s1 = det_state(1, xi, t, kit, derivative=True, xi_shift=zs)
    s2 = det_state(2, xi, t, kit, derivative=True, xi_shift=zs)
    lpre = (
        bg.log_sqrt_nu0 + ek.log_sigma(k, lat) + ek.log_sigma(r + k, lat) + ek.log_sigma(2 * k, lat)
        - ek.log_sigma(r, lat) - ek.log_sigma(r + 3 * k, lat)
    )
    logG = lpre + s1.log_det - s2.log_det + lC - _lF(xi, t, bg)
    return _out(np.exp(logG) * (s1.dlog_det - s2.dlog_det - bg.F_xi))


def u_asym_region(frame: AsymptoticFrame, xi, t, bg: BackgroundParams, form="free"):
    """Shifted-background profile of region ``R_k^sign``.

    ``free`` evaluates the sigma quotient directly; ``derivative`` is the
    analytic ``xi``-derivative of its primitive.
    """
    if frame.kind != "region":
        raise ValueError("u_asym_region needs a region frame")
    lat, k, r = bg.lat, bg.kappa, bg.rho
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    x = xi + frame.z_shift.real
    ls = lambda w: np.asarray(ek.log_sigma(w, lat))  # noqa: E731
    lC = np.log(frame.C_factor)
    if form == "free":
        out = (
            bg.log_sqrt_nu0 + ls(k) + ls(x + r) + ls(x + k) - ls(r) - 2 * ls(x - k)
            + lC - _lF(xi, t, bg)
        )
        return _out(np.exp(out))
    if form != "derivative":
        raise ValueError("form must be 'free' or 'derivative'")
    logG = (
        _IPI + bg.log_sqrt_nu0 + ls(k) + ls(r + k) + ls(2 * k) + ls(x + 2 * k + r)
        - ls(r) - ls(r + 3 * k) - ls(x - k) + lC - _lF(xi, t, bg)
    )
    dlog = np.asarray(ek.zeta(x + 2 * k + r, lat)) - np.asarray(ek.zeta(x - k, lat)) - bg.F_xi
    return _out(np.exp(logG) * dlog)


def line_window(frame: AsymptoticFrame, t, bg: BackgroundParams, periods=2.0, n=201):
    """Sample points ``xi`` in ``[v_k t - c_k - W, v_k t - c_k + W]`` with ``W`` background periods."""
    v, c = frame.line
    W = periods * 2.0 * bg.lat.omega1
    centre = v * t - c
    return np.linspace(centre - W, centre + W, n)


def regions_at(t, spec: DressingSpec, bg: BackgroundParams, margin=None):
    """Region frames visible at time ``t`` with their ``xi`` intervals, left to right.

    ``margin`` keeps each interval that far from the neighbouring
    propagation lines, outside the wave cores.  By default it is
    :func:`core_width` of the wave on that side.
    """
    check_hypotheses(spec)
    N = spec.N
    margins = [core_width(nd, bg) if margin is None else margin for nd in spec.nodes]
    centres = [nd.velocity * t for nd in spec.nodes]
    order = np.argsort(centres)
    margins = [margins[i] for i in order]
    centres = [centres[i] for i in order]
    # left to right along xi
    if t > 0:
        labels = [(k, "+") for k in range(1, N + 1)] + [(1, "-")]
    else:
        labels = [(1, "+")] + [(k, "-") for k in range(N, 0, -1)]
    edges = [-math.inf] + centres + [math.inf]
    pads = [0.0] + margins + [0.0]
    out = []
    for idx, (k, sg) in enumerate(labels):
        lo, hi = edges[idx] + pads[idx], edges[idx + 1] - pads[idx + 1]
        out.append((f"R{k}{sg}", build_region_frame(k, sg, spec, bg), (lo, hi)))
    return out


def core_width(node, bg: BackgroundParams, tail=1e-3):
    """Half-width of a wave core: ``max(2 omega1, log(1/tail) / Re beta)``.

    Far from the line the wave tail decays like ``exp(-Re(beta) |xi - v t|)``.
    """
    rb = node.beta.real
    w = math.log(1.0 / tail) / rb if rb > 0 else math.inf
    return max(2.0 * bg.lat.omega1, w)


def separation_time(spec: DressingSpec, bg: BackgroundParams, periods=2.0, tail=1e-4):
    """Smallest ``|t|`` at which every line window clears the neighbouring wave tails."""
    nodes = spec.nodes
    W = periods * 2.0 * bg.lat.omega1
    worst = 0.0
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            dv = abs(a.velocity - b.velocity)
            if dv == 0:
                return math.inf
            reach = W + max(core_width(a, bg, tail), core_width(b, bg, tail))
            worst = max(worst, reach / dv)
    return worst


def predicted_rate(k, spec: DressingSpec):
    """``min_{i != k} |beta_i (v_i - v_k)|`` with complex modulus (``k`` 1-based)."""
    nodes = spec.nodes
    vk = nodes[k - 1].velocity
    vals = [abs(nd.beta * (nd.velocity - vk)) for i, nd in enumerate(nodes) if i != k - 1]
    return min(vals) if vals else math.inf


def real_part_rate(k, spec: DressingSpec):
    """``min_{i != k} Re(beta_i) |v_i - v_k|``: decay of the neighbouring wave tails."""
    nodes = spec.nodes
    vk = nodes[k - 1].velocity
    vals = [nd.beta.real * abs(nd.velocity - vk) for i, nd in enumerate(nodes) if i != k - 1]
    return min(vals) if vals else math.inf


@dataclass(frozen=True)
class DecayFit:
    """Result of :func:`decay_fit`; ``rate`` is NaN when floor-limited."""

    rate: float
    r2: float
    predicted: float
    real_rate: float
    floor_limited: bool
    errors: tuple
    t_samples: tuple


def decay_fit(k, sign, spec: DressingSpec, bg: BackgroundParams, t_samples, periods=2.0, n=121,
              frame=None, floor=1e-10):
    """Least-squares slope of ``log max|u_N - u_asym|`` over a line window versus ``|t|``.

    Samples with error below ``floor`` are dropped (double-precision
    roundoff of the determinants sits near 1e-12); fewer than five
    remaining samples mark the fit as floor-limited.

    Parameters
    ----------
    frame : AsymptoticFrame, optional
        Override the frame (a wrong frame is the natural negative control).
    """
    ts = np.asarray(t_samples, dtype=float)
    if len(ts) < 5:
        raise ValueError("decay_fit needs at least five t samples")
    fr = frame if frame is not None else build_frame(k, sign, spec, bg)
    kit = build_kit(spec, bg)
    own = build_frame(k, sign, spec, bg)
    errs = []
    for t in ts:
        xi = line_window(own, t, bg, periods, n)
        tt = np.full_like(xi, t)
        full = uN_derivative_free(xi, tt, kit)
        asym = u_asym_line(fr, xi, tt, spec, bg)
        errs.append(float(np.max(np.abs(full - asym))))
    errs = np.array(errs)
    pred = predicted_rate(k, spec)
    rr = real_part_rate(k, spec)
    if np.sum(errs > floor) < 5:
        return DecayFit(math.nan, math.nan, pred, rr, True, tuple(errs), tuple(ts))
    mask = errs > floor
    x = np.abs(ts[mask])
    y = np.log(errs[mask])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(float(-coef[0]), r2, pred, rr, False, tuple(errs), tuple(ts))



def asymptotic_profile(xi, t, spec: DressingSpec, bg: BackgroundParams, kind=None, core=None):
    """Piecewise asymptotic approximation of ``u_N`` on a row of fixed ``t``.

    Points within ``core`` (default :func:`core_width`) of a propagation line use
    that line's one-wave formula, all others the formula of the region they
    fall in.  ``kind`` restricts the output to ``"line"`` or ``"region"``
    points, leaving NaN elsewhere.

    Returns
    -------
    values : ndarray of complex
    labels : ndarray of str
        Frame name per point, e.g. ``"L2+"`` or ``"R1-"``.
    """
    if kind not in (None, "line", "region"):
        raise ValueError("kind must be None, 'line' or 'region'")
    check_hypotheses(spec)
    t = float(t)
    xi = np.asarray(xi, dtype=float)
    cores = [core_width(nd, bg) if core is None else core for nd in spec.nodes]
    out = np.full(xi.shape, np.nan + 0j)
    labels = np.full(xi.shape, "", dtype=object)
    sign = "+" if t >= 0 else "-"
    claimed = np.zeros(xi.shape, dtype=bool)
    if kind in (None, "line"):
        for k in range(1, spec.N + 1):
            fr = build_frame(k, sign, spec, bg)
            m = (np.abs(xi - fr.line[0] * t) <= cores[k - 1]) & ~claimed
            if np.any(m):
                out[m] = u_asym_line(fr, xi[m], np.full(m.sum(), t), spec, bg)
                labels[m] = f"L{k}{sign}"
            claimed |= m
    else:
        for nd, c in zip(spec.nodes, cores):
            claimed |= np.abs(xi - nd.velocity * t) <= c
    if kind in (None, "region"):
        for name, fr, (lo, hi) in regions_at(t, spec, bg, margin=0.0):
            m = (xi >= lo) & (xi <= hi) & ~claimed
            if np.any(m):
                out[m] = u_asym_region(fr, xi[m], np.full(m.sum(), t), bg)
                labels[m] = name
            claimed |= m
    return out, labels
