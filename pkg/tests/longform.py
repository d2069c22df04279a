"""Long-hand matrix entries written out term by term.

These are independent of the branch-template code in ``sigma_forms``: every
sigma factor, d0 value, exponential and case factor appears explicitly, so a
mismatch in the template's index bookkeeping shows up as a disagreement.
Only small ``|t|`` is used, so plain complex arithmetic does not overflow.
"""

import cmath

from dnls_elliptic import elliptic_kernel as ek


def _s(w, lat):
    return complex(ek.sigma(w, lat).to_complex())


def _E(w, y, xi, t, bg):
    lat, k, r = bg.lat, bg.kappa, bg.rho
    z = ek.zeta
    a = 0.5 * (z(k + w, lat) + z(r + w, lat) - z(r + k, lat) - z(2 * k, lat))
    return cmath.exp(a * xi - 8 * (1j * bg.alpha4 + y) * t)


def _pieces(i, j, xi, t, spec, bg):
    ni, nj = spec.nodes[i], spec.nodes[j]
    return dict(
        k=bg.kappa, r=bg.rho, zi=ni.z, zjc=nj.z.conjugate(),
        ai=complex(spec.alphas[i]), ajc=complex(spec.alphas[j]).conjugate(),
        d0i=ni.d0_z, d0hi=ni.d0_zhat, d0jc=nj.d0_z.conjugate(), d0hjc=nj.d0_zhat.conjugate(),
        Ei=_E(ni.z, ni.y, xi, t, bg), Ehi=_E(ni.zhat, -ni.y, xi, t, bg),
        Ejc=_E(nj.z, nj.y, xi, t, bg).conjugate(), Ehjc=_E(nj.zhat, -nj.y, xi, t, bg).conjugate(),
        Ij=nj.Ij, I0=cmath.exp({"ZZ": 0, "ZW": 2, "WW": 4}[bg.re_class] * bg.zeta_w1 * xi),
    )


def M0(i, j, xi, t, spec, bg):
    """Bracketed part of the M-matrix entry."""
    p = _pieces(i, j, xi, t, spec, bg)
    s = lambda w: _s(w, bg.lat)  # noqa: E731
    k, r, zi, zj, x = p["k"], p["r"], p["zi"], p["zjc"], xi
    return (
        s(-zi - zj - k + x) * s(2 * k + r - zj) * s(k - zi) / s(zi + zj)
        * p["d0i"] * p["d0hjc"] * p["Ei"] * p["Ejc"] * p["Ij"]
        + p["ai"] * s(-zi + zj - r - x) * s(2 * k + r + zi) * s(2 * k + r - zj) / s(k + r + zi - zj)
        * p["d0hi"] * p["d0hjc"] * p["Ehi"] * p["Ejc"] * p["Ij"]
        + p["ajc"] * s(k - zi) * s(k + zj) * s(zi - zj + 2 * k + r - x) / s(k + r + zi - zj)
        * p["d0i"] * p["d0jc"] * p["Ei"] * p["Ehjc"] * p["I0"]
        - p["ai"] * p["ajc"] * s(2 * k + r + zi) * s(k + zj) * s(-zi - zj + k - x) / s(zi + zj)
        * p["d0hi"] * p["d0jc"] * p["Ehi"] * p["Ehjc"] * p["I0"]
    )


def B5(i, j, xi, t, spec, bg):
    """Bracketed part of ``(u M / (2 Lambda^+) + phi1 phi_A^+)_ij``."""
    p = _pieces(i, j, xi, t, spec, bg)
    s = lambda w: _s(w, bg.lat)  # noqa: E731
    k, r, zi, zj, x = p["k"], p["r"], p["zi"], p["zjc"], xi
    return (
        s(k - zj) * s(k + zj) * s(zi + r) * s(zi + zj - x - r) / (s(zi + zj) * s(zj - r))
        * p["d0i"] * p["d0jc"] * p["Ei"] * p["Ejc"]
        + p["ai"] * s(-k + zj) * s(k + zj) * s(-zi - k) * s(-2 * r - k - x - zi + zj)
        / (s(k + r + zi - zj) * s(zj - r))
        * p["d0hi"] * p["d0jc"] * p["Ehi"] * p["Ejc"]
        + p["ajc"] * s(r - zj) * s(2 * k + r - zj) * s(-r - zi) * s(-zi + zj - k + x)
        / (s(k + r + zi - zj) * s(k - zj))
        * p["d0i"] * p["d0hjc"] * p["Ei"] * p["Ehjc"] * p["I0"] * p["Ij"]
        + p["ai"] * p["ajc"] * s(r - zj) * s(2 * k + r - zj) * s(-k - zi) * s(zi + zj + r + x)
        / (s(zi + zj) * s(k - zj))
        * p["d0hi"] * p["d0hjc"] * p["Ehi"] * p["Ehjc"] * p["I0"] * p["Ij"]
    )


def B6(i, j, xi, t, spec, bg):
    """Bracketed part of ``(-u M^+ / (2 Lambda^+) + phi2 phi2^+)_ij``."""
    p = _pieces(i, j, xi, t, spec, bg)
    s = lambda w: _s(w, bg.lat)  # noqa: E731
    k, r, zi, zj, x = p["k"], p["r"], p["zi"], p["zjc"], xi
    return (
        s(-zj - zi - k + x) * s(2 * k + r - zj) * s(-r - zi) / s(zi + zj)
        * p["d0hi"] * p["d0hjc"] * p["Ei"] * p["Ejc"] * p["Ij"]
        + p["ai"] * s(r + zi - zj + x) * s(k + zi) * s(2 * k + r - zj) / s(-k - r - zi + zj)
        * p["d0i"] * p["d0hjc"] * p["Ehi"] * p["Ejc"] * p["Ij"]
        + p["ajc"] * s(zj - zi - 2 * k - r + x) * s(k + zj) * s(r + zi) / s(k + r + zi - zj)
        * p["d0hi"] * p["d0jc"] * p["Ei"] * p["Ehjc"] * p["I0"]
        + p["ai"] * p["ajc"] * s(zj + zi - k + x) * s(k + zi) * s(k + zj) / s(zi + zj)
        * p["d0i"] * p["d0jc"] * p["Ehi"] * p["Ehjc"] * p["I0"]
    )


def uM_phi12(i, j, xi, t, spec, bg):
    """Bracketed part of ``(u~ M + i phi1 phi2^+)_ij``."""
    p = _pieces(i, j, xi, t, spec, bg)
    s = lambda w: _s(w, bg.lat)  # noqa: E731
    k, r, zi, zj, x = p["k"], p["r"], p["zi"], p["zjc"], xi
    return (
        s(r + 2 * k + zi) * s(zi + zj - r - 2 * k - x) * s(k + zj) / s(zi + zj)
        * p["d0i"] * p["d0hjc"] * p["Ei"] * p["Ejc"] * p["Ij"]
        + p["ai"] * s(k - zi) * s(zi - zj + 2 * r + 3 * k + x) * s(k + zj) / s(k + r + zi - zj)
        * p["d0hi"] * p["d0hjc"] * p["Ehi"] * p["Ejc"] * p["Ij"]
        + p["ajc"] * s(x + zj - zi + k) * s(r + 2 * k - zj) * s(r + 2 * k + zi) / s(k + r + zi - zj)
        * p["d0i"] * p["d0jc"] * p["Ei"] * p["Ehjc"] * p["I0"]
        + p["ai"] * p["ajc"] * s(k - zi) * s(zj + zi + x + r + 2 * k) * s(zj - r - 2 * k) / s(zi + zj)
        * p["d0hi"] * p["d0jc"] * p["Ehi"] * p["Ehjc"] * p["I0"]
    )
