import numpy as np
import pytest

import longform as lf
from conftest import ALL_PRESETS, preset_case
from dnls_elliptic import elliptic_kernel as ek
from dnls_elliptic.asymptotics import build_region_frame, u_asym_region
from dnls_elliptic.background import log_u0
from dnls_elliptic.dressing import bt_inf, normalized_phis
from dnls_elliptic.sigma_forms import (
    build_kit,
    det_state,
    entry_B12,
    entry_B3456,
    r_factor,
    s_factor,
    uN_derivative_form,
    uN_derivative_free,
    uN_modulus,
)

MIXED = (0.7 + 0.2j, -1.3 + 0.4j)


def kit_for(name, alphas=None):
    bg, spec = preset_case(name, alphas)
    return bg, spec, build_kit(spec, bg)


def random_points(rng, n, xr=12.0, tr=6.0):
    return rng.uniform(-xr, xr, n), rng.uniform(-tr, tr, n)


def test_r_s_factors(bg_fig4):
    lat, k, r = bg_fig4.lat, bg_fig4.kappa, bg_fig4.rho
    s = lambda w: ek.sigma(w, lat).to_complex()  # noqa: E731
    for w in (1 + 1j, -0.46 + 2.06j):
        assert r_factor(w, bg_fig4) == pytest.approx(s(k - w) / s(r + 2 * k + w), rel=1e-12)
        assert s_factor(w, bg_fig4) == pytest.approx(s(k + w) / s(2 * k + r - w), rel=1e-12)


@pytest.mark.parametrize("name", ["fig1b", "fig3a", "fig5"])
@pytest.mark.parametrize("which, oracle", [(4, lf.M0), (5, lf.B5), (6, lf.B6)])
def test_template_matches_long_form(name, which, oracle):
    N = len(preset_case(name)[1].nodes)
    bg, spec, kit = kit_for(name, MIXED[:N])
    for xi, t in [(0.3, 0.1), (-1.7, 0.4), (4.2, -0.6)]:
        for i in range(N):
            for j in range(N):
                got = entry_B3456(i, j, xi, t, kit, which).to_complex()
                ref = oracle(i, j, xi, t, spec, bg)
                assert abs(got - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("name", ["fig1a", "fig3b", "fig5"])
def test_B1_matches_uM_plus_phi12(name):
    N = len(preset_case(name)[1].nodes)
    bg, spec, kit = kit_for(name, MIXED[:N])
    for xi, t in [(0.3, 0.1), (-2.5, -0.3)]:
        for i in range(N):
            for j in range(N):
                got = entry_B12(i, j, xi, t, kit, 1).to_complex()
                ref = lf.uM_phi12(i, j, xi, t, spec, bg)
                assert abs(got - ref) < 1e-10 * abs(ref)


def test_alpha_zero_keeps_single_term():
    bg, spec, kit = kit_for("fig4", (0,))
    for which in (3, 4, 5, 6):
        e = entry_B3456(0, 0, 0.4, 0.2, kit, which).to_complex()
        assert np.isfinite(e) and e != 0
    # only the (0, 0) branch survives, so the long form with alpha = 0 agrees
    assert entry_B3456(0, 0, 0.4, 0.2, kit, 5).to_complex() == pytest.approx(lf.B5(0, 0, 0.4, 0.2, spec, bg),
                                                                              rel=1e-10)
    e1 = entry_B12(0, 0, 0.4, 0.2, kit, 1).to_complex()
    assert e1 == pytest.approx(lf.uM_phi12(0, 0, 0.4, 0.2, spec, bg), rel=1e-10)


def test_invalid_matrix_index(bg_fig4):
    _, _, kit = kit_for("fig4")
    with pytest.raises(ValueError):
        entry_B12(0, 0, 0.0, 0.0, kit, which=3)
    with pytest.raises(ValueError):
        entry_B3456(0, 0, 0.0, 0.0, kit, which=2)


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_form_equivalence(name, rng):
    _, _, kit = kit_for(name)
    xi, t = random_points(rng, 50)
    a = uN_derivative_form(xi, t, kit)
    b = uN_derivative_free(xi, t, kit)
    assert np.max(np.abs(a - b) / (1 + np.abs(b))) < 1e-8


@pytest.mark.parametrize("name", ["fig1b", "fig3a", "fig5"])
def test_analytic_derivative_matches_numeric(name, rng):
    _, _, kit = kit_for(name)
    xi, t = random_points(rng, 20)
    a = uN_derivative_form(xi, t, kit, method="analytic")
    with pytest.warns(RuntimeWarning, match="numerical"):
        n = uN_derivative_form(xi, t, kit, method="numeric")
    assert np.max(np.abs(a - n) / (1 + np.abs(a))) < 1e-7


@pytest.mark.parametrize("name", ["fig1a", "fig2b", "fig3b", "fig5"])
def test_closed_form_matches_dressing(name, rng):
    bg, spec, kit = kit_for(name)
    xi, t = random_points(rng, 30)
    u = np.exp(np.asarray(log_u0(xi, t, bg)))
    ref = bt_inf(u, spec, normalized_phis(xi, t, spec, bg))
    got = uN_derivative_free(xi, t, kit)
    assert np.max(np.abs(got - ref) / (1 + np.abs(ref))) < 1e-8


@pytest.mark.parametrize("name", ["fig1a", "fig4", "fig6"])
def test_modulus_route(name, rng):
    _, _, kit = kit_for(name)
    xi, t = random_points(rng, 50)
    np.testing.assert_allclose(uN_modulus(xi, t, kit), np.abs(uN_derivative_free(xi, t, kit)), rtol=1e-9)


def test_large_time_does_not_overflow():
    _, _, kit = kit_for("fig5")
    xi = np.linspace(-60, 60, 7)
    u = uN_derivative_free(xi, np.full_like(xi, 200.0), kit)
    assert np.all(np.isfinite(u)) and np.max(np.abs(u)) < 10


def test_det_state_scaling_bookkeeping():
    _, _, kit = kit_for("fig5", MIXED)
    st = det_state(5, np.array([0.5]), np.array([0.3]), kit)
    direct = np.array([[lf.B5(i, j, 0.5, 0.3, kit.spec, kit.bg) for j in range(2)] for i in range(2)])
    assert abs(np.exp(st.log_det[0]) - np.linalg.det(direct)) < 1e-10 * abs(np.linalg.det(direct))


@pytest.mark.parametrize("name", [p for p in ALL_PRESETS if all(a == 1 for a in preset_case(p)[1].alphas)])
def test_origin_symmetry(name):
    _, _, kit = kit_for(name)
    g = np.linspace(-10, 10, 101)
    X, T = np.meshgrid(g, g)
    a = uN_derivative_free(X, T, kit)
    b = np.conj(uN_derivative_free(-X, -T, kit))
    assert np.max(np.abs(a - b)) < 1e-9


@pytest.mark.parametrize("name", ["fig1b", "fig2b"])
def test_symmetry_broken_for_small_alpha(name):
    _, _, kit = kit_for(name)
    g = np.linspace(-10, 10, 41)
    X, T = np.meshgrid(g, g)
    assert np.max(np.abs(uN_derivative_free(X, T, kit) - np.conj(uN_derivative_free(-X, -T, kit)))) > 1e-2


def test_travelling_wave_centroid():
    # the localized part of the N = 1 travelling solution moves at the node velocity
    bg, spec, kit = kit_for("fig2a")
    v = spec.nodes[0].velocity
    fp, fm = build_region_frame(1, "+", spec, bg), build_region_frame(1, "-", spec, bg)
    ts = np.linspace(-60, 60, 49)  # dense enough to average out the breathing wobble
    centres = []
    for t in ts:
        xi = np.linspace(v * t - 40, v * t + 40, 1601)
        tt = np.full_like(xi, t)
        u = uN_modulus(xi, tt, kit)
        d = np.minimum(np.abs(u - np.abs(u_asym_region(fp, xi, tt, bg))),
                       np.abs(u - np.abs(u_asym_region(fm, xi, tt, bg))))
        centres.append(np.sum(xi * d**2) / np.sum(d**2))
    slope = np.polyfit(ts, centres, 1)[0]
    assert slope == pytest.approx(v, rel=1e-2)


@pytest.mark.parametrize("alpha, side", [(1e-14, "+"), (1e14, "-")])
def test_extreme_alpha_gives_shifted_background(alpha, side):
    bg, spec, kit = kit_for("fig4", (alpha,))
    xi = np.linspace(-5, 5, 11)
    t = np.zeros_like(xi)
    region = np.abs(u_asym_region(build_region_frame(1, side, spec, bg), xi, t, bg))
    assert np.max(np.abs(uN_modulus(xi, t, kit) - region)) < 1e-10
