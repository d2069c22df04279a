import json

import numpy as np
import pytest

from conftest import preset_case
from dnls_elliptic.errors import ConfigurationError
from dnls_elliptic.harness import (
    Report,
    StencilConfig,
    SuiteConfig,
    background_sampler,
    dnls_residual,
    dressed_sampler,
    lax_residual,
    lax_samplers,
    run_suite,
    sigma_cauchy_residual,
)


def plane_wave(a, k):
    # exact solution: omega = k^2 + 2 a^2 k
    w = k * k + 2 * a * a * k
    return lambda x, t: a * np.exp(1j * (k * np.asarray(x) - w * np.asarray(t)))


def test_zero_function_has_zero_residual():
    x = np.linspace(-3, 3, 11)
    r = dnls_residual(lambda x, t: np.zeros_like(x, dtype=complex), x, np.zeros_like(x))
    assert np.all(r == 0)


def test_plane_wave_residual_small():
    x = np.linspace(-3, 3, 21)
    r = dnls_residual(plane_wave(0.8, 1.3), x, 0.4 * np.ones_like(x))
    assert np.max(r) < 1e-8


def test_detuned_plane_wave_is_caught():
    a, k = 0.8, 1.3
    w = k * k + 2 * a * a * k + 1e-2
    u = lambda x, t: a * np.exp(1j * (k * x - w * t))  # noqa: E731
    r = dnls_residual(u, np.array([0.3]), np.array([0.1]))
    assert r[0] == pytest.approx(0.8e-2 / (1 + 0.8**3), rel=1e-4)


@pytest.mark.parametrize("scheme, order", [("central-2", 2), ("central-4", 4)])
def test_truncation_error_scaling(scheme, order):
    u = plane_wave(1.1, 2.0)
    x, t = np.array([0.2]), np.array([0.1])
    r = [dnls_residual(u, x, t, StencilConfig(h_x=h, h_t=h, scheme=scheme))[0] for h in (0.04, 0.02)]
    assert np.log2(r[0] / r[1]) == pytest.approx(order, abs=0.15)


def test_pole_samples_become_nan():
    u = lambda x, t: 1.0 / (np.asarray(x) + 0j)  # noqa: E731
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dnls_residual(u, np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    assert np.isnan(r[0]) and np.isfinite(r[1])


def test_scalar_input_gives_float():
    assert isinstance(dnls_residual(plane_wave(1, 1), 0.3, 0.2), float)


def test_background_sampler_solves_dnls(bg_fig4, rng):
    x, t = rng.uniform(-6, 6, 20), rng.uniform(-3, 3, 20)
    assert np.nanmax(dnls_residual(background_sampler(bg_fig4), x, t)) < 1e-4


def test_dressed_sampler_solves_dnls(rng):
    bg, spec = preset_case("fig5")
    x, t = rng.uniform(-10, 10, 15), rng.uniform(-4, 4, 15)
    assert np.nanmax(dnls_residual(dressed_sampler(spec, bg), x, t)) < 1e-4


def test_moving_frame_matters(bg_fig4):
    # dropping the 2 s1 t shift must break the equation
    from dnls_elliptic.background import log_u0

    wrong = lambda x, t: np.exp(np.asarray(log_u0(x, t, bg_fig4)))  # noqa: E731
    x = np.linspace(-4, 4, 9)
    assert np.nanmax(dnls_residual(wrong, x, 0.5 * np.ones_like(x))) > 1e-2


@pytest.mark.parametrize("kwargs", [
    {"scheme": "central-6"},
    {"h_x": 0.0},
    {"h_t": -1e-3},
    {"tolerance": 0.0},
])
def test_stencil_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        StencilConfig(**kwargs)


def test_lax_residual_argument_errors(bg_fig4):
    bg, spec = preset_case("fig4")
    phi, U, V = lax_samplers(spec.nodes[0], 1.0, bg, "b")
    with pytest.raises(ConfigurationError, match="convention"):
        lax_residual(phi, U, V, "c", 0.1, 0.1)
    with pytest.raises(ConfigurationError, match="s1"):
        lax_residual(phi, U, V, "b", 0.1, 0.1)


def test_sigma_cauchy_residual(lat_fig4):
    assert sigma_cauchy_residual(lat_fig4, n=30, seed=3) < 1e-9


def test_empty_suite():
    rep = run_suite(SuiteConfig())
    assert rep.checks == [] and rep.ok
    assert rep.to_dict()["n_checks"] == 0


def test_suite_passes_on_presets():
    rep = run_suite(SuiteConfig(presets=("fig4", "fig3a"), n_points=20, asymptotics=False))
    assert rep.ok, rep.text()
    names = {c.name for c in rep.checks}
    assert {"fig4/pde-u0", "fig4/pde-u1", "fig3a/lax-a", "fig4/lax-naive-rejected", "fig3a/symmetry"} <= names
    assert any(n.endswith("/sigma-cauchy") for n in names)


def test_perturbed_alpha4_is_detected():
    rep = run_suite(SuiteConfig(presets=("fig4",), n_points=20, asymptotics=False, perturb_alpha4=1e-3))
    failing = {c.name for c in rep.checks if not c.passed}
    assert "fig4/pde-u0" in failing and not rep.ok


def test_bad_case_reported_not_raised():
    rep = run_suite(SuiteConfig(cases={"bad": (1.2, 0.4, 4.61, -3.14j, (), ())}, n_points=5))
    assert not rep.ok
    assert rep.checks[0].name == "bad/setup"


def test_unordered_case_is_reordered_for_asymptotics():
    rep = run_suite(SuiteConfig(presets=("fig3b",), n_points=10))
    by = {c.name: c for c in rep.checks}
    assert by["fig3b/asym-lines"].passed


def test_report_serialisation(tmp_path):
    rep = Report()
    rep.add("a", 1e-12, 1e-9)
    rep.add("b", 2.0, 1e-9)
    rep.add("c", float("nan"), 1.0)
    assert [c.passed for c in rep.checks] == [True, False, False]
    assert "FAIL" in rep.text().splitlines()[1]
    path = tmp_path / "r.json"
    rep.write_json(path)
    data = json.loads(path.read_text())
    assert data["n_failed"] == 2 and data["checks"][0]["name"] == "a"
