import functools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dnls_elliptic import elliptic_kernel as ek  # noqa: E402
from dnls_elliptic.background import derive_background  # noqa: E402
from dnls_elliptic.harness import build_case  # noqa: E402
from dnls_elliptic.presets import PRESETS, get_preset  # noqa: E402

FIG1_LATTICE = (4.61, -3.14j)
FIG4_LATTICE = (3.25, -3.31j)


@functools.lru_cache(maxsize=None)
def preset_case(name, alphas=None):
    """Background and dressing spec for a preset (optionally overriding alphas)."""
    p = get_preset(name)
    return build_case(p.kappa, p.rho, p.omega1, p.omega3, p.nodes(), alphas or p.alphas)


@functools.lru_cache(maxsize=None)
def lattice(w1, w3):
    return ek.build_lattice(w1, w3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def lat_fig1():
    return lattice(*FIG1_LATTICE)


@pytest.fixture(scope="session")
def lat_fig4():
    return lattice(*FIG4_LATTICE)


@pytest.fixture(scope="session")
def lat_square():
    return lattice(1.0, 1j)


@pytest.fixture(scope="session")
def bg_fig1():
    return preset_case("fig1a")[0]


@pytest.fixture(scope="session")
def bg_fig4():
    return preset_case("fig4")[0]


@pytest.fixture(scope="session")
def bg_type2():
    # kappa and rho both on the imaginary axis of a rectangular lattice
    return derive_background(1.2j, -1.9j, lattice(*FIG1_LATTICE))


ALL_PRESETS = tuple(PRESETS)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
