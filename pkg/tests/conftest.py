"""Shared fixtures: small grids, a cached ground-state profile, and a
session-scoped on-disk cache so expensive solves happen once per session."""

from __future__ import annotations

import numpy as np
import pytest

from inls_lab.core import PhysicalParams, make_grid
from inls_lab.ground_state import solve_profile, validate_ground_state

# Analytic values for the reference gaussian exp(-|x|^2):
#   mass    = (pi/2)^{3/2}
#   kinetic = 3 (pi/2)^{3/2}
#   weighted quartic (decay b) = 2 pi 4^{(b-3)/2} Gamma((3-b)/2)
GAUSSIAN_MASS = (np.pi / 2.0) ** 1.5
GAUSSIAN_KINETIC = 3.0 * (np.pi / 2.0) ** 1.5


def gaussian_quartic_weighted(b: float) -> float:
    from scipy.special import gamma

    return 2.0 * np.pi * 4.0 ** ((b - 3.0) / 2.0) * gamma((3.0 - b) / 2.0)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32, 16.0)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64, 16.0)


@pytest.fixture(scope="session")
def params_b03():
    return PhysicalParams(b=0.3)


@pytest.fixture(scope="session")
def profile_b03(params_b03):
    """Moderate-resolution profile: accurate enough for identity checks at
    1e-5, fast enough (~1 s) to build once per session."""
    return solve_profile(params_b03, n_r=8192, r_max=25.0)


@pytest.fixture(scope="session")
def report_b03(profile_b03, params_b03):
    return validate_ground_state(profile_b03, params_b03, res_tol=1e-4)


@pytest.fixture(scope="session")
def gs_cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("gs-cache")


@pytest.fixture()
def run_cache_env(gs_cache_dir, monkeypatch):
    """Point the runner's ground-state cache at a session-temp directory."""
    monkeypatch.setenv("INLS_LAB_CACHE", str(gs_cache_dir))
    return gs_cache_dir
