import pytest

from berezinlab.bergman import MonomialNormTable
from berezinlab.domains import build_bump, default_profile, make_domain, unit_profile
from berezinlab.toeplitz import EigenvalueTable

# Default configuration used across the suite: plateau to 0.95, bump
# supported in (0.52, 0.93) with 0.02 ramps.
ALPHA = 0.95
KAPPA = 4.0
BUMP_A, BUMP_B, BUMP_WIDTH = 0.52, 0.93, 0.02


@pytest.fixture(scope="session")
def profile():
    return default_profile(ALPHA, KAPPA)


@pytest.fixture(scope="session")
def bump():
    return build_bump(BUMP_A, BUMP_B, BUMP_WIDTH)


@pytest.fixture(scope="session")
def domain(profile):
    return make_domain(profile)


@pytest.fixture(scope="session")
def norms60(domain):
    return MonomialNormTable.build(domain, 60, 60)


@pytest.fixture(scope="session")
def eig60(profile, bump):
    return EigenvalueTable.build(profile, bump, 60, 60)


@pytest.fixture(scope="session")
def bidisc_domain():
    return make_domain(unit_profile())


@pytest.fixture(scope="session")
def bidisc_norms160(bidisc_domain):
    return MonomialNormTable.build(bidisc_domain, 160, 160)


@pytest.fixture(scope="session")
def norms_waxis(domain):
    """Deep m-cap table for w-axis probes (only small n matters there)."""
    return MonomialNormTable.build(domain, 24, 3000)
