"""Shared fixtures: the standard figure settings used across the suite."""

import pytest

from relaysec import LinkGains, db_to_linear


@pytest.fixture(scope="session")
def fig1_gains():
    """Equal direct/first-hop gains, 5 dB second hop (the rho-sweep setting)."""
    return LinkGains(1.0, 1.0, db_to_linear(5.0))


@pytest.fixture(scope="session")
def fig6_gains():
    """5 dB direct link, 10 dB second hop (the beamforming K-sweep setting)."""
    return LinkGains(db_to_linear(5.0), 1.0, db_to_linear(10.0))


@pytest.fixture(scope="session")
def fig7_gains():
    """5 dB direct link, 5 dB second hop (the antenna-selection rho-sweep setting)."""
    return LinkGains(db_to_linear(5.0), 1.0, db_to_linear(5.0))


@pytest.fixture(scope="session")
def fig8_gains():
    """0 dB direct/first hop, 2 dB second hop (the selection K-sweep setting)."""
    return LinkGains(1.0, 1.0, db_to_linear(2.0))
