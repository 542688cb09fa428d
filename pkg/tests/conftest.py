"""Shared fixtures for profile, speed and evolution tests."""

import pytest

from gmcf_translate.core import FlowParams
from gmcf_translate.profiles import IntegratorOptions


@pytest.fixture()
def degenerate_params():
    """b = -1, N = 2, alpha = 1: at c = 0 the profile is the circle of radius 2."""
    return FlowParams(N=2, alpha=1.0, b=-1.0)


@pytest.fixture()
def cone_params():
    """b = 3, N = 2, alpha = 1: entire profiles with a conical far field for c > 3."""
    return FlowParams(N=2, alpha=1.0, b=3.0)


@pytest.fixture()
def odd_params():
    """b = 1, alpha = 1/3 with odd representation: negative curvature for c < 1."""
    return FlowParams.with_odd_alpha(N=2, q=1, p=3, b=1.0)


@pytest.fixture()
def short_opts():
    """Integration up to r = 5."""
    return IntegratorOptions(r_max=5.0)


@pytest.fixture()
def unit_opts():
    """Integration on [0, 1]."""
    return IntegratorOptions(r_max=1.0)
