import pytest

from toppmap.repro import FIG1_PARAMS, FIG2_PARAMS


@pytest.fixture
def fig1_params():
    """Subcritical benchmark set (d0 = 0.4)."""
    return FIG1_PARAMS


@pytest.fixture
def fig2_params():
    """Critical benchmark set (d0 = 0.25, exact tangency)."""
    return FIG2_PARAMS
