import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def ambient_precision():
    """Reference expressions in tests are computed at 35 digits.

    Package code pins its own working precision internally; this only
    ensures that expected values written inline in the tests do not get
    truncated to double precision.
    """
    old = mp.dps
    mp.dps = 35
    yield
    mp.dps = old
