import os

import pytest

from platonic_census import census
from platonic_census.coxeter import solid_for_address

EXTENDED = os.environ.get("PLATONIC_CENSUS_EXTENDED") == "1"

extended_only = pytest.mark.skipif(
    not EXTENDED,
    reason="index-120 censuses; set PLATONIC_CENSUS_EXTENDED=1 to run")


@pytest.fixture(scope="session")
def quick_census():
    """All quick-suite censuses with profiles, computed once per session."""
    opts = census.CensusOptions()
    return {addr: census.run_solid(solid_for_address(addr), opts)
            for addr in census.QUICK_ADDRESSES}


@pytest.fixture(scope="session")
def extended_census():
    """The index-120 censuses; profiles only where the criteria need them."""
    if not EXTENDED:
        pytest.skip("extended suite disabled")
    out = {}
    for addr in census.EXTENDED_ADDRESSES:
        opts = census.CensusOptions(with_profiles=(addr == "5,3,6:right"))
        out[addr] = census.run_solid(solid_for_address(addr), opts)
    return out
