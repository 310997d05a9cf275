import pytest

from invforge.boolfun import parse_anf
from invforge.cipher import load_wiring
from invforge.data import fixture_path, fixture_text


@pytest.fixture(scope="session")
def wiring():
    return load_wiring(fixture_path("lzs-265-like.cfg"))


@pytest.fixture(scope="session")
def zref():
    return parse_anf(fixture_text("z-reference.anf"))


@pytest.fixture(scope="session")
def invariant_deg7():
    from invforge.lab import product_invariant
    return product_invariant()
