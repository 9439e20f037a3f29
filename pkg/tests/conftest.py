import pytest

from lgcalc.terms import reset_fresh_names


@pytest.fixture(autouse=True)
def _fresh_counter():
    reset_fresh_names()
    yield
