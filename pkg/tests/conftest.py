import pytest

from novikov.sampling import stock_contexts


@pytest.fixture(scope="session")
def ctxs():
    return stock_contexts()


@pytest.fixture(scope="session")
def qctx(ctxs):
    return ctxs["rationals"]
