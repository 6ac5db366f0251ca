import pytest

from qconnect import ParamSet, QContext

# Shared generic exponent triples. Chosen once, inside the sampler's box,
# and frozen so every expected value below stays reproducible.
ALPHA = (0.37 + 0.11j, 0.22 - 0.14j, 0.55 + 0.07j)
BETA = (0.52 - 0.08j, 0.33 + 0.19j, 0.44 + 0.02j, 0.29 - 0.11j)
GAMMA = (0.81 + 0.05j, 0.64 - 0.12j, 0.73 + 0.09j)

Q = 0.3


@pytest.fixture(scope="session")
def ctx():
    return QContext(q=Q, prod_terms=60)


@pytest.fixture(scope="session")
def ctx_long():
    """Same profile with headroom for slowly settling series."""
    return QContext(q=Q, prod_terms=60, series_cap=200)


@pytest.fixture(scope="session")
def p11():
    return ParamSet(alpha=ALPHA[:1], beta=BETA[:1], gamma=GAMMA[:1], q=Q)


@pytest.fixture(scope="session")
def p12():
    return ParamSet(alpha=ALPHA[:1], beta=BETA[:2], gamma=GAMMA[:1], q=Q)


@pytest.fixture(scope="session")
def p13():
    return ParamSet(alpha=ALPHA[:1], beta=BETA[:3], gamma=GAMMA[:1], q=Q)


@pytest.fixture(scope="session")
def p21():
    return ParamSet(alpha=ALPHA[:2], beta=BETA[:1], gamma=GAMMA[:2], q=Q)


@pytest.fixture(scope="session")
def p22():
    return ParamSet(alpha=ALPHA[:2], beta=BETA[:2], gamma=GAMMA[:2], q=Q)


@pytest.fixture(scope="session")
def p23():
    return ParamSet(alpha=ALPHA[:2], beta=BETA[:3], gamma=GAMMA[:2], q=Q)
