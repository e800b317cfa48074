import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from xcone.xcore import XMatrix

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

reals = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
positives = st.floats(0, 5, allow_nan=False, allow_infinity=False)


@st.composite
def xmatrices(draw, kind="any"):
    """Random X-matrices; ``kind`` is "any", "state" (PSD) or "witness" (nonnegative diagonals)."""
    if kind == "any":
        a = draw(st.lists(reals, min_size=4, max_size=4))
        b = draw(st.lists(reals, min_size=4, max_size=4))
        z = [complex(draw(reals), draw(reals)) for _ in range(4)]
        return XMatrix(a, b, z)
    a = draw(st.lists(positives, min_size=4, max_size=4))
    b = draw(st.lists(positives, min_size=4, max_size=4))
    z = []
    for k in range(4):
        t = draw(st.floats(0, 2 * np.pi))
        if kind == "state":
            r = draw(st.floats(0, 1)) * np.sqrt(a[k] * b[k])
        else:
            r = draw(st.floats(0, 6))
        z.append(r * complex(np.cos(t), np.sin(t)))
    return XMatrix(a, b, z)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def golden():
    return XMatrix((0, 1, 1, 2), (0, 1, 1, 2), (0, 1, 1, 0))
