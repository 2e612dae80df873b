import numpy as np
import pytest

from degrade.simulate import DegradationKind, synthetic_case


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def clean_image(rng):
    return rng.uniform(0.0, 1.0, (16, 16, 3))


@pytest.fixture(params=list(DegradationKind), ids=lambda kind: kind.value)
def kind(request):
    return request.param


@pytest.fixture
def case(kind):
    """(kind, O, B, (O_ref, B_ref), M) for a seeded 32×32 synthetic triple."""
    O, B, ref, M = synthetic_case(kind, 3, 32)
    return kind, O, B, ref, M
