import sys
from pathlib import Path

import pytest

from ringlat import make_ring

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def ring8():
    return make_ring(8)


@pytest.fixture
def ring4():
    return make_ring(4)


def omega_for(ring, omega_k_over_t: float) -> float:
    """Drive frequency realizing a given dimensionless omega*K/t."""
    return omega_k_over_t * ring.t / ring.k_factor
