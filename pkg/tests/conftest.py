import numpy as np
import pytest

from racahkit import hypergeo
from racahkit.exceptions import ParameterError


def random_racah_params(rng, N, kind=None, max_tries=200):
    """A valid parameter set on 0..N with a random (or given) truncation kind."""
    for _ in range(max_tries):
        k = kind or rng.choice(hypergeo.TRUNCATION_KINDS)
        a, b, g, d = rng.uniform(-4.0, 6.0, size=4)
        try:
            return hypergeo.RacahParameters.truncated(k, N, alpha=a, beta=b, gamma=g, delta=d)
        except ParameterError:
            continue
    raise RuntimeError("no valid parameter set found")


def positive_racah_params(rng, N):
    """Gamma-truncated set in the positive-weight regime."""
    a, b = rng.uniform(-0.9, 4.0, size=2)
    d = -N - b - rng.uniform(1.1, 4.0)
    return hypergeo.RacahParameters.truncated("gamma", N, alpha=a, beta=b, delta=d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
