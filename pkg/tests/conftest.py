import numpy as np
import pytest


def random_instance(seed, n_lo=2, n_hi=6, k_lo=2, k_hi=4):
    """One random propagation instance: row-stochastic W, column-stochastic
    G, strictly positive Y0 with row sums 1."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_lo, n_hi + 1))
    k = int(rng.integers(k_lo, k_hi + 1))
    w = rng.random((n, n)) + 1e-3
    w /= w.sum(axis=1, keepdims=True)
    g = rng.random((k, k)) + 1e-3
    g /= g.sum(axis=0, keepdims=True)
    y0 = rng.random((n, k)) + 1e-3
    y0 /= y0.sum(axis=1, keepdims=True)
    return y0, w, g


@pytest.fixture
def instance_factory():
    return random_instance
