import math

import numpy as np
import pytest

from poissonbath.errors import QuadratureNotConverged
from poissonbath.quadrature import expweight_integrate, laguerre_rule, panel_rule


@pytest.mark.parametrize("mu", [0.1, 0.5, 2.0])
def test_rules_integrate_polynomials(mu):
    # int p(a) a^k da = k! mu^k
    for rule in (laguerre_rule(mu, 64), panel_rule(mu, 64)):
        a, w = rule
        for k in range(5):
            assert np.isclose(w @ a**k, math.factorial(k) * mu**k, rtol=1e-12)


@pytest.mark.parametrize("mu,k", [(0.3, 1.0), (2.0, 1.0), (2.0, 4.9), (8.0, 3.0), (31.6, 1.0)])
def test_laplace_transforms(mu, k):
    # int p(a) sin^2(ka) da = 2 mu^2 k^2 / (1 + 4 mu^2 k^2)
    got = expweight_integrate(lambda a: np.sin(k * a) ** 2, mu)
    assert np.isclose(got, 2 * mu**2 * k**2 / (1 + 4 * mu**2 * k**2), rtol=1e-10)
    got = expweight_integrate(lambda a: np.cos(k * a), mu)
    assert np.isclose(got, 1 / (1 + mu**2 * k**2), rtol=1e-10, atol=1e-13)


def test_matrix_valued_integrand():
    mu = 0.7
    f = lambda a: np.stack([np.outer([1, a], [1, a**2]) for a in a])  # noqa: E731
    got = expweight_integrate(f, mu)
    assert np.allclose(got, [[1, 2 * mu**2], [mu, 6 * mu**3]], rtol=1e-12)


def test_not_converged():
    with pytest.raises(QuadratureNotConverged):
        expweight_integrate(lambda a: np.sin(1e4 * a), 10.0)


def test_invalid_mu():
    with pytest.raises(ValueError):
        expweight_integrate(lambda a: a, 0.0)
