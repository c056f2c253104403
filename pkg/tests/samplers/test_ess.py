import logging

import numpy as np
import pytest
from scipy import stats

from src.errors import DomainError
from src.gp.covariance import build_cov
from src.gp.kernel import GpSpec
from src.samplers.ess import EssConfig, ess_step


@pytest.fixture
def cov():
    locs = np.random.default_rng(0).dirichlet(np.ones(3), size=4)
    return build_cov(locs, GpSpec(omega=0.3, sigma=1.0, jitter=1e-6))


@pytest.mark.mc
def test_flat_likelihood_preserves_prior(cov):
    rng = np.random.default_rng(1)
    f = np.zeros(cov.n)
    draws = []
    for i in range(4000):
        f = ess_step(f, cov, lambda x: 0.0, rng).f
        if i % 4 == 0:
            draws.append(f.copy())
    draws = np.array(draws)

    standardized = draws[:, 0] / np.sqrt(cov.entries[0, 0])

    assert stats.kstest(standardized, "norm").pvalue > 1e-3
    np.testing.assert_allclose(np.cov(draws.T), cov.entries, atol=0.15)


@pytest.mark.mc
def test_gaussian_likelihood_gives_conjugate_posterior():
    # Prior N(0, 1), likelihood N(1 | f, 0.5²): posterior mean 0.8, variance 0.2.
    rng = np.random.default_rng(2)
    f = np.zeros(1)
    draws = []
    for _ in range(8000):
        f = ess_step(f, np.ones((1, 1)), lambda x: -0.5 * float((1.0 - x[0]) ** 2) / 0.25, rng).f
        draws.append(f[0])

    assert np.mean(draws[500:]) == pytest.approx(0.8, abs=0.05)
    assert np.var(draws[500:]) == pytest.approx(0.2, abs=0.03)


def test_shrink_limit_keeps_current_state(cov, caplog):
    start = np.full(cov.n, 0.3)
    loglik = lambda x: 0.0 if np.allclose(x, start) else -np.inf

    with caplog.at_level(logging.WARNING):
        result = ess_step(start, cov, loglik, np.random.default_rng(3), EssConfig(max_shrink_iters=5))

    assert result.exhausted
    assert result.n_evals == 5
    np.testing.assert_array_equal(result.f, start)
    assert "shrink limit" in caplog.text


def test_domain_errors_count_as_rejections(cov):
    calls = {"n": 0}

    def loglik(x):
        calls["n"] += 1
        if calls["n"] <= 3:
            raise DomainError("origin")
        return 0.0

    result = ess_step(np.zeros(cov.n), cov, loglik, np.random.default_rng(4), current_loglik=0.0)

    assert not result.exhausted
    assert result.n_evals == 4


def test_leading_axes_are_independent_draws(cov):
    result = ess_step(np.zeros((2, cov.n)), cov, lambda x: 0.0, np.random.default_rng(5))
    assert result.f.shape == (2, cov.n)
    assert not np.allclose(result.f[0], result.f[1])


def test_invalid_config():
    with pytest.raises(DomainError):
        EssConfig(max_shrink_iters=0)
