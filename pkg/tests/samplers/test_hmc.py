import numpy as np
import pytest

from src.errors import DomainError
from src.samplers.hmc import AdaptiveHmc, DualAveraging, HmcConfig, hmc_step, leapfrog


def standard_normal(q):
    return -0.5 * float(q @ q), -q


@pytest.mark.mc
def test_hmc_recovers_standard_normal():
    rng = np.random.default_rng(0)
    config = HmcConfig(step_size=0.3, leapfrog_steps=10, adapt=False)
    q = np.full(3, 2.0)
    draws = []
    for _ in range(3000):
        q = hmc_step(q, standard_normal, config, rng).q
        draws.append(q)
    draws = np.array(draws[200:])

    np.testing.assert_allclose(draws.mean(axis=0), 0.0, atol=0.1)
    np.testing.assert_allclose(draws.var(axis=0), 1.0, rtol=0.15)


def test_leapfrog_is_reversible():
    q0, p0 = np.array([0.5, -1.0]), np.array([0.3, 0.7])
    _, g0 = standard_normal(q0)
    q1, p1, _, g1 = leapfrog(q0, p0, g0, standard_normal, 0.1, 20, np.ones(2))

    q2, p2, _, _ = leapfrog(q1, -p1, g1, standard_normal, 0.1, 20, np.ones(2))

    np.testing.assert_allclose(q2, q0, atol=1e-12)
    np.testing.assert_allclose(-p2, p0, atol=1e-12)


def test_non_finite_trajectory_is_divergent():
    def broken(q):
        if np.any(np.abs(q) > 0.05):
            return float("nan"), np.full_like(q, np.nan)
        return standard_normal(q)

    q = np.zeros(2)
    result = hmc_step(q, broken, HmcConfig(step_size=1.0, leapfrog_steps=5), np.random.default_rng(1))

    assert result.divergent
    assert not result.accepted
    np.testing.assert_array_equal(result.q, q)


def test_dual_averaging_moves_step_size():
    grow = DualAveraging(0.1, target=0.8)
    shrink = DualAveraging(0.1, target=0.8)
    for _ in range(50):
        grow.update(1.0)
        shrink.update(0.0)
    assert grow.final_step > 0.1
    assert shrink.final_step < 0.1


def test_adaptation_reaches_target_acceptance():
    rng = np.random.default_rng(2)
    kernel = AdaptiveHmc(HmcConfig(step_size=2.0, leapfrog_steps=5, target_accept=0.8), n_warmup=500, dim=4)
    q = np.zeros(4)
    for it in range(1500):
        q = kernel.step(q, standard_normal, rng, it).q

    assert kernel.config.step_size < 2.0
    assert kernel.acceptance_rate > 0.5
    assert kernel.config.mass.shape == (4,)


@pytest.mark.parametrize(
    "kwargs",
    [{"step_size": 0.0}, {"leapfrog_steps": 0}, {"mass": np.array([1.0, -1.0])}, {"target_accept": 1.0}],
)
def test_invalid_config(kwargs):
    with pytest.raises(DomainError):
        HmcConfig(**kwargs)


def test_mass_shape_checked():
    with pytest.raises(DomainError):
        HmcConfig(mass=np.ones(2)).mass_for(3)
