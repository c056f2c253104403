import numpy as np
import pytest

from src.circular.angles import circular_distance
from src.circular.von_mises import bessel_i_ratio
from src.errors import DomainError
from src.gp.kernel import GpSpec
from src.theory.moments import (
    svm_prior_moments,
    svmp2_prior_correlation,
    svmp2_prior_moments,
    svmp_prior_correlation,
    svmp_prior_moments,
)
from src.theory.monte_carlo import (
    SvmGenerator,
    SvmpGenerator,
    UniformGenerator,
    VonMisesGenerator,
    VonMisesMixtureGenerator,
    mc_moment_oracle,
)


def test_svm_mean_is_gp_mean_direction():
    mean, variance = svm_prior_moments(mu0=1.0, alpha_mu=np.pi, sigma=0.5, rho=3.0)
    assert mean.value == pytest.approx(np.pi)
    assert 0.0 < variance < 1.0


def test_svm_variance_limits():
    _, flat = svm_prior_moments(1.0, 0.3, 0.5, rho=0.0)
    _, sharp = svm_prior_moments(1.0, 0.3, 0.1, rho=1e6)
    _, wide = svm_prior_moments(1.0, 0.3, 50.0, rho=3.0)

    assert flat == pytest.approx(1.0)
    assert sharp < 0.05
    assert wide > 0.95


def test_svm_moments_reject_bad_input():
    with pytest.raises(DomainError):
        svm_prior_moments(-1.0, 0.0, 0.5, 3.0)
    with pytest.raises(DomainError):
        svm_prior_moments(1.0, 0.0, 0.0, 3.0)


@pytest.mark.mc
def test_svm_moments_match_monte_carlo():
    generator = SvmGenerator(mu=(-1.0, 0.0), sigma=0.5, s=0.5, rho=3.0)
    mean, variance = svm_prior_moments(1.0, np.pi, 0.5, 3.0)

    estimate = mc_moment_oracle(generator, 200_000, np.random.default_rng(0), block_size=50_000)

    assert circular_distance(estimate.summary.mean.value, mean.value) < 0.02
    assert abs(estimate.summary.variance - variance) < 4 * estimate.variance_se


def test_mixture_moments_single_component():
    mean, variance = svmp_prior_moments([1.0], [2.0], [1.0])
    assert mean.value == pytest.approx(1.0)
    assert variance == pytest.approx(1.0 - bessel_i_ratio(1, 2.0))


def test_mixture_moments_cancel_to_degenerate():
    mean, variance = svmp2_prior_moments(np.pi / 2, 3 * np.pi / 2, 5.0, 5.0)
    assert mean.value == pytest.approx(np.pi)
    assert variance == 1.0


@pytest.mark.mc
def test_mixture_moments_match_monte_carlo():
    ms, rhos, probs = [0.5, 2.5, 4.0], [4.0, 1.0, 8.0], [0.5, 0.2, 0.3]
    mean, variance = svmp_prior_moments(ms, rhos, probs)

    estimate = mc_moment_oracle(VonMisesMixtureGenerator(ms, rhos, probs), 200_000, np.random.default_rng(1))

    assert circular_distance(estimate.summary.mean.value, mean.value) < 0.02
    assert abs(estimate.summary.variance - variance) < 4 * estimate.variance_se


def test_mixture_moments_validate_probabilities():
    with pytest.raises(DomainError):
        svmp_prior_moments([0.0, 1.0], [1.0, 1.0], [0.7, 0.7])
    with pytest.raises(DomainError):
        svmp_prior_moments([0.0, 1.0], [1.0, -1.0], [0.5, 0.5])


def test_independent_memberships_are_uncorrelated():
    p = np.array([0.3, 0.7])
    corr = svmp_prior_correlation([0.5, 2.0], [3.0, 6.0], np.outer(p, p))
    assert corr.value == pytest.approx(0.0, abs=1e-12)
    assert not corr.degenerate


def test_correlation_degenerate_cases():
    assert svmp_prior_correlation([1.0], [2.0], np.array([[1.0]])).degenerate
    with pytest.raises(DomainError):
        svmp_prior_correlation([0.0, 1.0], [1.0, 1.0], np.array([[0.5, 0.5], [0.0, 0.0]]))


def test_two_component_bracket_is_ordered():
    lower, upper = svmp2_prior_correlation(np.pi / 2, 3 * np.pi / 2, 5.0, 10.0, s=0.6)
    assert lower <= upper
    assert upper - lower > 0.0


@pytest.mark.mc
@pytest.mark.parametrize("s", [0.3, 0.8])
def test_two_component_bracket_contains_monte_carlo(s):
    lower, upper = svmp2_prior_correlation(np.pi / 2, 3 * np.pi / 2, 5.0, 10.0, s=s)

    estimate = mc_moment_oracle(
        SvmpGenerator((np.pi / 2, 3 * np.pi / 2), (5.0, 10.0), s), 400_000, np.random.default_rng(2), block_size=40_000
    )

    assert lower - 4 * estimate.correlation_se <= estimate.correlation <= upper + 4 * estimate.correlation_se


def test_oracle_is_independent_of_threads():
    generator = VonMisesGenerator(1.0, 2.0)
    a = mc_moment_oracle(generator, 10_000, np.random.default_rng(3), block_size=1_000, threads=1)
    b = mc_moment_oracle(generator, 10_000, np.random.default_rng(3), block_size=1_000, threads=4)
    assert a.summary.variance == b.summary.variance
    assert a.correlation is None


def test_uniform_generator_has_unit_variance():
    estimate = mc_moment_oracle(UniformGenerator(), 100_000, np.random.default_rng(4))
    assert estimate.summary.variance == pytest.approx(1.0, abs=0.01)


def test_svm_generator_from_locations():
    gp = GpSpec(omega=0.1, sigma=0.5, mean1=-1.0, mean2=0.0)
    generator = SvmGenerator.from_locations(gp, [0.2, 0.3, 0.5], [0.2, 0.3, 0.5], rho=3.0)
    assert generator.s == pytest.approx(1.0)
    with pytest.raises(DomainError):
        SvmGenerator.from_locations(gp.with_means(np.zeros(2), 0.0), [1, 0, 0], [0, 1, 0], 3.0)


def test_oracle_rejects_empty_request():
    with pytest.raises(DomainError):
        mc_moment_oracle(UniformGenerator(), 0)
