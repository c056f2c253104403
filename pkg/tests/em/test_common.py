import numpy as np
import pytest

from src.circular.von_mises import bessel_i_ratio
from src.em.common import (
    RHO_FLOOR,
    EmConfig,
    Responsibilities,
    align_clusters,
    concentration_update,
    gradient_ascent,
    initial_responsibilities,
    weighted_circular_mean,
)
from src.errors import DomainError, NumericError


class TestResponsibilities:
    def test_from_log_weights_normalises_columns(self):
        resp = Responsibilities.from_log_weights(np.log([[1.0, 3.0], [3.0, 1.0]]))
        np.testing.assert_allclose(resp.r, [[0.25, 0.75], [0.75, 0.25]])
        assert resp.K == 2 and resp.N == 2
        np.testing.assert_array_equal(resp.labels(), [1, 0])

    def test_entropy_of_certain_assignment_is_zero(self):
        assert Responsibilities(np.array([[1.0, 0.0], [0.0, 1.0]])).entropy() == 0.0
        assert Responsibilities(np.full((2, 1), 0.5)).entropy() == pytest.approx(np.log(2.0))

    @pytest.mark.parametrize("r", [np.array([0.5, 0.5]), np.array([[0.6, 0.5], [0.5, 0.5]]), np.array([[-0.1], [1.1]])])
    def test_invalid_matrices(self, r):
        with pytest.raises(DomainError):
            Responsibilities(r)


def test_em_config_from_section():
    config = EmConfig.from_config({"max_iters": 10, "tol": 1e-3, "restarts": 3})
    assert config.max_iters == 10
    assert config.tol == 1e-3
    assert config.restarts == 3
    assert config.inner_iters == EmConfig.inner_iters


def test_em_config_validation():
    with pytest.raises(DomainError):
        EmConfig(max_iters=0)
    with pytest.raises(DomainError):
        EmConfig(tol=0.0)


def test_initial_responsibilities_are_softened_clusters():
    y = np.concatenate([np.full(10, 1.0), np.full(10, 4.0)])
    resp, centres = initial_responsibilities(y, 2, np.random.default_rng(0))

    assert set(np.round(resp.r.ravel(), 12)) == {0.95, 0.05}
    assert sorted(np.round(centres, 6)) == [1.0, 4.0]


def test_align_clusters_matches_targets():
    perm = align_clusters(np.array([4.0, 1.0, 2.5]), np.array([1.1, 2.4, 3.9]))
    np.testing.assert_array_equal(perm, [1, 2, 0])


def test_weighted_circular_mean_and_fallback():
    assert weighted_circular_mean(np.array([0.1, 6.2]), np.ones(2)) == pytest.approx((0.1 + 6.2 - 2 * np.pi) / 2 % (2 * np.pi))
    assert weighted_circular_mean(np.array([0.0, np.pi]), np.ones(2), fallback=1.5) == 1.5


def test_concentration_update_solves_bessel_equation():
    rho = concentration_update(weighted_cos=7.0, total=10.0)
    assert bessel_i_ratio(1, rho) == pytest.approx(0.7, rel=1e-8)
    assert concentration_update(weighted_cos=-1.0, total=10.0) == RHO_FLOOR
    assert concentration_update(weighted_cos=0.0, total=0.0, current=3.0) == 3.0


def test_penalised_concentration_is_smaller():
    assert concentration_update(7.0, 10.0, penalty=1.0) < concentration_update(7.0, 10.0)


def test_gradient_ascent_finds_quadratic_maximum():
    target = np.array([1.0, -2.0])
    config = EmConfig(inner_iters=200, step_size=0.25)

    result = gradient_ascent(lambda x: -np.sum((x - target) ** 2), lambda x: -2.0 * (x - target), np.zeros(2), config)

    np.testing.assert_allclose(result.x, target, atol=1e-6)
    assert result.value == pytest.approx(0.0, abs=1e-10)


def test_gradient_ascent_elementwise_never_decreases():
    target = np.array([0.5, 3.0, -1.0])
    value = lambda x: -((x - target) ** 2)
    start = np.zeros(3)

    result = gradient_ascent(value, lambda x: -2.0 * (x - target), start, EmConfig(inner_iters=3), elementwise=True)

    assert np.all(value(result.x) >= value(start))


def test_gradient_ascent_rejects_non_finite_start():
    with pytest.raises(NumericError):
        gradient_ascent(lambda x: 0.0, lambda x: np.full_like(x, np.nan), np.zeros(2), EmConfig())
