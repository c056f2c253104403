import numpy as np
import pytest

from src.errors import DomainError
from src.gp.kernel import GpSpec, sqexp_kernel, sqexp_kernel_matrix


@pytest.fixture
def spec() -> GpSpec:
    return GpSpec(omega=0.1, sigma=0.5)


def test_kernel_at_zero_distance_is_variance(spec: GpSpec):
    x = np.array([0.2, 0.3, 0.5])
    assert sqexp_kernel(x, x, spec) == pytest.approx(0.25)


def test_kernel_decays_with_squared_distance(spec: GpSpec):
    x, x2 = np.array([0.2, 0.3, 0.5]), np.array([0.3, 0.3, 0.4])
    d2 = 0.02
    assert sqexp_kernel(x, x2, spec) == pytest.approx(0.25 * np.exp(-d2 / (2 * 0.01)))


def test_kernel_matrix_matches_pointwise(spec: GpSpec):
    rng = np.random.default_rng(0)
    a, b = rng.dirichlet(np.ones(3), size=4), rng.dirichlet(np.ones(3), size=3)

    k = sqexp_kernel_matrix(a, b, spec)

    assert k.shape == (4, 3)
    for i in range(4):
        for j in range(3):
            assert k[i, j] == pytest.approx(sqexp_kernel(a[i], b[j], spec))


def test_kernel_matrix_with_no_rows(spec: GpSpec):
    assert sqexp_kernel_matrix(np.zeros((0, 3)), np.ones((2, 3)) / 3, spec).shape == (0, 2)


def test_spec_validation():
    with pytest.raises(DomainError):
        GpSpec(omega=0.0)
    with pytest.raises(DomainError):
        GpSpec(sigma=-1.0)
    with pytest.raises(DomainError):
        GpSpec(jitter=-1e-9)


def test_default_jitter_scales_with_variance():
    assert GpSpec(sigma=2.0).base_jitter == pytest.approx(4e-8)
    assert GpSpec(sigma=2.0, jitter=0.0).base_jitter == 0.0


def test_mean_vector_and_constant_means():
    spec = GpSpec(mean1=-1.0, mean2=np.array([0.0, 1.0, 2.0]))
    assert not spec.has_constant_means
    np.testing.assert_array_equal(spec.mean_vector(1, 3), [-1.0, -1.0, -1.0])
    np.testing.assert_array_equal(spec.mean_vector(2, 3), [0.0, 1.0, 2.0])
    with pytest.raises(DomainError):
        spec.mean_vector(2, 4)
    assert spec.with_means(0.0, 1.0).has_constant_means
