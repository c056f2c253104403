import numpy as np
import pytest

from src.dataset import Dataset, validate_simplex_points
from src.errors import DomainError


def test_directions_are_wrapped():
    data = Dataset(np.array([[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]]), [-0.5, 2 * np.pi + 1.0])

    np.testing.assert_allclose(data.directions, [2 * np.pi - 0.5, 1.0])
    assert len(data) == 2
    assert str(data) == "Dataset(N=2)"


def test_tiny_negative_coordinates_are_clipped():
    points = validate_simplex_points([0.5 + 1e-12, 0.5, -1e-12])
    assert points.shape == (1, 3)
    assert points[0, 2] == 0.0


@pytest.mark.parametrize(
    "points,message",
    [
        ([[0.2, 0.3, 0.6]], "sums to"),
        ([[1.1, -0.1, 0.0]], "negative coordinate"),
        ([[0.5, 0.5]], "3 coordinates"),
    ],
)
def test_invalid_points_are_rejected(points, message):
    with pytest.raises(DomainError, match=message):
        validate_simplex_points(np.array(points))


def test_sizes_must_agree():
    locations = np.full((2, 3), 1.0 / 3.0)
    with pytest.raises(DomainError, match="2 locations but 3 directions"):
        Dataset(locations, [0.1, 0.2, 0.3])
    with pytest.raises(DomainError, match="weights"):
        Dataset(locations, [0.1, 0.2], weights=[1.0])


def test_subset_keeps_weights():
    data = Dataset(np.full((3, 3), 1.0 / 3.0), [0.1, 0.2, 0.3], weights=[1.0, 2.0, 3.0])

    picked = data.subset(np.array([True, False, True]))

    np.testing.assert_allclose(picked.directions, [0.1, 0.3])
    np.testing.assert_allclose(picked.weights, [1.0, 3.0])


def test_empty_dataset():
    data = Dataset(np.zeros((0, 3)), np.zeros(0))
    assert len(data) == 0
    assert data.locations.shape == (0, 3)
