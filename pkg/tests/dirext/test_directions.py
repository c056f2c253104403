import logging

import numpy as np
import pytest

from src.circular.angles import circular_distance
from src.dirext.directions import (
    DirectionObservation,
    compose_from_direction,
    dedup,
    extract_direction,
    extract_directions,
    observations_to_dataset,
)
from src.dirext.rotation import rotation_matrix, spherical_coordinates, unit_vector
from src.errors import DegenerateMovementError, DomainError

CENTRE = np.full(3, 1.0 / 3.0)


@pytest.fixture
def compositions() -> np.ndarray:
    return np.random.default_rng(0).dirichlet(np.ones(3), size=50)


class TestRotation:
    def test_orthogonal_with_root_as_last_column(self, compositions):
        for x in compositions:
            frame = rotation_matrix(x)
            np.testing.assert_allclose(frame.matrix.T @ frame.matrix, np.eye(3), atol=1e-12)
            np.testing.assert_allclose(frame.matrix[:, 2], np.sqrt(x), atol=1e-12)
            np.testing.assert_allclose(frame.to_frame(np.sqrt(x)), [0.0, 0.0, 1.0], atol=1e-12)

    def test_third_vertex_is_on_pole(self):
        frame = rotation_matrix([0.0, 0.0, 1.0])
        assert frame.on_pole
        assert frame.phi == 0.0
        np.testing.assert_allclose(frame.matrix, np.eye(3), atol=1e-12)

    def test_rejects_non_compositions(self):
        with pytest.raises(DomainError):
            rotation_matrix([0.5, 0.6, 0.1])
        with pytest.raises(DomainError):
            rotation_matrix([[0.5, 0.5, 0.0], [0.2, 0.3, 0.5]])

    def test_spherical_round_trip(self):
        theta, phi, on_pole = spherical_coordinates(unit_vector(1.0, 4.0))
        assert (theta, phi, on_pole) == (pytest.approx(1.0), pytest.approx(4.0), False)
        with pytest.raises(DomainError):
            spherical_coordinates(np.zeros(3))


class TestExtraction:
    def test_compose_inverts_extract(self, compositions):
        for x1, x2 in zip(compositions[:-1], compositions[1:]):
            obs = extract_direction(x1, x2)
            np.testing.assert_allclose(compose_from_direction(x1, obs.direction.value, obs.magnitude), x2, atol=1e-10)

    def test_extract_inverts_compose(self):
        x2 = compose_from_direction(CENTRE, 2.0, 0.1)
        obs = extract_direction(CENTRE, x2)
        assert obs.direction.value == pytest.approx(2.0, abs=1e-10)
        assert obs.magnitude == pytest.approx(0.1, abs=1e-10)

    def test_direction_meaning(self):
        away_from_third = extract_direction(CENTRE, [0.4, 0.4, 0.2])
        toward_third = extract_direction(CENTRE, [0.3, 0.3, 0.4])
        toward_second = extract_direction(CENTRE, [1.0 / 3.0 - 0.01, 1.0 / 3.0 + 0.01, 1.0 / 3.0])

        assert circular_distance(away_from_third.direction.value, 0.0) < 1e-9
        assert toward_third.direction.value == pytest.approx(np.pi, abs=1e-9)
        assert toward_second.direction.value == pytest.approx(np.pi / 2, abs=0.05)

    def test_identical_compositions_raise(self):
        with pytest.raises(DegenerateMovementError):
            extract_direction(CENTRE, CENTRE)

    def test_compose_outside_simplex_raises(self):
        with pytest.raises(DomainError):
            compose_from_direction(CENTRE, 0.0, np.pi / 2)
        with pytest.raises(DomainError):
            compose_from_direction(CENTRE, 0.0, -0.1)

    def test_batch_skips_and_counts(self, caplog):
        pairs = np.array([[*CENTRE, 0.4, 0.4, 0.2], [*CENTRE, *CENTRE], [0.2, 0.3, 0.5, 0.3, 0.3, 0.4]])

        with caplog.at_level(logging.WARNING):
            observations, skipped = extract_directions(pairs)

        assert len(observations) == 2
        assert skipped == 1
        assert "Skipped 1 of 3" in caplog.text

    def test_batch_checks_shape(self):
        with pytest.raises(DomainError):
            extract_directions(np.zeros((2, 5)))


class TestDedup:
    def test_keeps_first_and_is_idempotent(self):
        observations = [
            DirectionObservation((0.2, 0.3, 0.5), 1.0, 0.1),
            DirectionObservation((0.2, 0.3, 0.5), 2.0, 0.1),
            DirectionObservation((0.1, 0.3, 0.6), 3.0, 0.1),
        ]

        kept, removed = dedup(observations)
        again, removed_again = dedup(kept)

        assert removed == 1
        assert [o.direction.value for o in kept] == [1.0, 3.0]
        assert again == kept
        assert removed_again == 0

    def test_tolerance_merges_nearby_locations(self):
        observations = [
            DirectionObservation((0.2, 0.3, 0.5), 1.0, 0.1),
            DirectionObservation((0.2001, 0.2999, 0.5), 2.0, 0.1),
        ]
        assert dedup(observations, tol=1e-3)[1] == 1
        assert dedup(observations)[1] == 0
        with pytest.raises(DomainError):
            dedup(observations, tol=-1.0)


def test_observation_validation_and_dataset():
    with pytest.raises(DomainError):
        DirectionObservation((0.2, 0.3, 0.5), 1.0, -0.5)
    obs = DirectionObservation((0.2, 0.3, 0.5), 7.0, 0.1)

    data = observations_to_dataset([obs])

    assert len(data) == 1
    assert data.directions[0] == pytest.approx(7.0 - 2 * np.pi)
    assert len(observations_to_dataset([])) == 0
