import numpy as np
import pandas as pd
import pytest

from src.dataset import Dataset
from src.dirext.directions import DirectionObservation
from src.dirext.io import load_dataset, load_pairs, save_dataset, save_observations
from src.errors import DatasetFormatError


def write(path, text: str):
    path.write_text(text, encoding="utf-8")
    return path


def test_save_and_load_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    data = Dataset(rng.dirichlet(np.ones(3), size=12), rng.uniform(0.0, 2.0 * np.pi, size=12), rng.uniform(size=12))
    path = tmp_path / "out" / "data.csv"

    save_dataset(data, path)
    loaded = load_dataset(path)

    np.testing.assert_allclose(loaded.locations, data.locations, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(loaded.directions, data.directions)
    np.testing.assert_array_equal(loaded.weights, data.weights)


def test_load_without_weights_and_renormalises(tmp_path):
    path = write(tmp_path / "data.csv", "x1,x2,x3,y\n0.2,0.3,0.5000001,1.5\n0.6,0.2,0.2,0\n")

    data = load_dataset(path)

    assert len(data) == 2
    assert data.weights is None
    np.testing.assert_allclose(data.locations.sum(axis=1), 1.0)
    np.testing.assert_allclose(data.directions, [1.5, 0.0])


def test_header_only_is_empty_dataset(tmp_path):
    data = load_dataset(write(tmp_path / "data.csv", "x1,x2,x3,y\n"))
    assert len(data) == 0


@pytest.mark.parametrize(
    "body,line",
    [
        ("0.2,0.3,0.5,1.0\n0.2,abc,0.5,1.0\n", 3),
        ("0.2,0.3,0.5,1.0\n0.2,0.3,0.5,1.0\n0.2,0.3,,1.0\n", 4),
        ("-0.1,0.6,0.5,1.0\n", 2),
        ("0.2,0.3,0.5,1.0\n0.2,0.3,0.6,1.0\n", 3),
        ("0.2,0.3,0.5,6.3\n", 2),
        ("0.2,0.3,0.5,-0.1\n", 2),
    ],
)
def test_malformed_rows_report_line(tmp_path, body, line):
    path = write(tmp_path / "data.csv", "x1,x2,x3,y\n" + body)

    with pytest.raises(DatasetFormatError) as excinfo:
        load_dataset(path)

    assert excinfo.value.line == line
    assert f"line {line}" in str(excinfo.value)


@pytest.mark.parametrize(
    "content,line",
    [
        ("x1,x2,x3,y\n0.2,0.3,0.5,1.0\n\n\n0.2,abc,0.5,1.0\n", 5),
        ("\nx1,x2,x3,y\n\n0.2,0.3,0.6,1.0\n", 4),
        ("x1,x2,x3,y,w\n\n0.2,0.3,0.5,1.0,1\n\n0.2,0.3,0.5,1.0,-2\n", 5),
    ],
)
def test_blank_lines_keep_physical_line_numbers(tmp_path, content, line):
    with pytest.raises(DatasetFormatError) as excinfo:
        load_dataset(write(tmp_path / "data.csv", content))
    assert excinfo.value.line == line


def test_negative_weight_reports_line(tmp_path):
    path = write(tmp_path / "data.csv", "x1,x2,x3,y,w\n0.2,0.3,0.5,1.0,1\n0.2,0.3,0.5,1.0,-2\n")
    with pytest.raises(DatasetFormatError) as excinfo:
        load_dataset(path)
    assert excinfo.value.line == 3


def test_missing_column_is_header_error(tmp_path):
    path = write(tmp_path / "data.csv", "x1,x2,y\n0.5,0.5,1.0\n")
    with pytest.raises(DatasetFormatError) as excinfo:
        load_dataset(path)
    assert excinfo.value.line == 1
    assert "x3" in str(excinfo.value)


def test_empty_and_missing_files(tmp_path):
    with pytest.raises(DatasetFormatError) as excinfo:
        load_dataset(write(tmp_path / "empty.csv", ""))
    assert excinfo.value.line == 1

    with pytest.raises(DatasetFormatError, match="not found"):
        load_dataset(tmp_path / "absent.csv")


def test_load_pairs(tmp_path):
    path = write(
        tmp_path / "pairs.csv",
        "x1a,x2a,x3a,x1b,x2b,x3b\n0.2,0.3,0.5,0.3,0.3,0.4\n0.1,0.1,0.8,0.1,0.2,0.7\n",
    )

    pairs = load_pairs(path)

    assert pairs.shape == (2, 6)
    np.testing.assert_allclose(pairs[:, :3].sum(axis=1), 1.0)
    np.testing.assert_allclose(pairs[1], [0.1, 0.1, 0.8, 0.1, 0.2, 0.7])


def test_load_pairs_checks_second_composition(tmp_path):
    path = write(tmp_path / "pairs.csv", "x1a,x2a,x3a,x1b,x2b,x3b\n0.2,0.3,0.5,0.3,0.3,0.5\n")
    with pytest.raises(DatasetFormatError) as excinfo:
        load_pairs(path)
    assert excinfo.value.line == 2


def test_save_observations(tmp_path):
    observations = [DirectionObservation((0.2, 0.3, 0.5), 1.25, 0.1)]
    path = tmp_path / "directions.csv"

    save_observations(observations, path)
    frame = pd.read_csv(path)

    assert list(frame.columns) == ["x1", "x2", "x3", "y", "magnitude"]
    assert frame.loc[0, "y"] == 1.25
    assert frame.loc[0, "magnitude"] == 0.1
