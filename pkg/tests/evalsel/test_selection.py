import logging

import numpy as np
import pytest

from src.dataset import Dataset
from src.errors import DomainError
from src.evalsel.predictive import PpScore
from src.evalsel.selection import score_models, select_model
from src.models.model_spec import ModelKind, ModelSpec


def score(model: str, log_pp: float, se: float = float("nan")) -> PpScore:
    return PpScore(model, log_pp, n_test=10, n_pred_draws=50, se=se)


def test_clear_winner(caplog):
    with caplog.at_level(logging.INFO):
        selection = select_model([score("iv", -20.0, 0.5), score("svm", -12.0, 0.5)])

    assert selection.model == "svm"
    assert selection.log_pp == -12.0
    assert not selection.tie
    assert "Selected model 'svm'" in caplog.text


def test_close_scores_are_reported_as_tie(caplog):
    with caplog.at_level(logging.WARNING):
        selection = select_model([score("svmc", -10.0, 1.0), score("svmp", -11.5, 0.2), score("iv", -30.0, 1.0)])

    assert selection.model == "svmc"
    assert selection.tied_with == ["svmp"]
    assert "ties with" in caplog.text


def test_missing_standard_errors_count_as_zero():
    selection = select_model([score("a", -10.0), score("b", -10.01)])
    assert selection.model == "a"
    assert not selection.tie


def test_equal_scores_tie_even_without_errors():
    selection = select_model([score("a", -10.0), score("b", -10.0)])
    assert selection.tie


def test_empty_scores_raise():
    with pytest.raises(DomainError):
        select_model([])


def test_non_finite_score_is_rejected():
    with pytest.raises(DomainError):
        score("a", float("-inf"))


def test_score_models_labels_by_key(mocker):
    data = Dataset(np.full((2, 3), 1.0 / 3.0), np.zeros(2))
    fake = mocker.patch(
        "src.evalsel.selection.log_posterior_predictive",
        side_effect=[PpScore("iv", -5.0, 2, 10, 0.3), PpScore("iv", -7.0, 2, 10, 0.4)],
    )
    fits = {
        "first": (ModelSpec(kind=ModelKind.IV), ["chain-a"]),
        "second": (ModelSpec(kind=ModelKind.IVM, K=2), ["chain-b"]),
    }

    scores = score_models(fits, data, data, n_pred_draws=10, seed=4)

    assert [s.model for s in scores] == ["first", "second"]
    assert [s.log_pp for s in scores] == [-5.0, -7.0]
    assert all(s.seed == 4 for s in scores)
    assert fake.call_count == 2
    assert fake.call_args_list[1].args[1] == ["chain-b"]
