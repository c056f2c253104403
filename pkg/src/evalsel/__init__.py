"""Simulation scenarios, posterior predictive scoring and model selection."""

from src.evalsel.predictive import (
    PpScore,
    bootstrap_se,
    log_posterior_predictive,
    posterior_draws,
    predictive_log_densities,
    split_dataset,
)
from src.evalsel.scenarios import Scenario, ScenarioKind, SimulatedScenario, save_truth, simulate_scenario
from src.evalsel.selection import Selection, score_models, select_model

__all__ = [
    "PpScore",
    "Scenario",
    "ScenarioKind",
    "Selection",
    "SimulatedScenario",
    "bootstrap_se",
    "log_posterior_predictive",
    "posterior_draws",
    "predictive_log_densities",
    "save_truth",
    "score_models",
    "select_model",
    "simulate_scenario",
    "split_dataset",
]
