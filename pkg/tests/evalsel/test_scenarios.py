import json

import numpy as np
import pytest

from src.errors import DomainError
from src.evalsel.scenarios import Scenario, ScenarioKind, save_truth, simulate_scenario
from src.models.model_spec import ModelKind

N = 40


@pytest.mark.parametrize(
    "kind,model_kind,K",
    [
        (ScenarioKind.IV_PI, ModelKind.IV, 1),
        (ScenarioKind.IVM_MIX, ModelKind.IVM, 2),
        (ScenarioKind.SVM_PI, ModelKind.SVM, 1),
        (ScenarioKind.SVM_ZERO, ModelKind.SVM, 1),
        (ScenarioKind.SVMC, ModelKind.SVMC, 2),
        (ScenarioKind.SVMP, ModelKind.SVMP, 2),
    ],
)
def test_shapes_and_generating_spec(kind, model_kind, K):
    sim = simulate_scenario(Scenario(kind, N, seed=3))

    assert len(sim.data) == N
    assert np.all((sim.data.directions >= 0.0) & (sim.data.directions < 2 * np.pi))
    np.testing.assert_allclose(sim.data.locations.sum(axis=1), 1.0)
    assert sim.spec.kind is model_kind
    assert sim.spec.K == K


def test_same_seed_same_data():
    a = simulate_scenario(Scenario("svmc", N, seed=11))
    b = simulate_scenario(Scenario("svmc", N, seed=11))
    c = simulate_scenario(Scenario("svmc", N, seed=12))

    np.testing.assert_array_equal(a.data.directions, b.data.directions)
    np.testing.assert_array_equal(a.truth.zeta, b.truth.zeta)
    assert not np.array_equal(a.data.directions, c.data.directions)


def test_ivm_truth():
    sim = simulate_scenario(Scenario("ivm", 2000, seed=0))

    np.testing.assert_allclose(sim.truth.lam, [0.3, 0.7])
    np.testing.assert_allclose(sim.truth.rho, [5.0, 10.0])
    assert np.mean(sim.truth.zeta == 0) == pytest.approx(0.3, abs=0.04)


def test_spatial_truth_is_consistent():
    sim = simulate_scenario(Scenario("svm", N, seed=5))

    assert sim.truth.z.shape == (1, 2, N)
    assert sim.truth.phi.shape == (1, N)
    np.testing.assert_allclose(sim.truth.nu, [np.log(3.0)])
    np.testing.assert_allclose(sim.truth.phi, np.log(3.0), atol=0.3)


def test_svmp_weights_are_probabilities():
    sim = simulate_scenario(Scenario("svmp", N, seed=6))

    assert sim.truth.lam.shape == (2, N)
    np.testing.assert_allclose(sim.truth.lam.sum(axis=0), 1.0)
    assert set(np.unique(sim.truth.zeta)) <= {0, 1}


def test_scenario_validation():
    assert ScenarioKind.parse("SVM-ZERO") is ScenarioKind.SVM_ZERO
    with pytest.raises(DomainError):
        ScenarioKind.parse("gp")
    with pytest.raises(DomainError):
        Scenario("iv", 0)


def test_save_truth(tmp_path):
    sim = simulate_scenario(Scenario("svmc", 10, seed=1, omega=0.2))
    path = tmp_path / "sim" / "truth.json"

    save_truth(sim, path)
    payload = json.loads(path.read_text(encoding="utf-8"))

    assert payload["scenario"] == "svmc"
    assert payload["seed"] == 1
    assert payload["omega"] == 0.2
    assert payload["spec"]["kind"] == sim.spec.to_dict()["kind"]
    assert len(payload["truth"]["zeta"]) == 10
