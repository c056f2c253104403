import numpy as np
import pytest

from src.circular.summary import circular_summary
from src.circular.von_mises import inverse_bessel_ratio
from src.dataset import Dataset
from src.em import (
    EmConfig,
    EmResult,
    Responsibilities,
    em_ivm,
    em_result_to_state,
    em_svmc,
    em_svmp,
    load_init,
    logit_field_gradient,
    nu_update,
    permute_components,
    save_init,
)
from src.em.common import best_of_restarts, restart_seeds
from src.errors import DomainError
from src.gp.kernel import GpSpec
from src.models.factory import model_for_spec
from src.models.links import generalized_inverse_logit
from src.models.model_spec import GammaPrior, HierarchicalPrior, ModelKind, ModelSpec
from src.models.param_state import ParamState

SHORT_EM = EmConfig(max_iters=15, inner_iters=5)


def mixture_data(n: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    first = rng.uniform(size=n) < 0.3
    y = np.where(first, rng.vonmises(1.0, 10.0, size=n), rng.vonmises(4.0 - 2 * np.pi, 5.0, size=n))
    return Dataset(rng.dirichlet(np.ones(3), size=n), np.mod(y, 2 * np.pi))


@pytest.fixture
def svmc_spec() -> ModelSpec:
    return ModelSpec(
        kind=ModelKind.SVMC,
        K=2,
        gp=GpSpec(omega=0.2, sigma=0.5),
        conc_prior=HierarchicalPrior(0.05, 5.0),
        component_means=((0.0, 1.0), (0.0, -1.0)),
    )


@pytest.fixture
def svmp_spec() -> ModelSpec:
    return ModelSpec(kind=ModelKind.SVMP, K=2, gp=GpSpec(omega=0.2, sigma=1.0), conc_prior=GammaPrior(1.0, 1.0))


def assert_non_decreasing(trace):
    trace = np.asarray(trace)
    assert np.all(np.diff(trace) >= -1e-8 * np.maximum(1.0, np.abs(trace[1:])))


def test_ivm_recovers_mixture():
    data = mixture_data(3000, seed=0)

    result = em_ivm(data, 2, EmConfig(max_iters=500, tol=1e-8), np.random.default_rng(1))

    assert result.converged
    np.testing.assert_allclose(result.lam, [0.3, 0.7], atol=0.03)
    np.testing.assert_allclose(result.m, [1.0, 4.0], atol=0.05)
    np.testing.assert_allclose(result.rho, [10.0, 5.0], rtol=0.15)
    assert_non_decreasing(result.trace)


def test_single_component_is_closed_form():
    data = mixture_data(200, seed=2)
    summary = circular_summary(data.directions)

    result = em_ivm(data, 1, EmConfig(max_iters=5), np.random.default_rng(0))

    assert result.spec.kind == ModelKind.IV
    assert result.m[0] == pytest.approx(summary.mean.value, abs=1e-10)
    assert result.rho[0] == pytest.approx(inverse_bessel_ratio(summary.resultant_length), rel=1e-8)


def test_ivm_rejects_bad_input():
    with pytest.raises(DomainError):
        em_ivm(Dataset(np.zeros((0, 3)), np.zeros(0)), 2)
    with pytest.raises(DomainError):
        em_ivm(mixture_data(10, seed=0), 0)


def test_restarts_keep_best_objective():
    spec = ModelSpec(kind=ModelKind.IV)

    def run_once(rng):
        return EmResult(spec, ParamState(), Responsibilities(np.ones((1, 1))), trace=[rng.uniform()])

    seeds = restart_seeds(np.random.default_rng(5), 4)
    expected = max(np.random.default_rng(s).uniform() for s in seeds)

    sequential = best_of_restarts(run_once, EmConfig(restarts=4), np.random.default_rng(5))
    threaded = best_of_restarts(run_once, EmConfig(restarts=4), np.random.default_rng(5), threads=2)

    assert sequential.objective == expected
    assert threaded.objective == expected
    assert sequential.seed in seeds


def test_svmc_trace_non_decreasing(svmc_spec):
    data = mixture_data(30, seed=4)

    result = em_svmc(data, svmc_spec, SHORT_EM, np.random.default_rng(0))

    assert len(result.trace) == result.n_iters
    assert_non_decreasing(result.trace)
    assert result.state.z.shape == (2, 2, 30)
    assert result.state.zeta.shape == (30,)
    np.testing.assert_allclose(result.lam.sum(), 1.0)


def test_svmp_trace_non_decreasing_and_sorted(svmp_spec):
    data = mixture_data(30, seed=5)

    result = em_svmp(data, svmp_spec, SHORT_EM, np.random.default_rng(0))

    assert_non_decreasing(result.trace)
    assert result.state.z.shape == (1, 30)
    assert np.all(np.diff(result.m) >= 0.0)
    np.testing.assert_allclose(result.state.lam.sum(axis=0), 1.0)


def test_spatial_em_checks_spec(svmc_spec, svmp_spec):
    data = mixture_data(10, seed=6)
    with pytest.raises(DomainError):
        em_svmc(data, svmp_spec)
    with pytest.raises(DomainError):
        em_svmp(data, svmc_spec)


def test_nu_update_closed_form():
    phi = np.array([[1.0, 2.0, 3.0]])
    expected = (6.0 / 0.01) / (3.0 / 0.01 + 1.0 / 25.0)
    np.testing.assert_allclose(nu_update(phi, 0.1, 5.0), [expected])


def test_permute_components_keeps_mixing_probabilities():
    mean = np.full(4, 0.5)
    rng = np.random.default_rng(7)
    state = ParamState(z=rng.normal(size=(2, 4)), m=np.array([3.0, 1.0, 2.0]), phi=np.zeros(3))
    perm = np.array([1, 2, 0])

    permuted = permute_components(state, perm, mean)

    before = generalized_inverse_logit(state.z + mean)
    after = generalized_inverse_logit(permuted.z + mean)
    np.testing.assert_allclose(after, before[perm], atol=1e-12)
    np.testing.assert_array_equal(permuted.m, [1.0, 2.0, 3.0])


def test_logit_field_gradient_weights():
    chol = np.eye(3)
    grad = logit_field_gradient(np.array([1.0, 0.0, 0.5]), np.full(3, 0.5), chol, np.zeros(3), np.array([2.0, 1.0, 1.0]))
    np.testing.assert_allclose(grad, [1.0, -0.5, 0.0])


def test_init_file_round_trip(tmp_path, svmc_spec):
    data = mixture_data(20, seed=8)
    result = em_svmc(data, svmc_spec, EmConfig(max_iters=3, inner_iters=2), np.random.default_rng(0))
    path = tmp_path / "init_svmc.json"

    save_init(result, str(path))
    spec, state = load_init(str(path))

    assert spec == svmc_spec
    np.testing.assert_allclose(state.z, result.state.z)
    np.testing.assert_array_equal(state.zeta, result.state.zeta)
    assert np.isfinite(model_for_spec(spec).log_posterior(state, data))


def test_load_init_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(DomainError):
        load_init(str(path))


def test_em_result_to_state_checks_compatibility(svmc_spec):
    data = mixture_data(20, seed=9)
    result = em_ivm(data, 2, SHORT_EM, np.random.default_rng(0))

    state = em_result_to_state(result, result.spec, data)

    np.testing.assert_allclose(state.lam, result.lam)
    with pytest.raises(DomainError):
        em_result_to_state(result, svmc_spec, data)
    with pytest.raises(DomainError):
        em_result_to_state(result, result.spec, mixture_data(5, seed=1))
