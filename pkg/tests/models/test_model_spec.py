import logging

import numpy as np
import pytest
from scipy.special import expit

from src.errors import DomainError
from src.gp.kernel import GpSpec
from src.models.factory import create_model, model_for_spec
from src.models.independent import IndependentVonMises
from src.models.links import dirichlet_jacobian_grad, generalized_inverse_logit, inverse_logit_to_logits
from src.models.model_spec import GammaPrior, HierarchicalPrior, ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.models.spatial_cluster import SpatialClusterVonMises, spread_means
from src.models.spatial_prob import SpatialProbVonMises


class TestModelKind:
    @pytest.mark.parametrize("name,kind", [("iv", ModelKind.IV), ("SvM-c", ModelKind.SVMC), (" SVMP ", ModelKind.SVMP)])
    def test_parse_accepts_spellings(self, name, kind):
        assert ModelKind.parse(name) is kind

    def test_parse_rejects_unknown(self):
        with pytest.raises(DomainError):
            ModelKind.parse("gaussian")

    def test_spatial_flag(self):
        assert ModelKind.SVMP.spatial
        assert not ModelKind.IVM.spatial


class TestModelSpec:
    def test_component_counts_are_checked(self):
        with pytest.raises(DomainError):
            ModelSpec(kind=ModelKind.IV, K=2)
        with pytest.raises(DomainError):
            ModelSpec(kind=ModelKind.IVM, K=1)

    def test_spatial_models_need_gp(self):
        with pytest.raises(DomainError):
            ModelSpec(kind=ModelKind.SVMP, K=2)

    def test_svm_needs_hierarchical_prior(self):
        with pytest.raises(DomainError):
            ModelSpec(kind=ModelKind.SVM, gp=GpSpec(), conc_prior=GammaPrior())

    def test_svmc_component_means_default_to_gp_means(self):
        spec = ModelSpec(kind=ModelKind.SVMC, K=3, gp=GpSpec(mean1=0.5, mean2=-0.5), conc_prior=HierarchicalPrior())
        assert spec.component_means == ((0.5, -0.5),) * 3
        assert spec.component_gp(1).mean1 == 0.5

    def test_svmc_component_means_length_checked(self):
        with pytest.raises(DomainError):
            ModelSpec(
                kind=ModelKind.SVMC, K=2, gp=GpSpec(), conc_prior=HierarchicalPrior(), component_means=((0.0, 1.0),)
            )

    def test_dict_round_trip_keeps_hash(self):
        spec = ModelSpec(
            kind=ModelKind.SVMC,
            K=2,
            gp=GpSpec(omega=0.2, sigma=0.5),
            conc_prior=HierarchicalPrior(0.05, 5.0),
            component_means=((0.0, 1.0), (0.0, -1.0)),
        )

        restored = ModelSpec.from_dict(spec.to_dict())

        assert restored == spec
        assert restored.spec_hash() == spec.spec_hash()

    def test_hash_differs_between_specs(self):
        a = ModelSpec(kind=ModelKind.IVM, K=2)
        b = ModelSpec(kind=ModelKind.IVM, K=3)
        assert a.spec_hash() != b.spec_hash()

    def test_invalid_priors(self):
        with pytest.raises(DomainError):
            HierarchicalPrior(varsigma=0.0)
        with pytest.raises(DomainError):
            GammaPrior(shape=-1.0)


def test_param_state_round_trip():
    state = ParamState(
        m=np.array([0.5, 7.0]), phi=np.array([0.1, 0.2]), lam=np.array([0.4, 0.6]), zeta=np.array([0, 1, 1])
    )

    restored = ParamState.from_dict(state.to_dict())

    np.testing.assert_allclose(restored.m, [0.5, 7.0 - 2 * np.pi])
    np.testing.assert_allclose(restored.rho, np.exp([0.1, 0.2]))
    assert restored.zeta.dtype.kind == "i"
    assert restored.z is None


def test_param_state_copy_is_independent():
    state = ParamState(phi=np.zeros(3))
    clone = state.copy()
    clone.phi[0] = 1.0
    assert state.phi[0] == 0.0


class TestLinks:
    def test_two_components_is_logistic(self):
        z = np.array([[-3.0, 0.0, 2.5]])
        lam = generalized_inverse_logit(z)
        np.testing.assert_allclose(lam[0], expit(z[0]))
        np.testing.assert_allclose(lam.sum(axis=0), 1.0)

    def test_columns_sum_to_one_and_invert(self):
        z = np.random.default_rng(0).normal(size=(3, 7))
        lam = generalized_inverse_logit(z)
        np.testing.assert_allclose(lam.sum(axis=0), 1.0)
        np.testing.assert_allclose(inverse_logit_to_logits(lam), z, atol=1e-10)

    def test_large_logits_do_not_overflow(self):
        lam = generalized_inverse_logit(np.array([[800.0], [-800.0]]))
        assert np.all(np.isfinite(lam))
        assert lam[0, 0] == pytest.approx(1.0)

    def test_non_finite_logits_raise(self):
        with pytest.raises(DomainError):
            generalized_inverse_logit(np.array([np.nan]))

    def test_jacobian_gradient(self):
        lam = np.array([0.2, 0.3, 0.5])
        np.testing.assert_allclose(dirichlet_jacobian_grad(lam), [1 - 0.6, 1 - 0.9])


class TestFactory:
    def test_create_known_models(self):
        assert isinstance(create_model("iv"), IndependentVonMises)
        assert isinstance(create_model("SvM-c", {"K": 3}), SpatialClusterVonMises)
        assert create_model("svmc", {"K": 3}).spec.K == 3

    def test_unknown_name_logs_and_returns_none(self, caplog):
        with caplog.at_level(logging.ERROR):
            model = create_model("gaussian")
        assert model is None
        assert "Unknown model type" in caplog.text

    def test_invalid_config_returns_none(self, caplog):
        with caplog.at_level(logging.ERROR):
            assert create_model("svmp", {"K": 1}) is None
        assert "Invalid configuration" in caplog.text

    def test_model_for_spec_uses_given_spec(self):
        spec = ModelSpec(kind=ModelKind.IVM, K=4)
        model = model_for_spec(spec)
        assert model.spec is spec
        assert model.K == 4

    def test_svmc_default_means_are_spread(self):
        model = create_model("svmc", {"K": 2})
        assert model.spec.component_means == spread_means(2)
        assert spread_means(2)[0] == (0.0, 1.0)

    def test_svmp_config(self):
        model = create_model("svmp", {"K": 3, "sigma": 2.0})
        assert isinstance(model, SpatialProbVonMises)
        assert model.spec.gp.sigma == 2.0
