import logging
from pathlib import Path
from typing import Any, Dict

import pytest
import yaml

from src.config_loader import (
    DEFAULT_CONFIGS_DIR,
    DEFAULT_EM_CONFIG,
    DEFAULT_EVALUATION_CONFIG,
    DEFAULT_MAIN_CONFIG,
    DEFAULT_MODELS_SUBDIR,
    DEFAULT_SAMPLERS_SUBDIR,
    apply_overrides,
    deep_update,
    load_config,
)


# --- Fixtures ---
@pytest.fixture
def temp_config_dir(tmp_path: Path) -> Path:
    """Creates the configs/ directory layout under a temporary root."""
    configs_path = tmp_path / DEFAULT_CONFIGS_DIR
    (configs_path / DEFAULT_MODELS_SUBDIR).mkdir(parents=True)
    (configs_path / DEFAULT_SAMPLERS_SUBDIR).mkdir(parents=True)
    return tmp_path


def _create_yaml_file(dir_path: Path, filename: str, content: Dict[str, Any]) -> str:
    """Helper to create a YAML file in a specific directory."""
    file_path = dir_path / filename
    file_path.write_text(yaml.dump(content), encoding="utf-8")
    return str(file_path)


MAIN_CONFIG_CONTENT = {
    "active_models": ["svm", "ivm"],
    "seed": 7,
    "sampler": {"progress": False},
    "output": {"summary_file": "summary.json"},
}
SVM_CONFIG_CONTENT = {"svm": {"omega": 0.2, "sigma": 0.5, "sampler": {"n_iter": 100}}}
IVM_CONFIG_CONTENT = {"ivm": {"K": 3}}
HMC_CONFIG_CONTENT = {"hmc": {"step_size": 0.05, "leapfrog_steps": 10}}
EM_CONFIG_CONTENT = {"em": {"max_iters": 50}}
EVALUATION_CONFIG_CONTENT = {"evaluation": {"n_test": 10}}


def _write_all(root: Path) -> str:
    configs = root / DEFAULT_CONFIGS_DIR
    _create_yaml_file(configs / DEFAULT_MODELS_SUBDIR, "svm_config.yaml", SVM_CONFIG_CONTENT)
    _create_yaml_file(configs / DEFAULT_MODELS_SUBDIR, "ivm_config.yaml", IVM_CONFIG_CONTENT)
    _create_yaml_file(configs / DEFAULT_SAMPLERS_SUBDIR, "hmc_config.yaml", HMC_CONFIG_CONTENT)
    _create_yaml_file(configs, DEFAULT_EM_CONFIG, EM_CONFIG_CONTENT)
    _create_yaml_file(configs, DEFAULT_EVALUATION_CONFIG, EVALUATION_CONFIG_CONTENT)
    return _create_yaml_file(root, DEFAULT_MAIN_CONFIG, MAIN_CONFIG_CONTENT)


# --- load_config ---
def test_load_config_merges_all_sections(temp_config_dir: Path):
    """Model, sampler, EM and evaluation files are merged under their sections."""
    # Arrange
    main_path = _write_all(temp_config_dir)

    # Act
    config = load_config(main_path)

    # Assert
    assert config is not None
    assert config["models"]["svm"] == {"omega": 0.2, "sigma": 0.5, "sampler": {"n_iter": 100}}
    assert config["models"]["ivm"] == {"K": 3}
    assert config["sampler"]["hmc"] == {"step_size": 0.05, "leapfrog_steps": 10}
    assert config["sampler"]["progress"] is False
    assert config["em"] == {"max_iters": 50}
    assert config["evaluation"] == {"n_test": 10}
    assert config["seed"] == 7


def test_main_file_wins_over_section_files(temp_config_dir: Path):
    _write_all(temp_config_dir)
    content = dict(MAIN_CONFIG_CONTENT, models={"svm": {"omega": 0.9}}, em={"tol": 1e-3})
    main_path = _create_yaml_file(temp_config_dir, DEFAULT_MAIN_CONFIG, content)

    config = load_config(main_path)

    assert config["models"]["svm"]["omega"] == 0.9
    assert config["models"]["svm"]["sigma"] == 0.5
    assert config["em"] == {"max_iters": 50, "tol": 1e-3}


def test_missing_section_files_warn(temp_config_dir: Path, caplog):
    main_path = _create_yaml_file(temp_config_dir, DEFAULT_MAIN_CONFIG, {"active_models": ["svmp"]})

    with caplog.at_level(logging.WARNING):
        config = load_config(main_path)

    assert config["models"] == {}
    assert "Configuration file for 'svmp' not found" in caplog.text


def test_invalid_section_file_is_ignored(temp_config_dir: Path, caplog):
    main_path = _create_yaml_file(temp_config_dir, DEFAULT_MAIN_CONFIG, {"active_models": ["svm"]})
    bad = temp_config_dir / DEFAULT_CONFIGS_DIR / DEFAULT_MODELS_SUBDIR / "svm_config.yaml"
    bad.write_text("svm: [unclosed\n", encoding="utf-8")

    with caplog.at_level(logging.WARNING):
        config = load_config(main_path)

    assert "svm" not in config["models"]
    assert "Ignoring invalid configuration file" in caplog.text


def test_missing_main_config(tmp_path: Path, caplog):
    with caplog.at_level(logging.ERROR):
        assert load_config(str(tmp_path / "absent.yaml")) is None
    assert "Main configuration file not found" in caplog.text


@pytest.mark.parametrize("text", ["", "# only a comment\n", "- a\n- list\n", "key: [broken\n"])
def test_empty_or_invalid_main_config(tmp_path: Path, text: str):
    path = tmp_path / DEFAULT_MAIN_CONFIG
    path.write_text(text, encoding="utf-8")
    assert load_config(str(path)) is None


# --- deep_update and overrides ---
def test_deep_update_merges_nested_dicts():
    source = {"a": {"b": 1, "c": {"d": 2}}, "e": 3}
    result = deep_update(source, {"a": {"c": {"d": 5, "f": 6}}, "e": {"g": 1}})
    assert result == {"a": {"b": 1, "c": {"d": 5, "f": 6}}, "e": {"g": 1}}


def test_apply_overrides_parses_yaml_scalars():
    config = {"sampler": {"hmc": {"step_size": 0.05}}, "seed": 1}

    merged = apply_overrides(
        config, ["sampler.hmc.step_size=0.02", "seed=9", "models.svm.mean=[1.0, 0.0]", "sampler.progress=false"]
    )

    assert merged["sampler"]["hmc"]["step_size"] == 0.02
    assert merged["seed"] == 9
    assert merged["models"]["svm"]["mean"] == [1.0, 0.0]
    assert merged["sampler"]["progress"] is False
    assert config == {"sampler": {"hmc": {"step_size": 0.05}}, "seed": 1}


def test_apply_overrides_empty_value_is_none():
    assert apply_overrides({}, ["evaluation.max_posterior_draws="])["evaluation"]["max_posterior_draws"] is None


@pytest.mark.parametrize("item", ["no_equals", "=3", "a..b=1", "a=[unclosed"])
def test_apply_overrides_rejects_malformed(item: str):
    with pytest.raises(ValueError):
        apply_overrides({}, [item])
