"""Тесты загрузки конфигурации эксперимента."""

import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.settings import ExperimentConfig, load_config
from core.exceptions import ConfigError, UsageError

ENV_NAMES = ["LOG_LEVEL", "DEBUG", "RETINA_SEED", "RETINA_JOBS", "RETINA_OUTPUT_DIR", "RETINA_LOG_DIR",
             "RETINA_SLICE_MODE", "RETINA_TRAIN_ITERATIONS"]

@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)

def write_yaml(tmp_path, text: str):
    path = tmp_path / "experiment.yaml"
    path.write_text(text, encoding="utf-8")
    return str(path)

def test_defaults():
    config = load_config()
    assert config.seed == 0
    assert config.slicing.mode == "dynamic" and config.slicing.n_events == 300
    assert config.train.lr == 1e-3 and config.train.lr_step == 64 and config.train.lr_gamma == 0.8
    assert (config.filter.tau_mem, config.filter.tau_syn, config.filter.size) == (5.0, 5.0, 20)
    assert config.loss.lambda_box == 7.5 and config.loss.lambda_conf == 1.5 and config.loss.lambda_syn == 1e-7
    assert config.log_level == "INFO"

def test_precedence_env_file_flags(tmp_path, monkeypatch):
    monkeypatch.setenv("RETINA_SEED", "5")
    monkeypatch.setenv("RETINA_JOBS", "3")
    assert load_config().seed == 5

    path = write_yaml(tmp_path, "seed: 7\n")
    config = load_config(path)
    assert config.seed == 7 and config.jobs == 3

    config = load_config(path, {"seed": 9, "jobs": None})
    assert config.seed == 9 and config.jobs == 3

def test_env_values_are_coerced(monkeypatch):
    monkeypatch.setenv("DEBUG", "true")
    monkeypatch.setenv("RETINA_TRAIN_ITERATIONS", "12")
    monkeypatch.setenv("LOG_LEVEL", "debug")
    config = load_config()
    assert config.debug is True
    assert config.train.iterations == 12
    assert config.log_level == "DEBUG"

def test_nested_yaml_sections(tmp_path):
    path = write_yaml(tmp_path, "slicing:\n  mode: fixed\n  dt_us: 5000\nfilter:\n  tau_mem: 3\n"
                                "train:\n  adam_betas: [0.8, 0.99]\n")
    config = load_config(path)
    assert config.slicing.to_slice_config().dt_us == 5000
    assert config.filter.tau_mem == 3.0 and isinstance(config.filter.tau_mem, float)
    assert config.train.adam_betas == (0.8, 0.99)

def test_dotted_overrides():
    config = load_config(overrides={"train.iterations": 4, "paths.output_dir": "out", "synth.rng_seed": 8})
    assert config.train.iterations == 4
    assert config.paths.output_dir == "out"
    assert config.synth.rng_seed == 8

def test_synth_section_stays_frozen_dataclass(tmp_path):
    config = load_config(write_yaml(tmp_path, "synth:\n  duration_us: 1000000\n  trajectory: random-walk\n"))
    assert config.synth.duration_us == 1_000_000
    assert config.synth.trajectory == "random-walk"

@pytest.mark.parametrize("text", [
    "unknown: 1\n",
    "train:\n  epochs: 3\n",
    "train: 5\n",
    "seed: abc\n",
    "- a\n- b\n",
    "train: [unclosed\n",
])
def test_bad_files(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(write_yaml(tmp_path, text))

def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.yaml"))

@pytest.mark.parametrize("overrides", [
    {"train.lr": -0.1},
    {"train.lr_gamma": 0.0},
    {"train.iterations": 0},
    {"train.validation_fraction": 1.0},
    {"train.reset_grad": "soft"},
    {"train.architecture": "huge"},
    {"slicing.mode": "weird"},
    {"slicing.n_events": 0},
    {"slicing.dt_us": 0, "slicing.mode": "fixed"},
    {"loss.lambda_syn": -1},
    {"paths.events_format": "hdf5"},
    {"jobs": 0},
    {"train.batch_size": 1},
])
def test_validation(overrides):
    with pytest.raises(ConfigError):
        load_config(overrides=overrides)

def test_config_errors_are_usage_errors():
    assert issubclass(ConfigError, UsageError)
    assert ConfigError.exit_code == 1

def test_validate_on_plain_instance():
    config = ExperimentConfig()
    config.validate()
    config.filter.size = 0
    with pytest.raises(ConfigError):
        config.validate()

if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
