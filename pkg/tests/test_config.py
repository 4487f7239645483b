import json
import logging
from pathlib import Path

import pytest
from pydantic import ValidationError

from graphhist.config import Settings, parse_bool_env, settings
from graphhist.models import PRESETS, ModelConfig, StopMetric, TrainConfig
from graphhist.utils.logger import get_logger, set_level
from graphhist.utils.storage import (
    create_run_directory,
    resolve_dataset_directory,
    secure_name,
    write_csv,
    write_json,
)


class TestSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("GRAPHHIST_BIN_ALPHA", raising=False)
        settings = Settings(_env_file=None)
        assert settings.BIN_ALPHA == 20.0
        assert settings.DEFAULT_SEED == 0

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("GRAPHHIST_DEBUG", "no")
        monkeypatch.setenv("GRAPHHIST_DEFAULT_SEED", "42")
        monkeypatch.setenv("GRAPHHIST_LOG_LEVEL", "debug")
        settings = Settings(_env_file=None)
        assert settings.DEBUG is False
        assert settings.DEFAULT_SEED == 42
        assert settings.LOG_LEVEL == "DEBUG"

    def test_init_arguments_win(self, monkeypatch):
        monkeypatch.setenv("GRAPHHIST_BIN_ALPHA", "5")
        assert Settings(_env_file=None, BIN_ALPHA=7.5).BIN_ALPHA == 7.5

    def test_bad_integer(self, monkeypatch):
        monkeypatch.setenv("GRAPHHIST_DEFAULT_SEED", "seven")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)

    @pytest.mark.parametrize("value, expected", [("", False), ("0", False), ("yes", True), (True, True)])
    def test_parse_bool(self, value, expected):
        assert parse_bool_env(value) is expected


class TestConfigModels:
    def test_configs_are_frozen(self):
        with pytest.raises(ValidationError):
            ModelConfig().k = 30

    def test_dropout_range(self):
        with pytest.raises(ValidationError):
            ModelConfig(dropout=1.0)

    def test_lr_floor_above_lr(self):
        with pytest.raises(ValidationError):
            TrainConfig(lr=1e-8, lr_min=1e-7)

    def test_scheduler_factor(self):
        with pytest.raises(ValidationError):
            TrainConfig(factor=1.0)

    def test_json_round_trip(self):
        config = ModelConfig(k=50, h=2, u=128)
        assert ModelConfig.model_validate_json(config.model_dump_json()) == config

    def test_presets_build_valid_models(self):
        for name, preset in PRESETS.items():
            config = ModelConfig(k=preset.k, h=preset.h, u=preset.u, dropout=preset.dropout)
            assert config.channels == (preset.h + 1) * preset.u, name

    def test_bot_preset(self):
        bots = PRESETS["BOTS"]
        assert (bots.k, bots.h, bots.u, bots.dropout) == (25, 2, 8, 0.5)
        assert bots.oversample
        assert bots.stop_metric is StopMetric.F1

    def test_reddit_binary_preset(self):
        reddit = PRESETS["REDDIT-B"]
        assert (reddit.k, reddit.h, reddit.u, reddit.dropout) == (25, 6, 64, 0.8)


class TestStorage:
    def test_secure_name(self):
        assert secure_name("../runs/my run!") == "my_run"
        assert secure_name("IMDB-B") == "IMDB-B"

    def test_secure_name_never_empty(self):
        assert secure_name("!!!").startswith("run_")

    def test_explicit_run_directory(self, tmp_path):
        path = create_run_directory("train", "x", tmp_path / "a" / "b")
        assert path.is_dir()
        assert path == (tmp_path / "a" / "b").resolve()

    def test_write_json_from_model(self, tmp_path):
        path = write_json(tmp_path / "config.json", ModelConfig(k=30))
        assert json.loads(path.read_text())["k"] == 30

    def test_write_csv(self, tmp_path):
        path = write_csv(tmp_path / "rows.csv", ["a", "b"], [[1, 2], [3, 4]])
        assert path.read_text().splitlines() == ["a,b", "1,2", "3,4"]

    def test_relative_dataset_falls_back_to_data_dir(self, tmp_path, monkeypatch):
        (tmp_path / "data" / "MUTAG").mkdir(parents=True)
        (tmp_path / "work").mkdir()
        monkeypatch.chdir(tmp_path / "work")
        monkeypatch.setattr(settings, "DATA_DIR", str(tmp_path / "data"))
        assert resolve_dataset_directory("MUTAG") == tmp_path / "data" / "MUTAG"

    def test_existing_relative_dataset_wins(self, tmp_path, monkeypatch):
        (tmp_path / "MUTAG").mkdir()
        (tmp_path / "data" / "MUTAG").mkdir(parents=True)
        monkeypatch.chdir(tmp_path)
        monkeypatch.setattr(settings, "DATA_DIR", str(tmp_path / "data"))
        assert resolve_dataset_directory("MUTAG") == Path("MUTAG")

    def test_unknown_dataset_is_returned_unchanged(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setattr(settings, "DATA_DIR", str(tmp_path / "data"))
        assert resolve_dataset_directory("nowhere") == Path("nowhere")


class TestLogger:
    def test_logger_does_not_propagate(self):
        logger = get_logger("graphhist.tests.sample")
        assert logger.propagate is False
        assert len(logger.handlers) == 1
        assert get_logger("graphhist.tests.sample").handlers == logger.handlers

    def test_set_level(self):
        logger = get_logger("graphhist.tests.levels")
        set_level("warning")
        try:
            assert logger.level == logging.WARNING
        finally:
            set_level("info")

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            set_level("chatty")
