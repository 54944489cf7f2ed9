"""
Тесты для ConfigManager
"""
import logging
import math

import pytest
import yaml

from src.config.manager import ConfigManager, RunManifest
from src.utils.errors import ConfigError


@pytest.fixture
def config_file(tmp_path):
    """Фикстура для небольшого YAML конфига"""
    path = tmp_path / "scenario.yaml"
    path.write_text(
        "scenario: test\n"
        "seed: 5\n"
        "horizon: 24\n"
        "box:\n"
        "  bounds: [1.0, 2.0]\n"
        "combinations:\n"
        "  - {name: ftrl, learner: ftrl}\n"
        "  - {name: oolr_grad, learner: oolr, predictor: arma_ogd}\n",
        encoding="utf-8",
    )
    return path


# ==================== Значения по умолчанию ====================

def test_defaults_resolve_to_five_combinations():
    """Тест: без файла конфиг даёт неделю, m=3 и пять комбинаций"""
    scenario = ConfigManager().resolve()
    assert scenario.trace.horizon == 1008
    assert scenario.trace.m == 3
    assert [e.name for e in scenario.experiments] == [
        "ftrl", "oolr_zeta0", "oolr_zeta0.3", "oolr_zeta4", "oolr_grad",
    ]
    assert scenario.sla_alpha_sweep == ()


def test_auto_learner_parameters_are_resolved():
    """Тест: sigma/eta_scale = auto → √2/D и D в разрешённом конфиге"""
    scenario = ConfigManager().resolve()
    D = math.sqrt(3.0)
    assert scenario.resolved["learner"]["sigma"] == pytest.approx(math.sqrt(2.0) / D)
    assert scenario.resolved["learner"]["eta_scale"] == pytest.approx(D)
    assert scenario.experiments[0].sigma is None


# ==================== Файл и переопределения ====================

def test_file_values_override_defaults(config_file):
    scenario = ConfigManager(str(config_file)).resolve()
    assert scenario.scenario == "test"
    assert scenario.seed == 5
    assert scenario.experiments[1].box.bounds.tolist() == [1.0, 2.0]
    assert scenario.experiments[1].predictor.kind == "arma_ogd"
    assert scenario.trace.rng_seed == 5


def test_overrides_apply_on_top(config_file):
    manager = ConfigManager(str(config_file), overrides=["horizon=12", "learner.sigma=0.5", "loss.V=3"])
    scenario = manager.resolve()
    assert scenario.trace.horizon == 12
    assert all(e.horizon == 12 for e in scenario.experiments)
    assert scenario.experiments[0].sigma == 0.5
    assert scenario.experiments[0].loss.V == 3.0


def test_seed_argument_wins(config_file):
    assert ConfigManager(str(config_file)).resolve(seed=99).trace.rng_seed == 99


def test_scientific_notation_is_numeric():
    """Тест: PyYAML читает 1e-9 как строку, менеджер приводит её к float"""
    scenario = ConfigManager(overrides=["solver.tol=1e-9", "horizon=10"]).resolve()
    assert scenario.experiments[0].solver_tol == pytest.approx(1e-9)


def test_override_without_equals_sign():
    with pytest.raises(ConfigError):
        ConfigManager(overrides=["horizon"]).get_config()


def test_missing_config_file(tmp_path):
    missing = tmp_path / "missing.yaml"
    with pytest.raises(ConfigError, match="config file not found"):
        ConfigManager(str(missing))


def test_invalid_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("box: [1, 2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid YAML"):
        ConfigManager(str(path)).resolve()


def test_unknown_key_warns(tmp_path, caplog):
    path = tmp_path / "extra.yaml"
    path.write_text("horizon: 10\nflavour: mint\n", encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        ConfigManager(str(path)).resolve()
    assert "flavour" in caplog.text


# ==================== Валидация ====================

def test_invalid_loss_weight_names_key():
    """Тест: V < 1 → ошибка конфига с именем параметра"""
    with pytest.raises(ConfigError, match="loss.V"):
        ConfigManager(overrides=["loss.V=0.5"]).resolve()


def test_invalid_bounds():
    with pytest.raises(ConfigError, match="box.bounds"):
        ConfigManager(overrides=["box.bounds=[1.0, -1.0]"]).resolve()


def test_non_numeric_horizon():
    with pytest.raises(ConfigError, match="horizon"):
        ConfigManager(overrides=["horizon=week"]).resolve()


def test_duplicate_combination_names(tmp_path):
    path = tmp_path / "dup.yaml"
    path.write_text(
        "combinations:\n  - {name: a, learner: ftrl}\n  - {name: a, learner: oolr}\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError, match="duplicated"):
        ConfigManager(str(path)).resolve()


def test_unknown_predictor_kind(tmp_path):
    path = tmp_path / "kind.yaml"
    path.write_text("combinations:\n  - {name: a, learner: oolr, predictor: lstm}\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="combinations\\[0\\]"):
        ConfigManager(str(path)).resolve()


# ==================== Sweep и hash ====================

def test_sla_sweep_values():
    scenario = ConfigManager(overrides=["sweeps.sla_alpha_min=[0.5, 0.8, 0.95]", "horizon=10"]).resolve()
    assert scenario.sla_alpha_sweep == (0.5, 0.8, 0.95)
    assert scenario.sla_beta_min == 1.0


def test_sla_sweep_rejects_zero():
    with pytest.raises(ConfigError, match="sla_alpha_min"):
        ConfigManager(overrides=["sweeps.sla_alpha_min=[0.0]"]).resolve()


def test_config_hash_is_stable_and_sensitive(config_file):
    """Тест: одинаковый конфиг → одинаковый hash, изменение параметра → другой"""
    first = ConfigManager(str(config_file)).resolve().config_hash
    second = ConfigManager(str(config_file)).resolve().config_hash
    changed = ConfigManager(str(config_file), overrides=["loss.V=2.5"]).resolve().config_hash
    assert first == second
    assert len(first) == 16
    assert changed != first


def test_manifest_round_trip(tmp_path, config_file):
    scenario = ConfigManager(str(config_file)).resolve()
    manifest = RunManifest(
        scenario=scenario.scenario,
        config_hash=scenario.config_hash,
        trace_source="generated",
        outputs=("ftrl.csv",),
        config=scenario.resolved,
    )
    path = manifest.write(tmp_path / "manifest.yaml")
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    assert data["config_hash"] == scenario.config_hash
    assert data["outputs"] == ["ftrl.csv"]
    assert data["config"]["horizon"] == 24


def test_config_hash_ignores_number_spelling(tmp_path, config_file):
    """Тест: tol: 1e-9 (строка для PyYAML) и tol: 1.0e-9 дают один hash"""
    base = config_file.read_text(encoding="utf-8")
    as_string = tmp_path / "string.yaml"
    as_float = tmp_path / "float.yaml"
    as_string.write_text(base + "solver:\n  tol: 1e-9\n", encoding="utf-8")
    as_float.write_text(base + "solver:\n  tol: 1.0e-9\n", encoding="utf-8")

    first = ConfigManager(str(as_string)).resolve()
    second = ConfigManager(str(as_float)).resolve()

    assert first.resolved["solver"]["tol"] == 1e-9
    assert isinstance(first.resolved["solver"]["tol"], float)
    assert first.config_hash == second.config_hash


def test_resolved_config_holds_coerced_values():
    scenario = ConfigManager(overrides=["horizon=48", "loss.V=3", "predictor.lag_order=4"]).resolve()
    assert scenario.resolved["horizon"] == 48
    assert scenario.resolved["loss"]["V"] == 3.0
    assert scenario.resolved["predictor"]["lag_order"] == 4
    grad = [c for c in scenario.resolved["combinations"] if c["name"] == "oolr_grad"][0]
    assert grad["lag_order"] == 4
