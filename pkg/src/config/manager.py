import copy
import hashlib
import json
import logging
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import yaml

from src.managers.trace_generator import DemandModel, OuPriceModel, SlaModel, ThetaModel, TraceConfig
from src.services.experiment_service import ExperimentConfig, PredictorSpec
from src.utils.domain import FeasibleBox, diameter, optimal_sigma
from src.utils.errors import ConfigError, OolrError
from src.utils.files import atomic_write_text
from src.utils.loss import LossConfig

logger = logging.getLogger(__name__)

AUTO = "auto"


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    result = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def _number(key: str, value: Any, kind=float):
    # PyYAML читает 1e-9 как строку, поэтому числа приводим явно
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    try:
        number = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}") from None
    if kind is int and float(value) != number:
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return number


def _optional_number(key: str, value: Any) -> Optional[float]:
    if value is None or value == AUTO:
        return None
    return _number(key, value)


def _numbers(key: str, value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_number(f"{key}[{i}]", v) for i, v in enumerate(value)]
    return _number(key, value)


def _section(config: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = config.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key} must be a mapping, got {type(value).__name__}")
    return value


def _build(key: str, factory, **kwargs):
    """Создаёт dataclass конфигурации; ошибка валидации называет ключ"""
    try:
        return factory(**kwargs)
    except OolrError as e:
        raise ConfigError(f"{key}: {e}") from e
    except TypeError as e:
        raise ConfigError(f"{key}: {e}") from e


PREDICTOR_KEYS = {
    "lag_order": int,
    "step_scale": float,
    "coeff_bound": float,
    "fixed_point_iters": int,
    "fixed_point_tol": float,
}


def _combination_view(cfg: ExperimentConfig) -> Dict[str, Any]:
    spec = cfg.predictor
    view = {"name": cfg.name, "learner": cfg.learner, "predictor": spec.kind, "seed": spec.seed}
    if spec.kind == "synthetic":
        view.update(zeta=spec.zeta, fixed_point_iters=spec.fixed_point_iters, fixed_point_tol=spec.fixed_point_tol)
    elif spec.kind == "arma_ogd":
        view.update(lag_order=spec.lag_order, step_scale=spec.step_scale, coeff_bound=spec.coeff_bound)
    return view


def _trace_view(trace: TraceConfig) -> Dict[str, Any]:
    """Секция trace в приведённом виде, без horizon/m/seed"""
    return {
        "prices": {"adv": asdict(trace.price_adv), "spot": asdict(trace.price_spot)},
        "theta": asdict(trace.theta),
        "demand": asdict(trace.demand),
        "sla": None if trace.sla is None else asdict(trace.sla),
    }


def config_hash(resolved: Dict[str, Any]) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ScenarioConfig:
    """Разрешённая конфигурация: трасса и комбинации на ней"""

    scenario: str
    seed: int
    trace: TraceConfig
    experiments: Tuple[ExperimentConfig, ...]
    sla_alpha_sweep: Tuple[float, ...] = ()
    sla_beta_min: float = 1.0
    resolved: Dict[str, Any] = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        return config_hash(self.resolved)


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    config_hash: str
    trace_source: str
    outputs: Tuple[str, ...]
    config: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "config_hash": self.config_hash,
            "trace_source": self.trace_source,
            "outputs": list(self.outputs),
            "config": self.config,
        }

    def write(self, path) -> Path:
        text = yaml.safe_dump(self.to_dict(), default_flow_style=False, allow_unicode=True, sort_keys=True)
        return atomic_write_text(path, text)


class ConfigManager:
    """Управление конфигурацией эксперимента в YAML файле"""

    _lock = threading.Lock()
    _default_config = {
        "scenario": "default",
        "seed": 0,
        "horizon": 1008,
        "loss": {"V": 2.0},
        "box": {"bounds": [1.0, 1.0, 1.0]},
        "learner": {"sigma": AUTO, "eta_scale": AUTO, "z1": "zero"},
        "benchmarks": "both",
        "solver": {"tol": 1e-9, "max_iters": 10000},
        "predictor": {
            "lag_order": 5,
            "step_scale": 0.1,
            "coeff_bound": 1.0,
            "fixed_point_iters": 20,
            "fixed_point_tol": 1e-10,
        },
        "combinations": [
            {"name": "ftrl", "learner": "ftrl"},
            {"name": "oolr_zeta0", "learner": "oolr", "predictor": "synthetic", "zeta": 0.0},
            {"name": "oolr_zeta0.3", "learner": "oolr", "predictor": "synthetic", "zeta": 0.3},
            {"name": "oolr_zeta4", "learner": "oolr", "predictor": "synthetic", "zeta": 4.0},
            {"name": "oolr_grad", "learner": "oolr", "predictor": "arma_ogd"},
        ],
        "trace": {
            "prices": {
                "adv": {"kappa": 0.05, "mean": 0.5, "std": 0.003, "initial": None},
                "spot": {"kappa": 1.0, "mean": 1.2, "std": 0.15, "initial": None},
            },
            "theta": {
                "offset": 0.5,
                "amplitude": 0.05,
                "period": 48,
                "phase": 0.0,
                "noise_std": 0.002,
                "noise_kappa": 0.1,
            },
            "demand": {
                "kind": "synthetic",
                "path": None,
                "column": None,
                "normalize": True,
                "offset": 1.0,
                "daily_amplitude": 0.02,
                "weekly_amplitude": 0.0,
                "daily_period": 144,
                "weekly_period": 1008,
                "noise_std": 0.01,
            },
            "sla": None,
        },
        "sweeps": {"sla_alpha_min": None, "sla_beta_min": 1.0},
    }

    def __init__(self, config_path: Optional[str] = None, overrides: Iterable[str] = ()):
        """
        Args:
            config_path: путь к YAML конфигу; None означает только значения по умолчанию
            overrides: строки вида section.key=value, применяются поверх файла
        """
        self.config_path = Path(config_path) if config_path else None
        if self.config_path is not None and not self.config_path.is_file():
            raise ConfigError(f"config file not found: {self.config_path}")
        self._overrides: List[str] = list(overrides)

    def _read_config(self) -> Dict[str, Any]:
        """Чтение конфига и объединение с дефолтными значениями"""
        with self._lock:
            loaded: Dict[str, Any] = {}
            if self.config_path is not None:
                try:
                    with open(self.config_path, "r", encoding="utf-8") as f:
                        loaded = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise ConfigError(f"{self.config_path}: invalid YAML: {e}") from e
                if not isinstance(loaded, dict):
                    raise ConfigError(f"{self.config_path}: top level must be a mapping")
            for key in loaded:
                if key not in self._default_config:
                    logger.warning(f"Неизвестный параметр конфига: {key}")
            return _deep_merge(self._default_config, loaded)

    def get_config(self) -> Dict[str, Any]:
        """Текущая конфигурация с дефолтами и переопределениями"""
        config = self._read_config()
        for item in self._overrides:
            config = self.apply_override(config, item)
        return config

    @staticmethod
    def apply_override(config: Dict[str, Any], item: str) -> Dict[str, Any]:
        """Применяет section.key=value; значение разбирается как YAML-скаляр или список"""
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        keys = [k.strip() for k in dotted.strip().split(".") if k.strip()]
        if not keys:
            raise ConfigError(f"override has an empty key: {item!r}")
        try:
            value = yaml.safe_load(raw.strip()) if raw.strip() else None
        except yaml.YAMLError as e:
            raise ConfigError(f"{dotted}: cannot parse value {raw!r}: {e}") from e
        result = copy.deepcopy(config)
        node = result
        for key in keys[:-1]:
            if not isinstance(node.get(key), dict):
                node[key] = {}
            node = node[key]
        node[keys[-1]] = value
        return result

    def resolve(self, seed: Optional[int] = None) -> ScenarioConfig:
        """Проверяет конфигурацию и строит типизированные объекты"""
        config = self.get_config()
        if seed is not None:
            config["seed"] = int(seed)

        seed_value = _number("seed", config.get("seed"), int)
        horizon = _number("horizon", config.get("horizon"), int)
        box_cfg = _section(config, "box")
        bounds = _numbers("box.bounds", box_cfg.get("bounds"))
        box = _build("box.bounds", FeasibleBox, bounds=bounds)
        loss = _build("loss.V", LossConfig, V=_number("loss.V", _section(config, "loss").get("V")))

        learner_cfg = _section(config, "learner")
        sigma = _optional_number("learner.sigma", learner_cfg.get("sigma"))
        eta_scale = _optional_number("learner.eta_scale", learner_cfg.get("eta_scale"))
        solver_cfg = _section(config, "solver")
        solver_tol = _number("solver.tol", solver_cfg.get("tol"))
        solver_max_iters = _number("solver.max_iters", solver_cfg.get("max_iters"), int)

        predictor_defaults = _section(config, "predictor")
        combinations = config.get("combinations") or []
        if not isinstance(combinations, list) or not combinations:
            raise ConfigError("combinations must be a non-empty list")

        experiments = []
        names = set()
        for index, entry in enumerate(combinations):
            key = f"combinations[{index}]"
            if not isinstance(entry, dict):
                raise ConfigError(f"{key} must be a mapping")
            name = str(entry.get("name") or f"combination{index + 1}")
            if name in names:
                raise ConfigError(f"{key}.name {name!r} is duplicated")
            names.add(name)
            merged = {**predictor_defaults, **entry}
            predictor = _build(
                f"{key}.predictor",
                PredictorSpec,
                kind=str(merged.get("predictor", "zero")),
                zeta=_number(f"{key}.zeta", merged.get("zeta", 0.0)),
                seed=_number(f"{key}.seed", merged.get("seed", seed_value), int),
                lag_order=_number(f"{key}.lag_order", merged.get("lag_order"), int),
                step_scale=_number(f"{key}.step_scale", merged.get("step_scale")),
                coeff_bound=_number(f"{key}.coeff_bound", merged.get("coeff_bound")),
                fixed_point_iters=_number(f"{key}.fixed_point_iters", merged.get("fixed_point_iters"), int),
                fixed_point_tol=_number(f"{key}.fixed_point_tol", merged.get("fixed_point_tol")),
            )
            experiments.append(_build(
                key,
                ExperimentConfig,
                box=box,
                horizon=horizon,
                name=name,
                learner=str(entry.get("learner", "oolr")),
                predictor=predictor,
                loss=loss,
                sigma=sigma,
                eta_scale=eta_scale,
                z1=str(learner_cfg.get("z1", "zero")),
                benchmarks=str(config.get("benchmarks", "both")),
                solver_tol=solver_tol,
                solver_max_iters=solver_max_iters,
            ))

        trace = self._resolve_trace(_section(config, "trace"), horizon, box.m, seed_value)

        sweeps = _section(config, "sweeps")
        alpha_sweep = sweeps.get("sla_alpha_min")
        if alpha_sweep is None:
            alpha_values: Tuple[float, ...] = ()
        else:
            if not isinstance(alpha_sweep, list):
                alpha_sweep = [alpha_sweep]
            alpha_values = tuple(
                _number(f"sweeps.sla_alpha_min[{i}]", v) for i, v in enumerate(alpha_sweep)
            )
        beta_min = _number("sweeps.sla_beta_min", sweeps.get("sla_beta_min", 1.0))
        for value in alpha_values:
            _build("sweeps.sla_alpha_min", SlaModel, alpha_min=value, beta_min=beta_min)

        # в hash и manifest попадают приведённые значения: 1e-9 и 1.0e-9 дают один конфиг
        config["seed"] = seed_value
        config["horizon"] = horizon
        config["loss"] = {"V": loss.V}
        config["box"] = {"bounds": list(bounds) if isinstance(bounds, list) else [bounds]}
        config["benchmarks"] = experiments[0].benchmarks
        config["learner"] = {
            **learner_cfg,
            "sigma": sigma if sigma is not None else optimal_sigma(box),
            "eta_scale": eta_scale if eta_scale is not None else diameter(box),
        }
        config["solver"] = {"tol": solver_tol, "max_iters": solver_max_iters}
        config["predictor"] = {
            key: _number(f"predictor.{key}", predictor_defaults[key], kind)
            for key, kind in PREDICTOR_KEYS.items()
            if key in predictor_defaults
        }
        config["combinations"] = [_combination_view(cfg) for cfg in experiments]
        config["trace"] = _trace_view(trace)
        config["sweeps"] = {
            "sla_alpha_min": list(alpha_values) if alpha_sweep is not None else None,
            "sla_beta_min": beta_min,
        }
        scenario = ScenarioConfig(
            scenario=str(config.get("scenario", "default")),
            seed=seed_value,
            trace=trace,
            experiments=tuple(experiments),
            sla_alpha_sweep=alpha_values,
            sla_beta_min=beta_min,
            resolved=config,
        )
        logger.debug(f"Конфиг разрешён: {scenario.scenario}, hash={scenario.config_hash}")
        return scenario

    @staticmethod
    def _resolve_trace(trace_cfg: Dict[str, Any], horizon: int, m: int, seed: int) -> TraceConfig:
        prices = trace_cfg.get("prices") or {}

        def price(market: str) -> OuPriceModel:
            raw = prices.get(market) or {}
            key = f"trace.prices.{market}"
            return _build(
                key,
                OuPriceModel,
                kappa=_number(f"{key}.kappa", raw.get("kappa")),
                mean=_number(f"{key}.mean", raw.get("mean")),
                std=_number(f"{key}.std", raw.get("std")),
                initial=None if raw.get("initial") is None else _number(f"{key}.initial", raw.get("initial")),
            )

        theta_raw = trace_cfg.get("theta") or {}
        theta = _build(
            "trace.theta",
            ThetaModel,
            offset=_numbers("trace.theta.offset", theta_raw.get("offset")),
            amplitude=_numbers("trace.theta.amplitude", theta_raw.get("amplitude")),
            period=_numbers("trace.theta.period", theta_raw.get("period")),
            phase=_numbers("trace.theta.phase", theta_raw.get("phase")),
            noise_std=_number("trace.theta.noise_std", theta_raw.get("noise_std")),
            noise_kappa=_number("trace.theta.noise_kappa", theta_raw.get("noise_kappa")),
        )

        demand_raw = trace_cfg.get("demand") or {}
        demand = _build(
            "trace.demand",
            DemandModel,
            kind=str(demand_raw.get("kind")),
            path=demand_raw.get("path"),
            column=None if demand_raw.get("column") is None else str(demand_raw.get("column")),
            normalize=bool(demand_raw.get("normalize", True)),
            offset=_number("trace.demand.offset", demand_raw.get("offset")),
            daily_amplitude=_number("trace.demand.daily_amplitude", demand_raw.get("daily_amplitude")),
            weekly_amplitude=_number("trace.demand.weekly_amplitude", demand_raw.get("weekly_amplitude")),
            daily_period=_number("trace.demand.daily_period", demand_raw.get("daily_period"), int),
            weekly_period=_number("trace.demand.weekly_period", demand_raw.get("weekly_period"), int),
            noise_std=_number("trace.demand.noise_std", demand_raw.get("noise_std")),
        )

        sla = None
        sla_raw = trace_cfg.get("sla")
        if sla_raw:
            sla = _build(
                "trace.sla",
                SlaModel,
                alpha_min=_number("trace.sla.alpha_min", sla_raw.get("alpha_min", 1.0)),
                beta_min=_number("trace.sla.beta_min", sla_raw.get("beta_min", 1.0)),
            )

        return _build(
            "trace",
            TraceConfig,
            horizon=horizon,
            m=m,
            rng_seed=seed,
            price_adv=price("adv"),
            price_spot=price("spot"),
            theta=theta,
            demand=demand,
            sla=sla,
        )
