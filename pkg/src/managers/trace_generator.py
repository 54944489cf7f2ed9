"""Генерация нестационарных трасс: цены, вклады ресурсов, спрос, SLA.

Каждая компонента трассы получает свой дочерний генератор из
SeedSequence(rng_seed), поэтому смена параметров SLA не меняет цены
и спрос при том же seed.
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from src.utils.errors import ConfigError, TraceSourceError
from src.utils.loss import TraceSlot

logger = logging.getLogger(__name__)

PerResource = Union[float, Sequence[float]]

# Суточный и недельный периоды при шаге 10 минут
DAILY_PERIOD = 144
WEEKLY_PERIOD = 1008


def _per_resource(value: PerResource, m: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).reshape(-1)
    if arr.size == 1:
        return np.full(m, float(arr[0]))
    if arr.size != m:
        raise ConfigError(f"{name} has {arr.size} entries, expected 1 or {m}")
    return arr


@dataclass(frozen=True)
class OuPriceModel:
    """Дискретный OU/AR(1): v_{t+1} = v_t + κ(μ − v_t) + σ·ε_t"""

    kappa: float = 0.05
    mean: float = 0.5
    std: float = 0.003
    initial: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.kappa <= 1:
            raise ConfigError(f"price kappa must lie in (0, 1], got {self.kappa}")
        if not self.mean > 0:
            raise ConfigError(f"price mean must be > 0, got {self.mean}")
        if not self.std >= 0:
            raise ConfigError(f"price std must be >= 0, got {self.std}")


@dataclass(frozen=True)
class ThetaModel:
    """θ_i(t) = max(0, o_i + A_i·sin(2πt/P_i + φ_i) + OU-шум)"""

    offset: PerResource = 0.5
    amplitude: PerResource = 0.05
    period: PerResource = 48
    phase: PerResource = 0.0
    noise_std: float = 0.002
    noise_kappa: float = 0.1

    def __post_init__(self):
        if np.any(np.asarray(self.offset, dtype=float) <= 0):
            raise ConfigError("theta offset must be > 0")
        if np.any(np.asarray(self.amplitude, dtype=float) < 0):
            raise ConfigError("theta amplitude must be >= 0")
        if np.any(np.asarray(self.period, dtype=float) <= 0):
            raise ConfigError("theta period must be > 0")
        if not self.noise_std >= 0 or not 0 < self.noise_kappa <= 1:
            raise ConfigError("theta noise_std must be >= 0 and noise_kappa in (0, 1]")


@dataclass(frozen=True)
class DemandModel:
    """Спрос: kind='synthetic' (две синусоиды + шум) или kind='csv'"""

    kind: str = "synthetic"
    path: Optional[str] = None
    column: Optional[str] = None
    normalize: bool = True
    offset: float = 1.0
    daily_amplitude: float = 0.02
    weekly_amplitude: float = 0.0
    daily_period: int = DAILY_PERIOD
    weekly_period: int = WEEKLY_PERIOD
    noise_std: float = 0.01

    def __post_init__(self):
        if self.kind not in ("synthetic", "csv"):
            raise ConfigError(f"demand kind must be 'synthetic' or 'csv', got {self.kind!r}")
        if self.kind == "csv" and (not self.path or not self.column):
            raise ConfigError("csv demand needs both path and column")
        if not self.noise_std >= 0:
            raise ConfigError("demand noise_std must be >= 0")


@dataclass(frozen=True)
class SlaModel:
    """Нижние границы долей исполнения α_min, β_min ∈ (0, 1]"""

    alpha_min: float = 1.0
    beta_min: float = 1.0

    def __post_init__(self):
        for name in ("alpha_min", "beta_min"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ConfigError(f"sla.{name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class TraceConfig:
    horizon: int
    m: int
    rng_seed: int = 0
    price_adv: OuPriceModel = field(default_factory=OuPriceModel)
    price_spot: OuPriceModel = field(default_factory=lambda: OuPriceModel(kappa=1.0, mean=1.2, std=0.15))
    theta: ThetaModel = field(default_factory=ThetaModel)
    demand: DemandModel = field(default_factory=DemandModel)
    sla: Optional[SlaModel] = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"trace horizon must be >= 1, got {self.horizon}")
        if self.m < 1:
            raise ConfigError(f"trace m must be >= 1, got {self.m}")


def ou_series(model: OuPriceModel, horizon: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """(T, m) независимых OU-рядов, обрезанных снизу нулём"""
    values = np.empty((horizon, m))
    v = np.full(m, model.mean if model.initial is None else float(model.initial))
    v = np.maximum(v, 0.0)
    for t in range(horizon):
        values[t] = v
        noise = rng.standard_normal(m) * model.std if model.std > 0 else 0.0
        v = np.maximum(v + model.kappa * (model.mean - v) + noise, 0.0)
    return values


def theta_series(model: ThetaModel, horizon: int, m: int, rng: np.random.Generator) -> np.ndarray:
    offset = _per_resource(model.offset, m, "theta.offset")
    amplitude = _per_resource(model.amplitude, m, "theta.amplitude")
    period = _per_resource(model.period, m, "theta.period")
    phase = _per_resource(model.phase, m, "theta.phase")

    t = np.arange(1, horizon + 1, dtype=float)[:, None]
    seasonal = offset + amplitude * np.sin(2.0 * math.pi * t / period + phase)

    noise = np.zeros((horizon, m))
    if model.noise_std > 0:
        e = np.zeros(m)
        for k in range(horizon):
            noise[k] = e
            e = e - model.noise_kappa * e + model.noise_std * rng.standard_normal(m)
    return np.maximum(seasonal + noise, 0.0)


def synthetic_demand(model: DemandModel, horizon: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(1, horizon + 1, dtype=float)
    raw = (
        model.offset
        + model.daily_amplitude * np.sin(2.0 * math.pi * t / model.daily_period)
        + model.weekly_amplitude * np.sin(2.0 * math.pi * t / model.weekly_period)
    )
    if model.noise_std > 0:
        raw = raw + model.noise_std * rng.standard_normal(horizon)
    raw = np.maximum(raw, 0.0)
    peak = float(raw.max())
    if model.normalize and peak > 0:
        raw = raw / peak
    return raw


def ingest_demand_csv(path: Union[str, Path], column: str, normalize: bool = True) -> List[float]:
    """Читает столбец спроса из CSV с заголовком.

    Ошибки разбора указывают номер строки файла (заголовок - строка 1).
    """
    path = Path(path)
    if not path.is_file():
        raise TraceSourceError(f"demand file not found: {path}")

    values: List[float] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise TraceSourceError(f"{path}: column {column!r} not in header {reader.fieldnames}")
        for row in reader:
            cell = (row.get(column) or "").strip()
            try:
                value = float(cell)
            except ValueError:
                raise TraceSourceError(
                    f"{path}: line {reader.line_num}: non-numeric value {cell!r} in column {column!r}"
                ) from None
            if not math.isfinite(value) or value < 0:
                raise TraceSourceError(f"{path}: line {reader.line_num}: demand must be finite and >= 0, got {cell}")
            values.append(value)

    if not values:
        raise TraceSourceError(f"{path}: column {column!r} is empty")
    if normalize:
        peak = max(values)
        if peak > 0:
            values = [v / peak for v in values]
    logger.debug(f"Прочитано {len(values)} значений спроса из {path}")
    return values


def generate(cfg: TraceConfig) -> List[TraceSlot]:
    """Строит трассу длины T из конфигурации и seed"""
    adv_rng, spot_rng, theta_rng, demand_rng, sla_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.rng_seed).spawn(5)
    )
    T, m = cfg.horizon, cfg.m

    p = ou_series(cfg.price_adv, T, m, adv_rng)
    q = ou_series(cfg.price_spot, T, m, spot_rng)
    theta = theta_series(cfg.theta, T, m, theta_rng)

    if cfg.demand.kind == "csv":
        series = ingest_demand_csv(cfg.demand.path, cfg.demand.column, cfg.demand.normalize)
        if len(series) < T:
            raise TraceSourceError(f"{cfg.demand.path}: {len(series)} demand rows, horizon needs {T}")
        demand = np.asarray(series[:T], dtype=float)
    else:
        demand = synthetic_demand(cfg.demand, T, demand_rng)

    alpha = beta = None
    if cfg.sla is not None:
        alpha = sla_rng.uniform(cfg.sla.alpha_min, 1.0, size=(T, m))
        beta = sla_rng.uniform(cfg.sla.beta_min, 1.0, size=(T, m))

    slots = [
        TraceSlot(
            demand=float(demand[t]),
            price_adv=p[t],
            price_spot=q[t],
            theta=theta[t],
            alpha=None if alpha is None else alpha[t],
            beta=None if beta is None else beta[t],
        )
        for t in range(T)
    ]
    logger.info(f"Сгенерирована трасса: T={T}, m={m}, seed={cfg.rng_seed}, sla={'да' if cfg.sla else 'нет'}")
    return slots
