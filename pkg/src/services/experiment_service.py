"""Прогон обучателя по трассе в онлайн-протоколе.

В слоте t обучатель фиксирует z_t до того, как увидит (a, p, q, θ, α, β)
слота t. Предсказатель для слота t видит только прошлое; исключение -
синтетический оракул, такие прогоны помечаются oracle_assisted.
"""
import asyncio
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.config.settings import RUN_WORKERS
from src.managers.learners import FtrlLearner, Learner, OolrLearner, Prediction
from src.managers.predictors import (
    ArmaOgdPredictor,
    SyntheticPredictor,
    SyntheticPredictorConfig,
    ZeroPredictor,
)
from src.services.benchmark_service import (
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    BenchmarkSet,
    RegretReport,
    RunDiagnostics,
    compute_benchmarks,
    compute_regret,
)
from src.utils.domain import Decision, FeasibleBox, diameter, optimal_sigma
from src.utils.errors import ConfigError, DimensionError
from src.utils.log_setup import run_context
from src.utils.loss import LossConfig, TraceSlot, loss_gradient, loss_value

logger = logging.getLogger(__name__)

LEARNER_KINDS = ("ftrl", "oolr")
PREDICTOR_KINDS = ("arma_ogd", "synthetic", "zero")
BENCHMARK_KINDS = ("static", "dynamic", "both")


@dataclass(frozen=True)
class PredictorSpec:
    kind: str = "zero"
    zeta: float = 0.0
    seed: int = 0
    lag_order: int = 5
    step_scale: float = 0.1
    coeff_bound: float = 1.0
    fixed_point_iters: int = 20
    fixed_point_tol: float = 1e-10

    def __post_init__(self):
        if self.kind not in PREDICTOR_KINDS:
            raise ConfigError(f"predictor kind must be one of {PREDICTOR_KINDS}, got {self.kind!r}")

    @property
    def is_oracle(self) -> bool:
        return self.kind == "synthetic"


@dataclass(frozen=True)
class ExperimentConfig:
    """Одна комбинация обучатель + предсказатель на общей трассе"""

    box: FeasibleBox
    horizon: int
    name: str = "oolr"
    learner: str = "oolr"
    predictor: PredictorSpec = field(default_factory=PredictorSpec)
    loss: LossConfig = field(default_factory=LossConfig)
    sigma: Optional[float] = None
    eta_scale: Optional[float] = None
    z1: str = "zero"
    benchmarks: str = "both"
    solver_tol: float = DEFAULT_TOL
    solver_max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if self.learner not in LEARNER_KINDS:
            raise ConfigError(f"learner must be one of {LEARNER_KINDS}, got {self.learner!r}")
        if self.benchmarks not in BENCHMARK_KINDS:
            raise ConfigError(f"benchmarks must be one of {BENCHMARK_KINDS}, got {self.benchmarks!r}")
        if self.z1 not in ("zero", "center"):
            raise ConfigError(f"learner.z1 must be 'zero' or 'center', got {self.z1!r}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError(f"learner.sigma must be > 0, got {self.sigma}")

    @property
    def resolved_sigma(self) -> float:
        """σ = √2/D, если не задано явно"""
        return optimal_sigma(self.box) if self.sigma is None else float(self.sigma)

    @property
    def oracle_assisted(self) -> bool:
        return self.learner == "oolr" and self.predictor.is_oracle


def initial_decision(cfg: ExperimentConfig) -> Decision:
    return cfg.box.center() if cfg.z1 == "center" else cfg.box.zero()


def build_learner(cfg: ExperimentConfig) -> Learner:
    z1 = initial_decision(cfg)
    if cfg.learner == "ftrl":
        return FtrlLearner(cfg.box, cfg.eta_scale, z1)
    return OolrLearner(cfg.box, cfg.resolved_sigma, z1)


def build_predictor(cfg: ExperimentConfig):
    spec = cfg.predictor
    m = cfg.box.m
    if cfg.learner == "ftrl" or spec.kind == "zero":
        return ZeroPredictor(m)
    if spec.kind == "arma_ogd":
        return ArmaOgdPredictor(m, spec.lag_order, spec.step_scale, spec.coeff_bound)
    synthetic = SyntheticPredictorConfig(
        zeta=spec.zeta,
        rng_seed=spec.seed,
        fixed_point_iters=spec.fixed_point_iters,
        fixed_point_tol=spec.fixed_point_tol,
    )
    return SyntheticPredictor(synthetic, cfg.loss, cfg.box)


def _check_trace(cfg: ExperimentConfig, trace: Sequence[TraceSlot]) -> List[TraceSlot]:
    if len(trace) < cfg.horizon:
        raise ConfigError(f"trace has {len(trace)} slots, horizon is {cfg.horizon}")
    slots = list(trace[: cfg.horizon])
    if slots[0].m != cfg.box.m:
        raise DimensionError(f"trace has m={slots[0].m}, box has m={cfg.box.m}", module="metrics")
    return slots


def prepare_benchmarks(cfg: ExperimentConfig, trace: Sequence[TraceSlot]) -> BenchmarkSet:
    slots = _check_trace(cfg, trace)
    return compute_benchmarks(slots, cfg.loss, cfg.box, cfg.benchmarks, cfg.solver_tol, cfg.solver_max_iters)


def run_experiment(
    cfg: ExperimentConfig,
    trace: Sequence[TraceSlot],
    benchmarks: Optional[BenchmarkSet] = None,
) -> RegretReport:
    """Выполняет онлайн-протокол и возвращает отчёт о регрете"""
    with run_context(combination=cfg.name):
        return _run_online(cfg, trace, benchmarks)


def _run_online(
    cfg: ExperimentConfig,
    trace: Sequence[TraceSlot],
    benchmarks: Optional[BenchmarkSet],
) -> RegretReport:
    slots = _check_trace(cfg, trace)
    if benchmarks is None:
        benchmarks = prepare_benchmarks(cfg, slots)

    learner = build_learner(cfg)
    predictor = build_predictor(cfg)
    T, m = cfg.horizon, cfg.box.m

    losses = np.empty(T)
    h_series = np.empty(T)
    decisions = np.empty((T, 2 * m))
    for t, slot in enumerate(slots):
        # решение до наблюдения слота t; оракул получает только этот слот
        pred: Optional[Prediction] = None
        if learner.kind == "oolr":
            pred = predictor.predict(learner, next_slot=slot if predictor.is_oracle else None)
        z = learner.decide(pred)

        losses[t] = loss_value(slot, z, cfg.loss)
        grad = loss_gradient(slot, z, cfg.loss)
        used = pred if pred is not None else Prediction.zeros(m)
        error = grad.values - used.grad_hat.values
        h_series[t] = float(error @ error)

        learner.update(grad, pred, z)
        predictor.observe(grad)
        decisions[t] = z.as_vector()
        logger.debug(f"t={t + 1} loss={losses[t]:.6g} h={h_series[t]:.3e}")

    fallbacks = getattr(predictor, "fallbacks", 0)
    if fallbacks:
        logger.warning(f"Неподвижная точка не найдена в {fallbacks} слотах из {T}")

    static_losses = benchmarks.static_losses
    if static_losses is None:
        static_losses = np.full(T, np.nan)
    report = compute_regret(
        losses,
        static_losses[:T],
        h_series,
        D=diameter(cfg.box),
        sigma=cfg.resolved_sigma,
        dynamic_losses=None if benchmarks.dynamic_losses is None else benchmarks.dynamic_losses[:T],
        label=cfg.name,
        learner=cfg.learner,
        predictor="none" if cfg.learner == "ftrl" else cfg.predictor.kind,
        oracle_assisted=cfg.oracle_assisted,
        diagnostics=RunDiagnostics(
            fixed_point_fallbacks=fallbacks,
            unconverged_benchmarks=benchmarks.unconverged,
        ),
        decisions=decisions,
    )
    logger.info(
        f"T={T}: R_T/T static={report.final_avg_regret_static:.6g}, "
        f"dynamic={report.final_avg_regret_dynamic:.6g}, bound={report.final_bound:.6g}"
    )
    return report


def _benchmark_key(cfg: ExperimentConfig) -> tuple:
    """Всё, от чего зависят общие бенчмарки"""
    return (
        tuple(cfg.box.bounds.tolist()),
        cfg.loss,
        cfg.horizon,
        cfg.benchmarks,
        cfg.solver_tol,
        cfg.solver_max_iters,
    )


async def run_batch(
    experiments: Sequence[ExperimentConfig],
    trace: Sequence[TraceSlot],
    workers: int = RUN_WORKERS,
    benchmarks: Optional[BenchmarkSet] = None,
) -> List[RegretReport]:
    """Запускает комбинации параллельно в потоках; порядок результатов совпадает с порядком конфигов.

    Бенчмарки считаются один раз и разделяются всеми комбинациями,
    поэтому у всех экспериментов должны совпадать бокс, V, T и настройки решателя.
    """
    if not experiments:
        return []
    first = experiments[0]
    for cfg in experiments[1:]:
        if _benchmark_key(cfg) != _benchmark_key(first):
            raise ConfigError(
                f"combination {cfg.name!r} does not share box/loss/horizon/solver settings with {first.name!r}"
            )
    if benchmarks is None:
        benchmarks = await asyncio.to_thread(prepare_benchmarks, first, trace)

    semaphore = asyncio.Semaphore(max(1, workers))

    async def _run(cfg: ExperimentConfig) -> RegretReport:
        async with semaphore:
            return await asyncio.to_thread(run_experiment, cfg, trace, benchmarks)

    return list(await asyncio.gather(*(_run(cfg) for cfg in experiments)))
