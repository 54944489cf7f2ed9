"""Офлайн-бенчмарки и учёт регрета.

Статический бенчмарк z* = argmin Σ_t f_t(z) и динамический z*_t = argmin f_t(z)
считаются одним и тем же PGD-решателем на боксе.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.managers.box_solver import minimize_over_box
from src.utils.domain import Decision, FeasibleBox
from src.utils.errors import DimensionError, LengthMismatchError
from src.utils.loss import LossConfig, SlotArrays, TraceSlot, stack_slots

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITERS = 10_000

REPORT_COLUMNS = (
    "t",
    "loss",
    "loss_static",
    "loss_dynamic",
    "regret_static",
    "regret_dynamic",
    "avg_regret_static",
    "avg_regret_dynamic",
    "h",
    "bound",
)


@dataclass(frozen=True)
class BenchmarkResult:
    decision: Decision
    objective: float
    converged: bool
    iterations: int


def _solve(arrays: SlotArrays, cfg: LossConfig, box: FeasibleBox, tol: float, max_iters: int) -> BenchmarkResult:
    if arrays.u.shape[1] != 2 * box.m:
        raise DimensionError(f"slots have m={arrays.u.shape[1] // 2}, box has m={box.m}")
    result = minimize_over_box(
        value_fn=lambda z: arrays.total(z, cfg),
        grad_fn=lambda z: arrays.total_gradient(z, cfg),
        upper=box.upper,
        x0=box.center().as_vector(),
        tol=tol,
        max_iters=max_iters,
    )
    return BenchmarkResult(
        decision=Decision.from_vector(result.x),
        objective=result.value,
        converged=result.converged,
        iterations=result.iterations,
    )


def solve_static_benchmark(
    slots: Sequence[TraceSlot],
    cfg: LossConfig,
    box: FeasibleBox,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> BenchmarkResult:
    """Лучшее фиксированное решение задним числом"""
    result = _solve(stack_slots(slots), cfg, box, tol, max_iters)
    if not result.converged:
        logger.warning(f"Статический бенчмарк не сошёлся за {max_iters} итераций")
    return result


def solve_dynamic_benchmark(
    slot: TraceSlot,
    cfg: LossConfig,
    box: FeasibleBox,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> BenchmarkResult:
    """Оптимум одного слота; при p_i == q_i разбиение x/y неединственно"""
    return _solve(stack_slots([slot]), cfg, box, tol, max_iters)


def solve_dynamic_sequence(
    slots: Sequence[TraceSlot],
    cfg: LossConfig,
    box: FeasibleBox,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> List[BenchmarkResult]:
    results = [solve_dynamic_benchmark(slot, cfg, box, tol, max_iters) for slot in slots]
    unconverged = sum(1 for r in results if not r.converged)
    if unconverged:
        logger.warning(f"Динамический бенчмарк: {unconverged} из {len(results)} слотов не сошлись")
    return results


@dataclass(frozen=True)
class BenchmarkSet:
    """Бенчмарки одной трассы, общие для всех комбинаций"""

    static: Optional[BenchmarkResult]
    static_losses: Optional[np.ndarray]
    dynamic: Optional[List[BenchmarkResult]]
    dynamic_losses: Optional[np.ndarray]

    @property
    def unconverged(self) -> int:
        count = 0
        if self.static is not None and not self.static.converged:
            count += 1
        if self.dynamic is not None:
            count += sum(1 for r in self.dynamic if not r.converged)
        return count


def compute_benchmarks(
    slots: Sequence[TraceSlot],
    cfg: LossConfig,
    box: FeasibleBox,
    kinds: str = "both",
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> BenchmarkSet:
    """kinds: 'static', 'dynamic' или 'both'"""
    static = static_losses = dynamic = dynamic_losses = None
    if kinds in ("static", "both"):
        static = solve_static_benchmark(slots, cfg, box, tol, max_iters)
        static_losses = stack_slots(slots).values(static.decision.as_vector(), cfg)
    if kinds in ("dynamic", "both"):
        dynamic = solve_dynamic_sequence(slots, cfg, box, tol, max_iters)
        dynamic_losses = np.array([r.objective for r in dynamic], dtype=float)
    return BenchmarkSet(static=static, static_losses=static_losses, dynamic=dynamic, dynamic_losses=dynamic_losses)


def regret_bound(h_sum: float, sigma: float, D: float) -> float:
    """√h_{1:t}·(2/σ + σ·D²); при σ = √2/D это 2√2·D·√h_{1:t}"""
    return math.sqrt(max(h_sum, 0.0)) * (2.0 / sigma + sigma * D * D)


@dataclass(frozen=True)
class RunDiagnostics:
    fixed_point_fallbacks: int = 0
    unconverged_benchmarks: int = 0


@dataclass(frozen=True)
class RegretReport:
    t: np.ndarray
    loss: np.ndarray
    loss_static: np.ndarray
    loss_dynamic: np.ndarray
    regret_static: np.ndarray
    regret_dynamic: np.ndarray
    avg_regret_static: np.ndarray
    avg_regret_dynamic: np.ndarray
    h: np.ndarray
    bound: np.ndarray
    label: str = ""
    learner: str = ""
    predictor: str = ""
    oracle_assisted: bool = False
    diagnostics: RunDiagnostics = field(default_factory=RunDiagnostics)
    decisions: Optional[np.ndarray] = None

    @property
    def horizon(self) -> int:
        return int(self.t.size)

    @property
    def final_regret_static(self) -> float:
        return float(self.regret_static[-1])

    @property
    def final_avg_regret_static(self) -> float:
        return float(self.avg_regret_static[-1])

    @property
    def final_avg_regret_dynamic(self) -> float:
        return float(self.avg_regret_dynamic[-1])

    @property
    def final_bound(self) -> float:
        return float(self.bound[-1])

    def bound_holds(self, eps: float = 1e-6) -> Optional[bool]:
        """None, если статический бенчмарк не считался"""
        r = self.final_regret_static
        if math.isnan(r):
            return None
        return bool(r <= self.final_bound + eps * (1.0 + abs(r)))

    def columns(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}


def compute_regret(
    alg_losses: Sequence[float],
    benchmark_losses: Sequence[float],
    h_series: Sequence[float],
    D: float,
    sigma: Optional[float] = None,
    dynamic_losses: Optional[Sequence[float]] = None,
    **meta,
) -> RegretReport:
    """Накопленный регрет, средние и бегущая оценка сверху.

    sigma=None означает √2/D. Без dynamic_losses динамические столбцы - NaN.
    """
    loss = np.asarray(alg_losses, dtype=float)
    static = np.asarray(benchmark_losses, dtype=float)
    h = np.asarray(h_series, dtype=float)
    if not (loss.size == static.size == h.size):
        raise LengthMismatchError(
            f"alg_losses/benchmark_losses/h_series lengths differ: {loss.size}/{static.size}/{h.size}"
        )
    if dynamic_losses is None:
        dynamic = np.full(loss.size, np.nan)
    else:
        dynamic = np.asarray(dynamic_losses, dtype=float)
        if dynamic.size != loss.size:
            raise LengthMismatchError(f"dynamic_losses has {dynamic.size} entries, expected {loss.size}")

    sigma = math.sqrt(2.0) / D if sigma is None else float(sigma)
    t = np.arange(1, loss.size + 1)
    regret_static = np.cumsum(loss - static)
    regret_dynamic = np.cumsum(loss - dynamic)
    bound = np.sqrt(np.cumsum(np.maximum(h, 0.0))) * (2.0 / sigma + sigma * D * D)
    return RegretReport(
        t=t,
        loss=loss,
        loss_static=static,
        loss_dynamic=dynamic,
        regret_static=regret_static,
        regret_dynamic=regret_dynamic,
        avg_regret_static=regret_static / t,
        avg_regret_dynamic=regret_dynamic / t,
        h=h,
        bound=bound,
        **meta,
    )
