"""Предсказатели градиента следующего слота ∇f̂_{t+1}(ẑ_{t+1}).

- ARMA-OGD: AR(q) по каждой из 2m координат градиента, лаговые
  коэффициенты обновляются онлайн-градиентным спуском;
- синтетический предсказатель с относительной ошибкой ζ (оракул,
  видит следующий слот, только для экспериментов);
- нулевой предсказатель (OOLR без оптимистичного члена).
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from src.managers.learners import Prediction, ProximalAnchor
from src.utils.domain import Decision, FeasibleBox, GradVector
from src.utils.errors import ConfigError, DimensionError
from src.utils.loss import LossConfig, TraceSlot, loss_gradient

logger = logging.getLogger(__name__)

LearnerProbe = Callable[[Prediction], Decision]


# ==================== ARMA-OGD ====================

@dataclass(frozen=True)
class ArmaOgdState:
    """Состояние онлайн AR(q)-предсказателя.

    history[:, 0] - последнее наблюдение, history[:, k] - на k слотов раньше.
    Шаг OGD: η_t = step_scale / scale / √t, где scale - бегущий максимум
    |v| (не меньше 1), если normalize_step включён.
    """

    lag_order: int
    coeffs: np.ndarray       # (2m, q)
    history: np.ndarray      # (2m, q)
    filled: int
    step_scale: float
    coeff_bound: float
    normalize_step: bool = True
    value_scale: float = 1.0
    t: int = 0

    @property
    def dim(self) -> int:
        return int(self.coeffs.shape[0])

    def step_size(self, step_index: int) -> float:
        scale = self.value_scale if self.normalize_step else 1.0
        return self.step_scale / scale / math.sqrt(step_index)


def arma_init(
    dim: int,
    lag_order: int = 5,
    step_scale: float = 0.1,
    coeff_bound: float = 1.0,
    normalize_step: bool = True,
) -> ArmaOgdState:
    """Старт с γ = (1, 0, …, 0): до обучения прогноз равен последнему значению"""
    if lag_order < 1 or dim < 1:
        raise ConfigError(f"lag_order and dim must be positive, got {lag_order}, {dim}")
    if not step_scale > 0 or not coeff_bound > 0:
        raise ConfigError("step_scale and coeff_bound must be > 0")
    coeffs = np.zeros((dim, lag_order))
    coeffs[:, 0] = min(1.0, coeff_bound)
    coeffs.setflags(write=False)
    history = np.zeros((dim, lag_order))
    history.setflags(write=False)
    return ArmaOgdState(
        lag_order=lag_order,
        coeffs=coeffs,
        history=history,
        filled=0,
        step_scale=float(step_scale),
        coeff_bound=float(coeff_bound),
        normalize_step=normalize_step,
    )


def arma_predict_values(state: ArmaOgdState) -> np.ndarray:
    if state.filled == 0:
        return np.zeros(state.dim)
    if state.filled < state.lag_order:
        return state.history[:, 0].copy()
    return np.sum(state.coeffs * state.history, axis=1)


def arma_predict(state: ArmaOgdState) -> Prediction:
    return Prediction(grad_hat=GradVector(values=arma_predict_values(state)))


def arma_update(state: ArmaOgdState, observed: np.ndarray) -> ArmaOgdState:
    """Один шаг OGD по квадратичной потере и сдвиг окна наблюдений"""
    v = np.asarray(observed.values if isinstance(observed, GradVector) else observed, dtype=float)
    if v.size != state.dim:
        raise DimensionError(f"observation has {v.size} entries, predictor tracks {state.dim}")

    value_scale = max(state.value_scale, float(np.max(np.abs(v))), 1.0)
    coeffs = state.coeffs
    t = state.t
    if state.filled == state.lag_order:
        t += 1
        window = state.history
        residual = np.sum(coeffs * window, axis=1) - v
        grad = 2.0 * residual[:, None] * window
        eta = replace(state, value_scale=value_scale).step_size(t)
        coeffs = np.clip(coeffs - eta * grad, -state.coeff_bound, state.coeff_bound)
        coeffs.setflags(write=False)

    history = np.empty_like(state.history)
    history[:, 1:] = state.history[:, :-1]
    history[:, 0] = v
    history.setflags(write=False)
    return replace(
        state,
        coeffs=coeffs,
        history=history,
        filled=min(state.filled + 1, state.lag_order),
        value_scale=value_scale,
        t=t,
    )


@dataclass(frozen=True)
class ForecastRow:
    t: int
    observed: float
    predicted: float
    squared_error: float
    running_mse: float


def arma_forecast_series(
    values,
    lag_order: int = 5,
    step_scale: float = 0.1,
    coeff_bound: float = 1.0,
    normalize_step: bool = True,
) -> list[ForecastRow]:
    """Прогон ARMA-OGD по скалярному ряду: прогноз до наблюдения, затем шаг"""
    state = arma_init(1, lag_order, step_scale, coeff_bound, normalize_step)
    rows: list[ForecastRow] = []
    total = 0.0
    for t, value in enumerate(values, start=1):
        predicted = float(arma_predict_values(state)[0])
        error = (predicted - float(value)) ** 2
        total += error
        rows.append(ForecastRow(t=t, observed=float(value), predicted=predicted,
                                squared_error=error, running_mse=total / t))
        state = arma_update(state, np.array([value], dtype=float))
    return rows


# ==================== Синтетический предсказатель ====================

@dataclass(frozen=True)
class SyntheticPredictorConfig:
    zeta: float
    rng_seed: int = 0
    fixed_point_iters: int = 20
    fixed_point_tol: float = 1e-10

    def __post_init__(self):
        if not self.zeta >= 0:
            raise ConfigError(f"zeta must be >= 0, got {self.zeta}")
        if self.fixed_point_iters < 1 or not self.fixed_point_tol > 0:
            raise ConfigError("fixed_point_iters must be >= 1 and fixed_point_tol > 0")


@dataclass(frozen=True)
class FixedPointOutcome:
    prediction: Prediction
    converged: bool
    iterations: int


def perturb(g: np.ndarray, zeta: float, sign: int) -> np.ndarray:
    """ĝ = g·(1 + s·ζ): относительная ошибка ровно ζ по каждой координате"""
    if zeta == 0:
        return g
    return g * (1.0 + sign * zeta)


def _proximal_fixed_point(
    anchor: ProximalAnchor,
    slot: TraceSlot,
    loss_cfg: LossConfig,
    box: FeasibleBox,
    scale: float,
) -> np.ndarray:
    """Точка z = Π(c − (L + scale·∇f(z))/w) для проксимального обучателя.

    f зависит от z через s = uᵀz, поэтому задача сводится к скалярному
    уравнению на λ = scale·φ'(s), φ'(s) = −V·a/(1 + s); левая часть
    монотонна по λ, корень ищется методом Брента.
    """
    alpha = np.ones(slot.m) if slot.alpha is None else slot.alpha
    beta = np.ones(slot.m) if slot.beta is None else slot.beta
    u = np.concatenate([alpha * slot.theta, beta * slot.theta])
    c = np.concatenate([alpha * slot.price_adv, beta * slot.price_spot])
    base = anchor.center - (anchor.linear + scale * c) / anchor.weight
    upper = box.upper

    def z_of(lam: float) -> np.ndarray:
        return np.clip(base - lam * u / anchor.weight, 0.0, upper)

    magnitude = scale * loss_cfg.V * slot.demand
    if magnitude == 0.0:
        return z_of(0.0)

    def residual(lam: float) -> float:
        return lam + magnitude / (1.0 + float(u @ z_of(lam)))

    lam = brentq(residual, -magnitude, 0.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return z_of(lam)


def resolve_fixed_point(
    cfg: SyntheticPredictorConfig,
    next_slot: TraceSlot,
    learner_probe: LearnerProbe,
    loss_cfg: LossConfig,
    sign: int,
    anchor: Optional[ProximalAnchor] = None,
    box: Optional[FeasibleBox] = None,
) -> FixedPointOutcome:
    """Разрешает цикл «прогноз → решение → градиент» итерацией неподвижной точки.

    ẑ ← probe(perturb(∇f(ẑ))) до ||ẑ' − ẑ|| < tol. Если обучатель
    проксимальный (anchor с весом > 0) и масштаб 1 + s·ζ неотрицателен,
    итерация стартует из точной неподвижной точки.
    """
    scale = 1.0 + sign * cfg.zeta
    if anchor is not None and box is not None and anchor.weight > 0 and scale >= 0:
        z_hat = Decision.from_vector(_proximal_fixed_point(anchor, next_slot, loss_cfg, box, scale))
    else:
        z_hat = learner_probe(Prediction.zeros(next_slot.m))

    g_hat = None
    for iteration in range(1, cfg.fixed_point_iters + 1):
        g = loss_gradient(next_slot, z_hat, loss_cfg).values
        g_hat = perturb(g, cfg.zeta, sign)
        z_next = learner_probe(Prediction(grad_hat=GradVector(values=g_hat)))
        gap = float(np.linalg.norm(z_next.as_vector() - z_hat.as_vector()))
        if gap < cfg.fixed_point_tol:
            return FixedPointOutcome(Prediction(GradVector(values=g_hat)), True, iteration)
        z_hat = z_next
    return FixedPointOutcome(Prediction(GradVector(values=g_hat)), False, cfg.fixed_point_iters)


def draw_sign(rng: np.random.Generator) -> int:
    return 1 if rng.integers(0, 2) == 1 else -1


def synthetic_predict(
    cfg: SyntheticPredictorConfig,
    next_slot: TraceSlot,
    learner_probe: LearnerProbe,
    loss_cfg: LossConfig,
    rng: Optional[np.random.Generator] = None,
) -> Prediction:
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    return resolve_fixed_point(cfg, next_slot, learner_probe, loss_cfg, draw_sign(rng)).prediction


def zero_predict(m: int) -> Prediction:
    return Prediction.zeros(m)


# ==================== Обёртки для харнесса ====================

class ZeroPredictor:
    kind = "zero"
    is_oracle = False

    def __init__(self, m: int):
        self.m = m

    def predict(self, learner, next_slot: Optional[TraceSlot] = None) -> Prediction:
        return zero_predict(self.m)

    def observe(self, grad_true: GradVector) -> None:
        pass


class ArmaOgdPredictor:
    """OOLRgrad: ARMA-OGD по координатам градиента, посчитанного в сыгранных точках"""

    kind = "arma_ogd"
    is_oracle = False

    def __init__(self, m: int, lag_order: int = 5, step_scale: float = 0.1, coeff_bound: float = 1.0):
        self.state = arma_init(2 * m, lag_order, step_scale, coeff_bound)

    def predict(self, learner, next_slot: Optional[TraceSlot] = None) -> Prediction:
        return arma_predict(self.state)

    def observe(self, grad_true: GradVector) -> None:
        self.state = arma_update(self.state, grad_true.values)


class SyntheticPredictor:
    """Оракул с относительной ошибкой ζ; знак ошибки разыгрывается раз в слот"""

    kind = "synthetic"
    is_oracle = True

    def __init__(self, cfg: SyntheticPredictorConfig, loss_cfg: LossConfig, box: FeasibleBox):
        self.cfg = cfg
        self.loss_cfg = loss_cfg
        self.box = box
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.fallbacks = 0

    def predict(self, learner, next_slot: Optional[TraceSlot] = None) -> Prediction:
        if next_slot is None:
            raise ConfigError("synthetic predictor needs the upcoming slot")
        outcome = resolve_fixed_point(
            self.cfg,
            next_slot,
            learner.probe,
            self.loss_cfg,
            draw_sign(self.rng),
            anchor=learner.anchor(),
            box=self.box,
        )
        if not outcome.converged:
            self.fallbacks += 1
        return outcome.prediction

    def observe(self, grad_true: GradVector) -> None:
        pass


def synthetic_error_rate(g_true: np.ndarray, g_hat: np.ndarray) -> np.ndarray:
    """|ĝ_i − g_i| / |g_i| по координатам с g_i ≠ 0"""
    g_true = np.asarray(g_true, dtype=float)
    mask = g_true != 0
    return np.abs(np.asarray(g_hat)[mask] - g_true[mask]) / np.abs(g_true[mask])

