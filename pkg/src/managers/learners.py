"""Онлайн-политики резервирования: классический FTRL и оптимистичный OOLR.

Состояния неизменяемы: ``*_update`` возвращает новое состояние.
Обучатели никогда не вызывают предсказатели сами: прогноз приходит
аргументом в ``decide``, а в ``update`` передаётся тот же объект,
который был использован при решении.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Protocol

import numpy as np

from src.utils.domain import Decision, FeasibleBox, GradVector, diameter, frozen_array, project
from src.utils.errors import DimensionError, InfeasibleError

logger = logging.getLogger(__name__)

# Защита от деления на ноль в шаге FTRL
GRAD_SQ_EPS = 1e-12


@dataclass(frozen=True)
class Prediction:
    """Прогноз градиента следующего слота ∇f̂_{t+1}(ẑ_{t+1})"""

    grad_hat: GradVector

    @classmethod
    def zeros(cls, m: int) -> "Prediction":
        return cls(grad_hat=GradVector.zeros(m))


@dataclass(frozen=True)
class ProximalAnchor:
    """Описание регуляризованной цели обучателя.

    decide(ĝ) = argmin_{z∈Δ²} weight/2·||z − center||² + (linear + ĝ)ᵀz
    """

    center: np.ndarray
    weight: float
    linear: np.ndarray


# ==================== OOLR ====================

@dataclass(frozen=True)
class OolrState:
    sigma: float
    grad_sum: np.ndarray
    weighted_center_sum: np.ndarray
    sigma_sum: float
    h_sum: float
    last_decision: Decision
    t: int = 1

    @property
    def center(self) -> Optional[np.ndarray]:
        """Взвешенный центр проксимальных регуляризаторов c̄"""
        if self.sigma_sum <= 0.0:
            return None
        return self.weighted_center_sum / self.sigma_sum


def oolr_init(box: FeasibleBox, sigma: float, z1: Decision) -> OolrState:
    if not sigma > 0:
        raise InfeasibleError(f"sigma must be > 0, got {sigma}")
    if not box.contains(z1):
        raise InfeasibleError(f"z1 is outside the box: x={z1.x.tolist()}, y={z1.y.tolist()}")
    zeros = frozen_array(np.zeros(2 * box.m))
    return OolrState(
        sigma=float(sigma),
        grad_sum=zeros,
        weighted_center_sum=zeros,
        sigma_sum=0.0,
        h_sum=0.0,
        last_decision=z1,
        t=1,
    )


def oolr_decide(state: OolrState, pred: Prediction, box: FeasibleBox) -> Decision:
    """Точный argmin шага OOLR на Δ².

    Сумма проксимальных квадратик имеет гессиан σ_{1:t}·I, поэтому
    проекция безусловного минимума на бокс даёт условный минимум.
    При σ_{1:t} = 0 цель линейна: берётся конец отрезка по знаку
    координаты, при нуле остаётся прошлое решение.
    """
    linear = state.grad_sum + pred.grad_hat.values
    if linear.size != 2 * box.m:
        raise DimensionError(f"prediction has {linear.size} entries, box expects {2 * box.m}")
    if state.sigma_sum > 0.0:
        return project(state.center - linear / state.sigma_sum, box)
    last = state.last_decision.as_vector()
    z = np.where(linear > 0, 0.0, np.where(linear < 0, box.upper, last))
    return Decision.from_vector(z)


def oolr_update(
    state: OolrState,
    grad_true: GradVector,
    pred_used: Prediction,
    z_played: Decision,
) -> OolrState:
    error = grad_true.values - pred_used.grad_hat.values
    h_t = float(error @ error)
    h_new = state.h_sum + h_t
    sigma_t = state.sigma * (math.sqrt(h_new) - math.sqrt(state.h_sum))
    return replace(
        state,
        grad_sum=frozen_array(state.grad_sum + grad_true.values),
        weighted_center_sum=frozen_array(state.weighted_center_sum + sigma_t * z_played.as_vector()),
        sigma_sum=state.sigma_sum + sigma_t,
        h_sum=h_new,
        last_decision=z_played,
        t=state.t + 1,
    )


# ==================== FTRL ====================

@dataclass(frozen=True)
class FtrlState:
    eta_scale: float
    grad_sum: np.ndarray
    grad_sq_sum: float
    last_decision: Decision
    t: int = 1


def ftrl_init(box: FeasibleBox, eta_scale: Optional[float], z1: Decision) -> FtrlState:
    """eta_scale=None означает D = sqrt(Σ D_i²)"""
    scale = diameter(box) if eta_scale is None else float(eta_scale)
    if not scale > 0:
        raise InfeasibleError(f"eta_scale must be > 0, got {scale}")
    if not box.contains(z1):
        raise InfeasibleError("z1 is outside the box")
    return FtrlState(
        eta_scale=scale,
        grad_sum=frozen_array(np.zeros(2 * box.m)),
        grad_sq_sum=0.0,
        last_decision=z1,
        t=1,
    )


def ftrl_eta(state: FtrlState) -> float:
    return state.eta_scale / math.sqrt(max(state.grad_sq_sum, GRAD_SQ_EPS))


def ftrl_decide(state: FtrlState, box: FeasibleBox) -> Decision:
    """z = Π(−η_t·Σ∇f_i) - минимум Σ∇f_iᵀz + ||z||²/(2η_t) на Δ²"""
    if state.t == 1:
        return state.last_decision
    return project(-ftrl_eta(state) * state.grad_sum, box)


def ftrl_update(state: FtrlState, grad_true: GradVector) -> FtrlState:
    g = grad_true.values
    return replace(
        state,
        grad_sum=frozen_array(state.grad_sum + g),
        grad_sq_sum=state.grad_sq_sum + float(g @ g),
        t=state.t + 1,
    )


# ==================== Обёртки для харнесса ====================

class Learner(Protocol):
    kind: str

    def decide(self, pred: Optional[Prediction]) -> Decision: ...

    def probe(self, pred: Prediction) -> Decision: ...

    def anchor(self) -> Optional[ProximalAnchor]: ...

    def update(self, grad_true: GradVector, pred_used: Optional[Prediction], z_played: Decision) -> None: ...


class OolrLearner:
    """Оптимистичный FTRL с адаптивными проксимальными регуляризаторами"""

    kind = "oolr"

    def __init__(self, box: FeasibleBox, sigma: float, z1: Decision):
        self.box = box
        self.state = oolr_init(box, sigma, z1)

    def probe(self, pred: Prediction) -> Decision:
        """Решение, которое дал бы прогноз pred; состояние не меняется"""
        return oolr_decide(self.state, pred, self.box)

    def decide(self, pred: Optional[Prediction]) -> Decision:
        return self.probe(pred if pred is not None else Prediction.zeros(self.box.m))

    def anchor(self) -> Optional[ProximalAnchor]:
        center = self.state.center
        if center is None:
            return None
        return ProximalAnchor(center=center, weight=self.state.sigma_sum, linear=self.state.grad_sum)

    def update(self, grad_true: GradVector, pred_used: Optional[Prediction], z_played: Decision) -> None:
        used = pred_used if pred_used is not None else Prediction.zeros(self.box.m)
        self.state = oolr_update(self.state, grad_true, used, z_played)


class FtrlLearner:
    """Классический FTRL с евклидовым регуляризатором"""

    kind = "ftrl"

    def __init__(self, box: FeasibleBox, eta_scale: Optional[float], z1: Decision):
        self.box = box
        self.state = ftrl_init(box, eta_scale, z1)

    def probe(self, pred: Prediction) -> Decision:
        return ftrl_decide(self.state, self.box)

    def decide(self, pred: Optional[Prediction]) -> Decision:
        return ftrl_decide(self.state, self.box)

    def anchor(self) -> Optional[ProximalAnchor]:
        return None

    def update(self, grad_true: GradVector, pred_used: Optional[Prediction], z_played: Decision) -> None:
        self.state = replace(ftrl_update(self.state, grad_true), last_decision=z_played)
