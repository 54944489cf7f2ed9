"""Потери слота f_t и их градиент.

f_t(x, y) = −V·a·log((x̃ + ỹ)ᵀθ + 1) + pᵀx̃ + qᵀỹ,
где x̃ = α⊙x, ỹ = β⊙y при заданных коэффициентах исполнения SLA
и x̃ = x, ỹ = y без них. Логарифм натуральный.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from src.utils.domain import Decision, GradVector, frozen_array
from src.utils.errors import ConfigError, DimensionError, LossDomainError

logger = logging.getLogger(__name__)

Point = Union[Decision, np.ndarray]


@dataclass(frozen=True)
class TraceSlot:
    """Окружение одного слота: спрос, цены, вклады ресурсов, SLA"""

    demand: float
    price_adv: np.ndarray
    price_spot: np.ndarray
    theta: np.ndarray
    alpha: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None

    def __post_init__(self):
        p = frozen_array(self.price_adv)
        q = frozen_array(self.price_spot)
        theta = frozen_array(self.theta)
        if not (p.size == q.size == theta.size):
            raise DimensionError(
                f"price_adv/price_spot/theta sizes differ: {p.size}/{q.size}/{theta.size}"
            )
        demand = float(self.demand)
        if demand < 0 or np.any(p < 0) or np.any(q < 0) or np.any(theta < 0):
            raise LossDomainError("demand, prices and contributions must be nonnegative")
        object.__setattr__(self, "demand", demand)
        object.__setattr__(self, "price_adv", p)
        object.__setattr__(self, "price_spot", q)
        object.__setattr__(self, "theta", theta)
        for name in ("alpha", "beta"):
            ratios = getattr(self, name)
            if ratios is None:
                continue
            ratios = frozen_array(ratios)
            if ratios.size != theta.size:
                raise DimensionError(f"{name} has {ratios.size} entries, expected {theta.size}")
            if np.any(ratios <= 0) or np.any(ratios > 1):
                raise LossDomainError(f"{name} ratios must lie in (0, 1]")
            object.__setattr__(self, name, ratios)

    @property
    def m(self) -> int:
        return int(self.theta.size)

    @property
    def has_sla(self) -> bool:
        return self.alpha is not None or self.beta is not None


@dataclass(frozen=True)
class LossConfig:
    """V ≥ 1 балансирует полезность и стоимость"""

    V: float = 2.0

    def __post_init__(self):
        if not (self.V >= 1.0):
            raise ConfigError(f"loss.V must be >= 1, got {self.V}")


def _split(z: Point, m: int):
    if isinstance(z, Decision):
        x, y = z.x, z.y
    else:
        v = np.asarray(z, dtype=float).reshape(-1)
        x, y = v[: v.size // 2], v[v.size // 2:]
    if x.size != m or y.size != m:
        raise DimensionError(f"decision has {x.size}+{y.size} entries, slot expects {m}+{m}")
    return x, y


def _delivered(slot: TraceSlot, x: np.ndarray, y: np.ndarray):
    xt = x if slot.alpha is None else slot.alpha * x
    yt = y if slot.beta is None else slot.beta * y
    return xt, yt


def loss_value(slot: TraceSlot, z: Point, cfg: LossConfig) -> float:
    """f_t(z); точки вне Δ² допустимы, пока аргумент логарифма > 0"""
    x, y = _split(z, slot.m)
    xt, yt = _delivered(slot, x, y)
    arg = float((xt + yt) @ slot.theta) + 1.0
    if not arg > 0.0:
        raise LossDomainError(f"log argument {arg} <= 0")
    return -cfg.V * slot.demand * math.log(arg) + float(slot.price_adv @ xt) + float(slot.price_spot @ yt)


def loss_gradient(slot: TraceSlot, z: Point, cfg: LossConfig) -> GradVector:
    """∇f_t(z) в порядке (∂/∂x, ∂/∂y)"""
    x, y = _split(z, slot.m)
    xt, yt = _delivered(slot, x, y)
    arg = float((xt + yt) @ slot.theta) + 1.0
    if not arg > 0.0:
        raise LossDomainError(f"log argument {arg} <= 0")
    utility = -cfg.V * slot.demand * slot.theta / arg
    if slot.alpha is None:
        gx = utility + slot.price_adv
    else:
        gx = slot.alpha * utility + slot.alpha * slot.price_adv
    if slot.beta is None:
        gy = utility + slot.price_spot
    else:
        gy = slot.beta * utility + slot.beta * slot.price_spot
    return GradVector(values=np.concatenate([gx, gy]))


@dataclass(frozen=True)
class SlotArrays:
    """Трасса, уложенная в матрицы для векторизованных сумм по слотам.

    f_t(z) = −V·a_t·log(1 + u_tᵀz) + c_tᵀz, где u_t = [α⊙θ; β⊙θ],
    c_t = [α⊙p; β⊙q].
    """

    demand: np.ndarray   # (T,)
    u: np.ndarray        # (T, 2m)
    c: np.ndarray        # (T, 2m)

    @property
    def horizon(self) -> int:
        return int(self.demand.size)

    def values(self, z: np.ndarray, cfg: LossConfig) -> np.ndarray:
        arg = 1.0 + self.u @ z
        if np.any(arg <= 0):
            raise LossDomainError("log argument <= 0")
        return -cfg.V * self.demand * np.log(arg) + self.c @ z

    def total(self, z: np.ndarray, cfg: LossConfig) -> float:
        return float(np.sum(self.values(z, cfg)))

    def total_gradient(self, z: np.ndarray, cfg: LossConfig) -> np.ndarray:
        arg = 1.0 + self.u @ z
        weights = -cfg.V * self.demand / arg
        return self.u.T @ weights + self.c.sum(axis=0)


def stack_slots(slots: Sequence[TraceSlot]) -> SlotArrays:
    if not slots:
        raise DimensionError("no slots to stack")
    rows_u, rows_c = [], []
    for slot in slots:
        alpha = np.ones(slot.m) if slot.alpha is None else slot.alpha
        beta = np.ones(slot.m) if slot.beta is None else slot.beta
        rows_u.append(np.concatenate([alpha * slot.theta, beta * slot.theta]))
        rows_c.append(np.concatenate([alpha * slot.price_adv, beta * slot.price_spot]))
    return SlotArrays(
        demand=np.array([s.demand for s in slots], dtype=float),
        u=np.vstack(rows_u),
        c=np.vstack(rows_c),
    )
