"""Геометрия задачи резервирования: бокс Δ², решения и градиенты.

Решение z = (x, y) хранится как два m-вектора, но вся линейная алгебра
работает с одним 2m-вектором (x сверху, y снизу), в том же порядке,
что и координаты градиента.
"""
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from src.utils.errors import DimensionError, InfeasibleError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, list, tuple]


def frozen_array(values: ArrayLike) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeasibleBox:
    """Бокс Γ_1×…×Γ_m с границами D_i > 0"""

    bounds: np.ndarray

    def __post_init__(self):
        bounds = frozen_array(self.bounds)
        if bounds.size == 0:
            raise DimensionError("box must have at least one resource")
        if not np.all(np.isfinite(bounds)) or np.any(bounds <= 0):
            raise InfeasibleError(f"every bound must be > 0, got {bounds.tolist()}", module="domain")
        object.__setattr__(self, "bounds", bounds)

    @property
    def m(self) -> int:
        return int(self.bounds.size)

    @property
    def upper(self) -> np.ndarray:
        """Верхние границы для 2m-вектора z"""
        return np.concatenate([self.bounds, self.bounds])

    def diameter(self) -> float:
        """Диаметр Δ² в пространстве z: sqrt(2·Σ D_i²)"""
        return math.sqrt(2.0) * diameter(self)

    def contains(self, z: "Decision", atol: float = 1e-12) -> bool:
        if z.m != self.m:
            return False
        v = z.as_vector()
        return bool(np.all(v >= -atol) and np.all(v <= self.upper + atol))

    def center(self) -> "Decision":
        return Decision(x=self.bounds / 2.0, y=self.bounds / 2.0)

    def zero(self) -> "Decision":
        return Decision(x=np.zeros(self.m), y=np.zeros(self.m))


@dataclass(frozen=True)
class Decision:
    """План резервирования (x, y): заранее и на спот-рынке"""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = frozen_array(self.x)
        y = frozen_array(self.y)
        if x.size != y.size:
            raise DimensionError(f"x has {x.size} entries, y has {y.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return int(self.x.size)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @classmethod
    def from_vector(cls, values: ArrayLike) -> "Decision":
        v = np.asarray(values, dtype=float).reshape(-1)
        if v.size % 2:
            raise DimensionError(f"stacked decision must have even length, got {v.size}")
        m = v.size // 2
        return cls(x=v[:m], y=v[m:])


@dataclass(frozen=True)
class GradVector:
    """Градиент по z: сначала ∂/∂x, затем ∂/∂y"""

    values: np.ndarray

    def __post_init__(self):
        values = frozen_array(self.values)
        if values.size % 2:
            raise DimensionError(f"gradient must have 2m entries, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DimensionError("gradient has non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return int(self.values.size // 2)

    @classmethod
    def zeros(cls, m: int) -> "GradVector":
        return cls(values=np.zeros(2 * m))


def project(point: ArrayLike, box: FeasibleBox) -> Decision:
    """Евклидова проекция 2m-вектора на Δ².

    Δ² - бокс со сторонами по осям, поэтому покоординатный clamp
    и есть точная проекция.
    """
    v = np.asarray(point, dtype=float).reshape(-1)
    if v.size != 2 * box.m:
        raise DimensionError(f"point has {v.size} entries, box expects {2 * box.m}")
    return Decision.from_vector(np.clip(v, 0.0, box.upper))


def diameter(box: FeasibleBox) -> float:
    """Величина D = sqrt(Σ D_i²); диаметр Δ² равен √2·D"""
    return float(math.sqrt(float(np.sum(box.bounds ** 2))))


def optimal_sigma(box: FeasibleBox) -> float:
    """σ = √2/D, минимизирующее верхнюю оценку регрета"""
    return math.sqrt(2.0) / diameter(box)
