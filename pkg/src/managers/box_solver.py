"""Проекционный градиентный спуск на боксе с backtracking по Армихо"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

ARMIJO_CONSTANT = 1e-4
INITIAL_STEP = 1.0
MIN_STEP = 1e-20
FLOAT_NOISE = 1e-12


@dataclass(frozen=True)
class SolverResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    pg_norm: float


def projected_gradient_norm(x: np.ndarray, g: np.ndarray, upper: np.ndarray) -> float:
    return float(np.linalg.norm(x - np.clip(x - g, 0.0, upper)))


def minimize_over_box(
    value_fn: Callable[[np.ndarray], float],
    grad_fn: Callable[[np.ndarray], np.ndarray],
    upper: np.ndarray,
    x0: np.ndarray,
    tol: float = 1e-9,
    max_iters: int = 10_000,
) -> SolverResult:
    """Минимизирует гладкую выпуклую функцию на [0, upper].

    Шаг: x⁺ = Π(x − s·∇F(x)); s делится пополам, пока не выполнено
    условие достаточного убывания F(x⁺) ≤ F(x) + c·∇F(x)ᵀ(x⁺ − x).
    Остановка по норме проекционного градиента ||x − Π(x − ∇F(x))|| < tol.
    """
    upper = np.asarray(upper, dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), 0.0, upper)
    fx = value_fn(x)
    g = grad_fn(x)
    step = INITIAL_STEP
    iterations = 0

    for iteration in range(1, max_iters + 1):
        pg_norm = projected_gradient_norm(x, g, upper)
        if pg_norm < tol:
            return SolverResult(x=x, value=fx, iterations=iterations, converged=True, pg_norm=pg_norm)

        # пробуем удвоенный шаг прошлой итерации, затем делим пополам
        step = min(step * 2.0, INITIAL_STEP)
        g_new = None
        while step >= MIN_STEP:
            x_new = np.clip(x - step * g, 0.0, upper)
            f_new = value_fn(x_new)
            slope = float(g @ (x_new - x))
            if f_new <= fx + ARMIJO_CONSTANT * slope:
                break
            if abs(f_new - fx) <= FLOAT_NOISE * (1.0 + abs(fx)):
                # разность значений тонет в округлении: убывание оцениваем
                # по трапеции через градиенты
                g_new = grad_fn(x_new)
                if 0.5 * float((g + g_new) @ (x_new - x)) <= ARMIJO_CONSTANT * slope:
                    break
                g_new = None
            step *= 0.5

        if step < MIN_STEP or np.array_equal(x_new, x):
            break
        x, fx = x_new, f_new
        g = g_new if g_new is not None else grad_fn(x)
        iterations = iteration

    pg_norm = projected_gradient_norm(x, g, upper)
    converged = pg_norm < tol
    if not converged:
        logger.debug(f"PGD не сошёлся: pg_norm={pg_norm:.3e}, tol={tol:.1e}, iterations={iterations}")
    return SolverResult(x=x, value=fx, iterations=iterations, converged=converged, pg_norm=pg_norm)
