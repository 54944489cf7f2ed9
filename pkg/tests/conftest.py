"""Общие фикстуры: боксы, слоты и короткие сгенерированные трассы"""
import numpy as np
import pytest

from src.managers.trace_generator import TraceConfig, ThetaModel, generate
from src.utils.domain import FeasibleBox
from src.utils.loss import LossConfig, TraceSlot


@pytest.fixture
def box1():
    """Фикстура для бокса с одним ресурсом, D_1 = 1"""
    return FeasibleBox(bounds=[1.0])


@pytest.fixture
def box2():
    """Фикстура для бокса с двумя ресурсами"""
    return FeasibleBox(bounds=[1.0, 1.0])


@pytest.fixture
def box3():
    """Фикстура для бокса из сценария с тремя ресурсами"""
    return FeasibleBox(bounds=[1.0, 1.0, 1.0])


@pytest.fixture
def loss_cfg():
    return LossConfig(V=2.0)


@pytest.fixture
def simple_slot():
    """Слот m=1: a=1, θ=[1], p=[0.5], q=[1]"""
    return TraceSlot(demand=1.0, price_adv=[0.5], price_spot=[1.0], theta=[1.0])


def make_trace(horizon: int, m: int, seed: int):
    cfg = TraceConfig(
        horizon=horizon,
        m=m,
        rng_seed=seed,
        theta=ThetaModel(phase=list(np.linspace(0.0, 4.0, m))),
    )
    return generate(cfg)


@pytest.fixture
def short_trace():
    """Фикстура для сгенерированной трассы T=60, m=2"""
    return make_trace(60, 2, seed=3)


def random_slot(rng: np.random.Generator, m: int, with_sla: bool = False) -> TraceSlot:
    return TraceSlot(
        demand=float(rng.uniform(0.0, 1.0)),
        price_adv=rng.uniform(0.0, 1.5, m),
        price_spot=rng.uniform(0.0, 1.5, m),
        theta=rng.uniform(0.1, 1.0, m),
        alpha=rng.uniform(0.5, 1.0, m) if with_sla else None,
        beta=rng.uniform(0.5, 1.0, m) if with_sla else None,
    )
