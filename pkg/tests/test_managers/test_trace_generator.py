"""
Тесты для генератора трасс
"""
import numpy as np
import pytest

from src.managers.trace_generator import (
    DemandModel,
    OuPriceModel,
    SlaModel,
    ThetaModel,
    TraceConfig,
    generate,
    ingest_demand_csv,
    ou_series,
)
from src.utils.errors import ConfigError, TraceSourceError


def test_noiseless_config_gives_constant_trace():
    """Тест: σ=0, A=0, без шума θ и v_0 = μ → p_t = μ, θ_t = o"""
    cfg = TraceConfig(
        horizon=50,
        m=2,
        price_adv=OuPriceModel(kappa=0.3, mean=0.5, std=0.0, initial=0.5),
        price_spot=OuPriceModel(kappa=0.3, mean=0.9, std=0.0, initial=0.9),
        theta=ThetaModel(offset=0.7, amplitude=0.0, noise_std=0.0),
    )
    slots = generate(cfg)
    assert len(slots) == 50
    for slot in slots:
        np.testing.assert_allclose(slot.price_adv, [0.5, 0.5])
        np.testing.assert_allclose(slot.price_spot, [0.9, 0.9])
        np.testing.assert_allclose(slot.theta, [0.7, 0.7])


def test_same_seed_same_trace():
    """Тест: одинаковый seed → одинаковые трассы"""
    cfg = TraceConfig(horizon=30, m=3, rng_seed=17, sla=SlaModel(alpha_min=0.6, beta_min=0.9))
    first, second = generate(cfg), generate(cfg)
    for a, b in zip(first, second):
        assert a.demand == b.demand
        np.testing.assert_array_equal(a.price_adv, b.price_adv)
        np.testing.assert_array_equal(a.theta, b.theta)
        np.testing.assert_array_equal(a.alpha, b.alpha)


def test_sla_does_not_change_prices_or_demand():
    """Тест: включение SLA не меняет остальные компоненты трассы"""
    plain = generate(TraceConfig(horizon=40, m=2, rng_seed=5))
    with_sla = generate(TraceConfig(horizon=40, m=2, rng_seed=5, sla=SlaModel(alpha_min=0.5)))
    for a, b in zip(plain, with_sla):
        assert a.demand == b.demand
        np.testing.assert_array_equal(a.price_spot, b.price_spot)
        assert b.has_sla and not a.has_sla


def test_alpha_draws_lie_in_range_with_uniform_mean():
    """Тест: α_min=0.8 → α ∈ [0.8, 1], среднее по T=10 000 в 0.9 ± 0.01"""
    slots = generate(TraceConfig(horizon=10_000, m=1, rng_seed=2, sla=SlaModel(alpha_min=0.8, beta_min=1.0)))
    alpha = np.array([s.alpha[0] for s in slots])
    beta = np.array([s.beta[0] for s in slots])
    assert alpha.min() >= 0.8
    assert alpha.max() <= 1.0
    assert abs(alpha.mean() - 0.9) <= 0.01
    np.testing.assert_array_equal(beta, np.ones_like(beta))


def test_generated_values_are_nonnegative():
    """Тест: сильный шум не даёт отрицательных цен, θ и спроса"""
    cfg = TraceConfig(
        horizon=500,
        m=2,
        rng_seed=9,
        price_adv=OuPriceModel(kappa=0.5, mean=0.1, std=0.5),
        theta=ThetaModel(offset=0.1, amplitude=0.5, noise_std=0.3),
        demand=DemandModel(noise_std=1.0),
    )
    for slot in generate(cfg):
        assert slot.demand >= 0
        assert np.all(slot.price_adv >= 0)
        assert np.all(slot.price_spot >= 0)
        assert np.all(slot.theta >= 0)


def test_synthetic_demand_is_max_normalized():
    slots = generate(TraceConfig(horizon=1008, m=1, rng_seed=0))
    demand = np.array([s.demand for s in slots])
    assert demand.max() == pytest.approx(1.0)
    assert demand.min() >= 0.0


@pytest.mark.slow
def test_ou_price_mean_reverts():
    """Тест: κ=0.5, μ=1, σ=0.05 - выборочное среднее по T=50 000 в 1 ± 0.02"""
    rng = np.random.default_rng(0)
    values = ou_series(OuPriceModel(kappa=0.5, mean=1.0, std=0.05), 50_000, 1, rng)
    assert abs(values.mean() - 1.0) <= 0.02


def test_invalid_models_raise_config_error():
    with pytest.raises(ConfigError):
        OuPriceModel(kappa=0.0)
    with pytest.raises(ConfigError):
        SlaModel(alpha_min=0.0)
    with pytest.raises(ConfigError):
        TraceConfig(horizon=0, m=1)
    with pytest.raises(ConfigError):
        DemandModel(kind="csv")


# ==================== ingest_demand_csv ====================

def test_ingest_normalizes_by_max(tmp_path):
    """Тест: [2, 4, 8] с нормировкой → [0.25, 0.5, 1.0]"""
    path = tmp_path / "demand.csv"
    path.write_text("slot,volume\n1,2\n2,4\n3,8\n", encoding="utf-8")
    assert ingest_demand_csv(path, "volume", normalize=True) == [0.25, 0.5, 1.0]


def test_ingest_passthrough(tmp_path):
    """Тест: [5] без нормировки → [5]"""
    path = tmp_path / "demand.csv"
    path.write_text("volume\n5\n", encoding="utf-8")
    assert ingest_demand_csv(path, "volume", normalize=False) == [5.0]


def test_ingest_reports_line_number(tmp_path):
    """Тест: нечисловая ячейка в строке 3 → ошибка с номером строки"""
    path = tmp_path / "demand.csv"
    path.write_text("volume\n1\nabc\n", encoding="utf-8")
    with pytest.raises(TraceSourceError, match="line 3"):
        ingest_demand_csv(path, "volume")


def test_ingest_missing_file(tmp_path):
    with pytest.raises(TraceSourceError, match="not found"):
        ingest_demand_csv(tmp_path / "nope.csv", "volume")


def test_ingest_empty_column(tmp_path):
    path = tmp_path / "demand.csv"
    path.write_text("volume\n", encoding="utf-8")
    with pytest.raises(TraceSourceError, match="empty"):
        ingest_demand_csv(path, "volume")


def test_csv_demand_shorter_than_horizon(tmp_path):
    """Тест: CSV короче горизонта → ошибка trace-source"""
    path = tmp_path / "demand.csv"
    path.write_text("volume\n1\n2\n", encoding="utf-8")
    cfg = TraceConfig(horizon=5, m=1, demand=DemandModel(kind="csv", path=str(path), column="volume"))
    with pytest.raises(TraceSourceError) as excinfo:
        generate(cfg)
    assert excinfo.value.code == "trace-source"


def test_csv_demand_feeds_trace(tmp_path):
    path = tmp_path / "demand.csv"
    path.write_text("volume\n1\n2\n4\n", encoding="utf-8")
    cfg = TraceConfig(horizon=3, m=1, demand=DemandModel(kind="csv", path=str(path), column="volume"))
    assert [s.demand for s in generate(cfg)] == [0.25, 0.5, 1.0]
