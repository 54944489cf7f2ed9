"""
Тесты для предсказателей градиента
"""
from dataclasses import replace

import numpy as np
import pytest

from src.managers.learners import FtrlLearner, OolrLearner, Prediction
from src.managers.predictors import (
    ArmaOgdPredictor,
    SyntheticPredictor,
    SyntheticPredictorConfig,
    ZeroPredictor,
    arma_forecast_series,
    arma_init,
    arma_predict,
    arma_update,
    draw_sign,
    perturb,
    resolve_fixed_point,
    synthetic_error_rate,
    synthetic_predict,
    zero_predict,
)
from src.utils.domain import GradVector
from src.utils.errors import ConfigError, DimensionError
from src.utils.loss import loss_gradient
from tests.conftest import random_slot


def _arma(q, coeffs, history, filled, **kwargs):
    state = arma_init(1, q, **kwargs)
    coeffs = np.array([coeffs], dtype=float)
    history = np.array([history], dtype=float)
    return replace(state, coeffs=coeffs, history=history, filled=filled)


# ==================== ARMA-OGD ====================

def test_arma_predict_linear_combination():
    """Тест: q=2, γ=(0.5, 0.5), история (2, 4) → 3"""
    state = _arma(2, [0.5, 0.5], [2.0, 4.0], filled=2)
    assert arma_predict(state).grad_hat.values[0] == pytest.approx(3.0)


def test_arma_predict_cold_start_is_zero():
    """Тест: пустая история → 0"""
    state = arma_init(4, 5)
    np.testing.assert_array_equal(arma_predict(state).grad_hat.values, np.zeros(4))


def test_arma_predict_warm_up_passthrough():
    """Тест: одно наблюдение 7.5 при q=3 → 7.5"""
    state = arma_update(arma_init(2, 3), np.array([7.5, -1.0]))
    np.testing.assert_allclose(arma_predict(state).grad_hat.values, [7.5, -1.0])


def test_arma_update_one_ogd_step():
    """Тест: q=1, γ=0, история (1), v=1, η=0.5 → grad = −2, γ = 1"""
    state = _arma(1, [0.0], [1.0], filled=1, step_scale=0.5, normalize_step=False)
    new = arma_update(state, np.array([1.0]))
    assert new.coeffs[0, 0] == pytest.approx(1.0)
    assert new.t == 1


def test_arma_update_clamps_to_coefficient_box():
    """Тест: большой шаг не выводит γ за пределы [−coeff_bound, coeff_bound]"""
    state = _arma(1, [0.0], [1.0], filled=1, step_scale=10.0, coeff_bound=0.5, normalize_step=False)
    new = arma_update(state, np.array([1.0]))
    assert new.coeffs[0, 0] == pytest.approx(0.5)


def test_arma_update_exact_prediction_keeps_coefficients():
    """Тест: прогноз совпал с наблюдением → γ не меняется"""
    state = _arma(2, [0.5, 0.5], [2.0, 4.0], filled=2)
    new = arma_update(state, np.array([3.0]))
    np.testing.assert_allclose(new.coeffs, state.coeffs)
    np.testing.assert_allclose(new.history, [[3.0, 2.0]])


def test_arma_coefficients_stay_bounded_on_noise():
    rng = np.random.default_rng(1)
    state = arma_init(3, 4, step_scale=1.0, coeff_bound=0.8)
    for _ in range(300):
        state = arma_update(state, rng.normal(0.0, 5.0, 3))
        assert np.all(np.abs(state.coeffs) <= 0.8 + 1e-15)
        assert state.history.shape == (3, 4)


def test_arma_update_dimension_mismatch():
    with pytest.raises(DimensionError):
        arma_update(arma_init(2, 3), np.array([1.0, 2.0, 3.0]))


def test_arma_init_rejects_bad_parameters():
    with pytest.raises(ConfigError):
        arma_init(2, 0)
    with pytest.raises(ConfigError):
        arma_init(2, 3, step_scale=0.0)


@pytest.mark.slow
def test_arma_converges_on_ar2_signal():
    """Тест: AR(2) (0.6, 0.3), шум 0.1, T=2000 - средняя ошибка на хвосте ≤ 1.5·σ²"""
    # Arrange
    rng = np.random.default_rng(42)
    T = 2000
    v = np.zeros(T)
    for t in range(2, T):
        v[t] = 0.6 * v[t - 1] + 0.3 * v[t - 2] + 0.1 * rng.standard_normal()

    # Act
    rows = arma_forecast_series(v)

    # Assert
    tail = [r.squared_error for r in rows[-T // 10:]]
    assert np.mean(tail) <= 1.5 * 0.01


def test_forecast_series_predicts_before_observing():
    rows = arma_forecast_series([1.0, 2.0, 3.0], lag_order=2)
    assert [r.t for r in rows] == [1, 2, 3]
    assert rows[0].predicted == 0.0
    assert rows[1].predicted == pytest.approx(1.0)
    assert rows[0].running_mse == pytest.approx(1.0)


def test_arma_predictor_observes_true_gradients():
    predictor = ArmaOgdPredictor(m=1, lag_order=2)
    predictor.observe(GradVector(values=[0.5, -0.5]))
    pred = predictor.predict(learner=None)
    np.testing.assert_allclose(pred.grad_hat.values, [0.5, -0.5])
    assert not predictor.is_oracle


# ==================== Синтетический предсказатель ====================

def test_perturb_positive_sign():
    """Тест: ζ=0.3, g=[1, −2], s=+1 → [1.3, −2.6]"""
    np.testing.assert_allclose(perturb(np.array([1.0, -2.0]), 0.3, 1), [1.3, -2.6])


def test_perturb_large_error_flips_sign():
    """Тест: ζ=4, g=[1, 1], s=−1 → [−3, −3]"""
    np.testing.assert_allclose(perturb(np.array([1.0, 1.0]), 4.0, -1), [-3.0, -3.0])


def test_perturb_zero_zeta_is_identity():
    g = np.array([0.2, -0.7])
    np.testing.assert_array_equal(perturb(g, 0.0, -1), g)


def test_relative_error_rate_is_exact():
    """Тест: средняя |ĝ_i − g_i|/|g_i| по 10 000 розыгрышам равна ζ"""
    rng = np.random.default_rng(3)
    zeta = 0.3
    rates = []
    for _ in range(10_000):
        g = rng.normal(0.0, 1.0, 4)
        rates.append(synthetic_error_rate(g, perturb(g, zeta, draw_sign(rng))))
    assert np.mean(np.concatenate(rates)) == pytest.approx(zeta, rel=1e-9)


def test_synthetic_config_rejects_negative_zeta():
    with pytest.raises(ConfigError):
        SyntheticPredictorConfig(zeta=-0.1)


def test_zero_zeta_fixed_point_gives_exact_gradient(box2, loss_cfg):
    """Тест: ζ=0 → прогноз равен истинному градиенту в сыгранной точке"""
    # Arrange
    rng = np.random.default_rng(9)
    learner = OolrLearner(box2, 0.8, box2.zero())
    first = learner.decide(None)
    learner.update(GradVector(values=rng.normal(0.0, 1.0, 4)), None, first)
    predictor = SyntheticPredictor(SyntheticPredictorConfig(zeta=0.0, rng_seed=1), loss_cfg, box2)

    for _ in range(20):
        slot = random_slot(rng, 2)

        # Act
        pred = predictor.predict(learner, next_slot=slot)
        z = learner.decide(pred)
        g = loss_gradient(slot, z, loss_cfg)

        # Assert
        error = g.values - pred.grad_hat.values
        assert float(error @ error) <= 1e-16
        learner.update(g, pred, z)
    assert predictor.fallbacks == 0


def test_fixed_point_with_non_proximal_learner_converges_at_once(box1, loss_cfg, simple_slot):
    """Тест: FTRL не зависит от прогноза, итерация сходится за один шаг"""
    learner = FtrlLearner(box1, None, box1.zero())
    cfg = SyntheticPredictorConfig(zeta=0.3)
    outcome = resolve_fixed_point(cfg, simple_slot, learner.probe, loss_cfg, sign=1)
    assert outcome.converged
    assert outcome.iterations == 1
    g = loss_gradient(simple_slot, box1.zero(), loss_cfg).values
    np.testing.assert_allclose(outcome.prediction.grad_hat.values, 1.3 * g)


def test_synthetic_predictions_are_reproducible(box2, loss_cfg):
    """Тест: одинаковый rng_seed → одинаковая последовательность прогнозов"""
    rng = np.random.default_rng(4)
    slots = [random_slot(rng, 2) for _ in range(10)]
    sequences = []
    for _ in range(2):
        learner = OolrLearner(box2, 0.8, box2.zero())
        predictor = SyntheticPredictor(SyntheticPredictorConfig(zeta=0.3, rng_seed=5), loss_cfg, box2)
        preds = []
        for slot in slots:
            pred = predictor.predict(learner, next_slot=slot)
            z = learner.decide(pred)
            learner.update(loss_gradient(slot, z, loss_cfg), pred, z)
            preds.append(pred.grad_hat.values)
        sequences.append(np.array(preds))
    np.testing.assert_array_equal(sequences[0], sequences[1])


def test_synthetic_predict_function_uses_probe(box1, loss_cfg, simple_slot):
    learner = FtrlLearner(box1, None, box1.zero())
    pred = synthetic_predict(SyntheticPredictorConfig(zeta=0.0), simple_slot, learner.probe, loss_cfg)
    np.testing.assert_allclose(pred.grad_hat.values, loss_gradient(simple_slot, box1.zero(), loss_cfg).values)


def test_synthetic_predictor_requires_next_slot(box1, loss_cfg):
    predictor = SyntheticPredictor(SyntheticPredictorConfig(zeta=0.0), loss_cfg, box1)
    assert predictor.is_oracle
    with pytest.raises(ConfigError):
        predictor.predict(OolrLearner(box1, 1.0, box1.zero()), next_slot=None)


# ==================== Нулевой предсказатель ====================

def test_zero_predict_shape():
    """Тест: m=3 → вектор из 6 нулей"""
    pred = zero_predict(3)
    assert isinstance(pred, Prediction)
    np.testing.assert_array_equal(pred.grad_hat.values, np.zeros(6))


def test_zero_predictor_is_stateless():
    predictor = ZeroPredictor(2)
    first = predictor.predict(learner=None).grad_hat.values
    predictor.observe(GradVector(values=[1.0, 2.0, 3.0, 4.0]))
    np.testing.assert_array_equal(predictor.predict(learner=None).grad_hat.values, first)
