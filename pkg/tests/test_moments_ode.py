import math

import numpy as np
import pytest

from gravswap import (
    DimensionlessParams,
    IntegratorConfig,
    ModelKind,
    PairMoments,
    ModeMoments,
    ToleranceError,
    coherent_pair_moments,
    integrate_moments,
    propagate_moments,
    swap_time,
    to_normal_modes,
)

P = DimensionlessParams(0.05)
A0, B0 = to_normal_modes(1 + 0j, 0j)
PAIR0 = coherent_pair_moments(A0, B0)


def _closed_means(model, times, init, params):
    return np.array(
        [
            (r.plus.mean_x, r.plus.mean_p, r.minus.mean_x, r.minus.mean_p)
            for r in (propagate_moments(model, init, float(t), params) for t in times)
        ]
    )


def test_free_oscillator_closure():
    params = DimensionlessParams(0.0)
    init = coherent_pair_moments(0.8 + 0.3j, -0.5j)
    series = integrate_moments(ModelKind.QG_RWA, init, 2 * math.pi, params, n_samples=5)
    final = series.records[-1]
    for got, want in ((final.plus, init.plus), (final.minus, init.minus)):
        assert got.mean_x == pytest.approx(want.mean_x, abs=1e-10)
        assert got.mean_p == pytest.approx(want.mean_p, abs=1e-10)
        assert got.v_xx == pytest.approx(want.v_xx, abs=1e-10)


@pytest.mark.parametrize("model", list(ModelKind))
def test_rk4_matches_closed_forms_over_swap(model):
    T = swap_time(P)
    series = integrate_moments(model, PAIR0, T, P, n_samples=60)
    ref = _closed_means(model, series.times, PAIR0, P)
    assert np.max(np.abs(series.mean_table() - ref)) < 1e-8


def test_sceg_widths_constant():
    T = swap_time(P)
    series = integrate_moments(ModelKind.SCEG, PAIR0, T, P, n_samples=60)
    assert np.max(np.abs(series.width_table() - 0.5)) < 1e-10


def test_full_widths_match_closed_form():
    T = swap_time(P)
    series = integrate_moments(ModelKind.QG_FULL, PAIR0, T, P, n_samples=60)
    ref = np.array(
        [
            (r.plus.v_xx, r.minus.v_xx)
            for r in (propagate_moments(ModelKind.QG_FULL, PAIR0, float(t), P) for t in series.times)
        ]
    )
    assert np.max(np.abs(series.width_table() - ref)) < 1e-10


def test_squeezed_initial_record():
    # non-coherent covariance exercises the full moment system
    mode = ModeMoments(0.5, -0.3, 0.4, 0.8, 0.1)
    init = PairMoments(mode, mode)
    series = integrate_moments(ModelKind.QG_FULL, init, 5.0, P, n_samples=11)
    final = series.records[-1]
    ref = propagate_moments(ModelKind.QG_FULL, init, float(series.times[-1]), P)
    assert final.plus.v_xx == pytest.approx(ref.plus.v_xx, abs=1e-10)
    assert final.plus.v_xp == pytest.approx(ref.plus.v_xp, abs=1e-10)
    assert final.minus.v_pp == pytest.approx(ref.minus.v_pp, abs=1e-10)


def test_rk4_convergence_order():
    t_final = 4 * math.pi

    def err(factor):
        cfg = IntegratorConfig(rk_step_factor=factor, rk_tol=1.0)
        series = integrate_moments(ModelKind.QG_FULL, PAIR0, t_final, P, cfg, n_samples=9)
        ref = _closed_means(ModelKind.QG_FULL, series.times, PAIR0, P)
        return np.max(np.abs(series.mean_table() - ref))

    e1, e2 = err(2e-2), err(1e-2)
    order = math.log2(e1 / e2)
    assert order == pytest.approx(4.0, abs=0.3)


def test_tolerance_failure_raises():
    cfg = IntegratorConfig(rk_step_factor=5e-2, rk_tol=1e-14)
    with pytest.raises(ToleranceError):
        integrate_moments(ModelKind.QG_FULL, PAIR0, 50.0, P, cfg)


def test_oracle_agreement_random_sweep():
    # closed forms vs the integrator across models, couplings, and random
    # coherent inputs, over a full swap each
    rng = np.random.default_rng(31)
    for model in ModelKind:
        for delta in (0.01, 0.05, 0.1):
            params = DimensionlessParams(delta)
            T = swap_time(params)
            for _ in range(2):
                init = coherent_pair_moments(
                    complex(*rng.uniform(-2, 2, 2)), complex(*rng.uniform(-2, 2, 2))
                )
                series = integrate_moments(model, init, T, params, n_samples=15)
                ref = _closed_means(model, series.times, init, params)
                assert np.max(np.abs(series.mean_table() - ref)) < 1e-8


def test_zero_span():
    series = integrate_moments(ModelKind.SCEG, PAIR0, 0.0, P)
    assert len(series.records) == 1
    assert series.times[0] == 0.0


def test_sample_times_include_endpoints():
    series = integrate_moments(ModelKind.QG_RWA, PAIR0, 3.0, P, n_samples=7)
    assert series.times[0] == 0.0
    assert series.times[-1] == pytest.approx(3.0, rel=1e-12)
