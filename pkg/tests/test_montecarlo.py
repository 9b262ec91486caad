import math

import numpy as np
import pytest

from flattop import (
    AcfModel,
    DegenerateFit,
    ExperimentConfig,
    InsufficientLags,
    InvalidConfig,
    RuleConfig,
    ar2_from_pole,
    deterministic_oracle_m,
    fit_scaling,
    make_psd,
    run_experiment,
    run_replicate,
)
from flattop.errors import ExperimentQualityError
from flattop.montecarlo import lower_median, sandwich_bounds
from oracles import brute_rule

AR2 = AcfModel.arma(ar=ar2_from_pole(0.9, math.pi / 4))


def test_oracle_ma1():
    acf = make_psd(AcfModel.cutoff([1.0]), 64)
    for n in (100, 1000, 10_000, 10**6):
        assert deterministic_oracle_m(acf, n, RuleConfig()) == 1


def test_oracle_ar1_phi09():
    acf = make_psd(AcfModel.arma([0.9]), 1024)
    thr = 2 * math.sqrt(math.log(1e4) / 1e4)
    assert 0.9**27 < thr <= 0.9**26
    assert brute_rule([0.9**k for k in range(200)], 10_000, 2.0, 5) == 26
    assert deterministic_oracle_m(acf, 10_000, RuleConfig()) == 26


def test_oracle_white_noise():
    assert deterministic_oracle_m(make_psd(AcfModel.cutoff(()), 16), 5000) == 1


def test_run_replicate_white_noise():
    white = make_psd(AcfModel.cutoff(()), 16)
    out = [run_replicate(white, 2048, s) for s in range(100)]
    assert lower_median([o["m_hat"] for o in out]) == 1
    assert run_replicate(white, 2048, 5) == run_replicate(white, 2048, 5)
    with pytest.raises(InsufficientLags):
        run_replicate(white, 6, 0, RuleConfig(k_n=5))


def test_lower_median_is_a_member():
    assert lower_median([4, 1, 3, 2]) == 2
    assert lower_median([5, 5, 7]) == 5


def test_config_invariants():
    with pytest.raises(InvalidConfig):
        ExperimentConfig(AR2, (256, 512, 1024), replicates=0)
    with pytest.raises(InvalidConfig):
        ExperimentConfig(AR2, (256, 512, 1024), replicates=9)
    with pytest.raises(InvalidConfig):
        ExperimentConfig(AR2, (512, 256, 1024), replicates=10)
    with pytest.raises(InvalidConfig):
        ExperimentConfig(AR2, (32, 256, 1024), replicates=10)
    with pytest.raises(InvalidConfig):
        ExperimentConfig(AR2, (256, 512, 1024), replicates=10, law="linear")


def test_fit_exact_polynomial_law():
    n = np.array([2.0**10, 2.0**12, 2.0**14, 2.0**16])
    M = 3 * (n / np.log(n)) ** 0.25
    fit = fit_scaling(n, M, "polynomial_rate")
    assert fit.slope == pytest.approx(0.25, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-12)
    assert fit.constant == pytest.approx(3, rel=1e-12)
    assert max(abs(r) for r in fit.residuals) < 1e-12


def test_fit_exact_exponential_law():
    n = np.array([2.0**12, 2.0**14, 2.0**16])
    fit = fit_scaling(n, 9.49 * np.log(n), "exponential_rate")
    assert fit.constant == pytest.approx(9.49, abs=1e-9)
    assert fit.intercept == pytest.approx(0.0, abs=1e-9)


def test_fit_degenerate():
    with pytest.raises(DegenerateFit):
        fit_scaling([100, 200], [3, 4], "exponential_rate")
    with pytest.raises(DegenerateFit):
        fit_scaling([100, 100, 100], [3, 4, 5], "exponential_rate")


def small_config(**kw):
    base = dict(model=AR2, n_values=(512, 2048, 8192), replicates=12, seed_base=3, law="exponential_rate")
    base.update(kw)
    return ExperimentConfig(**base)


def test_experiment_reproducible_and_order_independent():
    a = run_experiment(small_config())
    b = run_experiment(small_config())
    assert a == b
    par = run_experiment(small_config(workers=2))
    assert par.replicates == a.replicates and par.cells == a.cells and par.fit == a.fit
    assert a.fit.A2_ref == pytest.approx(-1 / math.log(0.9))
    assert [r.seed for r in a.replicates[:12]] == list(range(3, 15))


def test_experiment_cells_use_recorded_values():
    res = run_experiment(small_config())
    for cell in res.cells:
        values = [r.M_hat for r in res.replicates if r.n == cell.n]
        assert cell.median_M_hat in values
        assert cell.M_hat_det == 2 * cell.m_hat_det


def test_capped_fraction_gate():
    cfg = small_config(rule=RuleConfig(max_m=2))
    with pytest.raises(ExperimentQualityError) as info:
        run_experiment(cfg)
    assert info.value.result is not None
    assert all(c.capped_fraction > 0.1 for c in info.value.result.cells)


def test_condition_warning_emitted():
    cfg = small_config(model=AcfModel.polynomial([(1.0, 2, math.pi / 8, 0.0)]), law="polynomial_rate")
    with pytest.warns(UserWarning, match="below pi/k_n"):
        run_experiment(cfg)


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore:frequency a=")
def test_sandwich_and_trend_over_meta_seeds():
    models = [
        (AR2, "exponential_rate"),
        (AcfModel.polynomial([(1.0, 2, math.pi / 8, 0.0)]), "polynomial_rate"),
    ]
    for model, law in models:
        inside = trend_ok = 0
        for meta in range(10):
            cfg = ExperimentConfig(model, (1024, 4096, 16384), 30, seed_base=1000 * meta, law=law)
            res = run_experiment(cfg)
            cells_ok = True
            for c in res.cells:
                lo, hi = sandwich_bounds(c.m_hat_det, 5)
                cells_ok &= lo <= c.median_m_hat <= hi
            inside += cells_ok
            meds = [c.median_M_hat for c in res.cells]
            # one inversion between adjacent N is tolerated as noise
            trend_ok += sum(b < a for a, b in zip(meds, meds[1:])) <= 1
        assert inside >= 9
        assert trend_ok == 10
