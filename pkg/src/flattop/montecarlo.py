"""Monte Carlo sweeps of the bandwidth rule over sample sizes, with rate fits.

Each replicate is keyed by ``(N, index)`` and seeded with
``seed_base + index``; aggregation sorts by key, so results do not depend
on execution order or on the number of worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bandwidth import RuleConfig, m_to_M, pick_m_hat
from .errors import DegenerateFit, ExperimentQualityError, FlatTopError, InvalidConfig
from .synthetic import L_MAX_DEFAULT, AcfModel, ValidAcf, check_conditions, make_psd, simulate_gaussian
from .timeseries import AcfEstimate, sample_autocovariance_fast

LAWS = ("polynomial_rate", "exponential_rate")
CAPPED_LIMIT = 0.10
SUCCESS_MIN = 0.80


@dataclass(frozen=True)
class ExperimentConfig:
    model: AcfModel
    n_values: tuple
    replicates: int
    seed_base: int = 0
    rule: RuleConfig = RuleConfig()
    law: str = "exponential_rate"
    L_max: int | None = None
    workers: int = 1

    def __post_init__(self):
        n_values = tuple(int(n) for n in self.n_values)
        object.__setattr__(self, "n_values", n_values)
        if not n_values:
            raise InvalidConfig("n_values is empty")
        if any(b <= a for a, b in zip(n_values, n_values[1:])):
            raise InvalidConfig("n_values must be strictly increasing")
        if n_values[0] < 64:
            raise InvalidConfig(f"every N must be >= 64, got {n_values[0]}")
        if int(self.replicates) != self.replicates or self.replicates < 10:
            raise InvalidConfig(f"replicates must be an integer >= 10, got {self.replicates}")
        if self.law not in LAWS:
            raise InvalidConfig(f"law must be one of {LAWS}, got {self.law!r}")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")


@dataclass(frozen=True)
class Replicate:
    n: int
    index: int
    seed: int
    m_hat: int | None
    M_hat: int | None
    capped: bool
    error: str | None = None


@dataclass(frozen=True)
class CellSummary:
    n: int
    median_m_hat: int
    median_M_hat: int
    m_hat_det: int
    M_hat_det: int
    capped_fraction: float
    failed: int


@dataclass(frozen=True)
class ScalingFit:
    law: str
    slope: float
    intercept: float
    residuals: tuple
    r_squared: float
    # A1 = exp(intercept) for the polynomial law, A2 = slope for the exponential law
    constant: float
    exponent_ref: float | None = None
    A2_ref: float | None = None


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    replicates: tuple
    cells: tuple
    fit: ScalingFit | None
    diagnostics: dict = field(default_factory=dict)


def lower_median(values) -> int:
    """Median that is always one of the values (the lower middle for even counts)."""
    v = np.sort(np.asarray(values))
    return int(v[(v.size - 1) // 2])


def deterministic_oracle_m(acf: ValidAcf, n: int, rule: RuleConfig = RuleConfig()) -> int:
    """The rule's output on the true autocorrelations at the threshold for sample size ``n``."""
    gamma = np.asarray(acf.gamma, dtype=float)
    # true rho with the series-length lag budget: lags beyond L_max are zero
    L = min(max(gamma.size - 1, rule.k_n + 1), n - 1)
    padded = np.zeros(L + 1)
    padded[: min(gamma.size, L + 1)] = gamma[: L + 1]
    return pick_m_hat(AcfEstimate.from_gamma(padded, n), rule).m_hat


def run_replicate(acf: ValidAcf, n: int, seed: int, rule: RuleConfig = RuleConfig()) -> dict:
    """Simulate one series, estimate its correlogram and apply the rule."""
    series = simulate_gaussian(acf, n, seed)
    sel = pick_m_hat(sample_autocovariance_fast(series), rule)
    return {"m_hat": sel.m_hat, "M_hat": sel.M_hat, "capped": sel.capped}


def _task(args):
    acf, n, index, seed, rule = args
    try:
        out = run_replicate(acf, n, seed, rule)
        return Replicate(n, index, seed, out["m_hat"], out["M_hat"], out["capped"])
    except FlatTopError as exc:
        return Replicate(n, index, seed, None, None, False, f"{type(exc).__name__}: {exc}")


def fit_scaling(n_values, medians, law: str) -> ScalingFit:
    """Least-squares rate fit of per-N median ``M_hat``.

    ``polynomial_rate``: ``ln M`` on ``ln(N / ln N)``; the slope estimates
    ``1/(2d)`` and ``exp(intercept)`` the constant ``A1``.
    ``exponential_rate``: ``M`` on ``ln N``; the slope estimates ``A2``.
    """
    n = np.asarray(n_values, dtype=float)
    m = np.asarray(medians, dtype=float)
    if n.size < 3:
        raise DegenerateFit(f"need at least 3 sample sizes, got {n.size}")
    if law == "polynomial_rate":
        x, y = np.log(n / np.log(n)), np.log(m)
    elif law == "exponential_rate":
        x, y = np.log(n), m
    else:
        raise InvalidConfig(f"unknown law {law!r}")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 0:
        raise DegenerateFit("regressor has zero variance")
    slope = float(xc @ (y - y.mean()) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    syy = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / syy if syy > 0 else 1.0
    const = math.exp(intercept) if law == "polynomial_rate" else slope
    return ScalingFit(law, slope, intercept, tuple(float(r) for r in resid), r2, const)


def build_acf(config: ExperimentConfig) -> ValidAcf:
    """Realize the model with ``L_max = max(1024, 8 * m_det)`` at the largest N unless given."""
    if config.L_max is not None:
        return make_psd(config.model, config.L_max)
    acf = make_psd(config.model, L_MAX_DEFAULT)
    m_det = deterministic_oracle_m(acf, config.n_values[-1], config.rule)
    if 8 * m_det > L_MAX_DEFAULT:
        acf = make_psd(config.model, 8 * m_det)
    return acf


def run_experiment(config: ExperimentConfig, acf: ValidAcf | None = None) -> ExperimentResult:
    rule = config.rule
    check_conditions(config.model, rule.k_n)
    if acf is None:
        acf = build_acf(config)

    tasks = [
        (acf, n, i, config.seed_base + i, rule)
        for n in config.n_values
        for i in range(config.replicates)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reps = list(pool.map(_task, tasks, chunksize=8))
    else:
        reps = [_task(t) for t in tasks]
    reps.sort(key=lambda r: (r.n, r.index))

    cells, problems = [], []
    for n in config.n_values:
        rows = [r for r in reps if r.n == n]
        ok = [r for r in rows if r.error is None]
        failed = len(rows) - len(ok)
        if len(ok) < SUCCESS_MIN * len(rows):
            raise ExperimentQualityError(f"N={n}: only {len(ok)}/{len(rows)} replicates succeeded")
        capped = [r for r in ok if r.capped]
        frac = len(capped) / len(rows)
        if frac > CAPPED_LIMIT:
            problems.append(f"N={n}: capped fraction {frac:.2f} exceeds {CAPPED_LIMIT:.2f}")
        kept = [r for r in ok if not r.capped] or ok
        m_det = deterministic_oracle_m(acf, n, rule)
        cells.append(
            CellSummary(
                n=n,
                median_m_hat=lower_median([r.m_hat for r in kept]),
                median_M_hat=lower_median([r.M_hat for r in kept]),
                m_hat_det=m_det,
                M_hat_det=m_to_M(m_det, rule.c_break),
                capped_fraction=frac,
                failed=failed,
            )
        )

    fit = None
    if len(config.n_values) >= 3:
        fit = fit_scaling([c.n for c in cells], [c.median_M_hat for c in cells], config.law)
        if config.law == "polynomial_rate" and config.model.decay_exponent:
            fit = _with_refs(fit, exponent_ref=1.0 / (2 * config.model.decay_exponent))
        base = config.model.decay_base
        if config.law == "exponential_rate" and base:
            fit = _with_refs(fit, A2_ref=-1.0 / math.log(base))

    diagnostics = {
        "L_max": acf.L_max,
        "gamma0_inflation": acf.inflation,
        "spectral_floor": acf.spectral_floor,
        "quality_problems": problems,
    }
    result = ExperimentResult(config, tuple(reps), tuple(cells), fit, diagnostics)
    if problems:
        raise ExperimentQualityError("; ".join(problems), result=result)
    return result


def _with_refs(fit: ScalingFit, **refs) -> ScalingFit:
    return replace(fit, **refs)


def sandwich_bounds(m_det: int, k_n: int) -> tuple[int, int]:
    """Finite-sample bracket ``[m_det - k_n - slack, m_det + slack]`` for the median ``m_hat``."""
    slack = max(2, math.ceil(0.25 * m_det))
    return m_det - k_n - slack, m_det + slack

