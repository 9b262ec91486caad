"""Sample mean, sample autocovariance and autocorrelation of a real series.

All estimators use the divisor ``N`` (not ``N - k``) and correct for the
sample mean, so the autocovariance sequence is nonnegative definite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .errors import ConstantSeries, InvalidSeries, LagOutOfRange


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real observations ``X_1 .. X_N`` with ``N >= 2``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 2:
            raise InvalidSeries(f"need at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSeries("series contains NaN or infinite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class AcfEstimate:
    """Autocovariances ``gamma[0..L]`` and autocorrelations ``rho[0..L]``.

    ``n_source`` is the length of the series the estimate came from; it
    fixes the threshold used by the bandwidth rule.
    """

    gamma: np.ndarray
    rho: np.ndarray
    n_source: int

    @property
    def max_lag(self) -> int:
        return int(self.gamma.size - 1)

    @classmethod
    def from_gamma(cls, gamma, n_source: int) -> "AcfEstimate":
        gamma = np.asarray(gamma, dtype=float)
        if gamma.size == 0 or not gamma[0] > 0:
            raise ConstantSeries("lag-0 autocovariance must be positive")
        rho = gamma / gamma[0]
        rho[0] = 1.0
        gamma.setflags(write=False)
        rho.setflags(write=False)
        return cls(gamma=gamma, rho=rho, n_source=int(n_source))


def as_series(series) -> TimeSeries:
    if isinstance(series, TimeSeries):
        return series
    return TimeSeries(series)


def sample_mean(series) -> float:
    return float(np.mean(as_series(series).values))


def _check_lag(n: int, max_lag) -> int:
    if max_lag is None:
        return n - 1
    max_lag = int(max_lag)
    if not 0 <= max_lag <= n - 1:
        raise LagOutOfRange(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    return max_lag


def _centered(ts: TimeSeries) -> np.ndarray:
    # checked on the raw values: the mean of a constant series can carry rounding residue
    if np.ptp(ts.values) == 0:
        raise ConstantSeries("series is constant; autocorrelation undefined")
    return ts.values - ts.values.mean()


def sample_autocovariance(series, max_lag: int | None = None) -> AcfEstimate:
    """Autocovariance by direct summation of the definition.

    ``gamma[k] = (1/N) * sum_{i<N-k} (x_i - xbar)(x_{i+k} - xbar)``.
    Costs ``O(N * max_lag)``; see :func:`sample_autocovariance_fast`.
    """
    ts = as_series(series)
    L = _check_lag(ts.n, max_lag)
    x = _centered(ts)
    n = ts.n
    gamma = np.array([np.dot(x[: n - k], x[k:]) / n for k in range(L + 1)])
    return AcfEstimate.from_gamma(gamma, n)


def sample_autocovariance_fast(series, max_lag: int | None = None) -> AcfEstimate:
    """Same estimator as :func:`sample_autocovariance`, via a zero-padded FFT."""
    ts = as_series(series)
    L = _check_lag(ts.n, max_lag)
    x = _centered(ts)
    n = ts.n
    nfft = sp_fft.next_fast_len(2 * n, real=True)
    spec = sp_fft.rfft(x, nfft)
    acov = sp_fft.irfft(spec.real**2 + spec.imag**2, nfft)[: L + 1] / n
    return AcfEstimate.from_gamma(acov, n)
