"""Periodogram and flat-top lag-window spectral density estimates."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bandwidth import BandwidthSelection, RuleConfig, pick_m_hat
from .errors import InsufficientLags, InvalidConfig
from .kernel import FlatTopConfig, kernel_function, lag_weights
from .timeseries import AcfEstimate, _centered, as_series, sample_autocovariance_fast

CONV_GRID_MIN = 8192


@dataclass(frozen=True)
class FrequencyGrid:
    omegas: np.ndarray

    def __post_init__(self):
        om = np.array(self.omegas, dtype=float).ravel()
        if om.size == 0:
            raise InvalidConfig("frequency grid is empty")
        if np.any(np.abs(om) > np.pi + 1e-12):
            raise InvalidConfig("frequencies must lie in [-pi, pi]")
        if np.any(np.diff(om) <= 0):
            raise InvalidConfig("frequencies must be strictly increasing")
        om.setflags(write=False)
        object.__setattr__(self, "omegas", om)

    def __len__(self):
        return self.omegas.size

    @classmethod
    def default(cls, size: int = 512, full: bool = False) -> "FrequencyGrid":
        """``size`` equispaced points on ``[0, pi]``, or on ``[-pi, pi]`` when ``full``."""
        if size < 2:
            raise InvalidConfig(f"grid size must be >= 2, got {size}")
        lo = -np.pi if full else 0.0
        return cls(np.linspace(lo, np.pi, int(size)))


@dataclass(frozen=True)
class SpectrumEstimate:
    grid: FrequencyGrid
    values: np.ndarray
    # keys: kind ("periodogram" | "lag-window" | "convolution" | "true"), M, c_break, clipped
    meta: dict = field(default_factory=dict)

    @property
    def omegas(self) -> np.ndarray:
        return self.grid.omegas


def _as_grid(grid) -> FrequencyGrid:
    if grid is None:
        return FrequencyGrid.default()
    if isinstance(grid, FrequencyGrid):
        return grid
    return FrequencyGrid(grid)


def cosine_sum(gamma, omegas) -> np.ndarray:
    """``(1/2pi) * [g0 + 2 * sum_{k>=1} g_k cos(k omega)]`` evaluated on ``omegas``."""
    gamma = np.asarray(gamma, dtype=float)
    om = np.asarray(omegas, dtype=float)
    out = np.full(om.shape, gamma[0])
    if gamma.size > 1:
        k = np.arange(1, gamma.size)
        # chunked to bound the (grid x lags) cosine matrix
        step = max(1, 2**22 // gamma.size)
        for i in range(0, om.size, step):
            out[i : i + step] += 2.0 * np.cos(np.multiply.outer(om[i : i + step], k)) @ gamma[1:]
    return out / (2.0 * np.pi)


def periodogram(series, grid=None) -> SpectrumEstimate:
    """``I_N(omega)`` from the full sample autocovariance sequence."""
    ts = as_series(series)
    grid = _as_grid(grid)
    acf = sample_autocovariance_fast(ts)
    vals = cosine_sum(acf.gamma, grid.omegas)
    return SpectrumEstimate(grid, vals, {"kind": "periodogram", "M": ts.n - 1, "c_break": None, "clipped": False})


def periodogram_dft(series, omegas) -> np.ndarray:
    """Squared-DFT form ``|sum (x_t - xbar) e^{-i omega t}|^2 / (2 pi N)``."""
    ts = as_series(series)
    x = _centered(ts)
    t = np.arange(ts.n)
    om = np.asarray(omegas, dtype=float)
    out = np.empty(om.shape)
    step = max(1, 2**22 // ts.n)
    for i in range(0, om.size, step):
        ph = np.multiply.outer(om[i : i + step], t)
        out[i : i + step] = (np.cos(ph) @ x) ** 2 + (np.sin(ph) @ x) ** 2
    return out / (2.0 * np.pi * ts.n)


def lag_window_estimate(acf: AcfEstimate, config: FlatTopConfig, grid=None) -> SpectrumEstimate:
    """Weighted cosine sum of autocovariances with flat-top weights ``lambda(k/M)``.

    Lags at or beyond ``N`` count as zero, so ``acf`` only needs to reach
    ``min(M, N - 1)``.
    """
    grid = _as_grid(grid)
    need = min(config.M, acf.n_source - 1)
    if acf.max_lag < need:
        raise InsufficientLags(f"lag window with M={config.M} needs lags up to {need}, have {acf.max_lag}")
    w = lag_weights(config)[: need + 1]
    vals = cosine_sum(w * acf.gamma[: need + 1], grid.omegas)
    return SpectrumEstimate(
        grid, vals, {"kind": "lag-window", "M": config.M, "c_break": config.c_break, "clipped": False}
    )


def convolution_estimate(series, config: FlatTopConfig, grid=None, n_quad: int = CONV_GRID_MIN) -> SpectrumEstimate:
    """Kernel-smoothed periodogram, computed as a circular convolution by quadrature.

    The periodogram is taken from the squared DFT on a uniform periodic grid,
    independent of the autocovariance route. The rectangle rule on that grid
    is exact for trigonometric polynomials of degree below ``n_quad``.
    """
    ts = as_series(series)
    grid = _as_grid(grid)
    if n_quad < CONV_GRID_MIN:
        raise InvalidConfig(f"n_quad must be >= {CONV_GRID_MIN}")
    P = max(int(n_quad), 1 << int(np.ceil(np.log2(2 * (ts.n + config.M)))))
    x = _centered(ts)
    # DFT at u_j = 2 pi j / P; the integrand is 2pi-periodic so [0, 2pi) covers [-pi, pi]
    u = 2.0 * np.pi * np.arange(P) / P
    dft = np.fft.fft(x, P)
    I_u = (dft.real**2 + dft.imag**2) / (2.0 * np.pi * ts.n)
    vals = np.empty(len(grid))
    for i, om in enumerate(grid.omegas):
        vals[i] = np.dot(kernel_function(om - u, config), I_u) * (2.0 * np.pi / P)
    return SpectrumEstimate(
        grid, vals, {"kind": "convolution", "M": config.M, "c_break": config.c_break, "clipped": False}
    )


def estimate_auto(
    series, rule: RuleConfig = RuleConfig(), grid=None
) -> tuple[BandwidthSelection, SpectrumEstimate]:
    """Select ``M_hat`` from the correlogram and return the matching lag-window estimate."""
    ts = as_series(series)
    acf = sample_autocovariance_fast(ts)
    sel = pick_m_hat(acf, rule)
    est = lag_window_estimate(acf, FlatTopConfig(M=sel.M_hat, c_break=rule.c_break), grid)
    return sel, est


def clip_nonnegative(spec: SpectrumEstimate) -> SpectrumEstimate:
    meta = dict(spec.meta, clipped=True)
    return replace(spec, values=np.maximum(spec.values, 0.0), meta=meta)
