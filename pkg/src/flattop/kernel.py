"""Trapezoidal flat-top lag window and its frequency-domain kernel."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBreakpoint, InvalidConfig

DEFAULT_C_BREAK = 0.5


def _check_break(c_break: float) -> float:
    c_break = float(c_break)
    if not 0.0 < c_break < 1.0:
        raise InvalidBreakpoint(f"c_break must lie in (0, 1), got {c_break}")
    return c_break


@dataclass(frozen=True)
class FlatTopConfig:
    """Window with ``M`` retained lags (bandwidth ``h = 1/M``) and breakpoint ``c_break``."""

    M: int
    c_break: float = DEFAULT_C_BREAK

    def __post_init__(self):
        _check_break(self.c_break)
        if int(self.M) != self.M or self.M < 1:
            raise InvalidConfig(f"M must be a positive integer, got {self.M}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def h(self) -> float:
        return 1.0 / self.M


def lambda_trap(t, c_break: float = DEFAULT_C_BREAK):
    """Trapezoid: 1 on ``|t| <= c``, linear down to 0 at ``|t| = 1``, 0 beyond.

    Accepts scalars or arrays.
    """
    c = _check_break(c_break)
    a = np.abs(np.asarray(t, dtype=float))
    out = np.where(a <= c, 1.0, np.where(a <= 1.0, (1.0 - a) / (1.0 - c), 0.0))
    return float(out) if out.ndim == 0 else out


def lag_weights(config: FlatTopConfig) -> np.ndarray:
    """Weights ``lambda_trap(k / M)`` for ``k = 0 .. M``."""
    k = np.arange(config.M + 1)
    return lambda_trap(k / config.M, config.c_break)


def kernel_function(omega, config: FlatTopConfig):
    """Frequency-domain kernel ``(1/2pi) * sum_{|k|<=M} w_k exp(i k omega)`` in cosine form."""
    w = lag_weights(config)
    om = np.asarray(omega, dtype=float)
    k = np.arange(1, config.M + 1)
    vals = (w[0] + 2.0 * np.cos(np.multiply.outer(om, k)) @ w[1:]) / (2.0 * np.pi)
    return float(vals) if np.ndim(vals) == 0 else vals
