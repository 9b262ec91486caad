"""Automatic choice of the number of lags from the sample correlogram.

The rule picks ``m_hat`` as the smallest positive lag after which ``k_n``
consecutive autocorrelations all fall strictly below
``c_thresh * sqrt(ln N / N)``, then widens the window to
``M_hat = ceil(m_hat / c_break)`` so the flat top covers lag ``m_hat``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientLags, InvalidConfig
from .kernel import DEFAULT_C_BREAK, _check_break
from .timeseries import AcfEstimate


@dataclass(frozen=True)
class RuleConfig:
    c_thresh: float = 2.0
    k_n: int = 5
    c_break: float = DEFAULT_C_BREAK
    max_m: int | None = None

    def __post_init__(self):
        if not self.c_thresh > 0:
            raise InvalidConfig(f"c_thresh must be positive, got {self.c_thresh}")
        if int(self.k_n) != self.k_n or self.k_n < 1:
            raise InvalidConfig(f"k_n must be a positive integer, got {self.k_n}")
        _check_break(self.c_break)
        if self.max_m is not None and (int(self.max_m) != self.max_m or self.max_m < 1):
            raise InvalidConfig(f"max_m must be a positive integer, got {self.max_m}")
        object.__setattr__(self, "k_n", int(self.k_n))

    def check_lookahead(self, n: int) -> bool:
        """Warn when ``k_n >= ln N``; the lookahead is meant to grow slower than ``log N``."""
        ok = self.k_n < math.log(n)
        if not ok:
            warnings.warn(
                f"k_n={self.k_n} is not small relative to ln N={math.log(n):.3f}",
                stacklevel=2,
            )
        return ok


@dataclass(frozen=True)
class BandwidthSelection:
    m_hat: int
    M_hat: int
    threshold: float
    capped: bool
    # rows of (lag, |rho_hat|, below threshold) for lags 1 .. m_hat + k_n
    scan_trace: tuple = ()


def threshold(n: int, c_thresh: float) -> float:
    if n < 2:
        raise InvalidConfig(f"threshold needs n >= 2, got {n}")
    return float(c_thresh) * math.sqrt(math.log(n) / n)


def m_to_M(m_hat: int, c_break: float = DEFAULT_C_BREAK) -> int:
    if m_hat < 1:
        raise InvalidConfig(f"m_hat must be >= 1, got {m_hat}")
    c_break = _check_break(c_break)
    # exact for c_break = 1/2; rounding guard keeps 3/0.6 from becoming 6
    return int(math.ceil(m_hat / c_break - 1e-9))


def pick_m_hat(acf: AcfEstimate, config: RuleConfig = RuleConfig()) -> BandwidthSelection:
    """Apply the lookahead threshold rule to ``acf.rho``.

    If no lag up to ``min(max_m, L - k_n)`` qualifies, the cap itself is
    returned with ``capped=True``; ``max_m`` defaults to ``N // 2``.
    """
    L = acf.max_lag
    K = config.k_n
    if L < K + 1:
        raise InsufficientLags(f"need autocorrelations up to lag {K + 1}, have {L}")
    n = acf.n_source
    thr = threshold(n, config.c_thresh)
    max_m = config.max_m if config.max_m is not None else max(n // 2, 1)
    cap = max(min(max_m, L - K), 1)

    absrho = np.abs(np.asarray(acf.rho, dtype=float))
    below = absrho < thr
    # counts[m] = number of below-threshold lags among m+1 .. m+K
    cs = np.concatenate(([0], np.cumsum(below[1:])))
    m = np.arange(1, cap + 1)
    hits = np.nonzero(cs[m + K] - cs[m] == K)[0]
    if hits.size:
        m_hat, capped = int(hits[0]) + 1, False
    else:
        m_hat, capped = cap, True

    last = min(m_hat + K, L)
    trace = tuple((k, float(absrho[k]), bool(below[k])) for k in range(1, last + 1))
    return BandwidthSelection(
        m_hat=m_hat,
        M_hat=m_to_M(m_hat, config.c_break),
        threshold=thr,
        capped=capped,
        scan_trace=trace,
    )
