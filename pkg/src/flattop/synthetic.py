"""Autocovariance models, their positive-definite realizations, and Gaussian simulators.

Model kinds:

* ``polynomial``: ``gamma(k) = sum C_i k^{-d_i} cos(a_i k + theta_i)`` for ``k > k0``
* ``exponential``: ``gamma(k) = sum C_i xi_i^k cos(a_i k + theta_i)`` for ``k > k0``
* ``cutoff``: MA(q) autocovariance, zero beyond lag ``q``
* ``arma``: autocovariance of a causal ARMA(p, q) with unit innovation variance
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft
from scipy import optimize, signal

from .errors import DegenerateModel, EmbeddingFailure, InvalidConfig, NonStationary
from .spectral import SpectrumEstimate, _as_grid, cosine_sum
from .timeseries import TimeSeries

KINDS = ("polynomial", "exponential", "cutoff", "arma")
EIG_TOL = 1e-8
L_MAX_DEFAULT = 1024


@dataclass(frozen=True)
class Term:
    C: float
    a: float = 0.0
    theta: float = 0.0
    d: int | None = None
    xi: float | None = None


@dataclass(frozen=True)
class AcfModel:
    kind: str
    terms: tuple = ()
    k0: int = 0
    head: tuple = ()
    ar: tuple = ()
    ma: tuple = ()
    sigma2: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfig(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "head", tuple(float(h) for h in self.head))
        object.__setattr__(self, "ar", tuple(float(v) for v in self.ar))
        object.__setattr__(self, "ma", tuple(float(v) for v in self.ma))
        if self.k0 < 0 or int(self.k0) != self.k0:
            raise InvalidConfig(f"k0 must be a nonnegative integer, got {self.k0}")
        if self.head and len(self.head) != self.k0 + 1:
            raise InvalidConfig(f"head must hold gamma(0..k0), i.e. {self.k0 + 1} values")
        if not self.sigma2 > 0:
            raise InvalidConfig("sigma2 must be positive")

        if self.kind in ("polynomial", "exponential"):
            if not self.terms:
                raise InvalidConfig(f"{self.kind} model needs at least one term")
            for t in self.terms:
                if not t.C > 0:
                    raise InvalidConfig(f"term amplitude C must be positive, got {t.C}")
                if not 0.0 <= t.theta <= 2 * math.pi:
                    raise InvalidConfig(f"theta must lie in [0, 2pi], got {t.theta}")
                if self.kind == "polynomial":
                    if t.d is None or int(t.d) != t.d or t.d < 1:
                        raise InvalidConfig(f"polynomial decay d must be a positive integer, got {t.d}")
                elif t.xi is None or not abs(t.xi) < 1:
                    raise InvalidConfig(f"exponential base must satisfy |xi| < 1, got {t.xi}")
            if self.kind == "polynomial" and len({t.a for t in self.terms}) != len(self.terms):
                raise InvalidConfig("polynomial terms need distinct frequencies a_i")
        if self.kind == "arma":
            check_stationary(self.ar)

    @classmethod
    def polynomial(cls, terms, k0: int = 0, head=()) -> "AcfModel":
        """``terms`` is an iterable of ``(C, d, a, theta)``."""
        return cls("polynomial", tuple(Term(C=C, d=d, a=a, theta=th) for C, d, a, th in terms), k0, tuple(head))

    @classmethod
    def exponential(cls, terms, k0: int = 0, head=()) -> "AcfModel":
        """``terms`` is an iterable of ``(C, xi, a, theta)``."""
        return cls("exponential", tuple(Term(C=C, xi=xi, a=a, theta=th) for C, xi, a, th in terms), k0, tuple(head))

    @classmethod
    def cutoff(cls, ma, sigma2: float = 1.0) -> "AcfModel":
        return cls("cutoff", ma=tuple(ma), sigma2=sigma2)

    @classmethod
    def arma(cls, ar=(), ma=(), sigma2: float = 1.0) -> "AcfModel":
        return cls("arma", ar=tuple(ar), ma=tuple(ma), sigma2=sigma2)

    @property
    def decay_exponent(self) -> int | None:
        """``d = min d_i`` for polynomial models."""
        if self.kind != "polynomial":
            return None
        return min(t.d for t in self.terms)

    @property
    def decay_base(self) -> float | None:
        """``|xi| = max |xi_i|``; for ARMA, the largest modulus of the inverse AR roots."""
        if self.kind == "exponential":
            return max(abs(t.xi) for t in self.terms)
        if self.kind == "arma" and self.ar:
            return _spectral_radius(self.ar)
        return None

    def condition_issues(self, k_n: int, max_lag: int | None = None) -> list[str]:
        """List the ways this model departs from the rate-scaling assumptions for lookahead ``k_n``."""
        issues = []
        if self.kind in ("polynomial", "exponential"):
            for t in self.terms:
                if t.a < math.pi / k_n:
                    issues.append(f"frequency a={t.a:.6g} is below pi/k_n={math.pi / k_n:.6g}")
        if self.k0 > 0:
            g = eval_model_acf(self, self.k0)
            zeros = int(np.sum(np.abs(g[1 : self.k0 + 1]) <= 1e-12 * max(abs(g[0]), 1e-300)))
            if zeros > k_n - 1:
                issues.append(f"{zeros} zeros among lags 1..k0 exceeds k_n - 1 = {k_n - 1}")
        return issues


@dataclass(frozen=True)
class ValidAcf:
    """Finitely supported autocovariance ``gamma[0..L_max]`` with nonnegative implied density."""

    gamma: np.ndarray
    spectral_floor: float
    source: AcfModel | None = None
    inflation: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def L_max(self) -> int:
        return int(self.gamma.size - 1)

    @property
    def rho(self) -> np.ndarray:
        return self.gamma / self.gamma[0]


def _companion(ar) -> np.ndarray:
    p = len(ar)
    comp = np.zeros((p, p))
    comp[0, :] = ar
    if p > 1:
        comp[1:, :-1] = np.eye(p - 1)
    return comp


def _spectral_radius(ar) -> float:
    if len(ar) == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(_companion(ar)))))


def check_stationary(ar) -> None:
    rad = _spectral_radius(tuple(ar))
    if not rad < 1.0:
        raise NonStationary(f"AR polynomial has a root on or inside the unit circle (radius {rad:.6g})")


def arma_acovf(ar, ma, max_lag: int, sigma2: float = 1.0) -> np.ndarray:
    """Theoretical ARMA autocovariance ``gamma(0..max_lag)`` via the causal MA(inf) weights.

    The psi-weights are truncated once the geometric tail drops below double
    precision relative to the leading weight.
    """
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    check_stationary(ar)
    rad = _spectral_radius(tuple(ar))
    tail = 0 if rad == 0 else int(math.ceil(40.0 / -math.log(rad)))
    n_psi = max_lag + len(ma) + tail + 1
    impulse = np.zeros(n_psi)
    impulse[0] = 1.0
    psi = signal.lfilter(np.r_[1.0, ma], np.r_[1.0, -ar], impulse)
    full = np.correlate(psi, psi, mode="full")[n_psi - 1 :]
    return sigma2 * full[: max_lag + 1]


def ma_acovf(ma, max_lag: int, sigma2: float = 1.0) -> np.ndarray:
    theta = np.r_[1.0, np.asarray(ma, dtype=float)]
    out = np.zeros(max_lag + 1)
    for k in range(min(max_lag, theta.size - 1) + 1):
        out[k] = sigma2 * np.dot(theta[: theta.size - k], theta[k:])
    return out


def _formula(model: AcfModel, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    out = np.zeros(k.shape)
    for t in model.terms:
        osc = np.cos(t.a * k + t.theta)
        if model.kind == "polynomial":
            out += t.C * k ** (-float(t.d)) * osc
        else:
            out += t.C * np.sign(t.xi) ** k * np.abs(t.xi) ** k * osc
    return out


def eval_model_acf(model: AcfModel, max_lag: int) -> np.ndarray:
    """Model autocovariance ``gamma(0..max_lag)`` before any positive-definiteness repair.

    For the parametric kinds, lags ``k <= k0`` come from ``head`` when given,
    otherwise the formula is extended down to ``k = 1``. The default
    ``gamma(0)`` is the formula at 0 for exponential models and
    ``sum C_i`` (an upper bound on every ``|gamma(k)|``) for polynomial ones.
    """
    max_lag = int(max_lag)
    if model.kind == "cutoff":
        return ma_acovf(model.ma, max_lag, model.sigma2)
    if model.kind == "arma":
        return arma_acovf(model.ar, model.ma, max_lag, model.sigma2)

    k = np.arange(max_lag + 1)
    g = np.zeros(max_lag + 1)
    g[1:] = _formula(model, k[1:])
    if model.kind == "exponential":
        g[0] = _formula(model, np.array([0.0]))[0]
    else:
        g[0] = sum(t.C for t in model.terms)
    if model.head:
        h = np.asarray(model.head)[: max_lag + 1]
        g[: h.size] = h
    return g


def _density_floor(gamma: np.ndarray, n_grid: int) -> float:
    """Minimum over ``[0, pi]`` of the finite cosine sum, grid search plus local refinement."""
    L = gamma.size - 1
    n_fft = 1 << int(math.ceil(math.log2(max(n_grid, 2 * L + 2))))
    row = np.zeros(n_fft)
    row[: L + 1] = gamma
    row[n_fft - L :] = gamma[1:][::-1]
    vals = sp_fft.rfft(row).real / (2.0 * np.pi)
    best = float(vals.min())
    if L == 0:
        return best
    step = 2.0 * np.pi / n_fft
    # refine around the lowest local minima of the grid
    for j in np.argsort(vals)[:8]:
        centre = j * step
        lo, hi = max(centre - step, 0.0), min(centre + step, np.pi)
        res = optimize.minimize_scalar(
            lambda w: float(cosine_sum(gamma, np.array([w]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = min(best, float(res.fun))
    return best


def make_psd(model: AcfModel, L_max: int = L_MAX_DEFAULT, n_grid: int | None = None) -> ValidAcf:
    """Truncate the model at ``L_max`` and raise ``gamma(0)`` until the implied density is nonnegative.

    The density is scanned on at least ``16 * L_max`` frequencies and the
    lowest grid minima are refined. When the floor is negative, ``gamma(0)``
    grows by ``-2pi * floor + 1e-6 * gamma(0)``.
    """
    L_max = int(L_max)
    if L_max < 1:
        raise InvalidConfig(f"L_max must be >= 1, got {L_max}")
    gamma = eval_model_acf(model, L_max).astype(float)
    if not gamma[0] > 0:
        raise DegenerateModel(f"gamma(0) = {gamma[0]:.6g} is not positive")
    n_grid = max(int(n_grid or 0), 16 * L_max)
    floor = _density_floor(gamma, n_grid)
    inflation = 0.0
    # rounding-level negatives (e.g. an MA density touching zero) are not inflated
    tol = 1e-12 * gamma[0] / (2.0 * np.pi)
    if floor < -tol:
        inflation = -2.0 * np.pi * floor + 1e-6 * gamma[0]
        gamma[0] += inflation
        floor = _density_floor(gamma, n_grid)
        if floor < -tol:
            raise DegenerateModel(f"density floor {floor:.3g} still negative after inflation")
    floor = max(floor, 0.0)
    gamma.setflags(write=False)
    return ValidAcf(gamma=gamma, spectral_floor=floor, source=model, inflation=inflation)


def _rng(seed):
    return np.random.default_rng(seed)


def simulate_gaussian(acf: ValidAcf, n: int, seed: int) -> TimeSeries:
    """Exact stationary Gaussian sample by circulant embedding.

    The circulant has length ``>= 2 (n + L_max)``; eigenvalues down to
    ``-1e-8 * max`` are clipped to zero, anything more negative raises
    :class:`EmbeddingFailure`.
    """
    n = int(n)
    if n < 2:
        raise InvalidConfig(f"n must be >= 2, got {n}")
    gamma = np.asarray(acf.gamma, dtype=float)
    L = gamma.size - 1
    size = sp_fft.next_fast_len(2 * (n + L), real=True)
    row = np.zeros(size)
    row[: L + 1] = gamma
    if L > 0:
        row[size - L :] = gamma[1:][::-1]
    eig = sp_fft.fft(row).real
    top = eig.max()
    if eig.min() < -EIG_TOL * top:
        raise EmbeddingFailure(f"circulant eigenvalue {eig.min():.3g} below tolerance (max {top:.3g})")
    eig = np.clip(eig, 0.0, None)

    rng = _rng(seed)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    # real and imaginary parts are each exact samples; keep the real part
    x = sp_fft.fft(np.sqrt(eig / size) * z).real
    return TimeSeries(x[:n])


def simulate_arma(ar=(), ma=(), n: int = 1024, seed: int = 0, burn_in: int | None = None, sigma2: float = 1.0) -> TimeSeries:
    """ARMA recursion ``x_t = sum ar_i x_{t-i} + e_t + sum ma_j e_{t-j}`` with Gaussian ``e``."""
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    check_stationary(ar)
    if burn_in is None:
        burn_in = 10 * (ar.size + ma.size) + 1000
    rng = _rng(seed)
    e = rng.standard_normal(int(n) + int(burn_in)) * math.sqrt(sigma2)
    x = signal.lfilter(np.r_[1.0, ma], np.r_[1.0, -ar], e)
    return TimeSeries(x[int(burn_in) :])


def ar2_from_pole(r: float, a: float) -> tuple[float, float]:
    """AR(2) coefficients whose characteristic roots are ``r exp(+-i a)``."""
    if not 0.0 < r < 1.0:
        raise InvalidConfig(f"pole modulus must lie in (0, 1), got {r}")
    if not 0.0 < a < math.pi:
        raise InvalidConfig(f"pole angle must lie in (0, pi), got {a}")
    return 2.0 * r * math.cos(a), -r * r


def true_spectral_density(source, grid=None) -> SpectrumEstimate:
    """Spectral density of a :class:`ValidAcf` (finite cosine sum) or of an ARMA model.

    ARMA input may be an ``arma``/``cutoff`` :class:`AcfModel` or an
    ``(ar, ma)`` / ``(ar, ma, sigma2)`` tuple.
    """
    grid = _as_grid(grid)
    om = grid.omegas
    if isinstance(source, ValidAcf):
        vals = cosine_sum(source.gamma, om)
    else:
        if isinstance(source, AcfModel):
            if source.kind not in ("arma", "cutoff"):
                raise InvalidConfig("parametric models need make_psd before a density is defined")
            ar, ma, s2 = source.ar, source.ma, source.sigma2
        else:
            ar, ma, *rest = source
            s2 = rest[0] if rest else 1.0
        z = np.exp(-1j * om)
        num = np.polynomial.polynomial.polyval(z, np.r_[1.0, np.asarray(ma, dtype=float)])
        den = np.polynomial.polynomial.polyval(z, np.r_[1.0, -np.asarray(ar, dtype=float)])
        vals = s2 / (2.0 * np.pi) * np.abs(num) ** 2 / np.abs(den) ** 2
    return SpectrumEstimate(grid, vals, {"kind": "true", "M": None, "c_break": None, "clipped": False})


def check_conditions(model: AcfModel, k_n: int) -> list[str]:
    """Emit a warning for each departure from the rate-scaling assumptions."""
    issues = model.condition_issues(k_n)
    for msg in issues:
        warnings.warn(msg, stacklevel=2)
    return issues


__all__ = [
    "AcfModel",
    "Term",
    "ValidAcf",
    "ar2_from_pole",
    "arma_acovf",
    "check_conditions",
    "eval_model_acf",
    "make_psd",
    "ma_acovf",
    "simulate_arma",
    "simulate_gaussian",
    "true_spectral_density",
]
