import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from flattop import FlatTopConfig, InvalidBreakpoint, InvalidConfig, kernel_function, lag_weights, lambda_trap


@pytest.mark.parametrize(
    "t, c, expected",
    [(0.0, 0.5, 1.0), (0.75, 0.5, 0.5), (1.0, 0.5, 0.0), (1.0, 0.3, 0.0), (-0.75, 0.5, 0.5), (0.5, 0.5, 1.0), (2.0, 0.5, 0.0)],
)
def test_lambda_trap_values(t, c, expected):
    assert lambda_trap(t, c) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("c", [0.0, 1.0, -0.2, 1.5])
def test_lambda_trap_rejects_bad_breakpoint(c):
    with pytest.raises(InvalidBreakpoint):
        lambda_trap(0.1, c)


@given(st.floats(-3, 3), st.floats(0.01, 0.99))
def test_lambda_trap_even_and_bounded(t, c):
    v = lambda_trap(t, c)
    assert v == lambda_trap(-t, c)
    assert 0.0 <= v <= 1.0


@pytest.mark.parametrize("c", [0.1, 0.25, 0.5, 0.8])
def test_lambda_trap_continuous(c):
    eps = 1e-9
    for point in (c, 1.0):
        assert abs(lambda_trap(point - eps, c) - lambda_trap(point + eps, c)) < 1e-6 / (1 - c)
    t = np.linspace(-1.5, 1.5, 30001)
    assert np.max(np.abs(np.diff(lambda_trap(t, c)))) <= (t[1] - t[0]) / (1 - c) + 1e-12


@pytest.mark.parametrize(
    "M, expected", [(4, [1, 1, 1, 0.5, 0]), (1, [1, 0]), (2, [1, 1, 0])]
)
def test_lag_weights(M, expected):
    np.testing.assert_allclose(lag_weights(FlatTopConfig(M=M)), expected, atol=1e-15)


@given(st.integers(1, 200), st.floats(0.05, 0.95))
def test_flat_top_region_exactly_one(M, c):
    w = lag_weights(FlatTopConfig(M=M, c_break=c))
    top = int(math.floor(c * M))
    assert np.all(w[: top + 1] == 1.0)
    assert w[-1] == 0.0


def test_config_invariants():
    with pytest.raises(InvalidConfig):
        FlatTopConfig(M=0)
    with pytest.raises(InvalidConfig):
        FlatTopConfig(M=2.5)
    with pytest.raises(InvalidBreakpoint):
        FlatTopConfig(M=3, c_break=1.0)
    assert FlatTopConfig(M=4).h == 0.25


def test_kernel_values():
    # direct summation: weights (1,1,1,.5,0) give 1 + 2 * 2.5 = 6
    assert kernel_function(0.0, FlatTopConfig(M=4)) == pytest.approx(3 / math.pi, rel=1e-14)
    assert kernel_function(math.pi, FlatTopConfig(M=2)) == pytest.approx(-1 / (2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("M, c", [(1, 0.5), (4, 0.5), (9, 0.3), (25, 0.7)])
def test_kernel_integrates_to_one(M, c):
    cfg = FlatTopConfig(M=M, c_break=c)
    val, _ = integrate.quad(lambda w: kernel_function(w, cfg), -math.pi, math.pi, limit=400, epsabs=1e-12)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_kernel_even():
    cfg = FlatTopConfig(M=11, c_break=0.4)
    w = np.linspace(0, math.pi, 257)
    np.testing.assert_allclose(kernel_function(w, cfg), kernel_function(-w, cfg), rtol=0, atol=1e-14)
