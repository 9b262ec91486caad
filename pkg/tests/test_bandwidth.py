import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flattop import (
    AcfEstimate,
    InsufficientLags,
    InvalidConfig,
    RuleConfig,
    m_to_M,
    pick_m_hat,
    threshold,
)
from oracles import brute_rule


def acf_from_rho(rho, n):
    return AcfEstimate.from_gamma(np.asarray(rho, dtype=float), n)


def test_threshold_values():
    assert threshold(400, 2.0) == pytest.approx(2 * math.sqrt(math.log(400) / 400), rel=1e-15)
    assert threshold(400, 2.0) == pytest.approx(0.24477, abs=1e-5)
    assert threshold(10_000, 2.0) == pytest.approx(0.060697, abs=1e-6)


def test_rule_config_invariants():
    with pytest.raises(InvalidConfig):
        RuleConfig(c_thresh=0)
    with pytest.raises(InvalidConfig):
        RuleConfig(k_n=0)
    with pytest.raises(InvalidConfig):
        RuleConfig(c_break=1.0)
    with pytest.raises(InvalidConfig):
        RuleConfig(max_m=0)


def test_lookahead_warning():
    with pytest.warns(UserWarning):
        assert not RuleConfig(k_n=5).check_lookahead(100)
    assert RuleConfig(k_n=5).check_lookahead(10_000)


def test_pick_first_example():
    rho = (1, 0.8, 0.5, 0.3, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001)
    sel = pick_m_hat(acf_from_rho(rho, 400), RuleConfig(c_thresh=2, k_n=3))
    assert (sel.m_hat, sel.M_hat, sel.capped) == (3, 6, False)
    assert sel.threshold == pytest.approx(0.24477, abs=1e-5)
    assert [row[0] for row in sel.scan_trace] == list(range(1, 7))


def test_pick_lookahead_skips_spurious_dip():
    rho = (1, 0.1, 0.3, 0.1, 0.05, 0.02, 0.01)
    sel = pick_m_hat(acf_from_rho(rho, 400), RuleConfig(c_thresh=2, k_n=2))
    assert (sel.m_hat, sel.M_hat) == (2, 4)


def test_pick_all_below_gives_one():
    rho = [1.0] + [0.01] * 20
    sel = pick_m_hat(acf_from_rho(rho, 400), RuleConfig(k_n=5))
    assert (sel.m_hat, sel.M_hat) == (1, 2)


def test_tie_at_threshold_fails():
    thr = threshold(400, 2.0)
    rho = [1.0, 0.9, thr, 0, 0, 0, 0, 0, 0, 0]
    assert pick_m_hat(acf_from_rho(rho, 400), RuleConfig(k_n=2)).m_hat == 2


def test_capped_when_nothing_qualifies():
    rho = [1.0] + [0.9] * 30
    sel = pick_m_hat(acf_from_rho(rho, 400), RuleConfig(k_n=5))
    assert sel.capped and sel.m_hat == 30 - 5
    sel = pick_m_hat(acf_from_rho(rho, 400), RuleConfig(k_n=5, max_m=7))
    assert sel.capped and sel.m_hat == 7


def test_insufficient_lags():
    with pytest.raises(InsufficientLags):
        pick_m_hat(acf_from_rho([1, 0.1, 0.1, 0.1, 0.1, 0.1], 400), RuleConfig(k_n=5))


@pytest.mark.parametrize("m, c, expected", [(3, 0.5, 6), (3, 0.4, 8), (1, 0.5, 2), (3, 0.6, 5), (7, 0.5, 14)])
def test_m_to_M(m, c, expected):
    assert m_to_M(m, c) == expected


def test_hard_cutoff_true_rho():
    # MA(2) with theta = (0.6, 0.4): rho(2) = 0.4 / 1.52 is above the threshold at N = 10^4
    rho = [1.0, (0.6 + 0.24) / 1.52, 0.4 / 1.52] + [0.0] * 20
    assert pick_m_hat(acf_from_rho(rho, 10_000), RuleConfig()).m_hat == 2


rho_st = st.lists(st.floats(-1, 1), min_size=12, max_size=60).map(lambda r: [1.0] + r)


@settings(max_examples=150, deadline=None)
@given(rho_st, st.integers(1, 6), st.floats(0.2, 5))
def test_matches_literal_scan(rho, k_n, c_thresh):
    n = 400
    sel = pick_m_hat(acf_from_rho(rho, n), RuleConfig(c_thresh=c_thresh, k_n=k_n))
    ref = brute_rule(rho, n, c_thresh, k_n)
    if ref is None:
        assert sel.capped
    else:
        assert not sel.capped and sel.m_hat == ref


@settings(max_examples=100, deadline=None)
@given(rho_st, st.integers(1, 5), st.floats(0.2, 3), st.floats(0.01, 2))
def test_monotone_in_threshold_and_lookahead(rho, k_n, c, dc):
    acf = acf_from_rho(rho, 400)
    base = pick_m_hat(acf, RuleConfig(c_thresh=c, k_n=k_n))
    higher = pick_m_hat(acf, RuleConfig(c_thresh=c + dc, k_n=k_n))
    longer = pick_m_hat(acf, RuleConfig(c_thresh=c, k_n=k_n + 1))
    if not (base.capped or higher.capped):
        assert higher.m_hat <= base.m_hat
    if not (base.capped or longer.capped):
        assert longer.m_hat >= base.m_hat


def test_deterministic():
    acf = acf_from_rho([1, 0.5, 0.3, 0.2, 0.01, 0.01, 0.0, 0.0, 0.0, 0.0], 400)
    assert pick_m_hat(acf) == pick_m_hat(acf)
