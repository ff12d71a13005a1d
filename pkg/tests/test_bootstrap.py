import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momineq import ParameterError, ShapeError
from momineq import rng as rngmod
from momineq.bootstrap import (BootstrapDraws, bootstrap_critical_value, bootstrap_first_step_set,
                               bootstrap_quantile, draw_scores, eb_statistic, mb_statistic)
from momineq.lasso_select import SelectionSet
from momineq.moments import SampleMatrix, estimate_moments

ROOT2 = math.sqrt(2.0)


@pytest.fixture
def two_point():
    s = SampleMatrix([0.0, 2.0], p=1)
    return s, estimate_moments(s)


def test_mb_hand_examples(two_point):
    s, est = two_point
    assert mb_statistic(s, est, None, [1.0, -1.0]) == pytest.approx(-ROOT2, rel=1e-14)
    assert mb_statistic(s, est, None, [-1.0, 1.0]) == pytest.approx(ROOT2, rel=1e-14)


def test_mb_zero_multipliers():
    s = SampleMatrix([[0.0, 1.0], [2.0, 3.0]], p=1)
    est = estimate_moments(s)
    assert mb_statistic(s, est, SelectionSet([], "given", 0.0, 1), [0.0, 0.0]) == 0.0
    s0 = SampleMatrix([0.0, 2.0], p=1)
    empty = SelectionSet([], "given", 0.0, 1)
    assert mb_statistic(s0, estimate_moments(s0), empty, [0.0, 0.0]) == -math.inf


def test_mb_length_check(two_point):
    s, est = two_point
    with pytest.raises(ShapeError):
        mb_statistic(s, est, None, [1.0])


def test_eb_hand_examples(two_point):
    s, est = two_point
    assert eb_statistic(s, est, None, [1, 1]) == pytest.approx(ROOT2, rel=1e-14)
    assert eb_statistic(s, est, None, [0, 1]) == 0.0
    assert eb_statistic(s, est, None, [0, 0]) == pytest.approx(-ROOT2, rel=1e-14)


def test_eb_index_checks(two_point):
    s, est = two_point
    with pytest.raises(ShapeError):
        eb_statistic(s, est, None, [0, 2])
    with pytest.raises(ShapeError):
        eb_statistic(s, est, None, [0])
    with pytest.raises(ShapeError):
        eb_statistic(s, est, None, [0.0, 1.0])


def test_quantile_order_statistic():
    assert bootstrap_quantile([5, 3, 1, 4, 2], 0.05) == 5
    assert bootstrap_quantile([4, 3, 2, 1], 0.25) == 3
    assert bootstrap_quantile([7.5] * 9, 0.1) == 7.5
    # 300 * 0.95 is 285.00000000000006 in binary; the rank must stay 285
    assert bootstrap_quantile(np.arange(1, 301), 0.05) == 285
    with pytest.raises(ParameterError):
        bootstrap_quantile([1, 2], 0.0)


def test_draws_type():
    d = BootstrapDraws([3.0, 1.0, 2.0], "MB", None, 1, 3)
    assert list(d.statistics) == [1.0, 2.0, 3.0]
    assert d.quantile(0.5) == 2.0
    with pytest.raises(ShapeError):
        BootstrapDraws([1.0], "MB", None, 1, 2)


def test_all_zero_columns_give_zero():
    s = SampleMatrix(np.zeros((20, 3)), p=3)
    est = estimate_moments(s)
    for kind in ("MB", "EB"):
        assert bootstrap_critical_value(kind, s, est, None, 0.05, 200, 1) == 0.0


def test_b_checks():
    s = SampleMatrix(np.random.default_rng(0).normal(size=(30, 2)), p=2)
    est = estimate_moments(s)
    with pytest.raises(ParameterError):
        bootstrap_critical_value("MB", s, est, None, 0.05, 0, 1)
    with pytest.warns(UserWarning, match="below 100"):
        bootstrap_critical_value("MB", s, est, None, 0.05, 50, 1)
    with pytest.raises(ParameterError):
        bootstrap_critical_value("XB", s, est, None, 0.05, 200, 1)
    with pytest.raises(ParameterError):
        bootstrap_critical_value("MB", s, est, None, 0.05, 200, None)


def test_scores_match_single_draw_formulas():
    g = np.random.default_rng(1)
    s = SampleMatrix(g.normal(size=(25, 4)) + [0, 1, 0, 0], p=3)
    est = estimate_moments(s)
    B, seed = 40, 99
    sub = SelectionSet([0, 2], "given", 0.0, 3)
    mb = draw_scores("MB", s, est, B, seed).restrict(sub).statistics
    gen = rngmod.stream(seed, rngmod.purpose("MB"))
    eps = rngmod.standard_normal(gen, (B, 25))
    direct = np.sort([mb_statistic(s, est, sub, e) for e in eps])
    np.testing.assert_allclose(mb, direct, rtol=1e-12, atol=1e-12)

    eb = draw_scores("EB", s, est, B, seed).restrict(sub).statistics
    gen = rngmod.stream(seed, rngmod.purpose("EB"))
    idx = gen.integers(0, 25, size=(B, 25))
    direct = np.sort([eb_statistic(s, est, sub, i) for i in idx])
    np.testing.assert_allclose(eb, direct, rtol=1e-12, atol=1e-12)


def test_determinism_and_seed_sensitivity():
    s = SampleMatrix(np.random.default_rng(2).normal(size=(50, 10)), p=10)
    est = estimate_moments(s)
    a = bootstrap_critical_value("EB", s, est, None, 0.05, 300, 7)
    b = bootstrap_critical_value("EB", s, est, None, 0.05, 300, 7)
    c = bootstrap_critical_value("EB", s, est, None, 0.05, 300, 8)
    assert a == b and a != c


def test_equalities_make_draws_nonnegative():
    s = SampleMatrix(np.random.default_rng(3).normal(size=(40, 5)), p=3)
    est = estimate_moments(s)
    for kind in ("MB", "EB"):
        sc = draw_scores(kind, s, est, 200, 5)
        assert np.all(sc.restrict(SelectionSet([], "given", 0.0, 3)).statistics >= 0)
        assert sc.critical_value(None, 0.05) >= 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_set_monotonicity(seed, data):
    g = np.random.default_rng(seed)
    p = 12
    s = SampleMatrix(g.standard_t(4, size=(60, p)), p=p)
    est = estimate_moments(s)
    big = data.draw(st.lists(st.integers(0, p - 1), unique=True, max_size=p))
    small = data.draw(st.lists(st.sampled_from(big), unique=True)) if big else []
    L1 = SelectionSet(small, "given", 0.0, p)
    L2 = SelectionSet(big, "given", 0.0, p)
    for kind in ("MB", "EB"):
        sc = draw_scores(kind, s, est, 200, seed)
        assert sc.critical_value(L1, 0.05) <= sc.critical_value(L2, 0.05)


def test_first_step_examples():
    g = np.random.default_rng(4)
    s = SampleMatrix(np.abs(g.normal(size=(100, 3))), p=3)
    est = estimate_moments(s)
    assert len(bootstrap_first_step_set("MB", s, est, 0.001, 200, 3)) == 3

    x = g.normal(size=(100, 2))
    x[:, 0] = (x[:, 0] - x[:, 0].mean()) / x[:, 0].std() - 1.0  # sqrt(n) mu/sigma = -10
    s = SampleMatrix(x, p=2)
    est = estimate_moments(s)
    sel = bootstrap_first_step_set("EB", s, est, 0.001, 300, 3)
    assert 0 not in sel
    assert sel.rule == "bootstrap"
    with pytest.raises(ParameterError):
        bootstrap_first_step_set("EB", s, est, 0.025, 300, 3)


def test_mb_single_normal_column_near_gaussian_quantile():
    s = SampleMatrix(np.random.default_rng(5).normal(size=400), p=1)
    est = estimate_moments(s)
    c = bootstrap_critical_value("MB", s, est, None, 0.05, 2000, 11)
    assert abs(c - 1.645) <= 0.15


def test_mb_matches_direct_conditional_monte_carlo():
    n = 400
    s = SampleMatrix(np.random.default_rng(6).normal(size=n), p=1)
    est = estimate_moments(s)
    c = bootstrap_critical_value("MB", s, est, None, 0.05, 10_000, 12)
    z = (s.data[:, 0] - est.mu_hat[0]) / est.sigma_hat[0]
    g = np.random.default_rng(13)
    sims = np.concatenate([g.normal(size=(10_000, n)) @ z / math.sqrt(n) for _ in range(10)])
    assert abs(c - np.quantile(sims, 0.95)) <= 0.1
