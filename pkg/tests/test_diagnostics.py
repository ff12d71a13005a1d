import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momineq import ParameterError
from momineq.diagnostics import (PowerRegionQuery, check_boot_conditions, check_sn_conditions,
                                 heatmap_grid)

# mpmath: (4/3) c_SN(d=200, level=0.001) - 20 * lambda(C=2, M=1) at n=400
SLACK_HIGH_EXAMPLE = 0.559148141623597384
# mpmath: a = (3/2^1.5) * 2 * 400^(1/6) / 10 and 1 - Phi(a)
BOOT_ARG = 0.575814931099945336
BOOT_TAIL = 0.282370140090545213


def test_highlevel_example():
    r = check_sn_conditions(PowerRegionQuery(400, 200, 0.001, 1.0, C=2.0))
    assert r.highlevel and not r.degenerate
    assert r.slack_high == pytest.approx(SLACK_HIGH_EXAMPLE, rel=1e-9)


def test_lowlevel_clause_failures():
    r = check_sn_conditions(PowerRegionQuery(400, 200, 0.001, 0.02, C=2.0))
    assert not r.lowlevel and not r.lowlevel_clauses[1]
    r = check_sn_conditions(PowerRegionQuery(400, 200, 0.2, 5.0, C=2.0))
    assert not r.lowlevel and not r.lowlevel_clauses[0]


def test_degenerate_penalty_is_vacuous():
    r = check_sn_conditions(PowerRegionQuery(400, 200, 0.001, 0.1, C=2.0))
    assert r.degenerate and r.highlevel and r.slack_high == math.inf


def test_query_validation():
    with pytest.raises(ParameterError):
        PowerRegionQuery(400, 10, 0.001, 1.0)
    with pytest.raises(ParameterError):
        PowerRegionQuery(400, 10, 0.001, 1.0, C=2.0, epsilon=1.0)
    with pytest.raises(ParameterError):
        PowerRegionQuery(400, 10, 0.001, 1.0, C=1.0)
    with pytest.raises(ParameterError):
        PowerRegionQuery(400, 10, 0.0, 1.0, C=2.0)
    with pytest.raises(ParameterError):
        PowerRegionQuery(400, 10, 0.001, 0.0, C=2.0)


def test_boot_condition_example():
    r = check_boot_conditions(PowerRegionQuery(400, 200, 0.001, 10.0, epsilon=2 / 3))
    assert r.cond_2Ssuff and r.cond_2Ssuff2 is None and r.moment_clause
    assert r.slack_2Ssuff == pytest.approx(BOOT_TAIL - 0.003, rel=1e-9)


def test_boot_condition_small_beta():
    r = check_boot_conditions(PowerRegionQuery(400, 200, 1e-12, 10.0, epsilon=2 / 3))
    assert r.cond_2Ssuff


def test_boot_condition_perfect_correlation():
    r = check_boot_conditions(PowerRegionQuery(400, 1000, 0.001, 10.0, epsilon=2 / 3, rho=1.0))
    assert r.cond_2Ssuff2 is False
    lhs = -math.sqrt(2 * math.log(1 / (1 - 0.003)))
    assert r.slack_2Ssuff2 == pytest.approx(lhs - BOOT_ARG, rel=1e-9)


def test_default_grid_shape_and_nesting():
    g = heatmap_grid()
    assert g.highlevel.shape == (100, 101)
    assert g.p_values[0] == 1 and g.p_values[-1] == 1000
    assert g.M_values[0] == 0.0 and g.M_values[-1] == 10.0
    assert g.nesting_violations() == 0
    assert np.all(g.degenerate[:, 0])
    assert 0.0 < g.highlevel_failure_fraction() < 0.1
    lines = g.to_csv().splitlines()
    assert lines[0] == "p,M,highlevel,lowlevel,slack_high,slack_low,degenerate"
    assert len(lines) == 1 + 100 * 101


def test_grid_validation():
    with pytest.raises(ParameterError):
        heatmap_grid(steps_p=1)
    with pytest.raises(ParameterError):
        heatmap_grid(C=1.0)
    with pytest.raises(ParameterError):
        heatmap_grid(p_range=(1, 10), steps_p=20)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5000), st.floats(0.05, 20.0), st.sampled_from([1e-4, 1e-3, 0.01, 0.1]),
       st.floats(1.4, 8.0), st.sampled_from([100, 400, 2000]))
def test_lowlevel_implies_highlevel(p, M, beta, C, n):
    r = check_sn_conditions(PowerRegionQuery(n, p, beta, M, C=C))
    assert not r.lowlevel or r.highlevel


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000), st.floats(0.05, 20.0), st.floats(0.0, 5.0))
def test_log_clause_monotone_in_m(p, M, dm):
    a = check_sn_conditions(PowerRegionQuery(400, p, 0.001, M, C=2.0))
    b = check_sn_conditions(PowerRegionQuery(400, p, 0.001, M + dm, C=2.0))
    assert b.slack_low >= a.slack_low
