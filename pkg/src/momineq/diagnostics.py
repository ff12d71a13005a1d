"""Sufficient conditions for the Lasso first step to dominate in power.

The SN conditions compare the Lasso penalty with the SN first-step quantile
(``highlevel``) or bound that comparison by primitives of ``(n, p, beta, M)``
(``lowlevel``). The bootstrap conditions bound the two-step bootstrap
selection. ``heatmap_grid`` evaluates the SN conditions over a ``(p, M)`` grid.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ._normal import norm_sf
from .errors import DegeneratePenaltyError, ParameterError
from .lasso_select import PenaltySpec, lambda_penalty
from .sn_critical import SNContext, sn_quantile

__all__ = [
    "PowerRegionQuery",
    "SNConditions",
    "BootConditions",
    "check_sn_conditions",
    "check_boot_conditions",
    "HeatmapGrid",
    "heatmap_grid",
]


@dataclass(frozen=True)
class PowerRegionQuery:
    """Inputs of the power conditions.

    Give either ``epsilon`` or ``C`` (then ``epsilon = C - 4/3``). ``M`` is
    the population moment norm; ``rho`` is the largest pairwise correlation,
    needed only by ``cond_2Ssuff2``.
    """

    n: int
    p: int
    beta_n: float
    M: float
    epsilon: float | None = None
    C: float | None = None
    delta: float = 1.0
    rho: float | None = None

    def __post_init__(self):
        if (self.epsilon is None) == (self.C is None):
            raise ParameterError("give exactly one of epsilon and C")
        if not self.eps > 0:
            raise ParameterError(f"epsilon={self.eps} must be positive (C > 4/3)")
        if not self.beta_n > 0:
            raise ParameterError(f"beta_n={self.beta_n} must be positive")
        if not self.M > 0:
            raise ParameterError(f"M={self.M} must be positive")
        if not 0.0 < self.delta <= 1.0:
            raise ParameterError(f"delta={self.delta} must lie in (0, 1]")
        if self.n < 2 or self.p < 1:
            raise ParameterError(f"need n >= 2 and p >= 1, got n={self.n}, p={self.p}")
        if self.rho is not None and not -1.0 <= self.rho <= 1.0:
            raise ParameterError(f"rho={self.rho} must lie in [-1, 1]")

    @property
    def eps(self) -> float:
        return self.epsilon if self.epsilon is not None else self.C - 4.0 / 3.0


@dataclass(frozen=True)
class SNConditions:
    highlevel: bool
    lowlevel: bool
    slack_high: float
    slack_low: float
    degenerate: bool
    lowlevel_clauses: tuple[bool, bool, bool]


@dataclass(frozen=True)
class BootConditions:
    cond_2Ssuff: bool
    cond_2Ssuff2: bool | None
    moment_clause: bool
    slack_2Ssuff: float
    slack_2Ssuff2: float | None


def _sn_conditions(n: int, p: int, beta_n: float, eps: float, delta: float,
                   M: float) -> SNConditions:
    # highlevel: (4/3) c_SN_1S(beta) >= sqrt(n) lambda
    # alpha does not enter sn_quantile; any admissible value will do
    c1 = sn_quantile(SNContext(n, p, p, alpha=0.25), p, beta_n)
    try:
        lam = lambda_penalty(PenaltySpec(mode="theoretical", epsilon=eps, delta=delta), n, M)
        slack_high = 4.0 / 3.0 * c1 - math.sqrt(n) * lam
        degenerate = False
    except DegeneratePenaltyError:
        # no admissible penalty: the comparison is vacuous
        slack_high, degenerate = math.inf, True
    high = slack_high >= 0

    first = beta_n <= 0.1
    second = M * M * n ** (2.0 / (2.0 + delta)) >= 2.0
    rhs = 9.0 / 8.0 * (4.0 / 3.0 + eps) ** 2 * n ** (delta / (2.0 + delta))
    rhs = rhs / (M * M) if M > 0 else math.inf
    slack_low = math.log(p / (2.0 * beta_n * math.sqrt(2.0 * math.pi))) - rhs
    third = slack_low >= 0
    return SNConditions(bool(high), bool(first and second and third), float(slack_high),
                        float(slack_low), degenerate, (first, second, third))


def check_sn_conditions(q: PowerRegionQuery) -> SNConditions:
    """Evaluate ``highlevel`` and ``lowlevel`` with their slacks.

    ``slack_high`` is ``(4/3) c_SN_1S(beta) - sqrt(n) lambda``; ``slack_low``
    is the margin of the logarithmic clause of ``lowlevel``. When the penalty
    is undefined for ``M`` the highlevel check is vacuous: it is reported as
    satisfied with ``degenerate=True``.
    """
    return _sn_conditions(q.n, q.p, q.beta_n, q.eps, q.delta, q.M)


def check_boot_conditions(q: PowerRegionQuery) -> BootConditions:
    """Evaluate the two sufficient conditions for the bootstrap comparison.

    With ``a = (3 / 2^1.5) (4/3 + eps) n^(delta/(2(2+delta))) / M``:
    ``cond_2Ssuff`` is ``1 - Phi(a) >= 3 beta``, and ``cond_2Ssuff2`` is
    ``sqrt((1-rho) log(p) / 2) - sqrt(2 log(1/(1 - 3 beta))) >= a`` (``None``
    without ``rho``). ``moment_clause`` is ``M^2 n^(2/(2+delta)) >= 2``.
    """
    if not 3.0 * q.beta_n < 1.0:
        raise ParameterError(f"beta_n={q.beta_n} must be below 1/3")
    a = (3.0 / 2.0 ** 1.5) * (4.0 / 3.0 + q.eps) * q.n ** (q.delta / (2.0 * (2.0 + q.delta))) / q.M
    slack1 = norm_sf(a) - 3.0 * q.beta_n
    slack2 = None
    if q.rho is not None:
        lhs = math.sqrt((1.0 - q.rho) * math.log(q.p) / 2.0) \
            - math.sqrt(2.0 * math.log(1.0 / (1.0 - 3.0 * q.beta_n)))
        slack2 = lhs - a
    moment = q.M * q.M * q.n ** (2.0 / (2.0 + q.delta)) >= 2.0
    return BootConditions(bool(slack1 >= 0), None if slack2 is None else bool(slack2 >= 0),
                          bool(moment), float(slack1), slack2)


@dataclass(frozen=True)
class HeatmapGrid:
    """SN conditions on a (p, M) grid; arrays are indexed ``[i_p, i_M]``."""

    p_values: np.ndarray
    M_values: np.ndarray
    highlevel: np.ndarray
    lowlevel: np.ndarray
    slack_high: np.ndarray
    slack_low: np.ndarray
    degenerate: np.ndarray

    def highlevel_failure_fraction(self) -> float:
        return float(np.mean(~self.highlevel))

    def nesting_violations(self) -> int:
        """Cells where lowlevel holds but highlevel does not."""
        return int(np.sum(self.lowlevel & ~self.highlevel))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "M", "highlevel", "lowlevel", "slack_high", "slack_low", "degenerate"])
        for i, p in enumerate(self.p_values):
            for j, m in enumerate(self.M_values):
                w.writerow([int(p), f"{m:.10g}", int(self.highlevel[i, j]),
                            int(self.lowlevel[i, j]), f"{self.slack_high[i, j]:.10g}",
                            f"{self.slack_low[i, j]:.10g}", int(self.degenerate[i, j])])
        return buf.getvalue()


def heatmap_grid(n: int = 400, beta_n: float = 0.001, C: float = 2.0, delta: float = 1.0,
                 M_range=(0.0, 10.0), p_range=(1, 1000), steps_p: int = 100,
                 steps_M: int = 101) -> HeatmapGrid:
    """SN power conditions on an evenly spaced grid (p rounded to integers)."""
    if steps_p < 2 or steps_M < 2:
        raise ParameterError("need at least 2 steps per axis")
    eps = C - 4.0 / 3.0
    if not eps > 0:
        raise ParameterError(f"C={C} must exceed 4/3")
    if not beta_n > 0:
        raise ParameterError(f"beta_n={beta_n} must be positive")
    lo_p, hi_p = int(p_range[0]), int(p_range[1])
    if lo_p < 1 or hi_p <= lo_p:
        raise ParameterError(f"invalid p range {p_range}")
    p_values = np.round(np.linspace(lo_p, hi_p, steps_p)).astype(int)
    if np.unique(p_values).size != steps_p:
        raise ParameterError(f"steps_p={steps_p} exceeds the number of integers in {p_range}")
    lo_m, hi_m = float(M_range[0]), float(M_range[1])
    if lo_m < 0 or hi_m <= lo_m:
        raise ParameterError(f"invalid M range {M_range}")
    M_values = np.linspace(lo_m, hi_m, steps_M)

    shape = (steps_p, steps_M)
    hi, lo, deg = (np.zeros(shape, bool) for _ in range(3))
    s_hi, s_lo = np.zeros(shape), np.zeros(shape)
    for i, p in enumerate(p_values):
        for j, m in enumerate(M_values):
            r = _sn_conditions(n, int(p), beta_n, eps, delta, float(m))
            hi[i, j], lo[i, j], deg[i, j] = r.highlevel, r.lowlevel, r.degenerate
            s_hi[i, j], s_lo[i, j] = r.slack_high, r.slack_low
    return HeatmapGrid(p_values, M_values, hi, lo, s_hi, s_lo, deg)
