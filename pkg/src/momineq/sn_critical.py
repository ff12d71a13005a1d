"""Self-normalized (SN) critical values and the SN first-step selection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._normal import norm_ppf
from .errors import ParameterError, SampleTooSmallError
from .lasso_select import SelectionSet, select_lasso
from .moments import MomentEstimates

__all__ = ["SNContext", "sn_quantile", "sn_quantile_curve", "sn_first_step_set",
           "sn_critical_value"]


@dataclass(frozen=True)
class SNContext:
    n: int
    k: int
    p: int
    alpha: float = 0.05

    def __post_init__(self):
        if not 0 <= self.p <= self.k:
            raise ParameterError(f"p={self.p} must lie in [0, k={self.k}]")
        if 2 * (self.k - self.p) + self.p < 1:
            raise ParameterError("model has no moment conditions")
        if not 0.0 < self.alpha < 0.5:
            raise ParameterError(f"alpha={self.alpha} must lie in (0, 0.5)")

    @property
    def v(self) -> int:
        return self.k - self.p


def sn_quantile(ctx: SNContext, d: int, level: float) -> float:
    """SN approximation to the (1-level) quantile with d retained inequalities.

    With ``m = 2v + d`` moment conditions this is ``q / sqrt(1 - q^2/n)`` for
    ``q = Phi^-1(1 - level/m)``, and exactly 0 when ``m = 0``.
    """
    if not 0 <= d <= ctx.p:
        raise ParameterError(f"d={d} must lie in [0, p={ctx.p}]")
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level={level} must lie in (0, 1)")
    m = 2 * ctx.v + d
    if m == 0:
        return 0.0
    q = norm_ppf(1.0 - level / m)
    radicand = 1.0 - q * q / ctx.n
    if not radicand > 0:
        raise SampleTooSmallError(
            f"n={ctx.n} too small for SN correction: quantile {q:.6g} has q^2 >= n")
    return q / math.sqrt(radicand)


def _sn_cut_set(est: MomentEstimates, ctx: SNContext, beta_n: float) -> SelectionSet:
    c1 = sn_quantile(ctx, ctx.p, beta_n)
    cut = -2.0 * c1 / math.sqrt(ctx.n)
    ratios = est.ratios()[: ctx.p]
    # strict: ties at the cut are dropped
    return SelectionSet.from_mask(ratios > cut, "sn", cut)


def sn_first_step_set(est: MomentEstimates, ctx: SNContext, beta_n: float) -> SelectionSet:
    """Keep ``j`` with ``sqrt(n) mu_j/sigma_j > -2 c_SN_1S(beta_n)``.

    The recorded threshold is on the ``mu/sigma`` scale.
    """
    if not 0.0 < beta_n < ctx.alpha / 3.0:
        raise ParameterError(
            f"beta_n={beta_n} must lie in (0, alpha/3) = (0, {ctx.alpha / 3:.6g})")
    return _sn_cut_set(est, ctx, beta_n)


def sn_critical_value(method: str, est: MomentEstimates, ctx: SNContext,
                      tuning: float | None = None) -> float:
    """SN critical value for ``method`` in {"one-step", "two-step", "lasso"}.

    ``tuning`` is ``beta_n`` for two-step and the Lasso penalty for lasso.
    """
    if method == "one-step":
        return sn_quantile(ctx, ctx.p, ctx.alpha)
    if tuning is None:
        raise ParameterError(f"SN {method} critical value needs a tuning value")
    if method == "two-step":
        level = ctx.alpha - 2.0 * tuning
        if not level > 0:
            raise ParameterError("alpha - 2*beta_n must be positive")
        selected = sn_first_step_set(est, ctx, tuning)
        return sn_quantile(ctx, len(selected), level)
    if method == "lasso":
        selected = select_lasso(est, ctx.p, tuning)
        return sn_quantile(ctx, len(selected), ctx.alpha)
    raise ParameterError(f"unknown SN method {method!r}")


def sn_quantile_curve(ctx: SNContext, level: float) -> np.ndarray:
    """``sn_quantile`` for every d in 0..p, vectorized."""
    d = np.arange(ctx.p + 1)
    m = 2 * ctx.v + d
    out = np.zeros(d.size)
    pos = m > 0
    q = norm_ppf(1.0 - level / m[pos])
    radicand = 1.0 - q * q / ctx.n
    if np.any(radicand <= 0):
        raise SampleTooSmallError(f"n={ctx.n} too small for SN correction")
    out[pos] = q / np.sqrt(radicand)
    return out
