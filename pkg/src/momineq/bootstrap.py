"""Multiplier (MB) and empirical (EB) bootstrap critical values.

All draws for one sample are generated once and kept as a ``B x k`` matrix of
studentized bootstrap sums. Critical values for any inequality subset ``J``
are then per-draw maxima over the columns in ``J`` (plus the absolute
equality columns), so nested subsets give ordered critical values draw by
draw.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .errors import ParameterError, ShapeError
from .lasso_select import SelectionSet
from .moments import MomentEstimates, SampleMatrix

__all__ = [
    "KINDS",
    "BootstrapDraws",
    "BootstrapScores",
    "draw_scores",
    "mb_statistic",
    "eb_statistic",
    "bootstrap_quantile",
    "bootstrap_critical_value",
    "bootstrap_first_step_set",
]

KINDS = ("MB", "EB")


def _check_kind(kind: str) -> str:
    kind = kind.upper()
    if kind not in KINDS:
        raise ParameterError(f"unknown bootstrap kind {kind!r}")
    return kind


def _standardized(sample: SampleMatrix, est: MomentEstimates) -> np.ndarray:
    """``(X - mu_hat) / sigma_hat``; constant columns become zeros (0/0 = 0)."""
    sigma = est.sigma_hat
    safe = np.where(sigma > 0, sigma, 1.0)
    z = (sample.data - est.mu_hat) / safe
    z[:, sigma == 0] = 0.0
    return z


def _as_mask(J, p: int) -> np.ndarray:
    if J is None:
        return np.ones(p, dtype=bool)
    if isinstance(J, SelectionSet):
        if J.p != p:
            raise ShapeError(f"selection over p={J.p} used with p={p}")
        return J.mask
    mask = np.zeros(p, dtype=bool)
    mask[np.asarray(J, dtype=np.intp)] = True
    return mask


def _max_stat(sums: np.ndarray, mask: np.ndarray, p: int) -> np.ndarray:
    """Per-row max over selected inequalities and |equalities|; -inf if empty."""
    sums = np.atleast_2d(sums)
    out = np.full(sums.shape[0], -np.inf)
    if mask.any():
        out = np.maximum(out, sums[:, :p][:, mask].max(axis=1))
    if sums.shape[1] > p:
        out = np.maximum(out, np.abs(sums[:, p:]).max(axis=1))
    return out


def mb_statistic(sample: SampleMatrix, est: MomentEstimates, J, multipliers) -> float:
    """One multiplier-bootstrap realization for given multipliers ``eps``."""
    eps = np.asarray(multipliers, dtype=float)
    if eps.shape != (sample.n,):
        raise ShapeError(f"need {sample.n} multipliers, got shape {eps.shape}")
    sums = eps @ _standardized(sample, est) / math.sqrt(sample.n)
    return float(_max_stat(sums, _as_mask(J, sample.p), sample.p)[0])


def eb_statistic(sample: SampleMatrix, est: MomentEstimates, J, resample_indices) -> float:
    """One empirical-bootstrap realization for 0-based resample indices."""
    idx = np.asarray(resample_indices)
    if idx.shape != (sample.n,):
        raise ShapeError(f"need {sample.n} resample indices, got shape {idx.shape}")
    if not np.issubdtype(idx.dtype, np.integer) or idx.min() < 0 or idx.max() >= sample.n:
        raise ShapeError("resample indices must be integers in [0, n)")
    sigma = est.sigma_hat
    centered = (sample.data[idx] - est.mu_hat).sum(axis=0)
    sums = np.where(sigma > 0, centered / np.where(sigma > 0, sigma, 1.0), 0.0)
    sums = sums / math.sqrt(sample.n)
    return float(_max_stat(sums, _as_mask(J, sample.p), sample.p)[0])


@dataclass(frozen=True)
class BootstrapDraws:
    """Realized bootstrap statistics W for one inequality subset, sorted."""

    statistics: np.ndarray
    kind: str
    restricted_to: SelectionSet | None
    seed: int | None
    B: int

    def __post_init__(self):
        stats = np.sort(np.asarray(self.statistics, dtype=float))
        if stats.size != self.B or self.B < 1:
            raise ShapeError(f"expected B={self.B} statistics, got {stats.size}")
        stats.setflags(write=False)
        object.__setattr__(self, "statistics", stats)

    def quantile(self, level: float) -> float:
        return bootstrap_quantile(self, level)


def bootstrap_quantile(draws, level: float) -> float:
    """The ceil(B * (1 - level))-th smallest draw (1-based order statistic)."""
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level={level} must lie in (0, 1)")
    stats = draws.statistics if isinstance(draws, BootstrapDraws) else np.sort(
        np.asarray(draws, dtype=float))
    B = stats.size
    if B < 1:
        raise ParameterError("no bootstrap draws")
    # round away representation noise such as 300 * 0.95 = 285.00000000000006
    rank = math.ceil(round(B * (1.0 - level), 9))
    rank = min(max(rank, 1), B)
    return float(stats[rank - 1])


@dataclass(frozen=True)
class BootstrapScores:
    """Shared draws: studentized bootstrap sums, one row per draw."""

    scores: np.ndarray
    kind: str
    p: int
    seed: int | None
    B: int

    def restrict(self, J=None) -> BootstrapDraws:
        mask = _as_mask(J, self.p)
        stats = _max_stat(self.scores, mask, self.p)
        sel = J if isinstance(J, SelectionSet) else (
            None if J is None else SelectionSet(np.flatnonzero(mask), "given", math.nan, self.p))
        return BootstrapDraws(stats, self.kind, sel, self.seed, self.B)

    def critical_value(self, J, level: float) -> float:
        return bootstrap_quantile(self.restrict(J), level)


def draw_scores(kind: str, sample: SampleMatrix, est: MomentEstimates, B: int,
                seed: int, key: tuple = ()) -> BootstrapScores:
    """Generate B bootstrap draws from the stream keyed by ``(seed, *key, kind)``.

    MB multipliers are standard normals by inversion; EB resamples are uniform
    indices with replacement, applied through per-draw multiplicity counts.
    """
    kind = _check_kind(kind)
    if int(B) < 1:
        raise ParameterError(f"B={B} must be at least 1")
    B = int(B)
    n = sample.n
    z = _standardized(sample, est)
    gen = _rng.stream(seed, *key, _rng.purpose(kind))
    if kind == "MB":
        weights = _rng.standard_normal(gen, (B, n))
    else:
        idx = gen.integers(0, n, size=(B, n))
        flat = idx + (np.arange(B) * n)[:, None]
        weights = np.bincount(flat.ravel(), minlength=B * n).reshape(B, n).astype(float)
    scores = weights @ z / math.sqrt(n)
    scores.setflags(write=False)
    return BootstrapScores(scores, kind, sample.p, seed, B)


def bootstrap_critical_value(kind: str, sample: SampleMatrix, est: MomentEstimates,
                             J, level: float, B: int, seed: int) -> float:
    """Conditional (1-level) bootstrap quantile of W restricted to ``J``.

    ``J=None`` means all p inequalities. The same ``(sample, kind, B, seed)``
    always reproduces the same draws, so different ``J`` share them.
    """
    if seed is None:
        raise ParameterError("bootstrap critical values need a seed")
    if int(B) < 1:
        raise ParameterError(f"B={B} must be at least 1")
    if B < 100:
        warnings.warn(f"B={B} bootstrap draws is below 100", stacklevel=2)
    return draw_scores(kind, sample, est, B, seed).critical_value(J, level)


def _bootstrap_cut_set(scores: BootstrapScores, est: MomentEstimates, n: int,
                       beta_n: float) -> SelectionSet:
    c1 = scores.critical_value(None, beta_n)
    cut = -2.0 * c1 / math.sqrt(n)
    ratios = est.ratios()[: scores.p]
    return SelectionSet.from_mask(ratios > cut, "bootstrap", cut)


def bootstrap_first_step_set(kind: str, sample: SampleMatrix, est: MomentEstimates,
                             beta_n: float, B: int, seed: int,
                             alpha: float = 0.05) -> SelectionSet:
    """Keep ``j`` with ``sqrt(n) mu_j/sigma_j > -2 c_B_1S(beta_n)``."""
    if not 0.0 < beta_n < alpha / 2.0:
        raise ParameterError(
            f"beta_n={beta_n} must lie in (0, alpha/2) = (0, {alpha / 2:.6g})")
    scores = draw_scores(kind, sample, est, B, seed)
    return _bootstrap_cut_set(scores, est, sample.n, beta_n)
