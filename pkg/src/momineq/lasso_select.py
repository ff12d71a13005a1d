"""Lasso penalty, soft thresholding and the Lasso first-step selection.

With a diagonal weighting ``diag(1/sigma_j^2)`` the p-dimensional Lasso splits
into p scalar problems ``argmin_m (mu_j - m)^2 + lam * sigma_j * |m|``, each
solved by soft thresholding at ``sigma_j * lam / 2``. The selected set keeps
the coordinates whose shrunk estimate satisfies ``mu_L / sigma >= -lam``,
which reduces to ``mu / sigma >= -1.5 * lam``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePenaltyError, ParameterError
from .moments import MomentEstimates, studentize

__all__ = [
    "PenaltySpec",
    "SelectionSet",
    "lambda_penalty",
    "soft_threshold",
    "select_lasso",
    "select_lasso_argmin_oracle",
]


@dataclass(frozen=True)
class PenaltySpec:
    """How to compute the Lasso penalty.

    ``mode="theoretical"`` uses ``(4/3 + epsilon)`` with moment order
    ``2 + delta``; ``mode="monte-carlo"`` uses ``c_factor`` with third
    moments. At ``delta=1`` the two agree when ``c_factor = 4/3 + epsilon``.
    ``lambda_mc_exponent`` selects the outer exponent in monte-carlo mode;
    ``-0.5`` is the default, ``-1.0`` reproduces the alternative reading.
    """

    mode: str = "monte-carlo"
    epsilon: float | None = None
    c_factor: float | None = None
    delta: float = 1.0
    lambda_mc_exponent: float = -0.5

    def __post_init__(self):
        if self.mode == "theoretical":
            if self.epsilon is None or not self.epsilon > 0:
                raise ParameterError("theoretical penalty needs epsilon > 0")
        elif self.mode == "monte-carlo":
            if self.c_factor is None or not self.c_factor > 0:
                raise ParameterError("monte-carlo penalty needs c_factor > 0")
        else:
            raise ParameterError(f"unknown penalty mode {self.mode!r}")
        if not 0.0 < self.delta <= 1.0:
            raise ParameterError(f"delta={self.delta} must lie in (0, 1]")
        if self.lambda_mc_exponent not in (-0.5, -1.0):
            raise ParameterError("lambda_mc_exponent must be -0.5 or -1.0")

    @classmethod
    def from_c(cls, c: float, **kw) -> "PenaltySpec":
        return cls(mode="monte-carlo", c_factor=float(c), **kw)

    @property
    def moment_delta(self) -> float:
        """Moment order minus two used when estimating the moment norm."""
        return self.delta if self.mode == "theoretical" else 1.0

    def label(self) -> str:
        if self.mode == "theoretical":
            return f"eps={self.epsilon:g}"
        return f"C={self.c_factor:g}"


@dataclass(frozen=True)
class SelectionSet:
    """Retained inequality coordinates (0-based, sorted) out of ``p``."""

    indices: np.ndarray
    rule: str
    threshold: float
    p: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= self.p):
            raise ParameterError("selection indices fall outside [0, p)")
        if np.unique(idx).size != idx.size:
            raise ParameterError("selection indices contain duplicates")
        idx = np.sort(idx)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def full(cls, p: int, rule: str = "full") -> "SelectionSet":
        return cls(np.arange(p), rule, -math.inf, p)

    @classmethod
    def from_mask(cls, mask, rule: str, threshold: float) -> "SelectionSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(np.flatnonzero(mask), rule, float(threshold), mask.size)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __contains__(self, j) -> bool:
        return bool(np.any(self.indices == j))

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.p, dtype=bool)
        m[self.indices] = True
        return m

    def issubset(self, other: "SelectionSet") -> bool:
        return bool(np.all(np.isin(self.indices, other.indices)))

    @property
    def fraction(self) -> float:
        return len(self) / self.p if self.p else 0.0


def lambda_penalty(spec: PenaltySpec, n: int, m_hat: float) -> float:
    """Penalty level for the Lasso first step.

    theoretical: ``(4/3+eps) n^-1/2 (m^2 n^(-d/(2+d)) - 1/n)^-1/2``;
    monte-carlo: ``C n^-1/2 (m^2 n^-1/3 - 1/n)^e`` with ``e`` from the spec.
    """
    if spec.mode == "theoretical":
        factor = 4.0 / 3.0 + spec.epsilon
        d = spec.delta
        exponent = -0.5
    else:
        factor = spec.c_factor
        d = 1.0
        exponent = spec.lambda_mc_exponent
    radicand = m_hat * m_hat * n ** (-d / (2.0 + d)) - 1.0 / n
    if not radicand > 0:
        raise DegeneratePenaltyError(
            f"penalty undefined: m_hat={m_hat!r} too small for n={n} "
            f"(m_hat^2 n^(-{d:g}/{2 + d:g}) - 1/n = {radicand:.3g} <= 0)")
    return float(factor / math.sqrt(n) * radicand ** exponent)


def soft_threshold(mu_hat, sigma_hat, lam):
    """Scalar Lasso estimate ``sign(mu) * max(|mu| - sigma*lam/2, 0)``."""
    mu_hat = np.asarray(mu_hat, dtype=float)
    out = np.sign(mu_hat) * np.maximum(np.abs(mu_hat) - np.asarray(sigma_hat) * lam / 2.0, 0.0)
    return float(out) if out.ndim == 0 else out


def select_lasso(est: MomentEstimates, p: int, lam: float) -> SelectionSet:
    """Closed-form Lasso selection ``{j <= p : mu_j/sigma_j >= -1.5 lam}``."""
    if p > est.k:
        raise ParameterError(f"p={p} exceeds the {est.k} estimated coordinates")
    cut = -1.5 * lam
    # sigma == 0 goes through the C/0 convention: kept iff mu >= 0
    ratios = studentize(est.mu_hat[:p], est.sigma_hat[:p])
    return SelectionSet.from_mask(ratios >= cut, "lasso", cut)


def _penalized(m, mu, s, lam):
    return (mu - m) ** 2 + lam * s * np.abs(m)


def _grid_argmin(mu, s, lam, width, step, levels):
    # brute-force minimization of the scalar Lasso objective; the objective is
    # convex, so successively finer grids around the incumbent stay valid
    center, half = mu, width
    for _ in range(levels):
        count = int(math.ceil(2 * half / step)) + 1
        grid = np.linspace(center - half, center + half, count)
        grid = np.append(grid, 0.0)  # the kink
        values = _penalized(grid, mu, s, lam)
        center = grid[int(np.argmin(values))]
        half = 2 * step
        step = step / 1000.0
    return center


def select_lasso_argmin_oracle(est: MomentEstimates, p: int, lam: float,
                               grid_width: float = 1.0, grid_step: float | None = None,
                               levels: int = 3) -> SelectionSet:
    """Selection from grid-searched scalar Lasso problems (test oracle).

    Each coordinate's penalized least-squares problem is minimized on a grid
    over ``[mu - grid_width*sigma, mu + grid_width*sigma]`` with step
    ``grid_step*sigma`` (default ``1e-4*sigma``), then refined ``levels - 1``
    times on 1000x finer grids. Membership uses ``mu_L / sigma >= -lam``.
    """
    if not grid_width > 0:
        raise ParameterError("grid_width must be positive")
    if grid_step is None:
        grid_step = 1e-4
    if not 0 < grid_step <= 1e-4:
        raise ParameterError("grid_step must lie in (0, 1e-4] (units of sigma)")
    if grid_width < 0.5 * lam:
        raise ParameterError("grid_width must cover the shrinkage sigma*lam/2")
    if levels < 1:
        raise ParameterError("levels must be at least 1")
    keep = np.zeros(p, dtype=bool)
    for j in range(p):
        mu, s = float(est.mu_hat[j]), float(est.sigma_hat[j])
        if s == 0.0:
            # objective reduces to (mu - m)^2, minimized at mu
            keep[j] = mu >= 0.0
            continue
        m_l = _grid_argmin(mu, s, lam, grid_width * s, grid_step * s, levels)
        keep[j] = m_l / s >= -lam
    return SelectionSet.from_mask(keep, "lasso", -lam)
