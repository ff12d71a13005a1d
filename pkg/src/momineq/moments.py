"""Sample container, moment estimates and the Studentized max statistic.

Extended reals are plain Python floats: ``math.inf`` and ``-math.inf`` order
totally against every finite value, which is all the engine needs.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, ShapeError

__all__ = [
    "SampleMatrix",
    "MomentEstimates",
    "estimate_moments",
    "studentize",
    "test_statistic",
    "read_sample_csv",
]


@dataclass(frozen=True)
class SampleMatrix:
    """n x k observations of the moment functions at one candidate parameter.

    The first ``p`` columns are inequality moments (null: mean <= 0), the last
    ``v = k - p`` are equality moments (null: mean == 0).
    """

    data: np.ndarray
    p: int

    def __post_init__(self):
        data = np.array(self.data, dtype=float, copy=True)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2:
            raise ShapeError(f"sample must be a 2-d array, got ndim={data.ndim}")
        n, k = data.shape
        if n < 2:
            raise ShapeError(f"need at least 2 observations, got n={n}")
        if k < 1:
            raise ShapeError("need at least one moment column")
        p = int(self.p)
        if not 0 <= p <= k:
            raise ParameterError(f"p={self.p} must lie in [0, k={k}]")
        if not np.all(np.isfinite(data)):
            raise ParameterError("sample contains NaN or infinite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[1]

    @property
    def v(self) -> int:
        return self.k - self.p


@dataclass(frozen=True)
class MomentEstimates:
    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    m_hat: float
    delta: float

    @property
    def k(self) -> int:
        return self.mu_hat.shape[0]

    def ratios(self) -> np.ndarray:
        """Per-coordinate mu_hat / sigma_hat under the C/0 convention."""
        return studentize(self.mu_hat, self.sigma_hat)


def studentize(num, den):
    """Elementwise ``num / den`` with C/0 = +inf (C>0), -inf (C<0), 0 (C=0)."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0),
                       np.sign(num) * np.inf)
    out = np.where((den <= 0) & (num == 0), 0.0, out)
    return out


def _column_sums(cols_t: np.ndarray) -> np.ndarray:
    # rows of cols_t are contiguous columns of the sample: numpy reduces them
    # with pairwise summation
    return cols_t.sum(axis=1)


def estimate_moments(sample: SampleMatrix, delta: float = 1.0) -> MomentEstimates:
    """Sample means, divide-by-n standard deviations and the moment norm.

    ``m_hat`` is ``max_j (mean_i |X_ij|^(2+delta))^(1/(2+delta))`` over all k
    columns, evaluated at this sample only.
    """
    if not 0.0 < delta <= 1.0:
        raise ParameterError(f"delta={delta} must lie in (0, 1]")
    n = sample.n
    cols = np.ascontiguousarray(sample.data.T)
    mu = _column_sums(cols) / n
    centered = cols - mu[:, None]
    sigma = np.sqrt(_column_sums(centered * centered) / n)

    # constant columns: force exact mean and zero spread, rounding in the
    # mean would otherwise leave a spurious tiny sigma
    const = cols.max(axis=1) == cols.min(axis=1)
    if np.any(const):
        mu = np.where(const, cols[:, 0], mu)
        sigma = np.where(const, 0.0, sigma)

    order = 2.0 + delta
    m_hat = float(np.max((_column_sums(np.abs(cols) ** order) / n) ** (1.0 / order)))
    mu.setflags(write=False)
    sigma.setflags(write=False)
    return MomentEstimates(mu_hat=mu, sigma_hat=sigma, m_hat=m_hat, delta=float(delta))


def test_statistic(est: MomentEstimates, n: int, p: int) -> float:
    """Studentized max statistic over inequality and |equality| coordinates."""
    if not 0 <= p <= est.k:
        raise ParameterError(f"p={p} inconsistent with k={est.k}")
    root_n = math.sqrt(n)
    terms = []
    if p > 0:
        terms.append(np.max(root_n * est.ratios()[:p]))
    if p < est.k:
        eq = studentize(np.abs(est.mu_hat[p:]), est.sigma_hat[p:])
        terms.append(np.max(root_n * eq))
    return float(max(terms))


# keep pytest from collecting the function above when imported in tests
test_statistic.__test__ = False


def read_sample_csv(path, p: int | None = None) -> SampleMatrix:
    """Load a sample from CSV (one row per observation, header optional).

    ``p`` comes from the argument or, failing that, from a sidecar
    ``<path>.json`` holding ``{"p": ...}``.
    """
    path = Path(path)
    if p is None:
        sidecar = path.with_name(path.name + ".json")
        if not sidecar.exists():
            raise ParameterError(
                f"number of inequalities not given and no sidecar {sidecar.name}")
        p = int(json.loads(sidecar.read_text())["p"])
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ShapeError(f"{path} holds no data rows")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ParameterError(f"{path}: non-numeric entry ({exc})") from None
    return SampleMatrix(data, p)
