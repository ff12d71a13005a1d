"""The eleven inference methods, test decisions and confidence sets.

A method id is ``<family>-<step>``: family is SN, MB or EB (how the second
step critical value is computed) and step is 1S (no selection), 2S (selection
by the family's own first step), H (SN selection, bootstrap second step) or
Lasso (Lasso selection).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import rng as _rng
from .bootstrap import BootstrapScores, _bootstrap_cut_set, draw_scores
from .errors import ParameterError
from .lasso_select import PenaltySpec, SelectionSet, lambda_penalty, select_lasso
from .moments import MomentEstimates, SampleMatrix, estimate_moments, test_statistic
from .sn_critical import SNContext, _sn_cut_set, sn_quantile

__all__ = [
    "METHOD_IDS",
    "MethodSpec",
    "TestOutcome",
    "SampleCache",
    "run_method",
    "run_methods",
    "ConfidenceSetResult",
    "confidence_set",
]

METHOD_IDS = ("SN-Lasso", "MB-Lasso", "EB-Lasso", "SN-1S", "SN-2S",
              "MB-1S", "MB-H", "MB-2S", "EB-1S", "EB-H", "EB-2S")
_BETA_STEPS = ("2S", "H")


@dataclass(frozen=True)
class MethodSpec:
    """One inference method with its tuning.

    ``beta_n`` is required exactly for SN-2S and the bootstrap two-step and
    hybrid methods, ``penalty`` exactly for the Lasso methods, ``B`` and
    ``seed`` exactly for the bootstrap families.
    """

    id: str
    alpha: float = 0.05
    beta_n: float | None = None
    penalty: PenaltySpec | None = None
    B: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.id not in METHOD_IDS:
            raise ParameterError(f"unknown method id {self.id!r}")
        if not 0.0 < self.alpha < 0.5:
            raise ParameterError(f"alpha={self.alpha} must lie in (0, 0.5)")
        needs_beta = self.step in _BETA_STEPS
        if needs_beta != (self.beta_n is not None):
            raise ParameterError(
                f"{self.id}: beta_n is {'required' if needs_beta else 'not allowed'}")
        if needs_beta:
            bound = self.alpha / 3.0 if self.family == "SN" else self.alpha / 2.0
            if not 0.0 < self.beta_n < bound:
                raise ParameterError(
                    f"{self.id}: beta_n={self.beta_n} must lie in (0, {bound:.6g})")
        needs_pen = self.step == "Lasso"
        if needs_pen != (self.penalty is not None):
            raise ParameterError(
                f"{self.id}: penalty is {'required' if needs_pen else 'not allowed'}")
        if self.bootstrap:
            if self.B is None or int(self.B) < 1:
                raise ParameterError(f"{self.id}: B must be a positive draw count")
            if self.seed is None:
                raise ParameterError(f"{self.id}: a seed is mandatory for bootstrap methods")
        elif self.B is not None:
            raise ParameterError(f"{self.id}: B is only used by bootstrap methods")

    @property
    def family(self) -> str:
        return self.id.split("-")[0]

    @property
    def step(self) -> str:
        return self.id.split("-")[1]

    @property
    def bootstrap(self) -> bool:
        return self.family in ("MB", "EB")

    def tuning_label(self) -> str:
        if self.penalty is not None:
            return self.penalty.label()
        if self.beta_n is not None:
            return f"beta={100 * self.beta_n:g}%"
        return ""

    @property
    def label(self) -> str:
        t = self.tuning_label()
        return f"{self.id}({t})" if t else self.id

    def with_seed(self, seed: int | None) -> "MethodSpec":
        if not self.bootstrap:
            return self
        return MethodSpec(self.id, self.alpha, self.beta_n, self.penalty, self.B, seed)


@dataclass(frozen=True)
class TestOutcome:
    """Decision of one method on one sample; ``selection=None`` is the full set."""

    method: str
    alpha: float
    statistic: float
    critical_value: float
    reject: bool
    selection: SelectionSet | None
    retained: int
    tuning: float | None
    seed: int | None
    label: str = ""

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "alpha": self.alpha,
            "statistic": _json_real(self.statistic),
            "critical_value": _json_real(self.critical_value),
            "reject": self.reject,
            "retained": self.retained,
            "tuning": self.tuning,
            "seed": self.seed,
        }


TestOutcome.__test__ = False


def _json_real(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class SampleCache:
    """Quantities shared by several methods on one sample.

    Moment estimates are kept per moment order, bootstrap draws per
    ``(kind, B, seed)``, so methods evaluated together see identical draws.
    """

    sample: SampleMatrix
    _est: dict = field(default_factory=dict)
    _scores: dict = field(default_factory=dict)

    def estimates(self, delta: float = 1.0) -> MomentEstimates:
        if delta not in self._est:
            self._est[delta] = estimate_moments(self.sample, delta)
        return self._est[delta]

    def scores(self, kind: str, B: int, seed: int) -> BootstrapScores:
        key = (kind, int(B), int(seed))
        if key not in self._scores:
            self._scores[key] = draw_scores(kind, self.sample, self.estimates(), int(B), seed)
        return self._scores[key]


def _selection(spec: MethodSpec, cache: SampleCache, ctx: SNContext):
    """First-step set and its tuning value (lambda or beta_n)."""
    est = cache.estimates()
    n, p = cache.sample.n, cache.sample.p
    if spec.step == "1S":
        return None, None
    if spec.step == "Lasso":
        pen_est = cache.estimates(spec.penalty.moment_delta)
        lam = lambda_penalty(spec.penalty, n, pen_est.m_hat)
        return select_lasso(est, p, lam), lam
    if spec.step == "H" or spec.family == "SN":
        return _sn_cut_set(est, ctx, spec.beta_n), spec.beta_n
    scores = cache.scores(spec.family, spec.B, spec.seed)
    return _bootstrap_cut_set(scores, est, n, spec.beta_n), spec.beta_n


def _evaluate(spec: MethodSpec, cache: SampleCache) -> TestOutcome:
    sample = cache.sample
    est = cache.estimates()
    ctx = SNContext(sample.n, sample.k, sample.p, spec.alpha)
    selection, tuning = _selection(spec, cache, ctx)
    level = spec.alpha - 2.0 * spec.beta_n if spec.step in _BETA_STEPS else spec.alpha
    d = sample.p if selection is None else len(selection)
    if spec.family == "SN":
        cv = sn_quantile(ctx, d, level)
    else:
        cv = cache.scores(spec.family, spec.B, spec.seed).critical_value(selection, level)
        if cv == -math.inf:
            # no retained inequality and no equality: nothing left to test,
            # same convention as the SN quantile with zero moments
            cv = 0.0
    stat = test_statistic(est, sample.n, sample.p)
    return TestOutcome(spec.id, spec.alpha, stat, float(cv), bool(stat > cv), selection,
                       d, tuning, spec.seed if spec.bootstrap else None, spec.label)


def run_method(spec: MethodSpec, sample: SampleMatrix) -> TestOutcome:
    """Test decision of one method: reject iff the statistic exceeds its critical value."""
    return _evaluate(spec, SampleCache(sample))


def run_methods(specs: Sequence[MethodSpec], sample: SampleMatrix) -> list[TestOutcome]:
    """Evaluate several methods on one sample, sharing estimates and draws."""
    cache = SampleCache(sample)
    return [_evaluate(s, cache) for s in specs]


@dataclass(frozen=True)
class ConfidenceSetResult:
    """Retained grid points plus every per-point outcome or failure message."""

    retained: list
    outcomes: list
    failures: dict

    def retained_indices(self) -> list[int]:
        return [i for i, o in enumerate(self.outcomes) if o is not None and not o.reject]


def confidence_set(spec: MethodSpec, grid: Sequence, provider: Callable[[Any], SampleMatrix],
                   threads: int = 1) -> ConfidenceSetResult:
    """Collect the grid points where ``spec`` does not reject.

    The sample at each point comes from ``provider(theta)``. Bootstrap seeds
    are derived from ``(spec.seed, index)``, so methods sharing a seed share
    draws at each point. A point whose provider or test fails is recorded in
    ``failures`` and left out of the set.
    """
    grid = list(grid)
    if not grid:
        raise ParameterError("confidence set grid is empty")

    def one(i: int):
        seed = _rng.derive_seed(spec.seed, i) if spec.bootstrap else None
        try:
            return run_method(spec.with_seed(seed), provider(grid[i])), None
        except Exception as exc:  # recorded per point, scan continues
            return None, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(len(grid))))
    else:
        results = [one(i) for i in range(len(grid))]
    outcomes = [r[0] for r in results]
    failures = {i: r[1] for i, r in enumerate(results) if r[1] is not None}
    retained = [grid[i] for i, o in enumerate(outcomes) if o is not None and not o.reject]
    return ConfidenceSetResult(retained, outcomes, failures)
