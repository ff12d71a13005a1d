"""Simulation designs and the Monte Carlo engine.

Samples follow ``X_i = mu + A^T eps_i`` with ``A^T A = Sigma`` and i.i.d.
standardized errors. Every replication draws from its own counter-based
stream keyed by ``(seed, design, p, rho, error law, replication)``, so the
report does not depend on how replications are spread over workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import rng as _rng
from .errors import ParameterError
from .lasso_select import PenaltySpec
from .methods import MethodSpec, run_methods
from .moments import SampleMatrix

__all__ = [
    "DESIGNS",
    "ERROR_LAWS",
    "DesignSpec",
    "make_sigma",
    "make_mu",
    "draw_errors",
    "generate_sample",
    "default_methods",
    "MonteCarloConfig",
    "CellResult",
    "SimulationReport",
    "run_monte_carlo",
    "PROFILES",
]

# design id -> (mean of the first 10% coordinates, mean of the rest, Sigma kind)
DESIGNS = {
    1: (0.0, -0.8, "equicorrelated"),
    2: (0.0, -0.8, "toeplitz"),
    3: (0.0, 0.0, "equicorrelated"),
    4: (0.0, 0.0, "toeplitz"),
    5: (0.05, 0.05, "equicorrelated"),
    6: (0.05, 0.05, "toeplitz"),
    7: (0.05, -0.75, "equicorrelated"),
    8: (0.05, -0.75, "toeplitz"),
    9: (0.05, -0.6, "toeplitz"),
    10: (0.05, -0.5, "toeplitz"),
    11: (0.05, -0.4, "toeplitz"),
    12: (0.05, -0.3, "toeplitz"),
    13: (0.05, -0.2, "toeplitz"),
    14: (0.05, -0.1, "toeplitz"),
}

ERROR_LAWS = {"t4_scaled": 1, "uniform_sym": 2}

PROFILES = {
    "desk": {"R": 500, "B": 300, "p": [200], "rho": [0.0], "error_law": ["t4_scaled"]},
    "paper": {"R": 2000, "B": 1000, "p": [200, 500, 1000], "rho": [0.0, 0.5, 0.9],
              "error_law": ["t4_scaled", "uniform_sym"]},
}


def _check_design(design_id) -> int:
    if design_id not in DESIGNS:
        raise ParameterError(f"unknown design {design_id!r} (expected 1..14)")
    return int(design_id)


def make_mu(design_id: int, p: int) -> np.ndarray:
    """Population means; coordinate j (1-based) is 'near' when j <= 0.1 p."""
    near, far, _ = DESIGNS[_check_design(design_id)]
    j = np.arange(1, p + 1)
    return np.where(j <= 0.1 * p, near, far).astype(float)


def make_sigma(kind: str, p: int, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """Covariance matrix and upper-triangular ``A`` with ``A^T A = Sigma``."""
    if p < 1:
        raise ParameterError(f"p={p} must be positive")
    if kind == "equicorrelated":
        lower = -1.0 / (p - 1) if p > 1 else -math.inf
        if not lower < rho < 1.0:
            raise ParameterError(f"equicorrelated rho={rho} must lie in ({lower:.4g}, 1)")
        sigma = np.full((p, p), float(rho))
        np.fill_diagonal(sigma, 1.0)
    elif kind == "toeplitz":
        if not abs(rho) < 1.0:
            raise ParameterError(f"Toeplitz rho={rho} must satisfy |rho| < 1")
        lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        sigma = float(rho) ** lag
    else:
        raise ParameterError(f"unknown covariance kind {kind!r}")
    if rho == 0:
        return sigma, np.eye(p)
    try:
        factor = np.linalg.cholesky(sigma).T
    except np.linalg.LinAlgError:
        raise ParameterError(f"{kind} covariance with rho={rho} is not positive definite") from None
    return sigma, factor


def draw_errors(law: str, n: int, p: int, gen: np.random.Generator) -> np.ndarray:
    """n x p i.i.d. errors with mean 0 and variance 1.

    ``t4_scaled`` is Student t with 4 degrees of freedom over sqrt(2), by the
    closed-form inverse CDF ``t = sign(u - 1/2) 2 sqrt(q - 1)`` with
    ``q = cos(arccos(sqrt(a))/3)/sqrt(a)`` and ``a = 4u(1-u)``.
    ``uniform_sym`` is uniform on (-sqrt 3, sqrt 3).
    """
    if law not in ERROR_LAWS:
        raise ParameterError(f"unknown error law {law!r}")
    u = _rng.open_uniform(gen, (n, p))
    if law == "uniform_sym":
        return math.sqrt(3.0) * (2.0 * u - 1.0)
    a = 4.0 * u * (1.0 - u)
    root_a = np.sqrt(a)
    q = np.cos(np.arccos(root_a) / 3.0) / root_a
    t = np.sign(u - 0.5) * 2.0 * np.sqrt(np.maximum(q - 1.0, 0.0))
    return t / math.sqrt(2.0)


@dataclass(frozen=True)
class DesignSpec:
    design_id: int
    p: int = 200
    rho: float = 0.0
    error_law: str = "t4_scaled"
    n: int = 400

    def __post_init__(self):
        _check_design(self.design_id)
        if self.error_law not in ERROR_LAWS:
            raise ParameterError(f"unknown error law {self.error_law!r}")
        if self.p < 1 or self.n < 2:
            raise ParameterError(f"need p >= 1 and n >= 2, got p={self.p}, n={self.n}")

    @property
    def sigma_kind(self) -> str:
        return DESIGNS[self.design_id][2]

    @property
    def mu(self) -> np.ndarray:
        return make_mu(self.design_id, self.p)

    @property
    def null_holds(self) -> bool:
        return bool(self.mu.max() <= 0)

    def key(self) -> tuple:
        return (self.design_id, self.p, int(round(self.rho * 1000)), ERROR_LAWS[self.error_law])


def generate_sample(design: DesignSpec, gen: np.random.Generator,
                    factor: np.ndarray | None = None) -> SampleMatrix:
    """One n x p sample of the design; ``factor`` may be passed to skip refactoring."""
    if factor is None:
        factor = make_sigma(design.sigma_kind, design.p, design.rho)[1]
    eps = draw_errors(design.error_law, design.n, design.p, gen)
    x = eps if design.rho == 0 else eps @ factor
    return SampleMatrix(design.mu + x, design.p)


def default_methods(alpha: float = 0.05, B: int = 300, seed: int = 0,
                    c_grid=(2.0, 4.0, 6.0), beta_grid=(0.0001, 0.001, 0.01)) -> list[MethodSpec]:
    """The eleven methods over the standard tuning grids (27 specs)."""
    specs = []
    for fam in ("SN", "MB", "EB"):
        boot = {} if fam == "SN" else {"B": B, "seed": seed}
        for c in c_grid:
            specs.append(MethodSpec(f"{fam}-Lasso", alpha, penalty=PenaltySpec.from_c(c), **boot))
        specs.append(MethodSpec(f"{fam}-1S", alpha, **boot))
        steps = ("2S",) if fam == "SN" else ("H", "2S")
        for step in steps:
            for b in beta_grid:
                specs.append(MethodSpec(f"{fam}-{step}", alpha, beta_n=b, **boot))
    return specs


@dataclass(frozen=True)
class MonteCarloConfig:
    R: int
    methods: tuple
    seed: int
    threads: int = 1

    def __post_init__(self):
        if int(self.R) < 1:
            raise ParameterError(f"R={self.R} must be at least 1")
        if not self.methods:
            raise ParameterError("no methods configured")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ParameterError("duplicate method/tuning entries")
        if self.seed is None:
            raise ParameterError("a seed is mandatory for simulations")
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass
class CellResult:
    """Counts for one (design, p, rho, law) cell, summed over replications."""

    design: DesignSpec
    R: int
    rejections: dict
    retained: dict
    full_selected: dict
    failures: int = 0
    failure_messages: list = field(default_factory=list)

    def rejection_pct(self, label: str) -> float:
        return 100.0 * self.rejections[label] / self.R

    def retained_pct(self, label: str) -> float:
        return 100.0 * self.retained[label] / (self.R * self.design.p)

    def full_set_frequency(self, label: str) -> float:
        return self.full_selected[label] / self.R


def _run_block(cfg: MonteCarloConfig, design: DesignSpec, reps: range):
    """Replications ``reps`` of one cell; returns integer count arrays."""
    m = len(cfg.methods)
    rej = np.zeros(m, dtype=np.int64)
    kept = np.zeros(m, dtype=np.int64)
    full = np.zeros(m, dtype=np.int64)
    failures = []
    factor = make_sigma(design.sigma_kind, design.p, design.rho)[1]
    with threadpool_limits(limits=1):
        for r in reps:
            rep_seed = _rng.derive_seed(cfg.seed, *design.key(), r)
            try:
                gen = _rng.stream(rep_seed, _rng.purpose("errors"))
                sample = generate_sample(design, gen, factor)
                specs = [s.with_seed(rep_seed) for s in cfg.methods]
                outs = run_methods(specs, sample)
            except Exception as exc:  # recorded, the cell is flagged
                failures.append(f"rep {r}: {type(exc).__name__}: {exc}")
                continue
            for i, o in enumerate(outs):
                rej[i] += o.reject
                kept[i] += o.retained
                full[i] += o.retained == design.p
    return rej, kept, full, failures


def _chunks(R: int, parts: int) -> list[range]:
    size = max(1, math.ceil(R / parts))
    return [range(a, min(a + size, R)) for a in range(0, R, size)]


def run_monte_carlo(config: MonteCarloConfig, designs) -> "SimulationReport":
    """Rejection frequencies and retained fractions for every design cell."""
    designs = list(designs)
    if not designs:
        raise ParameterError("no designs given")
    start = time.perf_counter()
    tasks = []
    for d in designs:
        parts = 1 if config.threads <= 1 else 4 * config.threads
        tasks.extend((d, block) for block in _chunks(config.R, parts))
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            futures = [pool.submit(_run_block, config, d, block) for d, block in tasks]
            results = [f.result() for f in futures]
    else:
        results = [_run_block(config, d, block) for d, block in tasks]

    labels = [m.label for m in config.methods]
    m = len(labels)
    totals = {d: [np.zeros(m, np.int64), np.zeros(m, np.int64), np.zeros(m, np.int64), []]
              for d in designs}
    for (d, _), (rej, kept, full, fails) in zip(tasks, results):
        acc = totals[d]
        acc[0] += rej
        acc[1] += kept
        acc[2] += full
        acc[3].extend(fails)
    cells = []
    for d in designs:
        rej, kept, full, fails = totals[d]
        cells.append(CellResult(
            d, config.R,
            {lab: int(v) for lab, v in zip(labels, rej)},
            {lab: int(v) for lab, v in zip(labels, kept)},
            {lab: int(v) for lab, v in zip(labels, full)},
            len(fails), fails))
    return SimulationReport(config, cells, time.perf_counter() - start)


@dataclass
class SimulationReport:
    """Cell results plus the run's configuration.

    ``wall_time`` is kept in memory only; the emitted CSV/JSON omit it so that
    reruns produce identical files.
    """

    config: MonteCarloConfig
    cells: list
    wall_time: float = 0.0

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.config.methods]

    def selection_labels(self) -> list[str]:
        return [m.label for m in self.config.methods if m.step != "1S"]

    def cell(self, design_id: int, p: int | None = None, rho: float | None = None,
             error_law: str | None = None) -> CellResult:
        for c in self.cells:
            d = c.design
            if d.design_id == design_id and (p is None or d.p == p) and \
                    (rho is None or d.rho == rho) and (error_law is None or d.error_law == error_law):
                return c
        raise KeyError(f"no cell for design {design_id}")

    def _table(self, labels, value) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["design", "errors", "p", "rho", "R"] + labels)
        for c in self.cells:
            d = c.design
            w.writerow([d.design_id, d.error_law, d.p, f"{d.rho:g}", c.R]
                       + [f"{value(c, lab):.2f}" for lab in labels])
        return buf.getvalue()

    def rejection_csv(self) -> str:
        return self._table(self.labels, CellResult.rejection_pct)

    def retained_csv(self) -> str:
        return self._table(self.selection_labels(), CellResult.retained_pct)

    def to_json_dict(self) -> dict:
        methods = []
        for s in self.config.methods:
            methods.append({"label": s.label, "id": s.id, "alpha": s.alpha, "beta_n": s.beta_n,
                            "penalty": None if s.penalty is None else s.penalty.label(),
                            "B": s.B})
        cells = []
        for c in self.cells:
            d = c.design
            cells.append({
                "design": d.design_id, "p": d.p, "rho": d.rho, "error_law": d.error_law,
                "n": d.n, "R": c.R, "failures": c.failures, "flagged": c.failures > 0,
                "rejection_pct": {lab: round(c.rejection_pct(lab), 4) for lab in self.labels},
                "retained_pct": {lab: round(c.retained_pct(lab), 4)
                                 for lab in self.selection_labels()},
                "full_set_frequency": {lab: round(c.full_set_frequency(lab), 4)
                                       for lab in self.selection_labels()},
            })
        return {"seed": self.config.seed, "R": self.config.R, "methods": methods, "cells": cells}

    def write(self, out_dir, stem: str = "simulation") -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            f"{stem}_rejection.csv": self.rejection_csv(),
            f"{stem}_retained.csv": self.retained_csv(),
            f"{stem}.json": json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n",
        }
        written = []
        for name, text in paths.items():
            path = os.path.join(out_dir, name)
            with open(path, "w", newline="") as fh:
                fh.write(text)
            written.append(path)
        return written
