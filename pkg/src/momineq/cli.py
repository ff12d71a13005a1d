"""Command-line interface: ``momineq {test,confset,simulate,diagnose}``.

Exit status is 0 on success, 2 on invalid input (the offending token is
named) and 1 on a runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from .errors import ParameterError, ShapeError
from .lasso_select import PenaltySpec
from .methods import METHOD_IDS, MethodSpec, confidence_set, run_method
from .moments import read_sample_csv

log = logging.getLogger("momineq")

_U64 = 1 << 64


class UsageError(Exception):
    """Invalid command-line or config input; maps to exit status 2."""


def _seed(text) -> int:
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise UsageError(f"seed {text!r} is not an integer") from None
    if not 0 <= value < _U64:
        raise UsageError(f"seed {text!r} is outside [0, 2^64)")
    return value


def parse_method(token: str, alpha: float, B: int | None, seed: int | None) -> MethodSpec:
    """Build a spec from ``ID`` or ``ID:key=value`` with keys C, eps, beta, B."""
    ident, _, rest = token.strip().partition(":")
    if ident not in METHOD_IDS:
        raise UsageError(f"unknown method {ident!r}")
    opts = {}
    for part in filter(None, rest.split(",")):
        key, eq, val = part.partition("=")
        if not eq or key not in ("C", "eps", "beta", "B", "mc_exponent"):
            raise UsageError(f"bad method option {part!r} in {token!r}")
        try:
            opts[key] = float(val)
        except ValueError:
            raise UsageError(f"bad value {val!r} in {token!r}") from None
    kw = {}
    if "C" in opts or "eps" in opts:
        if "eps" in opts:
            kw["penalty"] = PenaltySpec(mode="theoretical", epsilon=opts["eps"])
        else:
            kw["penalty"] = PenaltySpec.from_c(
                opts["C"], lambda_mc_exponent=opts.get("mc_exponent", -0.5))
    if "beta" in opts:
        kw["beta_n"] = opts["beta"]
    if ident.split("-")[0] in ("MB", "EB"):
        kw["B"] = int(opts.get("B", B if B is not None else 1000))
        if seed is None:
            raise UsageError(f"method {ident!r} needs --seed")
        kw["seed"] = seed
    try:
        return MethodSpec(ident, alpha, **kw)
    except ParameterError as exc:
        raise UsageError(f"{token!r}: {exc}") from None


def _method_tokens(value) -> list[str]:
    if isinstance(value, str):
        return _split_top(value)
    return [str(v) for v in value]


def _split_top(text: str) -> list[str]:
    # "SN-1S,MB-Lasso:C=2,B=500,SN-2S:beta=0.001": a new token starts at a method id
    out: list[str] = []
    for piece in text.split(","):
        head = piece.partition(":")[0].strip()
        if head in METHOD_IDS or not out:
            out.append(piece.strip())
        else:
            out[-1] += "," + piece.strip()
    return out


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    return cfg


def _pick(args, cfg: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return cfg.get(name, default)


def _write(out_dir: str, name: str, text: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _cmd_test(args, cfg) -> int:
    data = _pick(args, cfg, "data")
    if data is None:
        raise UsageError("test needs --data")
    seed = _pick(args, cfg, "seed")
    seed = None if seed is None else _seed(seed)
    method = _pick(args, cfg, "method")
    if method is None:
        raise UsageError("test needs --method")
    spec = parse_method(method, float(_pick(args, cfg, "alpha", 0.05)),
                        _pick(args, cfg, "B"), seed)
    sample = _read_sample(data, _pick(args, cfg, "p"))
    outcome = run_method(spec, sample)
    text = json.dumps(outcome.to_json_dict(), indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write(args.out, "test_outcome.json", text)
    return 0


def _read_sample(path, p):
    try:
        return read_sample_csv(path, None if p is None else int(p))
    except OSError as exc:
        raise UsageError(f"cannot read data {str(path)!r}: {exc.strerror}") from None


def _cmd_confset(args, cfg) -> int:
    grid = cfg.get("grid")
    if not grid:
        raise UsageError("confset needs a config with a non-empty 'grid' list")
    seed = _pick(args, cfg, "seed")
    seed = None if seed is None else _seed(seed)
    method = _pick(args, cfg, "method")
    if method is None:
        raise UsageError("confset needs a method")
    spec = parse_method(method, float(_pick(args, cfg, "alpha", 0.05)),
                        _pick(args, cfg, "B"), seed)
    p = _pick(args, cfg, "p")
    base = os.path.dirname(os.path.abspath(args.config)) if args.config else os.getcwd()
    points = []
    for i, entry in enumerate(grid):
        if not isinstance(entry, dict) or "data" not in entry:
            raise UsageError(f"grid entry {i} needs a 'data' path")
        points.append(entry)

    def provider(entry):
        return read_sample_csv(os.path.join(base, entry["data"]),
                               None if p is None else int(p))

    result = confidence_set(spec, points, provider, threads=max(1, args.threads or 1))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "theta", "statistic", "critical_value", "reject", "in_set", "error"])
    for i, (entry, o) in enumerate(zip(points, result.outcomes)):
        theta = json.dumps(entry.get("theta", i))
        if o is None:
            w.writerow([i, theta, "", "", "", 0, result.failures[i]])
        else:
            w.writerow([i, theta, repr(o.statistic), repr(o.critical_value), int(o.reject),
                        int(not o.reject), ""])
    path = _write(args.out or ".", "confset.csv", buf.getvalue())
    print(f"{len(result.retained)} of {len(points)} grid points retained -> {path}")
    return 0


def _as_list(value, cast, name):
    if value is None:
        return None
    items = value.split(",") if isinstance(value, str) else (
        value if isinstance(value, list) else [value])
    out = []
    for item in items:
        try:
            out.append(cast(item.strip() if isinstance(item, str) else item))
        except (TypeError, ValueError):
            raise UsageError(f"bad {name} value {item!r}") from None
    return out


def _cmd_simulate(args, cfg) -> int:
    from . import simulate as sim

    seed = _pick(args, cfg, "seed")
    if seed is None:
        raise UsageError("simulate needs --seed")
    seed = _seed(seed)
    profile = _pick(args, cfg, "profile", "desk")
    if profile not in sim.PROFILES:
        raise UsageError(f"unknown profile {profile!r}")
    prof = sim.PROFILES[profile]
    designs = _as_list(_pick(args, cfg, "design"), int, "design")
    if not designs:
        raise UsageError("simulate needs --design")
    for d in designs:
        if d not in sim.DESIGNS:
            raise UsageError(f"unknown design {d!r}")
    p_list = _as_list(_pick(args, cfg, "p"), int, "p") or prof["p"]
    rho_list = _as_list(_pick(args, cfg, "rho"), float, "rho") or prof["rho"]
    laws = _as_list(_pick(args, cfg, "errors"), str, "errors") or prof["error_law"]
    for law in laws:
        if law not in sim.ERROR_LAWS:
            raise UsageError(f"unknown error law {law!r}")
    R = int(_pick(args, cfg, "R", prof["R"]))
    B = int(_pick(args, cfg, "B", prof["B"]))
    n = int(cfg.get("n", 400))
    alpha = float(_pick(args, cfg, "alpha", 0.05))
    tokens = _pick(args, cfg, "method")
    if tokens is None:
        methods = sim.default_methods(alpha=alpha, B=B, seed=seed)
    else:
        methods = [parse_method(t, alpha, B, seed) for t in _method_tokens(tokens)]
    try:
        cells = [sim.DesignSpec(d, p, rho, law, n)
                 for d in designs for law in laws for p in p_list for rho in rho_list]
        for c in cells:
            sim.make_sigma(c.sigma_kind, c.p, c.rho)
        config = sim.MonteCarloConfig(R, methods, seed, max(1, args.threads or 1))
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    report = sim.run_monte_carlo(config, cells)
    paths = report.write(args.out or ".")
    log.info("simulation finished in %.1f s", report.wall_time)
    for c in report.cells:
        if c.failures:
            log.warning("design %d p=%d rho=%g: %d failed replications",
                        c.design.design_id, c.design.p, c.design.rho, c.failures)
    print("\n".join(paths))
    return 0


def _cmd_diagnose(args, cfg) -> int:
    from .diagnostics import heatmap_grid

    kw = {}
    for name in ("n", "beta_n", "C", "delta", "steps_p", "steps_M"):
        value = _pick(args, cfg, name)
        if value is not None:
            kw[name] = value
    for name in ("M_range", "p_range"):
        if name in cfg:
            kw[name] = tuple(cfg[name])
    try:
        grid = heatmap_grid(**kw)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    path = _write(args.out or ".", "heatmap.csv", grid.to_csv())
    print(f"highlevel fails in {100 * grid.highlevel_failure_fraction():.2f}% of cells; "
          f"lowlevel-without-highlevel cells: {grid.nesting_violations()} -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its entries")
    common.add_argument("--seed", help="64-bit seed (required for bootstrap methods)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, default=None, help="worker count")
    common.add_argument("--profile", choices=("desk", "paper"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="momineq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", parents=[common], help="test one sample")
    t.add_argument("--data", help="sample CSV (rows = observations)")
    t.add_argument("--p", type=int, help="number of inequality columns")
    t.add_argument("--method", help="e.g. SN-1S, MB-Lasso:C=2, EB-2S:beta=0.001")
    t.add_argument("--alpha", type=float)
    t.add_argument("--B", type=int)

    c = sub.add_parser("confset", parents=[common], help="confidence set over a grid")
    c.add_argument("--p", type=int)
    c.add_argument("--method")
    c.add_argument("--alpha", type=float)
    c.add_argument("--B", type=int)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo experiment")
    s.add_argument("--design", help="design ids 1..14, comma separated")
    s.add_argument("--p", help="dimensions, comma separated")
    s.add_argument("--rho", help="correlations, comma separated")
    s.add_argument("--errors", help="t4_scaled and/or uniform_sym")
    s.add_argument("--R", type=int)
    s.add_argument("--B", type=int)
    s.add_argument("--alpha", type=float)
    s.add_argument("--method", help="method tokens; default is the full tuning grid")

    d = sub.add_parser("diagnose", parents=[common], help="power-condition heat map")
    d.add_argument("--n", type=int)
    d.add_argument("--beta", dest="beta_n", type=float)
    d.add_argument("--C", type=float)
    d.add_argument("--delta", type=float)
    d.add_argument("--steps-p", dest="steps_p", type=int)
    d.add_argument("--steps-M", dest="steps_M", type=int)
    return parser


_COMMANDS = {"test": _cmd_test, "confset": _cmd_confset,
             "simulate": _cmd_simulate, "diagnose": _cmd_diagnose}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = _load_config(args.config)
        if args.threads is not None and args.threads < 1:
            raise UsageError(f"--threads {args.threads} must be at least 1")
        return _COMMANDS[args.command](args, cfg)
    except (UsageError, ParameterError, ShapeError) as exc:
        print(f"momineq: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"momineq: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
