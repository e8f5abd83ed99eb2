"""``halfline-nls``: batch runs driven by a TOML configuration.

Exit codes: 0 success, 2 configuration or argument error, 3 numerical
failure (a ``failure.json`` dump is written to the output directory).
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
import traceback
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, bundled_config, load_config
from .estimates import (
    verify_interpolation,
    verify_linear_bound,
    verify_nonlinearity_bound,
    verify_time_trace_bound,
    verify_trace_nonlinearity,
)
from .exceptions import HalflineError, InvalidInputError
from .fd_oracle import crank_nicolson_solve
from .io import DIAGNOSTIC_COLUMNS, diagnostics_rows, write_csv, write_snapshot
from .solver import OPEN_LOOP, continue_solution, mass, picard_solve, select_T0
from .sobolev import halfline_norms

log = logging.getLogger("halfline_nls")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
THREADS_ENV = "HALFLINE_NLS_THREADS"
OVERRIDES = ("s", "p", "r", "lambda", "T", "n", "dt")
BUNDLED = ("linear", "nonlinear", "blowup")


def worker_count(jobs: int) -> int:
    """Sweep parallelism: ``HALFLINE_NLS_THREADS`` if set, else the CPU count, never above ``jobs``."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", source="environment")
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", source="environment")
    return max(1, min(cap, jobs))


def _header(cfg: RunConfig, command: str) -> dict:
    head = {"command": command, "config": cfg.source, "seed": cfg.seed}
    for key in ("s", "p", "r", "k", "lambda", "T", "mode"):
        if key in cfg.problem:
            head[key] = cfg.problem[key]
    for key in ("L", "n", "dt"):
        head[key] = cfg.numerics[key]
    return head


def _print(line: str):
    print(line, flush=True)


# -- subcommands ---------------------------------------------------------------


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    problem = cfg.build_problem()
    settings = cfg.build_settings()
    if "T0" in cfg.numerics:
        fields = [picard_solve(problem, float(cfg.numerics["T0"]), settings)]
        status, t_reached = "completed", fields[0].T0
    else:
        result = continue_solution(problem, settings)
        fields, status, t_reached = result.fields, result.status, result.t_reached
    dx = problem.grid.dx
    times, hs, ms, res, rows = [], [], [], [], []
    for i, f in enumerate(fields):
        d = f.diagnostics
        start = 0 if i == 0 else 1
        times.append(f.times[start:])
        hs.append(d["hs_norm_history"][start:])
        ms.append(d["mass_history"][start:])
        res.append(d["boundary_residual"][start:])
        rows.append(f.slab.values[start:])
    times = np.concatenate(times)
    head = _header(cfg, "solve")
    head.update(status=status, t_reached=t_reached, segments=len(fields))
    write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS,
              diagnostics_rows(times, np.concatenate(hs), np.concatenate(ms), np.concatenate(res)), head)
    dt = fields[0].slab.dt
    values = np.concatenate(rows)
    if len(fields) > 1:
        # segments may use different steps; resample onto the first step
        grid_t = np.arange(0.0, times[-1] + 0.5 * dt, dt)
        idx = np.clip(np.searchsorted(times, grid_t - 1e-12), 0, times.size - 1)
        values = values[idx]
    write_snapshot(out / "field.hlns", values, 0.0, dx, 0.0, dt)
    drift = float(np.max(np.abs(np.concatenate(ms) - ms[0][0])) / ms[0][0]) if ms[0][0] > 0 else 0.0
    _print(f"solve: status={status} t_reached={t_reached:.6g} segments={len(fields)} "
           f"mass_drift={drift:.3e} -> {out}")
    return EXIT_OK


def _report_rows(reports):
    rows, summary = [], []
    for rep in reports:
        rows.extend(rep.rows())
        sm = rep.summary()
        summary.append([sm[k] for k in ("name", "max_ratio", "median_ratio", "slope", "stability", "argmax_x")]
                       + [int(rep.stable)])
    return rows, summary


SUMMARY_COLUMNS = ("name", "max_ratio", "median_ratio", "slope", "stability", "argmax_x", "stable")


def _write_reports(cfg, out, command, reports):
    rows, summary = _report_rows(reports)
    head = _header(cfg, command)
    write_csv(out / "ratios.csv", ("check", "member", "T", "ratio"), rows, head)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, summary, head)
    for rep in reports:
        _print(f"{rep.name}: max={rep.max_ratio:.4g} median={rep.median_ratio:.4g} "
               f"slope={rep.slope:.3g} stability={rep.stability:.2%}")


def cmd_verify_linear(cfg: RunConfig, out: Path) -> int:
    est = cfg.estimates
    s = float(est.get("s", cfg.problem["s"]))
    T_list = tuple(float(t) for t in est.get("T_list", (0.5, 1.0, 2.0)))
    refine = bool(est.get("refine", True))
    reports = [
        verify_linear_bound(s, T_list, refine=refine),
        verify_time_trace_bound(s, refine=refine),
    ]
    _write_reports(cfg, out, "verify-linear", reports)
    return EXIT_OK


def cmd_verify_estimates(cfg: RunConfig, out: Path) -> int:
    prob, est = cfg.problem, cfg.estimates
    s = float(est.get("s", prob["s"]))
    p, r = float(prob["p"]), float(prob["r"])
    reports = [
        verify_nonlinearity_bound(s, p, n_pairs=int(est.get("n_pairs", 50)), seed=cfg.seed),
        verify_interpolation(float(est.get("sigma", 0.25)), float(est.get("eps", 0.5))),
        verify_trace_nonlinearity(s, r, float(prob["lambda"]) or 1.0),
    ]
    _write_reports(cfg, out, "verify-estimates", reports)
    return EXIT_OK


def _scan_one(args):
    cfg, r, lam, amp = args
    warnings.simplefilter("ignore")
    problem = cfg.build_problem(amplitude_scale=amp, r=r, **{"lambda": lam})
    settings = cfg.build_settings()
    n0 = float(halfline_norms(problem.u0.values, problem.grid.dx, problem.s, check=False))
    try:
        res = continue_solution(problem, settings)
    except HalflineError as exc:
        return [r, lam, amp, "failed", float("nan"), n0, float("nan"), float("nan"), 0, type(exc).__name__]
    hs = res.hs_norm_history
    peak = float(hs.max())
    grows = int(np.all(np.diff(hs[np.argmax(hs >= 0.5 * peak) :]) >= 0)) if hs.size > 1 else 0
    return [r, lam, amp, res.status, res.t_reached, n0, res.final_norm, peak / n0 if n0 else float("nan"),
            grows, res.reason.replace(",", ";")]


SCAN_COLUMNS = ("r", "lambda", "amplitude", "status", "t_max", "initial_norm", "final_norm",
                "growth", "monotone_escape", "reason")


def cmd_blowup_scan(cfg: RunConfig, out: Path) -> int:
    sw = cfg.sweep
    rs = [float(v) for v in sw.get("r", [cfg.problem["r"]])]
    lams = [float(v) for v in sw.get("lambda", [cfg.problem["lambda"]])]
    amps = [float(v) for v in sw.get("amplitude", [1.0])]
    jobs = [(cfg, r, lam, a) for r, lam, a in itertools.product(rs, lams, amps)]
    workers = worker_count(len(jobs))
    if workers == 1:
        rows = [_scan_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_one, jobs))
    write_csv(out / "blowup_scan.csv", SCAN_COLUMNS, rows, _header(cfg, "blowup-scan"))
    for row in rows:
        _print(f"r={row[0]:g} lambda={row[1]:g} amplitude={row[2]:g}: {row[3]} t_max={row[4]:.4g} "
               f"growth={row[7]:.3g}")
    return EXIT_OK


def cmd_compare_oracle(cfg: RunConfig, out: Path) -> int:
    problem = cfg.build_problem()
    settings = cfg.build_settings()
    T0 = float(cfg.numerics["T0"]) if "T0" in cfg.numerics else select_T0(problem, settings)
    spectral = picard_solve(problem, T0, settings)
    fd_dt = float(cfg.numerics.get("fd_dt", settings.dt))
    steps = spectral.slab.times.size - 1
    sub = int(round(spectral.slab.dt / fd_dt))
    if sub < 1 or abs(sub * fd_dt - spectral.slab.dt) > 1e-12:
        raise InvalidInputError("fd_dt must divide the spectral time step")
    fd = crank_nicolson_solve(problem, dt=spectral.slab.dt / sub, T=T0, store_every=sub)
    dx = problem.grid.dx
    if fd.values.shape[0] != steps + 1:
        raise InvalidInputError("oracle and spectral time levels differ")
    diff = np.sqrt(np.trapezoid(np.abs(spectral.slab.values - fd.values) ** 2, dx=dx, axis=1))
    m_spec, m_fd = mass(spectral.slab.values, dx), fd.meta["mass_history"]
    rows = list(zip(spectral.times, diff, m_spec, m_fd))
    head = _header(cfg, "compare-oracle")
    head.update(T0=T0, sup_l2_difference=float(diff.max()))
    write_csv(out / "compare_oracle.csv", ("t", "l2_difference", "spectral_mass", "fd_mass"), rows, head)
    _print(f"compare-oracle: T0={T0:.6g} sup_t L2 difference={diff.max():.3e} "
           f"iterations={spectral.diagnostics['iterations']}")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify-linear": cmd_verify_linear,
    "verify-estimates": cmd_verify_estimates,
    "blowup-scan": cmd_blowup_scan,
    "compare-oracle": cmd_compare_oracle,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="halfline-nls", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="TOML file, or the name of a bundled example: " + ", ".join(BUNDLED))
        sp.add_argument("--out-dir", default=None, help="output directory (default ./out/<command>)")
        for key in ("s", "p", "r", "lambda", "T", "dt"):
            sp.add_argument(f"--{key}", type=float, default=None, dest=key.replace("lambda", "lam"))
        sp.add_argument("--n", type=int, default=None)
    return parser


def _resolve_config(arg: str) -> Path:
    path = Path(arg)
    if not path.exists() and arg in BUNDLED:
        return bundled_config(arg)
    return path


def _dump_failure(out: Path, command: str, cfg, exc: BaseException):
    out.mkdir(parents=True, exist_ok=True)
    info = {
        "command": command,
        "error": type(exc).__name__,
        "message": str(exc),
        "config": cfg.source if cfg else None,
        "problem": cfg.problem if cfg else None,
        "numerics": cfg.numerics if cfg else None,
        "traceback": traceback.format_exception(type(exc), exc, exc.__traceback__),
    }
    ratios = getattr(exc, "ratios", None)
    if ratios is not None:
        info["contraction_ratios"] = [float(v) for v in ratios]
    path = out / "failure.json"
    path.write_text(json.dumps(info, indent=2, default=str))
    return path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
    out = Path(args.out_dir) if args.out_dir else Path("out") / args.command
    cfg = None
    try:
        cfg = load_config(_resolve_config(args.config))
        flags = {"s": args.s, "p": args.p, "r": args.r, "lambda": args.lam, "T": args.T, "n": args.n,
                 "dt": args.dt}
        cfg = cfg.with_overrides(**flags)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HalflineError, FloatingPointError, np.linalg.LinAlgError) as exc:
        path = _dump_failure(out, args.command, cfg, exc)
        print(f"numerical failure: {type(exc).__name__}: {exc} (details in {path})", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
