"""Command-line front end: run, verify, and inspect experiments.

Subcommands
    run CONFIG             integrate the flow; write trajectory.csv, run.json
    verify CONFIG          run + certify all bounds; write bounds.json too
    gallery                list the stock problems
    check-schedule K A0 P  admissibility report for a schedule
    oracle CONFIG          continuation a -> 0; write continuation.csv

CONFIG is a JSON file with fields
    problem, dim, schedule {kind, a0, param}, integrator {...},
    oracle {tol, max_iters}, seed, output_dir
where missing sub-fields take library defaults. run.json echoes the fully
normalized config, so a run is reproducible from its own output.

Exit codes: 0 success / all checks pass, 1 check failure, 2 validation
error, 3 runtime failure (step-size underflow, solver breakdown).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContinuationError, DsmError, NewtonError
from .flow import TERMINATED_STEP_FAILURE, IntegratorConfig, Trajectory, integrate
from .operators import OperatorProblem, check_monotone, gallery, make_problem
from .oracle import NewtonConfig, lemma_2_1_sweep, minimal_norm_limit, solve_regularized
from .schedules import Schedule, check_admissible
from .verify import BoundReport, check_eq_2_6, check_eq_2_10, check_eq_3_8, check_thm_3_1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

# Standard grid for the a * ||w_a|| monotonicity sweep.
LEMMA_GRID = (10.0, 3.0, 1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001)

# Slowly converging ill-posed problems get a relaxed limit-match tolerance;
# the value used is always recorded in the THM_3_1 report notes.
EPS_Y_OVERRIDES = {"fredholm_first_kind": 5e-2}

TRAJECTORY_COLUMNS = ("t", "a", "h", "norm_u", "dist_to_w", "bound_2_6_rhs", "bound_2_10_rhs")


class ConfigError(ValueError):
    """Bad or missing run configuration."""


@dataclass(frozen=True)
class RunConfig:
    problem: str
    dim: int | None
    schedule: Schedule
    integrator: IntegratorConfig
    oracle: NewtonConfig
    seed: int
    output_dir: str

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "dim": self.dim,
            "schedule": self.schedule.to_dict(),
            "integrator": self.integrator.to_dict(),
            "oracle": self.oracle.to_dict(),
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            problem = d["problem"]
            schedule = Schedule.from_dict(d.get("schedule", {"kind": "power", "a0": 1.0, "param": 0.25}))
            integrator = IntegratorConfig.from_dict({"t_max": 20.0, **d.get("integrator", {})})
            oracle = NewtonConfig.from_dict(d.get("oracle", {}))
            dim = d.get("dim")
            return cls(
                problem=problem,
                dim=int(dim) if dim is not None else None,
                schedule=schedule,
                integrator=integrator,
                oracle=oracle,
                seed=int(d.get("seed", 0)),
                output_dir=str(d.get("output_dir", "runs")),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"invalid run config: {err}") from err


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON: {err}") from err
    return RunConfig.from_dict(raw)


def _build_problem(cfg: RunConfig) -> OperatorProblem:
    try:
        return make_problem(cfg.problem, dim=cfg.dim, seed=cfg.seed)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _require_admissible(cfg: RunConfig):
    report = check_admissible(cfg.schedule, horizon=cfg.integrator.t_max)
    if not report.pass_2_2:
        raise ConfigError(
            f"schedule {cfg.schedule.to_dict()} is inadmissible: sup |a'|/a = "
            f"{report.max_ratio:.4g} must stay below 0.5 with 0 < a(t) < cap"
        )
    return report


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _trajectory_csv(traj: Trajectory, cap_term: float) -> str:
    h0 = traj.points[0].h
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for pt in traj.points:
        decay = math.exp(-pt.t / 2.0)
        row = (
            _fmt(pt.t),
            _fmt(pt.a),
            _fmt(pt.h),
            _fmt(float(np.linalg.norm(pt.u))),
            "" if pt.dist_to_w is None else _fmt(pt.dist_to_w),
            _fmt(pt.h / pt.a),
            "" if not math.isfinite(cap_term) else _fmt(h0 * decay + (1.0 - decay) * cap_term),
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _continuation_csv(p: OperatorProblem, result) -> str:
    lines = ["a,norm_w,a_norm_w,residual"]
    for a, w in zip(result.a_values, result.w_values):
        nw = float(np.linalg.norm(w))
        res = float(np.linalg.norm(p.residual(a, w)))
        lines.append(",".join((_fmt(a), _fmt(nw), _fmt(a * nw), _fmt(res))))
    return "\n".join(lines) + "\n"


def _write_run_outputs(out_dir: Path, cfg: RunConfig, traj: Trajectory, cap_term: float):
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / "trajectory.csv", _trajectory_csv(traj, cap_term))
    run_meta = {
        "config": cfg.to_dict(),
        "terminated_by": traj.terminated_by,
        "points_recorded": len(traj.points),
        "t_final": traj.final.t,
        "h_final": traj.final.h,
    }
    _atomic_write(out_dir / "run.json", json.dumps(run_meta, indent=2) + "\n")


def _cap_term(p: OperatorProblem, cfg: RunConfig) -> float:
    w_cap = solve_regularized(p, cfg.schedule.cap, np.zeros(p.dim), cfg.oracle)
    return cfg.schedule.cap * float(np.linalg.norm(w_cap))


def cmd_run(config_path) -> int:
    try:
        cfg = load_config(config_path)
        _require_admissible(cfg)
        p = _build_problem(cfg)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        traj = integrate(p, cfg.schedule, np.zeros(p.dim), cfg.integrator)
    except DsmError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        cap_term = _cap_term(p, cfg)
    except NewtonError as err:
        # Cap-envelope column degrades to empty; the run itself still lands.
        print(f"warning: cap solve failed, bound_2_10_rhs left empty ({err})", file=sys.stderr)
        cap_term = float("nan")
    out_dir = Path(cfg.output_dir)
    _write_run_outputs(out_dir, cfg, traj, cap_term)
    print(
        f"{p.name}: terminated_by={traj.terminated_by} t_final={traj.final.t:.6g} "
        f"h_final={traj.final.h:.3e} -> {out_dir / 'trajectory.csv'}"
    )
    if traj.terminated_by == TERMINATED_STEP_FAILURE:
        print("error: step size underflow (step_failure)", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _lemma_report(p: OperatorProblem, cfg: RunConfig) -> BoundReport:
    sweep = lemma_2_1_sweep(p, LEMMA_GRID, cfg.oracle)
    increasing = sweep.values[::-1]
    increments = [v2 - v1 for v1, v2 in zip(increasing, increasing[1:])]
    worst = min(increments) + sweep.slack
    grid_increasing = list(sweep.a_grid[::-1])
    worst_a = grid_increasing[1 + int(np.argmin(increments))]
    return BoundReport(
        bound_id="LEMMA_2_1",
        passed=sweep.monotone_nondecreasing_in_a,
        worst_margin=worst,
        worst_t=worst_a,
        checkpoints=len(sweep.a_grid),
        notes=(
            "a*||w_a|| nondecreasing in a over grid "
            f"{list(sweep.a_grid)}; margin = min increment + slack {sweep.slack:g}; "
            "worst_t is the a-value at the worst increment"
        ),
    )


def cmd_verify(config_path) -> int:
    try:
        cfg = load_config(config_path)
        adm = _require_admissible(cfg)
        p = _build_problem(cfg)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION

    out_dir = Path(cfg.output_dir)
    mono = check_monotone(p, samples=200, radius=5.0, seed=cfg.seed)
    payload = {
        "problem": p.name,
        "schedule_admissibility": adm.to_dict(),
        "monotonicity": {
            "min_pairing": mono.min_pairing,
            "pass": mono.passed,
            "samples": mono.samples,
            "seed": mono.seed,
        },
        "bounds": [],
    }
    if not mono.passed:
        out_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(out_dir / "bounds.json", json.dumps(payload, indent=2) + "\n")
        print(f"FAIL monotonicity: min pairing {mono.min_pairing:.3e} < 0", file=sys.stderr)
        return EXIT_CHECK_FAILED

    try:
        traj = integrate(p, cfg.schedule, np.zeros(p.dim), cfg.integrator)
    except DsmError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    if traj.terminated_by == TERMINATED_STEP_FAILURE:
        _write_run_outputs(out_dir, cfg, traj, float("nan"))
        print("error: step size underflow (step_failure)", file=sys.stderr)
        return EXIT_RUNTIME

    eps_y = EPS_Y_OVERRIDES.get(p.name, 1e-2)
    reports = []
    continuation = None
    try:
        reports.append(check_eq_2_6(traj, p, cfg.schedule, cfg.oracle))
        reports.append(check_eq_2_10(traj, p, cfg.schedule, cfg.oracle))
        reports.append(check_eq_3_8(traj, residual_stop=cfg.integrator.residual_stop))
        if adm.pass_3_3:
            # Limit identification only applies when a(t) actually decays.
            continuation = minimal_norm_limit(p, cfg=cfg.oracle)
            reports.append(
                check_thm_3_1(
                    traj,
                    p,
                    continuation,
                    residual_stop=cfg.integrator.residual_stop,
                    eps_y_rel=eps_y,
                )
            )
        else:
            payload["skipped"] = ["THM_3_1: schedule does not decay to zero"]
        reports.append(_lemma_report(p, cfg))
    except (NewtonError, ContinuationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    payload["bounds"] = [r.to_dict() for r in reports]
    if continuation is not None:
        payload["continuation"] = {
            "a_final": continuation.a_values[-1],
            "norm_y": float(np.linalg.norm(continuation.y_estimate)),
            "converged": continuation.converged,
        }
    try:
        cap_term = _cap_term(p, cfg)
    except NewtonError:
        cap_term = float("nan")
    _write_run_outputs(out_dir, cfg, traj, cap_term)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / "bounds.json", json.dumps(payload, indent=2) + "\n")

    failing = [r.bound_id for r in reports if not r.passed]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.bound_id:9s} worst_margin={r.worst_margin:+.3e} at t={r.worst_t:.6g}")
    if failing:
        print(f"failed checks: {', '.join(failing)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_gallery() -> int:
    print(f"{'name':22s} {'dim':>4s} {'symmetric':>9s} {'known_y':>7s} {'null_dim':>8s}")
    for p in gallery():
        null_dim = len(p.null_space_basis) if p.null_space_basis else 0
        known = "yes" if p.minimal_norm_solution is not None else "no"
        print(f"{p.name:22s} {p.dim:4d} {str(p.symmetric_jacobian):>9s} {known:>7s} {null_dim:8d}")
    return EXIT_OK


def cmd_check_schedule(kind: str, a0: float, param: float) -> int:
    try:
        s = Schedule(kind=kind, a0=a0, param=param)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    report = check_admissible(s, horizon=100.0, grid_points=201)
    print(f"schedule: {s.to_dict()}")
    print(
        f"max_ratio={report.max_ratio:.6g} positive={report.positive} "
        f"decays={report.decays} pass_2_2={report.pass_2_2} pass_3_3={report.pass_3_3}"
    )
    return EXIT_OK if report.pass_2_2 else EXIT_CHECK_FAILED


def cmd_oracle(config_path) -> int:
    try:
        cfg = load_config(config_path)
        p = _build_problem(cfg)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        result = minimal_norm_limit(p, cfg=cfg.oracle)
    except (NewtonError, ContinuationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / "continuation.csv", _continuation_csv(p, result))
    print(
        f"{p.name}: continuation to a={result.a_values[-1]:.3e}, "
        f"||y||={float(np.linalg.norm(result.y_estimate)):.6g}, converged={result.converged} "
        f"-> {out_dir / 'continuation.csv'}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dsmflow",
        description="Regularized Newton flow for monotone operator equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="integrate the flow from a JSON config")
    p_run.add_argument("config")
    p_verify = sub.add_parser("verify", help="run and certify all bounds")
    p_verify.add_argument("config")
    sub.add_parser("gallery", help="list stock problems")
    p_sched = sub.add_parser("check-schedule", help="admissibility report")
    p_sched.add_argument("kind", choices=("power", "exponential", "constant"))
    p_sched.add_argument("a0", type=float)
    p_sched.add_argument("param", type=float, nargs="?", default=0.0)
    p_oracle = sub.add_parser("oracle", help="continuation a -> 0 toward the minimal-norm solution")
    p_oracle.add_argument("config")
    args = parser.parse_args(argv)

    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "verify":
        return cmd_verify(args.config)
    if args.command == "gallery":
        return cmd_gallery()
    if args.command == "check-schedule":
        return cmd_check_schedule(args.kind, args.a0, args.param)
    return cmd_oracle(args.config)


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
