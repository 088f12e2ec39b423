"""Command-line entry point: trajectories, figure datasets, sweeps, verify.

CSV column orders are a frozen contract (the plotting frontend and the
test suite parse them).  Floats are written with full round-trip
precision, UTF-8, LF line endings.  Exit codes: 0 success, 1 detection or
verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import oracle, qinfo
from ._stepper import IntegrationError
from .cascade import SystemParams, auto_t_end, evolve, initial_all_excited
from .observables import jz_moments, power_breakdown
from .qinfo import DetectionError, detect_double_sudden_change, locate_extrema

TRAJECTORY_HEADER = [
    "gamma_t", "jz_mean", "jz2_mean", "p_total", "p_ind", "p_corr",
    "wysi_sigma_z", "wysi_jx", "w_xx", "w_zz", "lqu", "lqu_minimizer",
]
POPULATIONS_HEADER = ["gamma_t", "m", "p"]
SCALING_HEADER = [
    "n", "t_max", "t_min", "gap", "t_i", "t_f", "width_dsc", "p_max_over_n2",
]
FIG2_HEADER = ["gamma_t", "p_total", "wysi_jx"]
FIG2_NORM_HEADER = FIG2_HEADER + ["p_total_norm", "wysi_jx_norm"]


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n_emitters: int | None
    n_list: tuple | None
    gamma: float
    omega: float
    t_end: float | None  # None means auto
    n_samples: int
    rel_tol: float
    abs_tol: float
    out_dir: str
    seed: int | None


@dataclass(frozen=True)
class ScalingRecord:
    n: int
    t_max: float
    t_min: float
    gap: float
    t_i: float
    t_f: float
    width_dsc: float
    p_max_over_n2: float

    def __post_init__(self):
        times = (self.t_max, self.t_min, self.gap, self.t_i, self.t_f)
        if any(t < 0 for t in times):
            raise ValueError("scaling-record times must be nonnegative")
        if self.n >= 2 and not self.width_dsc > 0:
            raise ValueError("width_dsc must be positive for N >= 2")


def _fmt(x) -> str:
    # repr of a python float is the shortest round-trip form
    return repr(float(x))


def _write_csv(path: str, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _trajectory_rows(traj, power_scale: float) -> list:
    """One CSV row per sample; powers divided by `power_scale`."""
    params = traj.params
    jx_op = qinfo.build_jx(params.two_j)
    rows = []
    for t, state in zip(traj.times, traj.states):
        mean, second = jz_moments(state)
        pb = power_breakdown(params, state)
        w = qinfo.w_matrix(state)
        value, minimizer = qinfo.lqu(state)
        rows.append([
            _fmt(t), _fmt(mean), _fmt(second),
            _fmt(pb.p_total / power_scale),
            _fmt(pb.p_ind / power_scale),
            _fmt(pb.p_corr / power_scale),
            _fmt(qinfo.wysi_sigma_z_local(state)),
            _fmt(qinfo.wysi_symmetric(state, jx_op)),
            _fmt(w.entries[0, 0]), _fmt(w.entries[2, 2]),
            _fmt(value), minimizer,
        ])
    return rows


def _population_rows(traj) -> list:
    rows = []
    for t, state in zip(traj.times, traj.states):
        for m, p in zip(state.m_values, state.populations):
            rows.append([_fmt(t), _fmt(m), _fmt(p)])
    return rows


def _run_trajectory(cfg: RunConfig, n: int):
    params = SystemParams(n, cfg.gamma, cfg.omega)
    t_end = cfg.t_end
    if t_end is None:
        t_end = auto_t_end(params, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)
    return evolve(
        params, initial_all_excited(params), t_end, cfg.n_samples,
        cfg.rel_tol, cfg.abs_tol,
    )


def _emit_trajectory(cfg: RunConfig, traj, with_populations: bool) -> None:
    gw = cfg.gamma * cfg.omega
    _write_csv(
        os.path.join(cfg.out_dir, "trajectory.csv"),
        TRAJECTORY_HEADER,
        _trajectory_rows(traj, power_scale=gw),
    )
    if gw != 1.0:
        # frozen contract carries P/(gamma*omega); raw powers go alongside
        _write_csv(
            os.path.join(cfg.out_dir, "trajectory_raw.csv"),
            TRAJECTORY_HEADER,
            _trajectory_rows(traj, power_scale=1.0),
        )
    if with_populations:
        _write_csv(
            os.path.join(cfg.out_dir, "populations.csv"),
            POPULATIONS_HEADER,
            _population_rows(traj),
        )


def _scaling_record(cfg: RunConfig, n: int) -> ScalingRecord:
    traj = _run_trajectory(cfg, n)
    try:
        dsc = detect_double_sudden_change(
            traj, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol
        )
        ext = locate_extrema(traj)
    except DetectionError as exc:
        raise DetectionError(f"N={n}: {exc}") from exc
    pops = traj.populations_matrix()
    p_max = float(qinfo.power_total_rows(pops, traj.params.two_j).max())
    return ScalingRecord(
        n=n,
        t_max=ext.t_max_power,
        t_min=ext.t_min_wysi_jx,
        gap=ext.gap,
        t_i=dsc.t_initial,
        t_f=dsc.t_final,
        width_dsc=dsc.width,
        p_max_over_n2=p_max / n**2,
    )


def _scaling_rows(records) -> list:
    return [
        [str(r.n), _fmt(r.t_max), _fmt(r.t_min), _fmt(r.gap),
         _fmt(r.t_i), _fmt(r.t_f), _fmt(r.width_dsc), _fmt(r.p_max_over_n2)]
        for r in records
    ]


def cmd_simulate(cfg: RunConfig, with_populations: bool) -> int:
    traj = _run_trajectory(cfg, cfg.n_emitters)
    _emit_trajectory(cfg, traj, with_populations)
    return 0


def cmd_fig(cfg: RunConfig, which: int) -> int:
    if which in (1, 2):
        traj = _run_trajectory(cfg, cfg.n_emitters)
        _emit_trajectory(cfg, traj, with_populations=(which == 1))
        if which == 1:
            dsc = detect_double_sudden_change(
                traj, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol
            )
            _write_json(os.path.join(cfg.out_dir, "dsc.json"), {
                "n": cfg.n_emitters,
                "t_initial": dsc.t_initial,
                "t_final": dsc.t_final,
                "width": dsc.width,
                "minimizer_sequence": list(dsc.minimizer_sequence),
            })
        else:
            ext = locate_extrema(traj)
            gw = cfg.gamma * cfg.omega
            jx_op = qinfo.build_jx(traj.params.two_j)
            rows = []
            for t, state in zip(traj.times, traj.states):
                p_tot = power_breakdown(traj.params, state).p_total / gw
                i_jx = qinfo.wysi_symmetric(state, jx_op)
                row = [_fmt(t), _fmt(p_tot), _fmt(i_jx)]
                if cfg.n_emitters == 50:
                    # the reference normalizations are specific to N=50
                    row += [_fmt(p_tot / 500.0), _fmt(4.0 * i_jx / 50.0)]
                rows.append(row)
            header = FIG2_NORM_HEADER if cfg.n_emitters == 50 else FIG2_HEADER
            _write_csv(os.path.join(cfg.out_dir, "fig2.csv"), header, rows)
            _write_json(os.path.join(cfg.out_dir, "extrema.json"), {
                "n": cfg.n_emitters,
                "t_max_power": ext.t_max_power,
                "t_min_wysi_jx": ext.t_min_wysi_jx,
                "gap": ext.gap,
            })
        return 0
    records = [_scaling_record(cfg, n) for n in cfg.n_list]
    _write_csv(
        os.path.join(cfg.out_dir, "scaling.csv"), SCALING_HEADER,
        _scaling_rows(records),
    )
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    records = [_scaling_record(cfg, n) for n in cfg.n_list]
    _write_csv(
        os.path.join(cfg.out_dir, "scaling.csv"), SCALING_HEADER,
        _scaling_rows(records),
    )
    log_n = np.log([r.n for r in records])
    log_w = np.log([r.width_dsc for r in records])
    log_g = np.log([r.gap for r in records])
    slope_w, intercept_w = np.polyfit(log_n, log_w, 1)
    slope_g, _ = np.polyfit(log_n, log_g, 1)
    resid_w = float(np.sqrt(np.mean(
        (log_w - (slope_w * log_n + intercept_w)) ** 2
    )))
    _write_json(os.path.join(cfg.out_dir, "scaling_fit.json"), {
        "slope_width_dsc": float(slope_w),
        "slope_gap": float(slope_g),
        "residual_width": resid_w,
        "n_list": list(cfg.n_list),
    })
    return 0


def cmd_verify(cfg: RunConfig, max_n: int, tol: float) -> int:
    # negative-control hook: scales the cascade rates on the symmetric side
    rate_scale = float(os.environ.get("DICKESIM_CORRUPT_RATE", "1.0"))
    all_ok = True
    for n in range(2, max_n + 1):
        params = SystemParams(n, cfg.gamma, cfg.omega)
        report = oracle.compare(
            params, n_samples=cfg.n_samples, tol=tol, rate_scale=rate_scale
        )
        for line in report.lines():
            print(line)
        if not report.passed:
            all_ok = False
            print(f"N={n}  FAILED: {', '.join(report.failing_quantities())}")
    print("verification " + ("PASSED" if all_ok else "FAILED"))
    return 0 if all_ok else 1


def _parse_n_list(text: str, parser: argparse.ArgumentParser) -> tuple:
    try:
        values = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        parser.error(f"--n-list must be comma-separated integers, got {text!r}")
    if not values:
        parser.error("--n-list must not be empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickesim",
        description="Superradiant cascade simulation and skew-information "
                    "diagnostics in the Dicke basis",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float, default=1.0,
                        help="decay rate (default 1.0)")
    common.add_argument("--omega", type=float, default=1.0,
                        help="transition frequency (default 1.0)")
    common.add_argument("--t-end", default="auto",
                        help="horizon in gamma*t, or 'auto' (pulse-containing)")
    common.add_argument("--samples", type=int, default=2000,
                        help="uniform sample count (default 2000)")
    common.add_argument("--rel-tol", type=float, default=1e-10)
    common.add_argument("--abs-tol", type=float, default=1e-12)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized self-checks (reserved; the "
                             "current subcommands are deterministic)")

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="single trajectory to trajectory.csv")
    p_sim.add_argument("--n", type=int, default=50, help="emitter count")
    p_sim.add_argument("--populations", action="store_true",
                       help="also write populations.csv (long form)")

    p_fig = sub.add_parser("fig", parents=[common],
                           help="emit the dataset behind one reference figure")
    p_fig.add_argument("which", type=int, choices=(1, 2, 3))
    p_fig.add_argument("--n", type=int, default=50)
    p_fig.add_argument("--n-list", default=None,
                       help="comma-separated emitter counts (fig 3)")

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="scaling sweep over N with log-log fits")
    p_sweep.add_argument("--n-list", default="16,24,32,48,64,96",
                         help="comma-separated emitter counts")

    p_verify = sub.add_parser("verify", parents=[common],
                              help="cross-check against the full-space oracle")
    p_verify.add_argument("--max-n", type=int, default=4)
    p_verify.add_argument("--tol", type=float, default=1e-6)

    return parser


def _config_from_args(args, parser, n=None, n_list=None) -> RunConfig:
    if args.t_end == "auto":
        t_end = None
    else:
        try:
            t_end = float(args.t_end)
        except ValueError:
            parser.error(f"--t-end must be a number or 'auto', got {args.t_end!r}")
        if not t_end > 0:
            parser.error("--t-end must be > 0")
    if not args.gamma > 0:
        parser.error("--gamma must be > 0")
    if not args.omega > 0:
        parser.error("--omega must be > 0")
    if args.samples < 2:
        parser.error("--samples must be >= 2")
    if not (args.rel_tol > 0 and args.abs_tol > 0):
        parser.error("tolerances must be > 0")
    if n is not None and n < 1:
        parser.error("--n must be >= 1")
    return RunConfig(
        subcommand=args.subcommand,
        n_emitters=n,
        n_list=n_list,
        gamma=args.gamma,
        omega=args.omega,
        t_end=t_end,
        n_samples=args.samples,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        out_dir=args.out,
        seed=args.seed,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.subcommand == "simulate":
            cfg = _config_from_args(args, parser, n=args.n)
            os.makedirs(cfg.out_dir, exist_ok=True)
            return cmd_simulate(cfg, with_populations=args.populations)

        if args.subcommand == "fig":
            n_list = None
            if args.which == 3:
                if args.n_list is None:
                    parser.error("fig 3 requires --n-list")
                n_list = _parse_n_list(args.n_list, parser)
                if any(n < 2 for n in n_list):
                    parser.error("fig 3 requires every N >= 2")
            cfg = _config_from_args(args, parser, n=args.n, n_list=n_list)
            os.makedirs(cfg.out_dir, exist_ok=True)
            return cmd_fig(cfg, args.which)

        if args.subcommand == "sweep":
            n_list = _parse_n_list(args.n_list, parser)
            if len(n_list) < 4:
                parser.error("sweep requires an --n-list with >= 4 values")
            if any(n < 8 for n in n_list):
                parser.error("sweep requires every N >= 8")
            cfg = _config_from_args(args, parser, n_list=n_list)
            os.makedirs(cfg.out_dir, exist_ok=True)
            return cmd_sweep(cfg)

        if args.subcommand == "verify":
            if args.max_n > oracle.MAX_ORACLE_N:
                parser.error(f"--max-n is capped at {oracle.MAX_ORACLE_N}")
            if args.max_n < 2:
                parser.error("--max-n must be >= 2")
            if not args.tol > 0:
                parser.error("--tol must be > 0")
            cfg = _config_from_args(args, parser)
            return cmd_verify(cfg, args.max_n, args.tol)
    except (DetectionError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    parser.error(f"unknown subcommand {args.subcommand!r}")


if __name__ == "__main__":
    sys.exit(main())
