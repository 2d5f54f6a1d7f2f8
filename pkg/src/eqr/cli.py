"""Command-line front end: Monte Carlo campaigns and self-verification.

    eqr run --trajectory hover --experiment transient --out results/
    eqr verify

Campaign outputs are plain CSV (17 significant digits, so a rerun with the
same flags is byte-identical) plus a manifest recording the fully resolved
configuration.
"""

import argparse
import datetime
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, config, sim, verify
from .lie import SymmetryTag

TRIALS_HEADER = (
    "t,trial,symmetry,err_att_sq,err_pos_sq,err_vel_sq,err_total_sq,"
    "omega_dev_norm,thrust_dev"
)
SUMMARY_HEADER = "t,symmetry,p05,p50,p95"
RMSE_HEADER = "symmetry,p20,p50,p80,rmse_median"


def _fmt(x):
    return "%.17g" % float(x)


def write_trials_csv(path, summary):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRIALS_HEADER + "\n")
        for tag in summary.config.symmetries:
            for lg in summary.logs[tag]:
                for k in range(lg.n_valid):
                    row = lg.records[k]
                    fh.write(
                        "%s,%d,%s,%s,%s,%s,%s,%s,%s\n"
                        % (
                            _fmt(lg.times[k]),
                            lg.trial,
                            tag.value,
                            _fmt(row[0]),
                            _fmt(row[1]),
                            _fmt(row[2]),
                            _fmt(row[3]),
                            _fmt(row[4]),
                            _fmt(row[5]),
                        )
                    )


def write_summary_csv(path, summary):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for tag in summary.config.symmetries:
            band = summary.band[tag]
            for k, t in enumerate(summary.times):
                fh.write(
                    "%s,%s,%s,%s,%s\n"
                    % (_fmt(t), tag.value, _fmt(band[0, k]), _fmt(band[1, k]), _fmt(band[2, k]))
                )


def write_rmse_csv(path, summary):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RMSE_HEADER + "\n")
        for tag in summary.config.symmetries:
            p20, p50, p80 = summary.rmse_percentiles[tag]
            fh.write(
                "%s,%s,%s,%s,%s\n"
                % (tag.value, _fmt(p20), _fmt(p50), _fmt(p80), _fmt(p50))
            )


def write_manifest(path, summary, experiment, outputs):
    manifest = {
        "tool": "eqr",
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "experiment": experiment,
        "config": config.config_to_dict(summary.config),
        "outputs": outputs,
        "campaigns": [
            {
                "symmetry": tag.value,
                "trials": summary.config.trials,
                "diverged": summary.diverged[tag],
            }
            for tag in summary.config.symmetries
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def resolve_config(args):
    """Config file, then flag overrides, then the experiment protocol."""
    cfg = config.parse_config(args.config) if args.config else config.config_from_dict({})
    overrides = {}
    if args.trajectory:
        overrides["trajectory"] = args.trajectory
    if args.symmetry and args.symmetry != "all":
        overrides["symmetries"] = (SymmetryTag(args.symmetry),)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        cfg = replace(cfg, **overrides)
    if args.experiment == "transient":
        # transient protocol: perturbed starts, no process noise
        cfg = replace(cfg, process_std=0.0)
    elif args.experiment == "asymptotic":
        # asymptotic protocol: exact starts, persistent process noise
        cfg = replace(cfg, init_std=(0.0, 0.0, 0.0))
    return cfg


def cmd_run(args):
    cfg = resolve_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = sim.run_campaign(cfg)

    outputs = {"summary": "summary.csv", "rmse": "rmse.csv", "trials": None}
    if not args.summary_only:
        outputs["trials"] = "trials.csv"
        write_trials_csv(out_dir / "trials.csv", summary)
    write_summary_csv(out_dir / "summary.csv", summary)
    write_rmse_csv(out_dir / "rmse.csv", summary)
    write_manifest(out_dir / "manifest.json", summary, args.experiment, outputs)

    for tag in cfg.symmetries:
        p20, p50, p80 = summary.rmse_percentiles[tag]
        print(
            "%-6s %d trials, %d diverged, rmse median %.6g"
            % (tag.value, cfg.trials, summary.diverged[tag], p50)
        )
        rate = summary.diverged[tag] / cfg.trials
        if rate > 0.5:
            print(
                "warning: %s diverged in %.0f%% of trials; results are mostly "
                "truncated records" % (tag.value, 100.0 * rate)
            )
    print("wrote %s" % out_dir)
    return 0


def cmd_verify(args):
    results = verify.run_all()
    width = max(len(r.name) for r in results)
    failed = False
    for r in results:
        status = "ok" if r.passed else "FAIL"
        print(
            "%-*s  max residual %10.3e  (tol %7.1e)  %s"
            % (width, r.name, r.residual, r.tol, status)
        )
        failed = failed or not r.passed
    if failed:
        print("verification FAILED")
        return 1
    print("all checks passed")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eqr",
        description="Quadrotor tracking benchmarks for three symmetry-based LQR designs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo campaign and write CSV results")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--trajectory", choices=sorted(sim.TRAJECTORIES))
    run.add_argument(
        "--symmetry",
        choices=[t.value for t in SymmetryTag] + ["all"],
        help="restrict to one symmetry (default: all from config)",
    )
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", default="eqr_out", help="output directory")
    run.add_argument(
        "--experiment",
        choices=["transient", "asymptotic"],
        help="transient: initial perturbations only; asymptotic: process noise only",
    )
    run.add_argument(
        "--summary-only",
        action="store_true",
        help="skip the per-step trials.csv",
    )
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the built-in consistency checks")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
