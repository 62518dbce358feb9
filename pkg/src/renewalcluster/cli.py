"""Command-line entry point.

Subcommands: ``simulate`` (draw one realization and write it as CSV),
``verify`` (run a configured verification experiment), ``coupling``
(convenience wrapper for coupling experiments), ``report`` (print a
human-readable summary of a result directory).

Exit statuses follow the runner contract: 0 pass, 1 acceptance failure,
2 configuration error, 3 runtime sampling error.  ``--threads`` (or the
RCS_THREADS environment variable) affects wall time only, never results.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import build_experiment_config, build_process_spec, parse_kv
from .errors import ConfigError, RenewalClusterError
from .process import sample_renewal_cluster_process
from .runner import STATUS_CONFIG, STATUS_RUNTIME, run_experiment
from .streams import stream_for

__all__ = ["main"]


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_kv(text)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("RCS_THREADS")
    return int(env) if env else 1


def _cmd_simulate(args) -> int:
    raw = _load_config(args.config)
    used = set()
    spec = build_process_spec(raw, used)
    seed = 0
    if "seed" in raw:
        used.add("seed")
        seed = int(raw["seed"])
    try:
        lo = float(raw["window.lo"])
        hi = float(raw["window.hi"])
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc.args[0]!r}") from exc
    used.update(("window.lo", "window.hi"))
    unknown = set(raw) - used
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    if args.seed is not None:
        seed = args.seed
    pattern = sample_renewal_cluster_process(spec, lo, hi, stream_for(seed, "simulate"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "pattern.csv").write_text(pattern.to_csv(), encoding="utf-8", newline="\n")
    print(f"wrote {len(pattern)} points to {out / 'pattern.csv'} "
          f"(overflow tally {pattern.overflow})")
    return 0


def _cmd_verify(args) -> int:
    return _cmd_verify_with(_load_config(args.config), args)


def _cmd_coupling(args) -> int:
    raw = _load_config(args.config)
    if raw.get("experiment", "coupling") != "coupling":
        raise ConfigError("coupling subcommand requires experiment = coupling")
    raw["experiment"] = "coupling"
    return _cmd_verify_with(raw, args)


def _cmd_verify_with(raw, args) -> int:
    if args.seed is not None:
        raw["seed"] = str(args.seed)
    if args.reps is not None:
        raw["n_rep"] = str(args.reps)
    cfg = build_experiment_config(raw)
    status = run_experiment(cfg, args.out, threads=_threads(args), raw_config=raw)
    print(f"experiment {cfg.kind}: exit status {status}")
    return status


def _cmd_report(args) -> int:
    out = Path(args.out)
    if not out.is_dir():
        print(f"no such result directory: {out}", file=sys.stderr)
        return STATUS_CONFIG
    shown = 0
    for csv in sorted(out.glob("*.csv")):
        print(f"== {csv.name}")
        print(csv.read_text(encoding="utf-8").rstrip())
        shown += 1
    manifest = out / "manifest.txt"
    if manifest.exists():
        print("== manifest.txt")
        print(manifest.read_text(encoding="utf-8").rstrip())
    return 0 if shown else STATUS_CONFIG


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcluster",
        description="Simulate and statistically verify renewal cluster point processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="flat key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--reps", type=int, default=None, help="override replication count")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument(
            "--threads", type=int, default=None,
            help="worker threads (wall time only; falls back to RCS_THREADS)",
        )

    common(sub.add_parser("simulate", help="draw one realization, write pattern.csv"))
    common(sub.add_parser("verify", help="run a verification experiment"))
    common(sub.add_parser("coupling", help="run a coupling experiment"))
    rep = sub.add_parser("report", help="print a result directory")
    rep.add_argument("--out", default="out", help="result directory to summarize")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "verify": _cmd_verify,
        "coupling": _cmd_coupling,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return STATUS_CONFIG
    except RenewalClusterError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return STATUS_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
