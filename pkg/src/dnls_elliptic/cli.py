"""Command-line front end.

Commands
--------
``run --config FILE`` / ``run --preset NAME --out FILE``
    Evaluate a grid and write CSV plus a ``.summary.json`` sidecar.
``verify --preset all|NAME``
    Run the verification suite; exit code 1 if any check fails.
``presets``
    Print the figure preset table.
``serve``
    Start the HTTP service.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config, parse_config
from .errors import ConfigurationError
from .presets import PRESETS, preset_table
from .runner import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY_FAILED, THREADS_ENV, execute, thread_count, verify_presets


def _parser():
    p = argparse.ArgumentParser(prog="dnls-elliptic", description="Elliptic-background DNLS solutions.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate a configuration or preset on a grid")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML configuration file")
    src.add_argument("--preset", choices=sorted(PRESETS), help="figure preset")
    r.add_argument("--task", help="override the task (default: the preset's figure task)")
    r.add_argument("--out", help="output CSV path")
    r.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or CPU count)")

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--preset", default="all", help="preset name or 'all'")
    v.add_argument("--config", help="verify the case described by a configuration file")
    v.add_argument("--n-points", type=int, default=100)
    v.add_argument("--report", help="write the report text here (and a .summary.json sidecar)")

    sub.add_parser("presets", help="list figure presets")

    s = sub.add_parser("serve", help="start the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return p


def _cmd_run(args):
    if args.config:
        cfg = load_config(args.config)
        if args.task:
            cfg = cfg.model_copy(update={"task": args.task})
    else:
        cfg = parse_config({"preset": args.preset, "task": args.task or "figure"})
    if args.threads is not None and args.threads < 1:
        raise ConfigurationError("--threads must be positive")
    res = execute(cfg, out=args.out, threads=args.threads or thread_count())
    if res.report is not None:
        print(res.report.text())
    stream = sys.stdout if res.exit_code == EXIT_OK else sys.stderr
    print(res.message if not res.csv_path else f"{res.message}: wrote {res.csv_path} and {res.summary_path}",
          file=stream)
    return res.exit_code


def _cmd_verify(args):
    if args.config:
        cfg = load_config(args.config).model_copy(update={"task": "verify"})
        res = execute(cfg, out=args.report)
        if res.report is not None:
            print(res.report.text())
        print(res.message, file=sys.stdout if res.exit_code == EXIT_OK else sys.stderr)
        return res.exit_code
    names = list(PRESETS) if args.preset == "all" else [args.preset]
    unknown = [n for n in names if n not in PRESETS]
    if unknown:
        raise ConfigurationError(f"unknown preset {unknown[0]!r}; choose from all, {', '.join(PRESETS)}")
    rep = verify_presets(names, n_points=args.n_points)
    print(rep.text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(rep.text() + "\n")
        rep.write_json(f"{args.report}.summary.json")
    failed = [c.name for c in rep.checks if not c.passed]
    print(f"{len(rep.checks) - len(failed)}/{len(rep.checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def _cmd_serve(args):
    import uvicorn

    uvicorn.run("dnls_elliptic.service:app", host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "presets":
            print(preset_table())
            return EXIT_OK
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_serve(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
