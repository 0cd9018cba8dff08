"""Command-line driver: ``verify``, ``orbit`` and ``list-actions``.

Exit status is 0 when every check passes, 1 when some check fails and 2 on
configuration, usage or I/O errors.
"""
from __future__ import annotations

import argparse
import sys

from .actions import builtin_action, builtin_actions, orbit_sample, write_orbit_csv
from .config import REPORT_DIR_ENV, load_config
from .errors import LieActError
from .report import run_suite
from .suites import SUITE_NAMES

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _id_list(text):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _point(text):
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _nonneg_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lieact", description="Numerical verification of Lie group action identities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the property suites and write a JSON report",
                       epilog=f"The default report directory is taken from ${REPORT_DIR_ENV}.")
    v.add_argument("--config", help="key = value config file")
    v.add_argument("--actions", type=_id_list, help="comma-separated action ids (default: all)")
    v.add_argument("--suites", type=_id_list,
                   help=f"comma-separated subset of: {', '.join(SUITE_NAMES)}")
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", type=float, help="analytic-path tolerance (tol_analytic)")
    v.add_argument("--tol-fd", type=float, help="finite-difference-path tolerance")
    v.add_argument("--fd-step", type=float)
    v.add_argument("--report", help="output path for the JSON report")
    v.add_argument("--jobs", type=int, default=1,
                   help="worker processes; the report does not depend on this")
    v.add_argument("--quiet", action="store_true", help="do not list failing checks")

    o = sub.add_parser("orbit", help="export a seeded orbit sample as CSV")
    o.add_argument("--action", required=True)
    o.add_argument("--point", required=True, type=_point,
                   help="start point, e.g. 1,0 (use --point=-1,0 for a leading minus)")
    o.add_argument("--n", required=True, type=_nonneg_int)
    o.add_argument("--seed", type=int, default=42)
    o.add_argument("--out", required=True)

    ls = sub.add_parser("list-actions", help="list the builtin actions")
    ls.add_argument("--machine", action="store_true", help="one id per line")
    return p


def _cmd_verify(args) -> int:
    if args.jobs < 1:
        raise LieActError("--jobs must be >= 1")
    cfg = load_config(args.config, action_ids=args.actions, suites=args.suites,
                      trials=args.trials, seed=args.seed, tol_analytic=args.tol,
                      tol_fd=args.tol_fd, fd_step=args.fd_step, report_path=args.report)
    report = run_suite(cfg, jobs=args.jobs)
    checks = report.checks
    failed = [c for c in checks if not c.passed]
    if not args.quiet:
        for c in failed:
            print(f"FAIL {c.action} {c.check_name}: max={c.max_residual:.3g} "
                  f"tol={c.tolerance:.3g} ({c.relation})", file=sys.stderr)
    status = "PASS" if report.overall_pass else "FAIL"
    print(f"{status}: {len(checks) - len(failed)}/{len(checks)} checks passed; "
          f"report {cfg.report_path}; {report.wall_time:.1f}s", file=sys.stderr)
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


def _cmd_orbit(args) -> int:
    spec = builtin_action(args.action)
    x = spec.point(args.point)
    pts = orbit_sample(spec, x, args.n, args.seed)
    write_orbit_csv(pts, args.out, spec.domain_id, spec.manifold_dim)
    return EXIT_PASS


def _cmd_list(args) -> int:
    specs = builtin_actions()
    if args.machine:
        for name in specs:
            print(name)
        return EXIT_PASS
    print(f"{'id':24s} {'group':16s} {'dim G':>5s} {'dim M':>5s}  free  regular")
    for name, s in specs.items():
        print(f"{name:24s} {s.group.name:16s} {s.group.group_dim:5d} {s.manifold_dim:5d}  "
              f"{'yes' if s.known_free else 'no':4s}  {'yes' if s.known_regular else 'no'}")
    return EXIT_PASS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"verify": _cmd_verify, "orbit": _cmd_orbit, "list-actions": _cmd_list}
    try:
        return handler[args.command](args)
    except LieActError as exc:
        print(f"lieact {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lieact {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
