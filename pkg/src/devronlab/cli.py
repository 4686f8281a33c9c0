"""``devron`` command line: width verifications, conjecture experiments and a self-test.

Exit status is 0 when the verdict passes, 1 when it fails and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import conjectures, devron, pentagram, recutting, toda
from .exactfield import GaussianRational, affine_point
from .lattice import minimal_axis_period, parse_lattice
from .octahedron import OctahedronSystem
from .ysystem import YSystem

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CONJECTURE_RUNNERS = {
    "circle": (conjectures.conj_circle_experiment, 3),
    "ks3d": (conjectures.conj_ks3d_experiment, 4),
    "schubert": (conjectures.conj_schubert_experiment, 6),
}


class UsageError(ValueError):
    pass


def _need(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="devron", description="Exact Devron-pair experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--max-steps", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="report path (stdout when omitted)")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    sub = parser.add_subparsers(dest="command", required=True)
    for name, default_lattice in (("oct", "3,0;1,1"), ("ysys", "3,0;1,1")):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--lattice", default=default_lattice)
    p = sub.add_parser("pentagram", parents=[common])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--lower", action="store_true", help="the d = 1 map on pairs of point sequences")
    for name, default_n in (("recut", 4), ("toda", 4)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--n", type=int, default=default_n)
    p = sub.add_parser("conj", parents=[common])
    p.add_argument("experiment", choices=sorted(CONJECTURE_RUNNERS))
    p.add_argument("--n", type=int, default=None)
    sub.add_parser("selftest", parents=[common])
    return parser


def _lattice(text: str):
    try:
        return parse_lattice(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _system_for(args):
    """The width-harness adapter and whether widths must match exactly."""
    if args.command == "oct":
        lattice = _lattice(args.lattice)
        _need(minimal_axis_period(lattice)[0] >= 2, "lattice needs a minimal axis period of at least 2")
        return OctahedronSystem(lattice), True
    if args.command == "ysys":
        lattice = _lattice(args.lattice)
        _need(lattice.det >= 2, "lattice determinant must be at least 2")
        # widths up to det - 1 are allowed; equality is logged, not required
        return YSystem(lattice), False
    if args.command == "pentagram":
        if args.lower or args.dim == 1:
            _need(args.n >= 3, "--n must be at least 3 for the lower map")
            return pentagram.LowerPentagramSystem(args.n), True
        _need(args.dim >= 2, "--dim must be at least 1")
        _need(args.n >= max(4, args.dim + 2), f"--n must be at least {max(4, args.dim + 2)} for --dim {args.dim}")
        return pentagram.PentagramSystem(args.n, args.dim), True
    if args.command == "recut":
        _need(args.n >= 2, "--n must be at least 2")
        return recutting.RecuttingSystem(args.n), True
    if args.command == "toda":
        _need(args.n >= 2, "--n must be at least 2")
        return toda.TodaSystem(args.n), True
    raise UsageError(f"unknown command {args.command!r}")


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _devron_csv(report: dict) -> str:
    rows = []
    for t in report["trials"]:
        rows.append({
            "system": report["system"],
            "seed": report["seed"],
            "trial_index": t["trial_index"],
            "width": t["width"],
            "backward_from_U": t["singular_at"]["backward_from_U"],
            "forward_from_V": t["singular_at"]["forward_from_V"],
            "round_trip": t["round_trip"],
            "redraws": len(t["redraws"]),
            "discarded": t["discarded"],
            "reason": t["reason"],
            "ok": t["ok"],
        })
    return _csv_text(rows)


def _conjecture_csv(report: dict) -> str:
    rows = [{"system": report["system"], "seed": report["seed"], **t} for t in report["trials"]]
    return _csv_text(rows)


def _selftest_csv(report: dict) -> str:
    return _csv_text([{"check": c["check"], "ok": c["ok"]} for c in report["checks"]])


def selftest_checks() -> list[tuple[str, bool]]:
    """Quick exact checks against known values."""
    F = devron.example_forward
    start = tuple(Fraction(x) for x in (1, 1, 1, 2, 1, 3))
    once = F(start)
    square = pentagram.TwistedPolygon(
        tuple(affine_point(x, y) for x, y in ((0, 0), (1, 0), (1, 1), (0, 1))),
        ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    )
    collapsed = pentagram.pentagram_step(square, strict=False)
    circle = conjectures.circle_second_intersection(*(conjectures.point(x, y) for x, y in ((0, 0), (1, 1), (2, 0), (2, 2), (4, 0))))
    a, b, c = GaussianRational(0, 0), GaussianRational(1, 2), GaussianRational(3, 0)
    return [
        ("example map F", once == (2, -5, 3, 1, 1, 7)),
        ("example map F^2", F(once) == (1, 18, 7, 18, -5, 18)),
        ("example map round trip", devron.example_backward(once) == start),
        ("unit square collapses to a point", len(set(collapsed.vertices)) == 1),
        ("circle second intersection", circle == conjectures.point(Fraction(8, 5), Fraction(4, 5))),
        ("recut matches reflection", recutting.recut((a, b, c), 2)[1] == recutting.reflection_oracle(a, b, c)),
        ("toda mu/nu consistency", toda.consistency_check(((1, 2), (3, 5)))),
    ]


def run(args) -> tuple[dict, str, int]:
    """Run one configuration; returns (report, serialized text, exit status)."""
    stamp = not args.no_timestamp
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.max_steps is not None and args.max_steps < 1:
        raise UsageError("--max-steps must be at least 1")

    if args.command == "selftest":
        checks = selftest_checks()
        report = {
            "system": "selftest",
            "checks": [{"check": name, "ok": ok} for name, ok in checks],
            "verdict": "pass" if all(ok for _, ok in checks) else "fail",
        }
        text = _selftest_csv(report) if args.format == "csv" else None
        return report, text, EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL

    if args.command == "conj":
        runner, least = CONJECTURE_RUNNERS[args.experiment]
        n = least if args.n is None else args.n
        _need(n >= least, f"--n must be at least {least} for {args.experiment}")
        result = runner(n, args.trials, args.seed, args.max_steps)
        report = result.to_dict()
        text = _conjecture_csv(report) if args.format == "csv" else None
        # informational: success means the harness produced observations
        return report, text, EXIT_PASS if result.kept() else EXIT_FAIL

    system, exact = _system_for(args)
    max_steps = devron.DEFAULT_MAX_STEPS if args.max_steps is None else args.max_steps
    result = devron.verify_pair(system, args.trials, args.seed, exact=exact, max_steps=max_steps)
    report = result.to_dict(timestamp=stamp)
    text = _devron_csv(report) if args.format == "csv" else None
    return report, text, EXIT_PASS if result.passed else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, text, status = run(args)
    except UsageError as exc:
        print(f"devron: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if text is None:
        text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{report['system']}: {report['verdict']}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
