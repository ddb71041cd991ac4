"""Command-line front end.

Exit codes: 0 when every check passes (or the scan agrees with the hull),
1 when something fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from conelab.checks import CHECKS, verify
from conelab.exceptions import ConeLabError
from conelab.field import field_make, prime_power_decompose
from conelab.fitting import DEFAULT_THRESHOLD
from conelab.operators import ExponentPair, l2_opnorm
from conelab.report import emit_report, scan_to_report, verdict_rows_to_report
from conelab.scan import exponent_scan, load_config
from conelab.varieties import max_subspace_in_cone

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pair_list(text: str) -> tuple[ExponentPair, ...]:
    try:
        return tuple(ExponentPair.parse(x) for x in text.split(";") if x.strip())
    except (ValueError, ZeroDivisionError, ConeLabError) as exc:
        raise argparse.ArgumentTypeError(f"bad pair list {text!r}: {exc}") from None


def _write(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)


def _resolve_qs(args) -> tuple[int, ...] | None:
    if args.qs is not None:
        if args.p is not None:
            for q in args.qs:
                if prime_power_decompose(q)[0] != args.p:
                    raise ConeLabError(f"q={q} is not a power of p={args.p}")
        return args.qs
    if args.p is not None:
        return (field_make(args.p, args.e).q,)
    return None


def cmd_verify(args) -> int:
    qs = _resolve_qs(args)
    rows = verify(args.check, args.d, qs, args.seed, args.threshold)
    text = emit_report(verdict_rows_to_report(rows), args.format, args.out, seed=args.seed,
                       threshold=args.threshold, check=args.check,
                       q_grid={"source": "default" if qs is None else "user",
                               "qs": list(rows[0].qs)})
    _write(text, args.out)
    return EXIT_FAIL if any(r.failed for r in rows) else EXIT_OK


def cmd_scan(args) -> int:
    cfg = load_config(args.config, d=args.d, qs=args.qs, pairs=args.pairs,
                      families=tuple(args.families.split(",")) if args.families else None,
                      direction=args.direction, seed=args.seed, threshold=args.threshold,
                      mode=args.mode, out=args.out, format=args.format)
    result = exponent_scan(cfg)
    for err in result.errors:
        print(f"warning: {err}", file=sys.stderr)
    if not result.results:
        print("error: fewer than three usable q values", file=sys.stderr)
        return EXIT_FAIL
    text = emit_report(scan_to_report(result), cfg.format, cfg.out, seed=cfg.seed,
                       threshold=cfg.threshold, case=result.case.value, mode=cfg.mode,
                       direction=cfg.direction.value)
    _write(text, cfg.out)
    return EXIT_OK if result.all_agree else EXIT_FAIL


def cmd_subspace(args) -> int:
    field = field_make(args.p, args.e)
    search = max_subspace_in_cone(field, args.d, budget=args.budget, seed=args.seed)
    print(json.dumps(search.to_json()))
    return EXIT_OK


def cmd_opnorm(args) -> int:
    field = field_make(args.p, args.e)
    value = l2_opnorm(field, args.d, method=args.method)
    print(json.dumps({"p": field.p, "e": field.e, "d": args.d, "q": field.q,
                      "method": args.method, "l2_opnorm": value}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a named check across q")
    v.add_argument("--check", required=True, choices=sorted(CHECKS), metavar="ID")
    v.add_argument("--p", type=int)
    v.add_argument("--e", type=int, default=1)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--qs", type=_int_list, help="comma-separated q values (default: per check)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="exponent scan; flags override the config file")
    s.add_argument("--config")
    s.add_argument("--d", type=int)
    s.add_argument("--qs", type=_int_list)
    s.add_argument("--pairs", type=_pair_list, help="e.g. '5/6:1/4;10/13:2/13'")
    s.add_argument("--families")
    s.add_argument("--direction", choices=("forward", "adjoint"))
    s.add_argument("--mode", choices=("check", "conjecture"))
    s.add_argument("--seed", type=int)
    s.add_argument("--threshold", type=float)
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"))
    s.set_defaults(func=cmd_scan)

    for name, func, text in (("subspace", cmd_subspace, "largest subspace inside the cone"),
                             ("opnorm", cmd_opnorm, "exact L^2 -> L^2 norm of A_C")):
        c = sub.add_parser(name, help=text)
        c.add_argument("--p", type=int, required=True)
        c.add_argument("--e", type=int, default=1)
        c.add_argument("--d", type=int, required=True)
        if name == "subspace":
            c.add_argument("--budget", type=int, default=200_000)
            c.add_argument("--seed", type=int, default=0)
        else:
            c.add_argument("--method", choices=("svd", "power"), default="svd")
        c.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConeLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
