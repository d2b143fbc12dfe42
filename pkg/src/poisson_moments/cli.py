"""Command-line interface: run any identity check and emit JSON or CSV.

Exit codes: 0 when the requested check passes (or the command is purely
informational), 1 when an identity check fails or is violated, 2 on usage
errors.  Output is deterministic for fixed arguments and seed, so the CLI
can gate a CI run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from .errors import (
    EnumerationTooLarge,
    IdentityViolation,
    InternalConsistencyError,
    TruncationError,
)
from .estimation import MCParams
from .identities import (
    CountFunction,
    centered_poisson_moment,
    covariance_identity,
    exponential_identity,
    stirling_moment_identity,
)
from .measure import MeasureSpace, space_from_config
from .moments import (
    centered_moment_deterministic,
    count_integrand_exact,
    moment_deterministic,
    compensated_moment_identity,
    verify_random_identity,
    verify_skorohod_identity,
)
from .partitions import bell_number, bell_polynomial, set_partitions, stirling2, \
    stirling_from_compositions
from .process import verify_duality
from .registry import make_functional, make_integrand
from .report import IdentityReport, mc_report

DEFAULT_REPLICATES = 100_000


def _interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected 'lo,hi', got {text!r}"
        ) from exc
    return lo, hi


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poisson-moments",
        description=(
            "Check moment identities for Poisson stochastic integrals: "
            "exact combinatorial identities and Monte Carlo agreement tests."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="write output to this path instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    def add_space(p: argparse.ArgumentParser) -> None:
        p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                       help="total mass of the default uniform space on [0,1]")
        p.add_argument("--config", help="JSON measure-space config file")

    def add_mc(p: argparse.ArgumentParser) -> None:
        p.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--multiplier", type=float, default=3.0,
                       help="confidence multiplier for combined standard errors")

    p = add("bell", "coefficients of the Bell polynomial of a given order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="also evaluate at this mean")

    p = add("stirling", "Stirling numbers of the second kind, both routes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)

    p = add("partitions", "enumerate the set partitions of {1..n}")
    p.add_argument("--n", type=int, required=True)

    p = add("moment-det", "exact moment of a deterministic integrand")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", default="linear", help="deterministic registry integrand")
    p.add_argument("--A", type=_interval, default=None)
    add_space(p)

    p = add("moment-centered", "exact centered moment of a deterministic integrand")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", default="linear")
    p.add_argument("--A", type=_interval, default=None)
    add_space(p)

    for name, help_text in (
        ("verify-random", "Monte Carlo check of the random-integrand moment identity"),
        ("verify-skorohod", "Monte Carlo check of the compensated-integral moment identity"),
        ("verify-compensated", "Monte Carlo check of the centered pathwise moment identity"),
    ):
        p = add(name, help_text)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--u", default="count", help="registry integrand")
        p.add_argument("--F", default="one", help="registry functional")
        p.add_argument("--A", type=_interval, default=None)
        p.add_argument("--B", type=_interval, default=None)
        p.add_argument("--poly", type=_float_list, default=None)
        add_space(p)
        add_mc(p)

    p = add("verify-duality", "Monte Carlo check of the gradient/compensated duality")
    p.add_argument("--u", default="indicator")
    p.add_argument("--F", default="one")
    p.add_argument("--A", type=_interval, default=None)
    p.add_argument("--B", type=_interval, default=None)
    p.add_argument("--poly", type=_float_list, default=None)
    add_space(p)
    add_mc(p)

    p = add("chen-stein", "power-weighted count expectation vs Stirling sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", default="one", help='count function: "one", "poly:c0,c1,...", "exp:rate"')
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)

    p = add("exp-identity", "exponentially weighted count expectation vs shifted sum")
    p.add_argument("--f", default="one")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--K", type=int, default=None, help="fixed truncation (skips the convergence rule)")

    p = add("covariance", "covariance of a functional with a count power")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--A", type=_interval, required=True)
    p.add_argument("--F", default="count", help="registry functional")
    p.add_argument("--B", type=_interval, default=None)
    p.add_argument("--poly", type=_float_list, default=None)
    add_space(p)
    add_mc(p)

    p = add("count-exact", "exact moment polynomial of the total-count integrand")
    p.add_argument("--n", type=int, required=True)

    p = add("centered-poisson", "centered count moments from no-singleton partitions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)

    return parser


def _space(args) -> MeasureSpace:
    if getattr(args, "config", None):
        return space_from_config(args.config)
    return MeasureSpace.uniform(getattr(args, "lam", 1.0))


def _mc(args) -> MCParams:
    return MCParams(
        replicates=args.replicates,
        seed=args.seed,
        confidence_multiplier=args.multiplier,
    )


def _integrand(args, space):
    return make_integrand(
        args.u, space, A=getattr(args, "A", None), B=getattr(args, "B", None),
        poly=getattr(args, "poly", None),
    )


def _functional(args, space):
    return make_functional(
        args.F, space, B=getattr(args, "B", None), poly=getattr(args, "poly", None)
    )


def _run(args) -> tuple[dict | IdentityReport, bool]:
    cmd = args.command

    if cmd == "bell":
        poly = bell_polynomial(args.n)
        payload = {"identity": "bell-polynomial", "n": args.n,
                   "coefficients": [int(c) for c in poly.coeffs]}
        if args.lam is not None:
            payload["value"] = float(poly(args.lam))
        return payload, True

    if cmd == "stirling":
        ks = range(args.n + 1) if args.k is None else [args.k]
        rows = []
        ok = True
        for k in ks:
            rec = stirling2(args.n, k)
            comp = stirling_from_compositions(args.n, k)
            rows.append({"k": k, "recurrence": rec, "composition_sum": comp,
                         "match": rec == comp})
            ok = ok and rec == comp
        return {"identity": "stirling-second-kind", "n": args.n, "entries": rows}, ok

    if cmd == "partitions":
        parts = list(set_partitions(args.n))
        expected = bell_number(args.n)
        return {
            "identity": "set-partitions",
            "n": args.n,
            "count": len(parts),
            "bell_number": expected,
            "partitions": [[list(b) for b in p.blocks] for p in parts],
        }, len(parts) == expected

    if cmd in ("moment-det", "moment-centered"):
        space = _space(args)
        u = _integrand(args, space)
        if not u.is_deterministic:
            raise ValueError(f"{args.u!r} is not a deterministic integrand")
        from .measure import DeterministicIntegrand

        f = DeterministicIntegrand(u.deterministic_values, u.support)
        if cmd == "moment-det":
            m = moment_deterministic(space, f, args.n)
            return {
                "identity": "deterministic-moment", "n": args.n,
                "u": u.label, "total_mass": space.total_mass,
                "partition_form": m.partition_form,
                "composition_form": m.composition_form,
                "value": m.value,
            }, True
        value = centered_moment_deterministic(space, f, args.n)
        return {
            "identity": "deterministic-centered-moment", "n": args.n,
            "u": u.label, "total_mass": space.total_mass, "value": value,
        }, True

    if cmd in ("verify-random", "verify-skorohod", "verify-compensated"):
        space = _space(args)
        u = _integrand(args, space)
        F = _functional(args, space)
        mc = _mc(args)
        fn = {
            "verify-random": verify_random_identity,
            "verify-skorohod": verify_skorohod_identity,
            "verify-compensated": compensated_moment_identity,
        }[cmd]
        report = fn(space, u, F, args.n, mc)
        return report, report.passed

    if cmd == "verify-duality":
        space = _space(args)
        u = _integrand(args, space)
        F = _functional(args, space)
        mc = _mc(args)
        inner, outer = verify_duality(F, u, space, mc)
        report = mc_report(
            "gradient-duality",
            {"u": u.label, "F": F.label if F else "one",
             "total_mass": space.total_mass, "replicates": mc.replicates},
            inner, outer, mc.confidence_multiplier, seed=mc.seed,
        )
        return report, report.passed

    if cmd == "chen-stein":
        report = stirling_moment_identity(args.lam, args.n, CountFunction.parse(args.f))
        return report, report.passed

    if cmd == "exp-identity":
        report = exponential_identity(args.lam, args.t, CountFunction.parse(args.f), args.K)
        return report, report.passed

    if cmd == "covariance":
        space = _space(args)
        F = _functional(args, space)
        report = covariance_identity(space, args.A, F, args.n, _mc(args))
        return report, report.passed

    if cmd == "count-exact":
        poly = count_integrand_exact(args.n)
        expected = bell_polynomial(2 * args.n)
        return {
            "identity": "count-integrand-exact", "n": args.n,
            "coefficients": [int(c) for c in poly.coeffs],
            "bell_order": 2 * args.n,
            "matches_bell": poly == expected,
        }, poly == expected

    if cmd == "centered-poisson":
        value, poly = centered_poisson_moment(args.lam, args.n)
        return {
            "identity": "centered-count-moment", "n": args.n, "lam": args.lam,
            "coefficients": [int(c) for c in poly.coeffs], "value": value,
        }, True

    raise ValueError(f"unknown command {cmd!r}")


def _payload_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in payload.items():
        writer.writerow([key, json.dumps(value, sort_keys=True)])
    return buf.getvalue()


def _emit(result: dict | IdentityReport, args) -> None:
    if isinstance(result, IdentityReport):
        text = result.to_json() if args.format == "json" else result.to_csv()
    else:
        text = (
            json.dumps(result, sort_keys=True, indent=2)
            if args.format == "json"
            else _payload_csv(result)
        )
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result, passed = _run(args)
    except (IdentityViolation, InternalConsistencyError, TruncationError) as exc:
        print(f"identity violation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, EnumerationTooLarge, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result, args)
    return 0 if passed else 1


def cli_main(argv: Sequence[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
