#!/usr/bin/env python3
"""Run the full identity suite and write a combined JSON + CSV report.

Covers the exact checks (Bell reproduction, count-integrand moments,
power-weighted expectations, centered count moments) and the Monte Carlo
agreement tests (random-integrand, compensated-integral, centered
pathwise, duality, covariance) on the default unit-mass space.

Usage:
    python scripts/run_identity_suite.py --replicates 50000 --seed 7 \
        --out-json reports/suite.json --out-csv reports/suite.csv
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

from poisson_moments import (
    CountFunction,
    MCParams,
    MeasureSpace,
    bell_polynomial,
    count_integrand_exact,
    centered_poisson_moment,
    compensated_moment_identity,
    covariance_identity,
    exponential_identity,
    make_functional,
    make_integrand,
    stirling_moment_identity,
    verify_duality,
    verify_random_identity,
    verify_skorohod_identity,
)
from poisson_moments.report import mc_report


def build_reports(lam: float, mc: MCParams):
    space = MeasureSpace.uniform(lam)
    window = (0.0, 0.5)
    reports = []

    for n in (1, 2, 3):
        u = make_integrand("count", space)
        reports.append(verify_random_identity(space, u, None, n, mc))

    u_ab = make_integrand("count-times-f", space, A=(0.0, 0.4), B=(0.6, 1.0))
    for n in (1, 2, 3):
        reports.append(verify_skorohod_identity(space, u_ab, None, n, mc))

    reports.append(
        compensated_moment_identity(space, make_integrand("count", space), None, 2, mc)
    )

    F = make_functional("count-in", space, B=window)
    u_ind = make_integrand("indicator", space, A=window)
    inner, outer = verify_duality(F, u_ind, space, mc)
    reports.append(
        mc_report(
            "gradient-duality",
            {"u": u_ind.label, "F": F.label, "total_mass": lam},
            inner, outer, mc.confidence_multiplier, seed=mc.seed,
        )
    )

    reports.append(covariance_identity(space, window, F, 2, mc))
    reports.append(stirling_moment_identity(lam, 3, CountFunction.parse("poly:0,1")))
    reports.append(exponential_identity(lam, 0.4, CountFunction.parse("poly:1,1")))
    return reports


def exact_summaries():
    rows = []
    for n in (4, 6):
        rows.append({
            "identity": "bell-polynomial", "n": n,
            "coefficients": [int(c) for c in bell_polynomial(n).coeffs],
        })
    for n in (1, 2, 3):
        poly = count_integrand_exact(n)
        rows.append({
            "identity": "count-integrand-exact", "n": n,
            "coefficients": [int(c) for c in poly.coeffs],
            "matches_bell": poly == bell_polynomial(2 * n),
        })
    for n in (2, 4, 6):
        value, poly = centered_poisson_moment(1.0, n)
        rows.append({
            "identity": "centered-count-moment", "n": n, "lam": 1.0,
            "coefficients": [int(c) for c in poly.coeffs], "value": value,
        })
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lambda", dest="lam", type=float, default=1.0)
    parser.add_argument("--replicates", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-json", default=None)
    parser.add_argument("--out-csv", default=None)
    args = parser.parse_args(argv)

    mc = MCParams(replicates=args.replicates, seed=args.seed)
    t0 = time.perf_counter()
    reports = build_reports(args.lam, mc)
    elapsed = time.perf_counter() - t0

    failures = [r for r in reports if not r.passed]
    for r in reports:
        gap = abs(r.lhs.mean - r.rhs.mean)
        print(f"{r.verdict.upper():4s} {r.identity:28s} n={r.params.get('n', '-'):>2} "
              f"lhs={r.lhs.mean:+.5f} rhs={r.rhs.mean:+.5f} |diff|={gap:.5f} "
              f"tol={r.tolerance:.5f}")
    print(f"\n{len(reports) - len(failures)}/{len(reports)} identities pass "
          f"({elapsed:.1f}s, replicates={args.replicates}, seed={args.seed})")

    payload = {
        "schema": "identity-suite/1",
        "lam": args.lam,
        "replicates": args.replicates,
        "seed": args.seed,
        "exact": exact_summaries(),
        "reports": [r.to_dict() for r in reports],
        "passed": not failures,
    }
    if args.out_json:
        Path(args.out_json).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out_json).write_text(json.dumps(payload, sort_keys=True, indent=2))
        print(f"wrote {args.out_json}")
    if args.out_csv:
        Path(args.out_csv).parent.mkdir(parents=True, exist_ok=True)
        chunks = [r.to_csv() for r in reports]
        header, *_ = chunks[0].splitlines()
        lines = [header]
        for chunk in chunks:
            lines.extend(chunk.splitlines()[1:])
        Path(args.out_csv).write_text("\n".join(lines) + "\n")
        print(f"wrote {args.out_csv}")
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
