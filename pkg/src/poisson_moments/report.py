"""Identity reports: structured two-sided comparisons with a verdict.

Reports serialize to a versioned JSON document and to flat CSV rows, so
identity checks can gate a CI run.  The verdict rule is stored alongside
the numbers: Monte Carlo comparisons use the combined-standard-error rule,
exact comparisons a relative or absolute tolerance (or coefficient-wise
polynomial equality).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .estimation import Estimate

SCHEMA = "identity-report/1"

RULE_COMBINED_STDERR = "combined-stderr"
RULE_RELATIVE = "relative"
RULE_ABSOLUTE = "absolute"
RULE_EXACT_COEFFS = "exact-coefficients"


@dataclass(frozen=True)
class TermEstimate:
    """One weighted term of a decomposed side."""

    label: str
    weight: float
    estimate: Estimate


@dataclass
class IdentityReport:
    identity: str
    params: dict
    lhs: Estimate
    rhs: Estimate
    rule: str
    tolerance: float
    passed: bool
    terms: list[TermEstimate] = field(default_factory=list)
    seed: int | None = None

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "identity": self.identity,
            "params": self.params,
            "lhs": _estimate_dict(self.lhs),
            "rhs": _estimate_dict(self.rhs),
            "terms": [
                {
                    "label": t.label,
                    "weight": t.weight,
                    "mean": t.estimate.mean,
                    "stderr": t.estimate.stderr,
                }
                for t in self.terms
            ],
            "rule": self.rule,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def csv_rows(self) -> list[dict]:
        """Flat rows: one per term plus a summary row."""
        base = {
            "identity": self.identity,
            "params": json.dumps(self.params, sort_keys=True),
            "seed": "" if self.seed is None else self.seed,
        }
        rows = []
        for t in self.terms:
            rows.append(
                {
                    **base,
                    "row": "term",
                    "label": t.label,
                    "weight": t.weight,
                    "mean": t.estimate.mean,
                    "stderr": t.estimate.stderr,
                    "verdict": "",
                }
            )
        rows.append(
            {
                **base,
                "row": "summary",
                "label": f"lhs={self.lhs.mean!r} rhs={self.rhs.mean!r}",
                "weight": "",
                "mean": self.lhs.mean - self.rhs.mean,
                "stderr": math.hypot(self.lhs.stderr, self.rhs.stderr),
                "verdict": self.verdict,
            }
        )
        return rows

    def to_csv(self) -> str:
        rows = self.csv_rows()
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf,
            fieldnames=[
                "identity", "row", "label", "weight", "mean", "stderr",
                "verdict", "params", "seed",
            ],
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()


def _estimate_dict(e: Estimate) -> dict:
    return {"mean": e.mean, "stderr": e.stderr, "replicates": e.replicates}


def mc_report(
    identity: str,
    params: dict,
    lhs: Estimate,
    rhs: Estimate,
    multiplier: float,
    terms: Sequence[TermEstimate] = (),
    seed: int | None = None,
) -> IdentityReport:
    """Combined-standard-error comparison of two Monte Carlo estimates."""
    tol = multiplier * math.hypot(lhs.stderr, rhs.stderr)
    return IdentityReport(
        identity=identity,
        params=params,
        lhs=lhs,
        rhs=rhs,
        rule=RULE_COMBINED_STDERR,
        tolerance=tol,
        passed=abs(lhs.mean - rhs.mean) <= tol,
        terms=list(terms),
        seed=seed,
    )


def exact_report(
    identity: str,
    params: dict,
    lhs: float,
    rhs: float,
    *,
    rel_tol: float | None = None,
    abs_tol: float | None = None,
    seed: int | None = None,
) -> IdentityReport:
    """Tolerance comparison of two deterministically computed values."""
    if (rel_tol is None) == (abs_tol is None):
        raise ValueError("exactly one of rel_tol / abs_tol must be given")
    diff = abs(lhs - rhs)
    if rel_tol is not None:
        rule, tol = RULE_RELATIVE, rel_tol * max(1.0, abs(lhs), abs(rhs))
    else:
        rule, tol = RULE_ABSOLUTE, abs_tol
    return IdentityReport(
        identity=identity,
        params=params,
        lhs=Estimate.exact(lhs),
        rhs=Estimate.exact(rhs),
        rule=rule,
        tolerance=tol,
        passed=diff <= tol,
        seed=seed,
    )
