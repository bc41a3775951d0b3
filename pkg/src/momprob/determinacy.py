"""Index-of-determinacy estimation by scanning reweighted measures.

The index of a determinate measure mu counts how many times the reweighting
mu -> (1+x^2) mu can be applied before the polynomials stop being dense in
the corresponding L2 space; density in L2 of the (m+1)-fold reweighting is
equivalent to the m-fold reweighting being a determinate measure.  The scan
therefore classifies mu_m = (1+x^2)^m mu for m = 0, 1, ... and reports

    NotDeterminate          if mu itself classifies indeterminate,
    Finite(m)               if level m is the first indeterminate one,
    AtLeast(n_max)          if every scanned level classifies determinate,

with the inconclusive verdict truncating the report at AtLeast(m) after m
clean determinate levels.  The result is an estimate with an explicit
diagnostic trace, never a certificate: numerical classification of deeply
reweighted measures is precision-limited.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import FiniteSupport
from .jacobi import (
    DETERMINATE,
    INDETERMINATE,
    ClassifyPolicy,
    DeterminacyVerdict,
    classify,
)
from .measures import Measure, gauss_damp, measure_to_jacobi, power_reweight

NOT_DETERMINATE = "not_determinate"
FINITE = "finite"
AT_LEAST = "at_least"


@dataclass(frozen=True)
class IndexReport:
    """Outcome of an index scan with the per-level verdict trace."""

    kind: str  # NOT_DETERMINATE | FINITE | AT_LEAST
    n: Optional[int]
    per_level: Tuple[Tuple[int, DeterminacyVerdict], ...]

    def to_json(self) -> dict:
        levels = [
            {"level": m, **verdict.to_json()} for m, verdict in self.per_level
        ]
        return {"index": {"kind": self.kind, "n": self.n}, "per_level": levels}

    def __str__(self):
        if self.kind == FINITE:
            return f"Finite({self.n})"
        if self.kind == AT_LEAST:
            return f"AtLeast({self.n})"
        return "NotDeterminate"


def _level_depth(mu: Measure, requested: Optional[int]) -> int:
    atoms = mu.effective_atoms()
    if atoms is None:
        raise FiniteSupport(
            "index scans need a measure with discrete support "
            "(atomic or gauss_from_jacobi quadrature)"
        )
    available = len(atoms[0])
    if requested is None:
        return available
    return min(requested, available)


def index_of_determinacy(
    mu: Measure,
    n_max: int,
    policy: Optional[ClassifyPolicy] = None,
    depth: Optional[int] = None,
) -> IndexReport:
    """Scan mu_m = (1+x^2)^m mu for m < n_max and assemble the index report.

    ``depth`` caps how many recurrence coefficients are extracted per level
    (default: as many as the support resolves).  Levels are evaluated in
    order; the first non-determinate level ends the scan.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    base_policy = policy if policy is not None else ClassifyPolicy()
    mu0, _ = mu.normalize()
    trace = []
    for m in range(n_max):
        mu_m, _ = power_reweight(mu0, m) if m else (mu0, None)
        level_depth = _level_depth(mu_m, depth)
        n_scan = min(base_policy.n_max, level_depth)
        level_policy = ClassifyPolicy(
            n_max=n_scan,
            eps_zero=base_policy.eps_zero,
            eps_stable=base_policy.eps_stable,
            window=base_policy.window,
            z=base_policy.z,
            start=base_policy.start,
            bits=base_policy.bits,
            max_escalations=base_policy.max_escalations,
        )
        J_m = measure_to_jacobi(mu_m, level_depth, partial=True)
        available = J_m.n_stored
        if available < level_policy.n_max:
            level_policy = ClassifyPolicy(
                n_max=max(available, 1),
                eps_zero=base_policy.eps_zero,
                eps_stable=base_policy.eps_stable,
                window=base_policy.window,
                z=base_policy.z,
                start=base_policy.start,
                bits=base_policy.bits,
                max_escalations=base_policy.max_escalations,
            )
        verdict = classify(J_m, level_policy)
        trace.append((m, verdict))
        if verdict.verdict == INDETERMINATE:
            if m == 0:
                return IndexReport(NOT_DETERMINATE, None, tuple(trace))
            return IndexReport(FINITE, m, tuple(trace))
        if verdict.verdict != DETERMINATE:
            # inconclusive level: report what the clean levels support
            return IndexReport(AT_LEAST, m, tuple(trace))
    return IndexReport(AT_LEAST, n_max, tuple(trace))


def infinite_index_probe(mu_g: Measure, alpha, n_max: int,
                         policy: Optional[ClassifyPolicy] = None,
                         depth: Optional[int] = None) -> IndexReport:
    """Index scan of the Gaussian-damped measure exp(-2*alpha*t^2) mu.

    For any alpha > 0 the damped measure has infinite index, so the expected
    report is AtLeast(n_max); alpha = 0 is rejected (the statement requires
    strictly positive damping).
    """
    if not alpha > 0:
        raise ValueError("the infinite-index probe requires alpha > 0")
    damped = gauss_damp(mu_g, alpha)
    return index_of_determinacy(damped, n_max, policy=policy, depth=depth)
