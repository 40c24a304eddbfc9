"""Closed-form single-measurement solvers for 2- and 3-dimensional blocks.

Each solver returns a complete generalized measurement: diagonal operators,
outcome probabilities and the permutation relabelings that map every outcome
back to the target, so the transformation succeeds with unit probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DimensionMismatch,
    NotMajorized,
    SolverInvariantViolated,
    SourceHasZero,
)
from .schmidt import EPS_CMP, EPS_COMPLETE, EPS_ZERO, SchmidtVector, majorizes

CASE_I = "CASE_I"
CASE_II = "CASE_II"
TWO_OUTCOME = "TWO_OUTCOME"
TRIVIAL = "TRIVIAL"

# Branch post-states must reproduce the step target this closely (amplitudes).
TOL_BRANCH_STATE = 1e-12


@dataclass(frozen=True)
class DiagonalKraus:
    """A measurement operator diagonal in the Schmidt basis."""

    diag: tuple[float, ...]

    def __post_init__(self):
        for d in self.diag:
            if not (d >= 0.0) or d == float("inf"):
                raise ValueError(f"operator entry {d!r} must be finite and >= 0")

    @property
    def n(self) -> int:
        return len(self.diag)

    def apply(self, amps: tuple[float, ...]) -> tuple[float, ...]:
        return tuple(d * a for d, a in zip(self.diag, amps))


@dataclass(frozen=True)
class OutcomeBranch:
    """One measurement outcome.

    correction[j] is the basis label that index j is relabeled to (by both
    parties); the relabeled post-measurement state equals post_state.
    """

    op: DiagonalKraus
    prob: float
    correction: tuple[int, ...]
    post_state: SchmidtVector


@dataclass(frozen=True)
class MeasurementStep:
    """A complete generalized measurement taking source to target.

    window, when set, lists the basis indices the step actually acts on
    (identity elsewhere); block-level steps leave it None.
    """

    branches: tuple[OutcomeBranch, ...]
    source: SchmidtVector
    target: SchmidtVector
    case_tag: str
    pruned_count: int = 0
    window: tuple[int, ...] | None = None
    # Positional amplitude layouts; differ from the sorted source/target
    # vectors only when a ladder intermediate is unsorted in display order.
    source_layout: tuple[float, ...] = field(default=(), repr=False)
    target_layout: tuple[float, ...] = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return self.source.n


def completeness_defect(step: MeasurementStep) -> float:
    """Max deviation of sum_i M_i^dag M_i from identity, per basis index."""
    worst = 0.0
    for j in range(step.branches[0].op.n):
        total = sum(br.op.diag[j] ** 2 for br in step.branches)
        worst = max(worst, abs(total - 1.0))
    return worst


def probability_defect(step: MeasurementStep) -> float:
    return abs(sum(br.prob for br in step.branches) - 1.0)


def _trivial_step(source: SchmidtVector, target: SchmidtVector) -> MeasurementStep:
    n = source.n
    branch = OutcomeBranch(
        op=DiagonalKraus(tuple(1.0 for _ in range(n))),
        prob=1.0,
        correction=tuple(range(n)),
        post_state=target,
    )
    return MeasurementStep(
        branches=(branch,),
        source=source,
        target=target,
        case_tag=TRIVIAL,
        pruned_count=0,
        source_layout=source.amps,
        target_layout=target.amps,
    )


def _states_equal(source: SchmidtVector, target: SchmidtVector) -> bool:
    return all(abs(s - t) <= EPS_CMP for s, t in zip(source.squares, target.squares))


def _clamp_prob(p: float, label: str) -> float:
    if p < -EPS_CMP:
        raise SolverInvariantViolated(f"{label} = {p!r} is negative beyond tolerance")
    return min(max(p, 0.0), 1.0)


def _assert_ordering(chain: list[tuple[str, float]], case_tag: str):
    for (la, va), (lb, vb) in zip(chain, chain[1:]):
        if va < vb - EPS_CMP:
            raise SolverInvariantViolated(
                f"{case_tag} ordering violated: {la}={va!r} < {lb}={vb!r}"
            )


def _build_step(source, target, specs, case_tag, probs):
    """Assemble branches from (diag entries, correction) specs, pruning
    zero-probability outcomes, and verify completeness and branch states."""
    branches = []
    pruned = 0
    for (diag, corr), p in zip(specs, probs):
        if p < EPS_ZERO:
            pruned += 1
            continue
        op = DiagonalKraus(tuple(d * p**0.5 for d in diag))
        raw = op.apply(source.amps)
        norm_sq = sum(x * x for x in raw)
        if abs(norm_sq - p) > 10 * EPS_COMPLETE:
            raise SolverInvariantViolated(
                f"branch norm {norm_sq!r} disagrees with probability {p!r}"
            )
        scale = norm_sq**0.5
        relabeled = [0.0] * source.n
        for j, x in enumerate(raw):
            relabeled[corr[j]] = x / scale
        post = SchmidtVector(tuple(sorted(relabeled, reverse=True)))
        for got, want in zip(post.amps, target.amps):
            if abs(got - want) > TOL_BRANCH_STATE:
                raise SolverInvariantViolated(
                    f"branch post-state {post.amps} misses target {target.amps}"
                )
        branches.append(OutcomeBranch(op, p, tuple(corr), post))
    step = MeasurementStep(
        branches=tuple(branches),
        source=source,
        target=target,
        case_tag=case_tag,
        pruned_count=pruned,
        source_layout=source.amps,
        target_layout=target.amps,
    )
    if completeness_defect(step) > EPS_COMPLETE:
        raise SolverInvariantViolated("completeness sum deviates from identity")
    if probability_defect(step) > EPS_COMPLETE:
        raise SolverInvariantViolated("outcome probabilities do not sum to one")
    return step


def solve3(source: SchmidtVector, target: SchmidtVector) -> MeasurementStep:
    """Single three-outcome measurement for a 3-dimensional transformation.

    The operator ratios and probabilities differ between the two possible
    orderings of the middle coefficients; outcome 1 lands on the target
    directly and the other outcomes need one swap each.
    """
    if source.n != 3 or target.n != 3:
        raise DimensionMismatch("solve3 requires dimension 3")
    report = majorizes(source, target)
    if not report.holds:
        raise NotMajorized(report)
    if not source.is_source_grade():
        raise SourceHasZero(f"source {source.amps} has a vanishing coefficient")
    if _states_equal(source, target):
        return _trivial_step(source, target)

    a1, b1, c1 = source.amps
    a2, b2, c2 = target.amps
    s1, sb1, sc1 = source.squares
    s2, sb2, sc2 = target.squares

    if sb1 >= sb2 - EPS_CMP:
        # Middle coefficient shrinks (ties routed here for reproducibility).
        if s2 - sb2 <= EPS_ZERO or s2 - sc2 <= EPS_ZERO:
            return _trivial_step(source, target)  # degenerate: states coincide
        _assert_ordering(
            [("a2", a2), ("a1", a1), ("b1", b1), ("b2", b2), ("c2", c2)], CASE_I
        )
        p2 = _clamp_prob((sb1 - sb2) / (s2 - sb2), "p2")
        p3 = _clamp_prob((sc1 - sc2) / (s2 - sc2), "p3")
        p1 = _clamp_prob(s1 / s2 - (sb2 / s2) * p2 - (sc2 / s2) * p3, "p1")
        specs = [
            ((a2 / a1, b2 / b1, c2 / c1), (0, 1, 2)),
            ((b2 / a1, a2 / b1, c2 / c1), (1, 0, 2)),
            ((c2 / a1, b2 / b1, a2 / c1), (2, 1, 0)),
        ]
        return _build_step(source, target, specs, CASE_I, (p1, p2, p3))

    # Middle coefficient grows.
    if s2 - sc2 <= EPS_ZERO or sb2 - sc2 <= EPS_ZERO:
        return _trivial_step(source, target)
    _assert_ordering(
        [("a2", a2), ("b2", b2), ("b1", b1), ("c1", c1), ("c2", c2)], CASE_II
    )
    p2 = _clamp_prob((s2 - s1) / (s2 - sc2), "p2")
    p3 = _clamp_prob((sb2 - sb1) / (sb2 - sc2), "p3")
    p1 = _clamp_prob(s1 / s2 - (sc2 / s2) * p2 - p3, "p1")
    specs = [
        ((a2 / a1, b2 / b1, c2 / c1), (0, 1, 2)),
        ((c2 / a1, b2 / b1, a2 / c1), (2, 1, 0)),
        ((a2 / a1, c2 / b1, b2 / c1), (0, 2, 1)),
    ]
    return _build_step(source, target, specs, CASE_II, (p1, p2, p3))


def solve2(source: SchmidtVector, target: SchmidtVector) -> MeasurementStep:
    """Single two-outcome measurement for a 2-dimensional transformation."""
    if source.n != 2 or target.n != 2:
        raise DimensionMismatch("solve2 requires dimension 2")
    report = majorizes(source, target)
    if not report.holds:
        raise NotMajorized(report)
    if not source.is_source_grade():
        raise SourceHasZero(f"source {source.amps} has a vanishing coefficient")
    if _states_equal(source, target):
        return _trivial_step(source, target)

    a1, b1 = source.amps
    a2, b2 = target.amps
    s1, _ = source.squares
    s2, sb2 = target.squares
    if s2 - sb2 <= EPS_ZERO:
        # Maximally entangled target: majorization forces source == target.
        return _trivial_step(source, target)
    p1 = _clamp_prob((s1 - sb2) / (s2 - sb2), "p1'")
    p2 = _clamp_prob((s2 - s1) / (s2 - sb2), "p2'")
    specs = [
        ((a2 / a1, b2 / b1), (0, 1)),
        ((b2 / a1, a2 / b1), (1, 0)),
    ]
    return _build_step(source, target, specs, TWO_OUTCOME, (p1, p2))
