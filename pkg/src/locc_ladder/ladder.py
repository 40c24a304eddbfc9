"""Multi-step ladder planning.

The planner bridges source and target through intermediate states that fix
the target's smallest coefficients a few at a time, solving one small block
per step and embedding the block measurement into the full dimension.

The smallest-first construction is not total: for some majorization-feasible
pairs the forced intermediate state is not majorized by its successor, so no
deterministic measurement exists for that link.  Such inputs raise
LadderInfeasible carrying a certificate; they are never silently repaired.
The greatest-first variant is provided purely as a demonstrator of its own
failure mode (rank collapse).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

from .errors import (
    BlockTooLarge,
    ChainInvariantViolated,
    IndexRangeInvalid,
    LadderInfeasible,
    NormalizationUnderflow,
    NotMajorized,
    OmegaNotMajorizing,
    OmegaNotSorted,
    ZeroBlockNorm,
)
from .schmidt import EPS_CMP, EPS_COMPLETE, EPS_ZERO, SchmidtVector, effective_rank, majorizes
from .solvers import (
    DiagonalKraus,
    MeasurementStep,
    OutcomeBranch,
    _trivial_step,
    completeness_defect,
    solve2,
    solve3,
)

# Chain-link tail inequalities and layout reconstruction tolerance.
TOL_CHAIN = 1e-12
# Embedded branch states must reproduce the next layout this closely.
TOL_EMBED = 1e-12


@dataclass(frozen=True)
class BlockDecomposition:
    """A state split into an untouched remainder and a normalized active block.

    window holds the block's positional amplitudes at full scale;
    block is the same content normalized and sorted.  index_range gives the
    0-based basis indices the block occupies.
    """

    prefix: tuple[float, ...]
    suffix: tuple[float, ...]
    window: tuple[float, ...]
    block: SchmidtVector
    block_norm: float
    index_range: tuple[int, ...]


@dataclass(frozen=True)
class IntermediateChain:
    """Ladder of states from source to target.

    states are sorted spectra; layouts keep the positional arrangement the
    operators act on (they differ from the sorted view only when an inserted
    coefficient outgrows its neighbors).  windows[k] lists the basis indices
    step k+1 transforms.
    """

    states: tuple[SchmidtVector, ...]
    layouts: tuple[tuple[float, ...], ...]
    m: int
    tilde_values: tuple[float, ...]
    windows: tuple[tuple[int, ...], ...]

    @property
    def l(self) -> int:
        return len(self.states) - 1


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Names the chain step at which a ladder construction breaks down."""

    kind: str  # rank_collapse | negative_coefficient | link_not_majorized | block_not_majorized
    step_index: int
    message: str
    tilde_sq: Optional[float] = None
    intermediate_rank: Optional[int] = None
    target_rank: Optional[int] = None
    failing_k: Optional[int] = None
    margin: Optional[float] = None

    def __str__(self):
        return f"[{self.kind} at step {self.step_index}] {self.message}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "step_index": self.step_index,
            "message": self.message,
            "tilde_sq": self.tilde_sq,
            "intermediate_rank": self.intermediate_rank,
            "target_rank": self.target_rank,
            "failing_k": self.failing_k,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class LadderPlan:
    """Executable multi-step plan: chain of states plus embedded measurements."""

    chain: IntermediateChain
    steps: tuple[MeasurementStep, ...]
    source: SchmidtVector
    target: SchmidtVector


def _window_decompose(layout: Sequence[float], window: Sequence[int]) -> BlockDecomposition:
    window = tuple(window)
    vals = tuple(layout[i] for i in window)
    norm_sq = sum(x * x for x in vals)
    if norm_sq <= EPS_ZERO:
        raise ZeroBlockNorm(f"block at indices {window} carries no weight")
    c = math.sqrt(norm_sq)
    block = SchmidtVector(tuple(sorted((x / c for x in vals), reverse=True)))
    return BlockDecomposition(
        prefix=tuple(layout[: window[0]]),
        suffix=tuple(layout[window[-1] + 1 :]),
        window=vals,
        block=block,
        block_norm=c,
        index_range=window,
    )


def block_decompose(state: SchmidtVector, m: int) -> BlockDecomposition:
    """Split off the m smallest coefficients as a normalized active block."""
    if m < 2 or m > state.n:
        raise BlockTooLarge(f"block size {m} outside [2, {state.n}]")
    return _window_decompose(state.amps, range(state.n - m, state.n))


def choose_omega(
    block_source: SchmidtVector,
    target_tail: Sequence[float],
    block_norm: float,
) -> SchmidtVector:
    """Block target that fixes the given tail amplitudes, head closing the norm.

    target_tail holds the m-1 full-scale target amplitudes the step should
    produce; the head coefficient absorbs the remaining weight.  The result
    must come out sorted and must majorize block_source, otherwise the block
    split is infeasible and the corresponding error is raised.
    """
    m = block_source.n
    if len(target_tail) != m - 1:
        raise IndexRangeInvalid(f"need {m - 1} tail amplitudes, got {len(target_tail)}")
    tail = [float(t) / block_norm for t in target_tail]
    tail_sq = sum(t * t for t in tail)
    head_sq = 1.0 - tail_sq
    if head_sq < -EPS_CMP:
        raise NormalizationUnderflow(
            f"fixed tail weight {tail_sq!r} exceeds the block weight"
        )
    head = math.sqrt(max(head_sq, 0.0))
    if tail and head * head < tail[0] * tail[0] - EPS_CMP:
        raise OmegaNotSorted(
            f"closing coefficient {head!r} below fixed tail head {tail[0]!r}"
        )
    omega = SchmidtVector((head, *tail))
    report = majorizes(block_source, omega)
    if not report.holds:
        raise OmegaNotMajorizing(
            f"block target does not majorize block source (k={report.failing_k})"
        )
    return omega


def _chain_positions(n: int, m: int) -> tuple[int, list[int]]:
    """Step count l and 1-based tilde positions for k = 1..l-1."""
    if n <= m:
        return 1, []
    l = 1 + math.ceil((n - m) / (m - 1))
    return l, [n - k * (m - 1) for k in range(1, l)]


def _windows(n: int, positions: list[int]) -> tuple[tuple[int, ...], ...]:
    wins = []
    prev = n  # 1-based right edge
    for p in positions:
        wins.append(tuple(range(p - 1, prev)))
        prev = p
    wins.append(tuple(range(0, prev)))
    return tuple(wins)


def _window_tail_inequalities(x, y, window) -> float:
    """Worst violation of the per-window tail-sum inequalities between
    consecutive layouts (0 when all hold).  These follow algebraically from
    the pair's majorization and must hold for every constructed chain."""
    worst = 0.0
    for r in range(len(window)):
        idx = window[r:]
        src = sum(x[i] * x[i] for i in idx)
        dst = sum(y[i] * y[i] for i in idx)
        defect = dst - src if r else abs(dst - src)
        worst = max(worst, defect)
    return worst


def _verify_chain(chain: IntermediateChain, target: SchmidtVector):
    n = chain.states[0].n
    for k, (x, y, w) in enumerate(zip(chain.layouts, chain.layouts[1:], chain.windows)):
        for i in range(n):
            if i not in w and x[i] != y[i]:
                raise ChainInvariantViolated(
                    f"step {k + 1} modifies untouched index {i}"
                )
        if _window_tail_inequalities(x, y, w) > TOL_CHAIN:
            raise ChainInvariantViolated(
                f"window tail inequalities fail at step {k + 1}"
            )
    for k, layout in enumerate(chain.layouts[1:-1], start=1):
        fixed = k * (chain.m - 1)
        if layout[n - fixed :] != target.amps[n - fixed :]:
            raise ChainInvariantViolated(
                f"state {k} does not carry the target's {fixed} smallest coefficients"
            )
    for k, (a, b) in enumerate(zip(chain.states, chain.states[1:])):
        report = majorizes(a, b)
        if not report.holds:
            cert = InfeasibilityCertificate(
                kind="link_not_majorized",
                step_index=k + 1,
                message=(
                    f"intermediate state {k} is not majorized by state {k + 1} "
                    f"(tail k={report.failing_k}, margin {report.tail_margins[report.failing_k - 1]:.3e}); "
                    "the smallest-first ladder cannot transform this pair"
                ),
                failing_k=report.failing_k,
                margin=report.tail_margins[report.failing_k - 1],
            )
            raise LadderInfeasible(cert)


def _sorted_state(layout: Sequence[float]) -> SchmidtVector:
    return SchmidtVector(tuple(sorted(layout, reverse=True)))


def _trivial_chain(source: SchmidtVector, target: SchmidtVector, m: int) -> IntermediateChain:
    return IntermediateChain(
        states=(source, target),
        layouts=(source.amps, target.amps),
        m=m,
        tilde_values=(),
        windows=(tuple(range(source.n)),),
    )


def intermediate_chain(source: SchmidtVector, target: SchmidtVector, m: int) -> IntermediateChain:
    """Ladder of intermediate states fixing the target's smallest coefficients.

    Each intermediate keeps the source prefix, copies the target suffix and
    inserts one closing coefficient.  Raises LadderInfeasible when a link of
    the forced chain is not majorized by its successor (the construction has
    no freedom left, so the failure is a property of the input pair).
    """
    if m < 2:
        raise BlockTooLarge(f"block size {m} must be at least 2")
    report = majorizes(source, target)
    if not report.holds:
        raise NotMajorized(report)
    if source.amps == target.amps or all(
        abs(s - t) <= EPS_CMP for s, t in zip(source.squares, target.squares)
    ):
        return _trivial_chain(source, target, m)

    n = source.n
    s2, t2 = source.squares, target.squares
    l, positions = _chain_positions(n, m)
    layouts = [source.amps]
    tildes = []
    for p in positions:  # 1-based position of the inserted coefficient
        tilde_sq = sum(s2[p - 1 :]) - sum(t2[p:])
        # Clamp vanishing weight to an exact zero so rank counting stays
        # consistent with the squared-domain tolerance.
        tilde = 0.0 if tilde_sq <= EPS_ZERO else math.sqrt(tilde_sq)
        tildes.append(tilde)
        layouts.append(source.amps[: p - 1] + (tilde,) + target.amps[p:])
    layouts.append(target.amps)
    chain = IntermediateChain(
        states=tuple(_sorted_state(x) for x in layouts),
        layouts=tuple(layouts),
        m=m,
        tilde_values=tuple(tildes),
        windows=_windows(n, positions),
    )
    if chain.l != l:
        raise ChainInvariantViolated(f"built {chain.l} links, expected {l}")
    _verify_chain(chain, target)
    return chain


def greatest_first_chain(
    source: SchmidtVector, target: SchmidtVector, m: int
) -> Union[IntermediateChain, InfeasibilityCertificate]:
    """Demonstrator: transform the greatest coefficients first.

    Returns the chain when it happens to be valid, otherwise an
    InfeasibilityCertificate.  The canonical failure is rank collapse: the
    inserted coefficient hits zero while the target still needs that rank.
    """
    if m < 2:
        raise BlockTooLarge(f"block size {m} must be at least 2")
    report = majorizes(source, target)
    if not report.holds:
        raise NotMajorized(report)
    if all(abs(s - t) <= EPS_CMP for s, t in zip(source.squares, target.squares)):
        return _trivial_chain(source, target, m)

    n = source.n
    s2, t2 = source.squares, target.squares
    l, _ = _chain_positions(n, m)
    target_rank = effective_rank(target)
    layouts = [source.amps]
    tildes = []
    for k in range(1, l):
        q = k * (m - 1) + 1  # 1-based position of the inserted coefficient
        tilde_sq = sum(t2[q - 1 :]) - sum(s2[q:])
        if tilde_sq < -EPS_ZERO:
            return InfeasibilityCertificate(
                kind="negative_coefficient",
                step_index=k,
                message=(
                    f"inserted coefficient squared is {tilde_sq:.3e} < 0; "
                    "no such intermediate state exists"
                ),
                tilde_sq=tilde_sq,
                target_rank=target_rank,
            )
        tilde = 0.0 if tilde_sq <= EPS_ZERO else math.sqrt(tilde_sq)
        layout = target.amps[: q - 1] + (tilde,) + source.amps[q:]
        rank = sum(1 for a in layout if a > EPS_ZERO)
        if tilde_sq <= EPS_ZERO and target_rank > rank:
            return InfeasibilityCertificate(
                kind="rank_collapse",
                step_index=k,
                message=(
                    f"inserted coefficient vanishes; intermediate rank {rank} "
                    f"< target rank {target_rank}, unreachable by LOCC"
                ),
                tilde_sq=tilde_sq,
                intermediate_rank=rank,
                target_rank=target_rank,
            )
        tildes.append(tilde)
        layouts.append(layout)
    layouts.append(target.amps)

    states = tuple(_sorted_state(x) for x in layouts)
    for k, (a, b) in enumerate(zip(states, states[1:])):
        link = majorizes(a, b)
        if not link.holds:
            return InfeasibilityCertificate(
                kind="link_not_majorized",
                step_index=k + 1,
                message=(
                    f"intermediate {k} not majorized by its successor "
                    f"(tail k={link.failing_k})"
                ),
                failing_k=link.failing_k,
                margin=link.tail_margins[link.failing_k - 1],
            )

    wins = []
    prev = 1
    for k in range(1, l):
        q = k * (m - 1) + 1
        wins.append(tuple(range(prev - 1, q)))
        prev = q
    wins.append(tuple(range(prev - 1, n)))
    return IntermediateChain(
        states=states,
        layouts=tuple(layouts),
        m=m,
        tilde_values=tuple(tildes),
        windows=tuple(wins),
    )


def _inverse(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def _sort_perm(vals: Sequence[float]) -> list[int]:
    """Stable descending argsort: result[s] is the position holding rank s."""
    return sorted(range(len(vals)), key=lambda r: (-vals[r], r))


def embed_step(
    block_step: MeasurementStep,
    decomposition: BlockDecomposition,
    n: int,
    *,
    target_window: Optional[Sequence[float]] = None,
) -> MeasurementStep:
    """Lift a block measurement to dimension n.

    Untouched indices carry sqrt(prob) on every branch operator so that
    per-index completeness survives; corrections extend by the identity.
    When the positional window is unsorted, operators and corrections are
    conjugated by the sorting permutation so they act on the stated indices.
    """
    idx = decomposition.index_range
    m = block_step.source.n
    if len(idx) != m or len(set(idx)) != m:
        raise IndexRangeInvalid(f"index range {idx} incompatible with block size {m}")
    if any(i < 0 or i >= n for i in idx) or list(idx) != sorted(idx):
        raise IndexRangeInvalid(f"index range {idx} invalid for dimension {n}")

    c = decomposition.block_norm
    if target_window is None:
        target_window = tuple(a * c for a in block_step.target.amps)
    else:
        target_window = tuple(float(x) for x in target_window)
        scaled = sorted((x / c for x in target_window), reverse=True)
        for got, want in zip(scaled, block_step.target.amps):
            if abs(got - want) > TOL_EMBED:
                raise IndexRangeInvalid(
                    "target window content disagrees with the block target"
                )

    source_layout = decomposition.prefix + decomposition.window + decomposition.suffix
    target_layout = decomposition.prefix + target_window + decomposition.suffix
    if len(source_layout) != n:
        raise IndexRangeInvalid(
            f"decomposition spans {len(source_layout)} indices, expected {n}"
        )

    sigma = _sort_perm(decomposition.window)
    sigma_inv = _inverse(sigma)
    tau = _sort_perm(target_window)

    target_state = _sorted_state(target_layout)
    branches = []
    for br in block_step.branches:
        diag = [math.sqrt(br.prob)] * n
        corr = list(range(n))
        for r in range(m):
            s = sigma_inv[r]
            diag[idx[r]] = br.op.diag[s]
            corr[idx[r]] = idx[tau[br.correction[s]]]
        raw = tuple(d * a for d, a in zip(diag, source_layout))
        norm = math.sqrt(sum(x * x for x in raw))
        relabeled = [0.0] * n
        for j, x in enumerate(raw):
            relabeled[corr[j]] = x / norm
        for got, want in zip(relabeled, target_layout):
            if abs(got - want) > TOL_EMBED:
                raise ChainInvariantViolated(
                    "embedded branch does not reproduce the next layout"
                )
        branches.append(
            OutcomeBranch(
                op=DiagonalKraus(tuple(diag)),
                prob=br.prob,
                correction=tuple(corr),
                post_state=_sorted_state(relabeled),
            )
        )
    step = MeasurementStep(
        branches=tuple(branches),
        source=_sorted_state(source_layout),
        target=target_state,
        case_tag=block_step.case_tag,
        pruned_count=block_step.pruned_count,
        window=idx,
        source_layout=tuple(source_layout),
        target_layout=tuple(target_layout),
    )
    if completeness_defect(step) > EPS_COMPLETE:
        raise ChainInvariantViolated("embedded step loses completeness")
    return step


def _solve_block(block_src: SchmidtVector, omega: SchmidtVector) -> MeasurementStep:
    """Dispatch to the closed-form solvers, reducing away shared zero tails."""
    m = block_src.n
    zeros = sum(1 for a in block_src.amps if a <= EPS_ZERO)
    if zeros == 0:
        return solve3(block_src, omega) if m == 3 else solve2(block_src, omega)
    # Shared zero coordinates stay untouched; solve the positive head only.
    if any(omega.amps[j] > EPS_ZERO for j in range(m - zeros, m)):
        raise OmegaNotMajorizing("target block outranks the source block")
    keep = m - zeros
    if keep < 2:
        return _trivial_step(block_src, omega)
    sub_src = SchmidtVector(block_src.amps[:keep])
    sub_tgt = SchmidtVector(omega.amps[:keep])
    sub = solve3(sub_src, sub_tgt) if keep == 3 else solve2(sub_src, sub_tgt)
    branches = []
    for br in sub.branches:
        diag = br.op.diag + tuple(math.sqrt(br.prob) for _ in range(zeros))
        corr = br.correction + tuple(range(keep, m))
        post = SchmidtVector(br.post_state.amps + block_src.amps[keep:])
        branches.append(OutcomeBranch(DiagonalKraus(diag), br.prob, corr, post))
    return MeasurementStep(
        branches=tuple(branches),
        source=block_src,
        target=omega,
        case_tag=sub.case_tag,
        pruned_count=sub.pruned_count,
        source_layout=block_src.amps,
        target_layout=omega.amps,
    )


def plan_full(source: SchmidtVector, target: SchmidtVector) -> LadderPlan:
    """Complete executable plan from source to target.

    Builds the smallest-first chain with 3-wide blocks (a single 2- or 3-dim
    step for n <= 3), solves each block in closed form and embeds the
    operators into the full dimension.  Emits floor(n/2) steps for n >= 3
    whenever source != target.
    """
    report = majorizes(source, target)
    if not report.holds:
        raise NotMajorized(report)
    n = source.n
    if all(abs(s - t) <= EPS_CMP for s, t in zip(source.squares, target.squares)):
        m = 3 if n >= 3 else 2
        chain = _trivial_chain(source, target, m)
        step = replace(_trivial_step(source, target), window=tuple(range(n)))
        return LadderPlan(chain=chain, steps=(step,), source=source, target=target)

    if n == 2:
        chain = _trivial_chain(source, target, 2)
        step = replace(solve2(source, target), window=(0, 1))
        return LadderPlan(chain=chain, steps=(step,), source=source, target=target)

    chain = intermediate_chain(source, target, 3)
    steps = []
    for k, window in enumerate(chain.windows):
        x, y = chain.layouts[k], chain.layouts[k + 1]
        decom = _window_decompose(x, window)
        tgt_window = tuple(y[i] for i in window)
        try:
            omega = choose_omega(
                decom.block,
                sorted(tgt_window, reverse=True)[1:],
                decom.block_norm,
            )
            block_step = _solve_block(decom.block, omega)
        except (OmegaNotMajorizing, OmegaNotSorted, NotMajorized) as exc:
            # Defensive: with the chain links verified this should not occur.
            cert = InfeasibilityCertificate(
                kind="block_not_majorized",
                step_index=k + 1,
                message=str(exc),
            )
            raise LadderInfeasible(cert) from exc
        steps.append(embed_step(block_step, decom, n, target_window=tgt_window))
    if len(steps) != n // 2:
        raise ChainInvariantViolated(
            f"emitted {len(steps)} steps, expected {n // 2}"
        )
    return LadderPlan(chain=chain, steps=tuple(steps), source=source, target=target)
