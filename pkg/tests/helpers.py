"""Independent-check helpers shared across test modules.

Everything here recomputes quantities with a different arithmetic path
(math.fsum over explicit slices) than the library, so tests of numerical
claims do not reuse the code under test.
"""

import math


def fsum_tail_margins(source_sq, target_sq):
    """Independent recomputation of the majorization tail margins."""
    n = len(source_sq)
    return [math.fsum(source_sq[k:]) - math.fsum(target_sq[k:]) for k in range(n)]


def fsum_majorized(source_sq, target_sq, eps=1e-12):
    margins = fsum_tail_margins(source_sq, target_sq)
    return abs(margins[0]) <= eps and all(m >= -eps for m in margins[1:])


def window_inequality_defect(prev_sq, next_sq, window):
    """Worst violation of the per-window tail-sum inequalities (fsum path)."""
    worst = 0.0
    for r in range(len(window)):
        idx = window[r:]
        src = math.fsum(prev_sq[i] for i in idx)
        dst = math.fsum(next_sq[i] for i in idx)
        worst = max(worst, (dst - src) if r else abs(dst - src))
    return worst


def forced_chain_layout_squares(source_sq, target_sq, k):
    """Squared layout of the k-th smallest-first intermediate (3-wide blocks),
    recomputed from the defining tail sums rather than the library."""
    n = len(source_sq)
    p = n - 2 * k  # 1-based insertion position
    tilde_sq = math.fsum(source_sq[p - 1 :]) - math.fsum(target_sq[p:])
    return list(source_sq[: p - 1]) + [tilde_sq] + list(target_sq[p:])
