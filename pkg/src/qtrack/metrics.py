"""Doublet-level tracking scores and VQE success statistics.

A selected triplet contributes its two constituent doublets to the
positive set.  The reference set holds the truth doublets (consecutive
-layer hit pairs of one particle) that appear in at least one candidate
triplet, so seeding losses do not count against the solver.  Efficiency is
tp/(tp+fn), purity tp/(tp+fp); zero denominators report 1.0 with an
explicit flag instead of NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .detector import Event
from .seeding import Triplet


@dataclass(frozen=True)
class TrackingScore:
    tp: int
    fp: int
    fn: int
    efficiency: float
    purity: float
    zero_positives: bool = False
    zero_reference: bool = False


def _triplet_doublets(t: Triplet):
    a, b, c = t.hits
    return (a, b), (b, c)


def score_tracking(selected, triplets: list[Triplet], event: Event) -> TrackingScore:
    """Score a selection (iterable of triplet indices) against truth."""
    hits = event.hit_by_id()

    def is_truth_doublet(pair):
        ha, hb = hits[pair[0]], hits[pair[1]]
        return (
            ha.truth_particle is not None
            and ha.truth_particle == hb.truth_particle
            and hb.layer_index == ha.layer_index + 1
        )

    reference = set()
    for t in triplets:
        for pair in _triplet_doublets(t):
            if is_truth_doublet(pair):
                reference.add(pair)

    positives = set()
    for idx in selected:
        idx = int(idx)
        if not (0 <= idx < len(triplets)):
            raise ValueError(f"selected triplet index {idx} out of range")
        positives.update(_triplet_doublets(triplets[idx]))

    tp = len(positives & reference)
    fp = len(positives - reference)
    fn = len(reference - positives)
    zero_positives = (tp + fp) == 0
    zero_reference = (tp + fn) == 0
    efficiency = 1.0 if zero_reference else tp / (tp + fn)
    purity = 1.0 if zero_positives else tp / (tp + fp)
    return TrackingScore(tp, fp, fn, efficiency, purity, zero_positives, zero_reference)


@dataclass(frozen=True)
class VqeSuccessStat:
    n_runs: int
    n_success: int
    fraction: float
    ci_low: float
    ci_high: float


_Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    # the interval always contains p; min/max guard float rounding at 0 and 1
    return max(0.0, min(center - half, p)), min(1.0, max(center + half, p))


def vqe_success_fraction(components, threshold: float = 0.01) -> VqeSuccessStat:
    """Fraction of runs with ground-state component >= threshold, with a
    95% Wilson confidence interval."""
    components = list(components)
    if not components:
        raise ValueError("components must be nonempty")
    for c in components:
        if not (0.0 <= c <= 1.0):
            raise ValueError(f"component {c} outside [0, 1]")
    n = len(components)
    successes = sum(1 for c in components if c >= threshold)
    lo, hi = wilson_interval(successes, n)
    return VqeSuccessStat(n, successes, successes / n, lo, hi)
