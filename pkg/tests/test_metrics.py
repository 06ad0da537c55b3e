import pytest

from qtrack import (
    DEFAULT_GEOMETRY,
    build_doublets,
    build_triplets,
    generate_event,
    score_tracking,
    vqe_success_fraction,
    wilson_interval,
)


def _clean_candidates(density=6, seed=14):
    event = generate_event(DEFAULT_GEOMETRY, density, 0.0, seed=seed)
    triplets = build_triplets(event, build_doublets(event))
    return event, triplets


def test_perfect_selection_scores_one():
    event, triplets = _clean_candidates()
    truth = [i for i, t in enumerate(triplets) if t.truth_flag]
    score = score_tracking(truth, triplets, event)
    assert score.efficiency == 1.0 and score.purity == 1.0
    assert score.fp == 0 and score.fn == 0


def test_empty_selection_flags_zero_positives():
    event, triplets = _clean_candidates()
    score = score_tracking([], triplets, event)
    assert score.efficiency == 0.0
    assert score.purity == 1.0 and score.zero_positives


def test_counts_follow_formula():
    # density 12, seed 5 has combinatorial fakes even without smearing
    event, triplets = _clean_candidates(density=12, seed=5)
    truth = [i for i, t in enumerate(triplets) if t.truth_flag]
    fakes = [i for i, t in enumerate(triplets) if not t.truth_flag]
    assert len(fakes) >= 1
    selected = truth[:-1] + fakes[:1]  # drop one truth triplet, add one fake
    score = score_tracking(selected, triplets, event)
    assert score.efficiency == pytest.approx(score.tp / (score.tp + score.fn))
    assert score.purity == pytest.approx(score.tp / (score.tp + score.fp))
    assert score.fn >= 1
    assert score.fp >= 1  # a fake always carries at least one non-truth doublet


def test_scoring_is_permutation_invariant():
    event, triplets = _clean_candidates()
    selected = [i for i, t in enumerate(triplets) if t.truth_flag][:3]
    a = score_tracking(selected, triplets, event)
    b = score_tracking(list(reversed(selected)), triplets, event)
    assert (a.tp, a.fp, a.fn) == (b.tp, b.fp, b.fn)


def test_adding_truth_never_hurts_efficiency_adding_fake_never_helps_purity():
    event, triplets = _clean_candidates(density=12, seed=5)
    truth = [i for i, t in enumerate(triplets) if t.truth_flag]
    fakes = [i for i, t in enumerate(triplets) if not t.truth_flag]
    assert fakes
    base = truth[: len(truth) // 2]
    with_truth = score_tracking(base + [truth[-1]], triplets, event)
    assert with_truth.efficiency >= score_tracking(base, triplets, event).efficiency
    with_fake = score_tracking(base + fakes[:1], triplets, event)
    assert with_fake.purity <= score_tracking(base, triplets, event).purity


def test_out_of_range_selection_raises():
    event, triplets = _clean_candidates()
    with pytest.raises(ValueError):
        score_tracking([len(triplets)], triplets, event)


def test_success_fraction_threshold_boundary():
    stat = vqe_success_fraction([0.5, 0.0, 0.02, 0.009])
    assert stat.fraction == 0.5  # 0.009 excluded, 0.02 and 0.5 included
    assert stat.n_success == 2


def test_success_fraction_all_ones():
    stat = vqe_success_fraction([1.0] * 20)
    assert stat.fraction == 1.0
    assert stat.ci_high == 1.0
    assert stat.ci_low < 1.0


def test_wilson_frozen_values():
    # closed-form check: 35 successes of 50, z = 1.95996...
    lo, hi = wilson_interval(35, 50)
    assert lo == pytest.approx(0.5625, abs=2e-3)
    assert hi == pytest.approx(0.8090, abs=2e-3)


def test_wilson_contains_point_estimate():
    for successes, n in [(0, 10), (3, 7), (10, 10), (35, 50), (1, 1)]:
        lo, hi = wilson_interval(successes, n)
        assert lo <= successes / n <= hi
        assert 0.0 <= lo <= hi <= 1.0


def test_success_fraction_validation():
    with pytest.raises(ValueError):
        vqe_success_fraction([])
    with pytest.raises(ValueError):
        vqe_success_fraction([1.2])
