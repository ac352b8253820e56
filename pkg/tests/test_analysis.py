"""Degrees, proximality certificates, Li-Yorke scans, mixing reports."""

from __future__ import annotations

import random

import pytest

from chaoscope import (
    StructuralError,
    classify_pair,
    column_of,
    degree_of_column,
    degree_stability_check,
    degree_window_min,
    fixed_point,
    frobenius_number,
    li_yorke_test,
    mixing_gap_report,
    new_handle,
    next_base_time,
    proximal_certificate,
    random_handle,
    representable,
    return_length_differences,
    step,
)
from chaoscope.analysis import (
    VERDICT_EXPECTED_LI_YORKE,
    VERDICT_FIXED,
    VERDICT_IDENTICAL,
)
from chaoscope.bouquet import find_occurrences
from chaoscope.verify import degree_corpus


def test_fixed_point_degree_is_infinite():
    assert degree_of_column(fixed_point(6)).is_infinite


def test_degree_is_cycle_index_of_the_deepest_level():
    assert degree_of_column(new_handle(2, 1, 1)).index == 1
    assert degree_of_column(new_handle(3, 2, 5)).index == 2


def test_degree_estimates_shrink_with_depth():
    h = new_handle(3, 2, 5)
    estimates = [degree_of_column(h, depth).index for depth in range(4)]
    cleaned = [e for e in estimates if e is not None]
    assert cleaned == sorted(cleaned, reverse=True)


# -- proximality --------------------------------------------------------------

def test_window_at_least_gap_bound_always_hits():
    rng = random.Random(8)
    windows = [(0, 11), (100, 11), (1000, 11)]
    for _ in range(30):
        h = random_handle(8, rng)
        report = proximal_certificate(h, 1, windows)
        assert report.all_hit


def test_fixed_point_hits_everywhere():
    report = proximal_certificate(fixed_point(4), 2, [(0, 1), (17, 1)])
    assert [w.hit for w in report.windows] == [0, 17]


def test_certificate_matches_next_base_time():
    h = new_handle(2, 1, 2)
    report = proximal_certificate(h, 1, [(0, 10)])
    assert report.windows[0].hit == 9
    assert next_base_time(h, 1) == 9


def test_short_window_reports_miss():
    h = new_handle(2, 1, 2)
    report = proximal_certificate(h, 1, [(0, 9)])
    assert report.windows[0].hit is None
    assert not report.all_hit


# -- li-yorke ------------------------------------------------------------------

def test_any_point_is_proximal_to_the_fixed_point():
    rng = random.Random(9)
    for _ in range(10):
        h = random_handle(8, rng)
        report = li_yorke_test(h, fixed_point(8), horizon=2000)
        assert report.proximal_witness is not None
        t, d = report.proximal_witness
        assert d.bound() <= 2 ** -3


def test_identical_handles_never_separate():
    h = new_handle(8, 1, 12345)
    report = li_yorke_test(h, h, horizon=500)
    assert report.separation_witness is None
    assert report.proximal_witness is not None


def test_distinct_cycles_separate_immediately():
    a = new_handle(8, 1, 2_000_000 // 2)
    b = new_handle(8, 2, 777)
    report = li_yorke_test(a, b, horizon=10_000)
    assert report.separation_witness is not None
    t, d = report.separation_witness
    assert d.exact and d.level <= 3


def test_horizon_validity_enforced():
    h = new_handle(2, 1, 690)  # exhausts after 4 steps
    with pytest.raises(StructuralError):
        li_yorke_test(h, fixed_point(2), horizon=100)


def test_report_embeds_reproduction_data():
    a = new_handle(8, 1, 1_500_000)
    b = new_handle(8, 2, 41)
    record = li_yorke_test(a, b, horizon=3000).to_json()
    assert record["a"]["pos"] == "1500000"
    assert record["horizon"] == 3000
    assert record["prox_depth"] == 2 and record["sep_depth"] == 3


def test_same_seed_same_reports():
    def run(seed):
        rng = random.Random(seed)
        a = random_handle(8, rng)
        b = random_handle(8, rng)
        return li_yorke_test(a, b, horizon=2000).to_json()

    assert run(12) == run(12)


# -- mixing ---------------------------------------------------------------------

def test_mixing_report_level_one_depth_one():
    report = mixing_gap_report(1, 1)
    assert report.claimed_max_gap == 22
    assert set(report.realized_gaps) == {0} | set(range(2, 23))
    assert report.missing_gaps == (1,)
    assert report.extra_gaps == ()
    assert report.prefix_matches
    assert report.suffix_within_bound and report.suffix_bound == 21
    assert report.occurrences.suffix_length == 2


def test_mixing_report_level_one_depth_two():
    report = mixing_gap_report(1, 2)
    gaps = set(report.realized_gaps)
    assert {0, 2, 3} <= gaps
    assert set(range(5, 101)) <= gaps
    assert report.missing_gaps == (1,)
    assert report.prefix_matches  # two base edges then a complete copy
    assert report.occurrences.suffix_length == 184
    assert report.suffix_within_bound and report.suffix_bound == 1570


def test_return_length_differences_generate_the_semigroup():
    report = find_occurrences(1, 2, 1, 1)
    diffs = return_length_differences(report)
    assert {10, 12, 13} <= diffs


def test_frobenius_number_of_10_12_13():
    assert frobenius_number((10, 12, 13)) == 41
    assert not representable(41, (10, 12, 13))
    assert all(representable(v, (10, 12, 13)) for v in range(42, 142))


def test_frobenius_requires_coprime_generators():
    with pytest.raises(StructuralError):
        frobenius_number((4, 6))


# -- degree stability and windows -------------------------------------------------

def test_stability_on_seeded_corpus():
    corpus = degree_corpus(100, spine=8, seed=3)
    report = degree_stability_check(corpus)
    assert report.passed
    assert len(report.results) == 100


def test_fixed_point_is_trivially_stable():
    report = degree_stability_check([fixed_point(5)])
    assert report.passed
    assert report.results[0].cycle is None


def test_window_min_zero_window_reads_current_degree():
    h = new_handle(3, 2, 5)
    current = degree_of_column(step(h, 0), 3)
    assert degree_window_min(h, 3, 0, 0).index == current.index


def test_window_min_bounded_by_degree_plus_one():
    for h in degree_corpus(40, spine=8, seed=4):
        deg = degree_of_column(h)
        if deg.is_infinite or deg.index + 1 > 8:
            continue
        result = degree_window_min(h, deg.index + 1, 0, 2000)
        assert result.index is not None and result.index <= deg.index + 1


# -- pair classification -----------------------------------------------------------

def test_fixed_pair_classified_fixed():
    c = classify_pair(fixed_point(6), fixed_point(6), attach_witnesses=False)
    assert c.verdict == VERDICT_FIXED


def test_same_point_classified_identical():
    h = new_handle(8, 1, 999)
    c = classify_pair(h, h, attach_witnesses=False)
    assert c.verdict == VERDICT_IDENTICAL


def test_distinct_degrees_cite_the_degree_gap():
    a = new_handle(8, 1, 1_200_000)
    b = new_handle(8, 2, 31337)
    c = classify_pair(a, b, horizon=3000)
    assert c.verdict == VERDICT_EXPECTED_LI_YORKE
    assert c.deg_a.index == 1 and c.deg_b.index == 2
    assert any("exactly 1" in s for s in c.citations)
    assert c.report is not None


def test_equal_degrees_cite_equal_degree_exclusion():
    a = new_handle(8, 1, 1_000_001)
    b = new_handle(8, 1, 1_000_003)
    c = classify_pair(a, b, attach_witnesses=False)
    assert any("equal finite degree" in s for s in c.citations)


def test_fixed_vs_point_cites_fixed_point_exclusion():
    c = classify_pair(new_handle(8, 1, 1_000_001), fixed_point(8),
                      attach_witnesses=False)
    assert any("fixed point" in s for s in c.citations)


def test_no_early_column_recurrence():
    # the only periodic point is the fixed point: sampled non-fixed handles
    # never repeat their full column within the scanned window
    rng = random.Random(10)
    for _ in range(10):
        h = random_handle(8, rng)
        base = column_of(h)
        for q in (1, 2, 10, 695, 10_000):
            assert column_of(step(h, q)) != base
