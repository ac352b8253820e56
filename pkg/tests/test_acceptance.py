"""Acceptance suite: one test per criterion, each printing its pass line.

Run just this module with ``pytest tests/test_acceptance.py -v -s``; the same
checks are exposed on the command line as ``chaoscope check``.
"""

from __future__ import annotations

import pytest

from chaoscope import verify


def _assert(result):
    print(result.line())
    assert result.passed, result.detail


def test_criterion_01_length_table():
    _assert(verify.check_length_table())


def test_criterion_02_cover_axioms():
    _assert(verify.check_cover_axioms(max_level=3))


def test_criterion_03_projection_oracle():
    _assert(verify.check_projection_oracle(samples=10_000, seed=0))


def test_criterion_04_fixed_point():
    _assert(verify.check_fixed_point(spine=12, deltas=(1, 10**6, 10**12)))


def test_criterion_05_invertibility():
    _assert(verify.check_invertibility(count=10_000, seed=0, spine=8,
                                       max_delta=10**6))


def test_criterion_06_mixing_claims():
    _assert(verify.check_mixing_claims())


def test_criterion_07_cofinite_semigroup():
    _assert(verify.check_semigroup(extra_range=1000))


def test_criterion_08_proximality():
    _assert(verify.check_proximality(handles=100, spine=8, target_level=2,
                                     windows=10, window_len=700, seed=0))


def test_criterion_09_li_yorke_sampling():
    _assert(verify.check_li_yorke(pairs=100, spine=8, horizon=10_000, seed=0,
                                  sep_rate=0.9))


def test_criterion_10_degree_properties():
    _assert(verify.check_degree_properties(samples=10_000, corpus_size=100,
                                           spine=8, seed=0, window=2000))


def test_criterion_11_cover_dsl():
    _assert(verify.check_dsl(max_level=5))


@pytest.fixture(scope="module", autouse=True)
def _summary_banner():
    yield
    print("\nacceptance criteria complete")
