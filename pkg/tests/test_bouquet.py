"""Symbolic tower: recurrences, formulas, projections, lifts, scans."""

from __future__ import annotations

import random

import pytest

from chaoscope import (
    BlockSum,
    BlockTerm,
    BudgetExceeded,
    Formula,
    Run,
    StructuralError,
    VertexAddr,
    base_addr,
    build_level_spec,
    cycle_length,
    estimate_vertex_count,
    find_occurrences,
    level_spec_json,
    lift_choices,
    materialize_graph,
    project_addr,
    project_to,
)

KNOWN_LENGTHS = {(1, 1): 10, (2, 1): 695, (2, 2): 90,
                 (3, 1): 3_421_640, (3, 2): 182, (3, 3): 12_560}


@pytest.mark.parametrize("key,expected", sorted(KNOWN_LENGTHS.items()))
def test_known_cycle_lengths(key, expected):
    assert cycle_length(*key) == expected


def test_known_k_values():
    assert build_level_spec(0).k_value == 2
    assert build_level_spec(1).k_value == 22
    assert build_level_spec(2).k_value == 1572


def test_level_zero_spec_is_ten_base_edges():
    spec = build_level_spec(0)
    assert spec.cycle_lengths == ()
    assert spec.image_formulas[0].items == (Run(0, 10),)


def test_level_four_first_cycle_against_independent_summation():
    # direct closed form of the block pattern, written out separately from
    # the Formula machinery
    spec3 = build_level_spec(3)
    lengths, k = spec3.cycle_lengths, spec3.k_value
    by_hand = (k * (k + 1)) // 2 + 2 * lengths[0] * k + 2 + 2 * sum(lengths[1:])
    assert cycle_length(4, 1) == by_hand
    assert 7.0e13 < by_hand < 7.1e13
    # literal term-by-term summation at level <= 3 where expansion is cheap
    literal = sum(j + 2 * 695 for j in range(1, 1573)) + 2 + 2 * 90
    assert cycle_length(3, 1) == literal


def test_formulas_start_and_end_with_base_edges():
    for n in range(0, 13):
        for formula in build_level_spec(n).image_formulas:
            runs_first = formula.items[0]
            runs_last = formula.items[-1]
            if isinstance(runs_first, BlockSum):
                assert runs_first.body[0].cycle == 0
            else:
                assert runs_first.cycle == 0
            assert isinstance(runs_last, Run) and runs_last.cycle == 0


def test_first_cycle_dominates_every_level():
    for n in range(2, 13):
        lengths = build_level_spec(n).cycle_lengths
        assert all(lengths[0] > other for other in lengths[1:])


def test_formula_length_preserved_by_k_identity():
    for n in range(1, 8):
        spec = build_level_spec(n)
        assert spec.k_value == 2 * (1 + sum(spec.cycle_lengths))


def test_cycle_length_bounds_checked():
    with pytest.raises(StructuralError):
        cycle_length(2, 3)
    with pytest.raises(StructuralError):
        cycle_length(3, 0)


# -- locate / project -------------------------------------------------------

def test_block_locate_matches_literal_expansion():
    # expand a small block sum literally and compare every offset
    formula = Formula([BlockSum(5, (BlockTerm(0, 0, 1), BlockTerm(1, 2, 0))),
                       Run(0, 1)], lengths=(10,))
    offsets = []
    for j in range(1, 6):
        offsets.extend([(0, 0)] * j)
        for _ in range(2):
            offsets.extend((1, p) for p in range(1, 10))
            offsets.append((0, 0))
    offsets.append((0, 0))
    assert formula.length == len(offsets)
    for p, expected in enumerate(offsets, start=1):
        assert formula.locate(p) == expected


def test_project_examples():
    assert project_addr(VertexAddr(2, 2, 7)) == base_addr(1)
    assert project_addr(VertexAddr(2, 1, 2)) == VertexAddr(1, 1, 1)
    assert project_addr(base_addr(9)) == base_addr(8)


def test_project_position_out_of_range():
    with pytest.raises(StructuralError):
        project_addr(VertexAddr(2, 2, 90))  # position 90 is the base again


def test_project_to_walks_all_the_way_down():
    addr = VertexAddr(3, 1, 12345)
    assert project_to(addr, 0) == base_addr(0)


def test_projection_agrees_with_materialized_maps(materialized):
    for n in (1, 2):
        level, below = materialized[n], materialized[n - 1]
        for vid in range(level.graph.vertex_count):
            addr = level.id_to_addr(vid)
            assert below.addr_to_id(project_addr(addr)) == level.cover.vertex_map[vid]


def test_projection_sampled_at_level_three(materialized):
    rng = random.Random(1)
    level3, level2 = materialized[3], materialized[2]
    lengths = build_level_spec(3).cycle_lengths
    for _ in range(2000):
        cycle = rng.randrange(1, 4)
        addr = VertexAddr(3, cycle, rng.randrange(1, lengths[cycle - 1]))
        expected = level3.cover.vertex_map[level3.addr_to_id(addr)]
        assert level2.addr_to_id(project_addr(addr)) == expected


def test_projection_never_raises_cycle_index():
    rng = random.Random(2)
    for _ in range(500):
        n = rng.randrange(2, 7)
        lengths = build_level_spec(n).cycle_lengths
        cycle = rng.randrange(1, n + 1)
        addr = VertexAddr(n, cycle, rng.randrange(1, lengths[cycle - 1]))
        image = project_addr(addr)
        assert image.is_base or image.cycle >= cycle


# -- lifts -------------------------------------------------------------------

def test_lift_base_of_level_zero_gives_all_ten_addresses():
    report = lift_choices(base_addr(0), max_results=100)
    assert report.total == 10
    assert len(report.choices) == 10
    assert report.choices[0] == base_addr(1)
    assert not report.truncated


def test_lift_counts_doubled_blocks():
    report = lift_choices(VertexAddr(1, 1, 1), max_results=10)
    assert report.total == 44
    assert report.truncated
    assert len(report.choices) == 10


def test_lift_base_includes_first_position_of_next_cycle():
    report = lift_choices(base_addr(1), max_results=5)
    assert base_addr(2) in report.choices
    assert VertexAddr(2, 1, 1) in report.choices


def test_lift_choices_ascending_order():
    report = lift_choices(VertexAddr(1, 1, 3), max_results=64)
    keys = [(c.cycle, c.pos) for c in report.choices]
    assert keys == sorted(keys)


def test_project_inverts_every_lift():
    # exhaustive over all level-1 addresses, lifting into level 2
    targets = [base_addr(1)] + [VertexAddr(1, 1, p) for p in range(1, 10)]
    for target in targets:
        report = lift_choices(target, max_results=10_000)
        assert not report.truncated
        assert report.total == len(report.choices)
        for choice in report.choices:
            assert project_addr(choice) == target


def test_lift_totals_partition_level_two():
    # every level-2 vertex lifts exactly one level-1 vertex, so the lift
    # totals over all level-1 addresses sum to the level-2 vertex count
    total = 0
    targets = [base_addr(1)] + [VertexAddr(1, 1, p) for p in range(1, 10)]
    for target in targets:
        total += lift_choices(target, max_results=1).total
    assert total == 1 + (695 - 1) + (90 - 1)


# -- occurrence scans ---------------------------------------------------------

def test_occurrences_level_one_to_two():
    report = find_occurrences(1, 2, target_cycle=1, source_cycle=1)
    assert report.copy_count == 44
    assert report.prefix_length == 1 and report.prefix_all_base
    assert report.suffix_length == 2 and report.suffix_all_base
    assert report.realized_gaps() == (0,) + tuple(range(2, 23))
    assert report.gap_histogram[0] == 22
    assert report.gaps_all_base


def test_occurrences_none_in_pure_base_cycle():
    report = find_occurrences(1, 2, target_cycle=1, source_cycle=2)
    assert report.copy_count == 0
    assert report.prefix_length == report.total_length == 90


def test_occurrences_prefix_deepens_with_level():
    report = find_occurrences(1, 3, target_cycle=1, source_cycle=1)
    assert report.prefix_length == 2 and report.prefix_all_base
    assert report.total_length == 3_421_640


def test_occurrence_offsets_truncate_but_histogram_does_not():
    report = find_occurrences(1, 3, 1, 1, max_offsets=100)
    assert report.offsets_truncated
    assert len(report.offsets) == 100
    assert report.copy_count == 138_336
    assert sum(report.gap_histogram.values()) == report.copy_count - 1


def test_occurrence_budget_error_names_requirement():
    with pytest.raises(BudgetExceeded) as err:
        find_occurrences(1, 4, 1, 1, budget=10**8)
    assert err.value.required == cycle_length(4, 1)
    assert "70594865633727" in str(err.value)


def test_occurrence_json_fields():
    record = find_occurrences(1, 2, 1, 1).to_json()
    assert record["offsets_truncated"] is False
    assert record["gap_histogram"]["0"] == 22
    assert record["prefix"] == {"length": "1", "all_base": True}
    assert record["suffix"] == {"length": "2", "all_base": True}


# -- materialization ----------------------------------------------------------

def test_materialized_sizes(materialized):
    assert materialized[1].graph.vertex_count == 10
    assert materialized[1].graph.edge_count == 11
    assert materialized[2].graph.vertex_count == 784
    assert materialized[3].graph.vertex_count == 3_434_380


def test_vertex_estimate_matches_materialization(materialized):
    for n in range(4):
        assert estimate_vertex_count(n) == materialized[n].graph.vertex_count


def test_materialization_budget_refuses_level_four():
    with pytest.raises(BudgetExceeded) as err:
        materialize_graph(4)
    assert err.value.required > 7 * 10**13


def test_addr_id_round_trip(materialized):
    level = materialized[2]
    for vid in (0, 1, 693, 694, 782, 783):
        assert level.addr_to_id(level.id_to_addr(vid)) == vid


def test_spec_json_uses_decimal_strings():
    record = level_spec_json(build_level_spec(2))
    assert record["cycle_lengths"] == ["695", "90"]
    assert record["k"] == "1572"
    sum_item = record["image_formulas"][0][0]
    assert sum_item["kind"] == "sum" and sum_item["bound"] == "1572"


def test_spec_cache_is_safe_under_concurrent_builders():
    import threading

    from chaoscope.bouquet import _spec_cache

    _spec_cache.clear()
    results = []

    def build():
        results.append(build_level_spec(6))

    threads = [threading.Thread(target=build) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r is results[0] or r == results[0] for r in results)
    assert cycle_length(2, 1) == 695
