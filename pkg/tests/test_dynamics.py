"""Point handles: columns, stepping, distance, base-hit arithmetic."""

from __future__ import annotations

import io
import random

import pytest

from chaoscope import (
    OrbitCursor,
    SpineExhausted,
    VertexAddr,
    base_addr,
    column_of,
    cycle_length,
    distance,
    exhaustion_time,
    fixed_point,
    new_handle,
    next_base_time,
    project_addr,
    random_handle,
    step,
    write_orbit_csv,
    write_orbit_jsonl,
)


def test_fixed_point_column_is_all_base():
    assert all(a.is_base for a in column_of(fixed_point(5)))


def test_fixed_point_is_fixed_under_huge_steps():
    p = fixed_point(5)
    assert column_of(step(p, 10**9)) == column_of(p)


def test_fixed_points_at_different_depths_are_indistinguishable():
    d = distance(fixed_point(5), fixed_point(9))
    assert not d.exact
    assert d.level == 5


def test_column_examples():
    h = new_handle(2, 1, 1)
    assert column_of(h) == [base_addr(0), base_addr(1), VertexAddr(2, 1, 1)]
    assert column_of(step(h, 1))[1] == VertexAddr(1, 1, 1)
    assert column_of(new_handle(2, 2, 7))[1] == base_addr(1)


def test_column_depth_slice():
    h = new_handle(3, 1, 5)
    assert len(column_of(h, 1)) == 2


def test_columns_cohere_under_projection():
    rng = random.Random(3)
    for _ in range(200):
        h = random_handle(6, rng, reserve=10**3)
        column = column_of(step(h, rng.randrange(0, 500)))
        for level in range(1, len(column)):
            assert project_addr(column[level]) == column[level - 1]


def test_exhaustion_time_is_cycle_length_minus_position():
    assert exhaustion_time(new_handle(2, 1, 1)) == 694
    assert exhaustion_time(fixed_point(3)) is None


def test_step_past_exhaustion_raises_with_offset():
    h = new_handle(2, 1, 1)
    assert step(h, 693).offset == 693
    with pytest.raises(SpineExhausted) as err:
        step(h, 694)
    assert err.value.first_invalid_offset == 694


def test_backward_validity_bound():
    h = new_handle(2, 1, 5)
    assert step(h, -4).offset == -4  # position 1, still valid
    with pytest.raises(SpineExhausted):
        step(h, -5)


def test_step_is_additive_and_invertible():
    rng = random.Random(4)
    for _ in range(300):
        h = random_handle(8, rng)
        d1 = rng.randrange(0, 10**5)
        d2 = rng.randrange(0, 10**5)
        assert step(h, d1 + d2) == step(step(h, d1), d2)
        assert step(step(h, d1), -d1) == h


def test_distance_exact_at_first_differing_level():
    a = new_handle(3, 1, 1)
    b = new_handle(3, 1, 2)
    d = distance(a, b)
    assert d.exact
    assert 1 <= d.level <= 3
    assert d.value() == 2.0 ** -d.level


def test_distance_to_fixed_point_detects_spine_difference():
    d = distance(new_handle(2, 1, 1), fixed_point(2))
    assert d.exact and d.level == 2


def test_distance_exact_at_level_three():
    # (3,1,1) projects to the base at levels 0..2, so the first difference
    # from the fixed point is the level-3 coordinate itself
    d = distance(new_handle(3, 1, 1), fixed_point(3))
    assert d.exact and d.level == 3
    assert d.value() == 0.125


def test_identical_handles_have_no_witnessed_difference():
    h = new_handle(4, 1, 7)
    d = distance(h, h)
    assert not d.exact
    assert d.level == 4


def test_next_base_time_examples():
    assert next_base_time(new_handle(1, 1, 3), 1) == 7
    assert next_base_time(new_handle(2, 1, 2), 1) == 9
    assert next_base_time(new_handle(2, 2, 7), 1) == 0
    assert next_base_time(fixed_point(6), 3) == 0


def test_next_base_time_is_the_first_hit():
    rng = random.Random(5)
    scanned = 0
    for _ in range(50):
        h = random_handle(5, rng, band=(1, 10**4), reserve=10**5)
        m = rng.randrange(1, 4)
        d = next_base_time(h, m)
        assert column_of(step(h, d), m)[m].is_base
        if d <= 1500:  # scan the whole gap only when it is desk-sized
            cursor = OrbitCursor(h)
            for t in range(d):
                assert not cursor.column[m].is_base
                cursor.advance()
            scanned += 1
    assert scanned >= 10


def test_base_gap_bound_along_orbits():
    rng = random.Random(6)
    bound1 = cycle_length(1, 1)
    bound2 = cycle_length(2, 1)
    for _ in range(20):
        h = random_handle(8, rng)
        t = 0
        for _ in range(10):
            d = next_base_time(step(h, t), 1)
            assert d <= bound1
            d2 = next_base_time(step(h, t), 2)
            assert d2 <= bound2
            t += max(d, 1) + 1


def test_cursor_agrees_with_random_access():
    rng = random.Random(7)
    for _ in range(5):
        h = random_handle(6, rng, band=(1, 10**4), reserve=10**5)
        cursor = OrbitCursor(h)
        for t in range(1000):
            assert cursor.column == column_of(step(h, t))
            cursor.advance()


def test_cursor_raises_at_spine_base_hit():
    h = new_handle(1, 1, 8)
    cursor = OrbitCursor(h)
    cursor.advance()
    with pytest.raises(SpineExhausted):
        cursor.advance()


def test_spine_extension_by_lift_survives_exhaustion():
    # the documented escape hatch: lift the initial address one level up,
    # re-seed at the same offset, and keep stepping where the old spine ends
    from chaoscope import lift_choices

    h = new_handle(2, 1, 690)
    assert exhaustion_time(h) == 5
    report = lift_choices(h.address, max_results=500)
    extended = None
    for choice in report.choices:
        candidate = new_handle(3, choice.cycle, choice.pos, h.offset)
        if exhaustion_time(candidate) > 100:
            extended = candidate
            break
    assert extended is not None
    for t in range(5):  # identical columns while the short spine is valid
        assert column_of(step(extended, t), 2) == column_of(step(h, t))
    with pytest.raises(SpineExhausted):
        step(h, 5)
    beyond = step(extended, 5)
    assert column_of(beyond, 2)[2] == base_addr(2)  # the old spine's base-hit
    assert not column_of(step(extended, 100))[3].is_base


def test_random_handles_are_reproducible():
    a = [str(random_handle(8, random.Random(42))) for _ in range(5)]
    b = [str(random_handle(8, random.Random(42))) for _ in range(5)]
    assert a == b


def test_orbit_csv_matches_expansion():
    buf = io.StringIO()
    write_orbit_csv(buf, new_handle(2, 1, 1), depth=1, horizon=3)
    assert buf.getvalue().splitlines() == [
        "t,cycle_0,pos_0,cycle_1,pos_1",
        "0,0,0,0,0",
        "1,0,0,1,1",
        "2,0,0,1,2",
        "3,0,0,1,3",
    ]


def test_orbit_jsonl_round_trips():
    import json

    buf = io.StringIO()
    write_orbit_jsonl(buf, new_handle(2, 1, 1), depth=2, horizon=2)
    rows = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert rows[0] == {"t": 0, "column": [[0, "0"], [0, "0"], [1, "1"]]}
    assert rows[2]["column"][1] == [1, "2"]
