"""Truncated inverse-limit points and their exact dynamics.

A point of the limit space is a coherent sequence of vertices, one per
level.  Because every cover maps base to base and non-base vertices have a
forced successor, a point truncated at level ``M`` is fully determined by a
single level-``M`` address (the *spine*) plus a time offset: all shallower
coordinates are projections, and the level-``M`` coordinate just advances
along its cycle.  That makes the shift map a random-access operation: moving
``10**12`` steps costs one big-integer addition, not a walk.

The representation is only valid while the spine coordinate stays strictly
inside its cycle.  Driving it to the base is an explicit
:class:`~chaoscope.errors.SpineExhausted` event, never silently resolved:
what happens after the base-hit depends on deeper levels the spine does not
know.  Callers can extend the spine with ``lift_choices`` and re-seed.

Distances follow the standard product metric: ``2**-k`` where ``k`` is the
first level at which two columns differ.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, TextIO

from .bouquet import (
    VertexAddr,
    base_addr,
    build_level_spec,
    check_addr,
    cycle_length,
    project_addr,
)
from .errors import SpineExhausted, StructuralError

DEFAULT_SPINE_LEVEL = 8
DEFAULT_POSITION_RESERVE = 10**6
# position bands for sampled points, chosen so desk-scale scans can see
# something happen: on cycle 1 the band sits where the level-2 coordinate's
# base dwells are hundreds of steps long (blocks several hundred deep into
# the quadratic region), which is what lets two independent orbits reach the
# base simultaneously within a 1e4 horizon; on higher cycles any position
# works for proximity (their shallow coordinates pin to the base) and small
# positions keep at least the degree-index levels moving
CYCLE_ONE_BAND = (10**6, 2 * 10**6)
HIGH_CYCLE_BAND = (1, 10**6)


@dataclass(frozen=True)
class PointHandle:
    """A truncated limit point: one spine address plus a time offset.

    ``address`` is the coordinate at time 0; the coordinate at the current
    time is ``address.pos + offset`` along the same cycle.  A base spine is
    the fixed point (valid at every time); a cycle spine is valid while the
    position stays in ``[1, cycle_length - 1]``.
    """

    spine_level: int
    address: VertexAddr
    offset: int = 0

    def __str__(self) -> str:
        return f"{self.address}@{self.offset}"

    def to_json(self) -> dict:
        return {
            "spine_level": self.spine_level,
            "cycle": self.address.cycle,
            "pos": str(self.address.pos),
            "offset": str(self.offset),
        }


def fixed_point(spine_level: int) -> PointHandle:
    """The unique fixed point, truncated at the given level."""
    if spine_level < 0:
        raise StructuralError("spine level must be >= 0")
    return PointHandle(spine_level, base_addr(spine_level))


def new_handle(spine_level: int, cycle: int, pos: int, offset: int = 0) -> PointHandle:
    addr = VertexAddr(spine_level, cycle, pos)
    check_addr(addr)
    h = PointHandle(spine_level, addr, offset)
    _spine_position(h)  # validates the offset
    return h


def _spine_position(h: PointHandle) -> int:
    """Current position along the spine cycle (0 for the fixed point)."""
    if h.address.is_base:
        return 0
    pos = h.address.pos + h.offset
    length = cycle_length(h.spine_level, h.address.cycle)
    if not (1 <= pos <= length - 1):
        bad = h.offset
        raise SpineExhausted(
            f"offset {h.offset} drives spine position to {pos}, outside "
            f"[1, {length - 1}] on cycle {h.address.cycle} of level {h.spine_level}",
            first_invalid_offset=bad)
    return pos


def spine_coordinate(h: PointHandle) -> VertexAddr:
    """Level-``spine_level`` coordinate at the handle's current time."""
    if h.address.is_base:
        return h.address
    return VertexAddr(h.spine_level, h.address.cycle, _spine_position(h))


def exhaustion_time(h: PointHandle) -> int | None:
    """Smallest forward step that exhausts the spine: the cycle length minus
    the current position (None for the fixed point, which never exhausts).
    Steps strictly below this value are valid."""
    if h.address.is_base:
        return None
    length = cycle_length(h.spine_level, h.address.cycle)
    return length - _spine_position(h)


def step(h: PointHandle, delta: int) -> PointHandle:
    """Advance the point ``delta`` steps (negative for the inverse map).

    Random access: the cost does not depend on ``|delta|``.  Raises
    :class:`SpineExhausted` with the first invalid offset if the motion
    leaves the spine's valid range.
    """
    moved = PointHandle(h.spine_level, h.address, h.offset + delta)
    _spine_position(moved)
    return moved


def column_of(h: PointHandle, depth: int | None = None) -> list[VertexAddr]:
    """Coordinates at levels ``0..depth`` for the current time.

    The list index is the level.  Coherence is by construction: entry ``n``
    is the projection of entry ``n+1``.
    """
    if depth is None:
        depth = h.spine_level
    if not (0 <= depth <= h.spine_level):
        raise StructuralError(f"depth {depth} outside [0, {h.spine_level}]")
    addr = spine_coordinate(h)
    column = [addr]
    while addr.level > 0:
        addr = project_addr(addr)
        column.append(addr)
    column.reverse()
    return column[: depth + 1]


@dataclass(frozen=True)
class DistanceValue:
    """Distance between two columns.

    ``exact`` means a first differing level ``level`` was witnessed and the
    distance is exactly ``2**-level``.  Otherwise the columns agree on every
    compared level and the distance is at most ``2**-(level + 1)``.
    """

    exact: bool
    level: int

    def bound(self) -> Fraction:
        k = self.level if self.exact else self.level + 1
        return Fraction(1, 2**k)

    def value(self) -> float:
        return float(self.bound())

    def __str__(self) -> str:
        if self.exact:
            return f"2^-{self.level}"
        return f"<= 2^-{self.level + 1}"


def distance(a: PointHandle, b: PointHandle) -> DistanceValue:
    """Product-metric distance from the columns, compared level by level."""
    depth = min(a.spine_level, b.spine_level)
    col_a = column_of(a, depth)
    col_b = column_of(b, depth)
    for level in range(1, depth + 1):
        if col_a[level] != col_b[level]:
            return DistanceValue(exact=True, level=level)
    return DistanceValue(exact=False, level=depth)


def next_base_time(h: PointHandle, target_level: int) -> int:
    """Smallest ``d >= 0`` whose step puts the level-``target_level``
    coordinate at the base.

    The coordinate's forward walk around its cycle is forced, so the answer
    is the distance to the end of the current cycle copy; no scan happens.
    """
    if not (0 <= target_level <= h.spine_level):
        raise StructuralError(
            f"target level {target_level} outside [0, {h.spine_level}]")
    addr = spine_coordinate(h)
    while addr.level > target_level:
        addr = project_addr(addr)
    if addr.is_base:
        return 0
    d = cycle_length(target_level, addr.cycle) - addr.pos
    ex = exhaustion_time(h)
    if ex is not None and d > ex:
        raise SpineExhausted(
            f"spine exhausts at +{ex} before the level-{target_level} "
            f"base-hit at +{d}", first_invalid_offset=h.offset + ex)
    return d


# ---------------------------------------------------------------------------
# Incremental orbit scanning.
# ---------------------------------------------------------------------------

class OrbitCursor:
    """Walks an orbit one step at a time, keeping the whole column.

    Stepping increments each level's position along its forced cycle walk
    and only re-projects a level when it sits at the base (where the next
    move is dictated by the level above).  Agreement with random-access
    ``column_of`` is a tested invariant.
    """

    def __init__(self, handle: PointHandle):
        self.handle = handle
        self.time = handle.offset
        self.column = column_of(handle)
        self._lengths = [build_level_spec(lvl).cycle_lengths
                         for lvl in range(handle.spine_level + 1)]

    def advance(self) -> None:
        col = self.column
        top = len(col) - 1
        self.time += 1
        for lvl in range(top, -1, -1):
            cur = col[lvl]
            if cur.is_base:
                if lvl == top:
                    continue  # fixed-point spine stays put
                col[lvl] = project_addr(col[lvl + 1])
            else:
                nxt = cur.pos + 1
                if nxt == self._lengths[lvl][cur.cycle - 1]:
                    if lvl == top:
                        raise SpineExhausted(
                            f"spine base-hit at offset {self.time}",
                            first_invalid_offset=self.time)
                    col[lvl] = base_addr(lvl)
                else:
                    col[lvl] = VertexAddr(lvl, cur.cycle, nxt)


def orbit_rows(h: PointHandle, depth: int, horizon: int) -> Iterator[tuple[int, list[VertexAddr]]]:
    """Yield ``(t, column[0..depth])`` for t = 0..horizon."""
    if not (0 <= depth <= h.spine_level):
        raise StructuralError(f"depth {depth} outside [0, {h.spine_level}]")
    cursor = OrbitCursor(h)
    for t in range(horizon + 1):
        yield t, cursor.column[: depth + 1]
        if t < horizon:
            cursor.advance()


def write_orbit_csv(out: TextIO, h: PointHandle, depth: int, horizon: int) -> None:
    """Orbit trace as CSV: t, then cycle index and position per level."""
    header = ["t"]
    for lvl in range(depth + 1):
        header.append(f"cycle_{lvl}")
        header.append(f"pos_{lvl}")
    out.write(",".join(header) + "\n")
    for t, column in orbit_rows(h, depth, horizon):
        row = [str(t)]
        for addr in column:
            row.append(str(addr.cycle))
            row.append(str(addr.pos))
        out.write(",".join(row) + "\n")


def write_orbit_jsonl(out: TextIO, h: PointHandle, depth: int, horizon: int) -> None:
    """Orbit trace as JSON lines with the same fields as the CSV."""
    for t, column in orbit_rows(h, depth, horizon):
        record = {"t": t,
                  "column": [[addr.cycle, str(addr.pos)] for addr in column]}
        out.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Reproducible point corpora.
# ---------------------------------------------------------------------------

def random_handle(spine_level: int = DEFAULT_SPINE_LEVEL,
                  rng: random.Random | None = None,
                  band: tuple[int, int] | None = None,
                  reserve: int = DEFAULT_POSITION_RESERVE,
                  cycle_one_weight: float = 0.75) -> PointHandle:
    """Seeded random handle with at least ``reserve`` steps of forward
    validity.

    Cycle 1 is favored: it has by far the longest horizons and its shallow
    coordinates keep moving.  A point sampled on cycle ``i >= 2`` eventually
    projects onto the top cycle of some level, whose image is one pure base
    run, so its shallow coordinates sit at the base for runs far beyond any
    desk-scale horizon; such points still witness proximity trivially but
    nothing shallow ever separates.  The default position bands (see module
    constants) are chosen so sampled orbits have observable behavior.
    """
    if rng is None:
        rng = random.Random(0)
    if spine_level < 1:
        raise StructuralError("random handles need at least one cycle")
    spec = build_level_spec(spine_level)
    if spine_level == 1 or rng.random() < cycle_one_weight:
        cycle = 1
    else:
        cycle = rng.randrange(2, spine_level + 1)
    if band is None:
        lo, hi = CYCLE_ONE_BAND if cycle == 1 else HIGH_CYCLE_BAND
    else:
        lo, hi = band
    hi = min(hi, spec.cycle_lengths[cycle - 1] - 1 - reserve)
    if hi < lo:
        raise StructuralError(
            f"cycle {cycle} at level {spine_level} is too short for "
            f"positions in [{lo}, {hi}] with a reserve of {reserve}")
    return new_handle(spine_level, cycle, rng.randrange(lo, hi + 1))


def random_pair(spine_level: int, rng: random.Random,
                band: tuple[int, int] | None = None,
                reserve: int = DEFAULT_POSITION_RESERVE) -> tuple[PointHandle, PointHandle]:
    """Two distinct seeded handles at the same spine level."""
    a = random_handle(spine_level, rng, band, reserve)
    while True:
        b = random_handle(spine_level, rng, band, reserve)
        if b.address != a.address:
            return a, b
