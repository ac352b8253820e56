"""Symbolic generator for the tower of bouquet graphs and its covers.

Every level ``n`` of the tower is a bouquet: a base vertex with a self-loop
plus ``n`` simple cycles attached at the base.  The cover from level ``n+1``
down to level ``n`` sends each cycle onto a closed walk at the base, given by
one of three fixed formula shapes:

* cycle 1   -> blocks ``j`` base edges + 2 passes of cycle 1, for
  ``j = 1..k``, followed by one base edge, 2 passes of each of cycles
  ``2..n``, and one base edge (``k`` is twice the total edge count of the
  lower level);
* cycle i (2 <= i <= n) -> one base edge, 2 passes of each of cycles
  ``i..n``, one base edge;
* cycle n+1 -> a pure run of base edges of length ``(n+2)^2`` times the sum
  of the lower-level cycle lengths.

Cycle lengths are forced by the formulas (covers preserve edge counts) and
grow doubly exponentially, so deep levels are never expanded: formulas are
kept symbolic and every position query runs through closed-form arithmetic.
In particular the ``j`` base edges + 2 cycles block region of the cycle-1
formula is inverted with an integer square root instead of enumerating its
``k`` blocks.

Positions on a cycle count edges traversed from the base; position 0 is the
base itself and is represented as the base address, never stored.
"""

from __future__ import annotations

import threading
import warnings
from array import array
from bisect import bisect_left
from dataclasses import dataclass
from math import isqrt
from typing import Iterator, Sequence

from .errors import BudgetExceeded, StructuralError
from .graphs import CoverMap, MaterializedGraph

INITIAL_CYCLE_LENGTH = 10
DEFAULT_VERTEX_BUDGET = 10**7
DEFAULT_SCAN_BUDGET = 10**8
SOFT_LEVEL_LIMIT = 20


# ---------------------------------------------------------------------------
# Formula terms.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Run:
    """``count`` repetitions of one symbol: base edges (cycle 0) or full
    traversals of a cycle of the source level."""

    cycle: int
    count: int

    def __post_init__(self):
        if self.cycle < 0:
            raise StructuralError(f"negative cycle index {self.cycle}")
        if self.count < 1:
            raise StructuralError(f"run count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class BlockTerm:
    """One term inside a block sum; its count at iteration j is const + coef*j."""

    cycle: int
    const: int
    coef: int

    def count_at(self, j: int) -> int:
        return self.const + self.coef * j


@dataclass(frozen=True)
class BlockSum:
    """``sum(j=1..bound)`` of the body terms, kept unexpanded.

    The per-iteration edge length is affine in j, so offsets inside the sum
    are located by inverting a quadratic prefix with ``isqrt``.
    """

    bound: int
    body: tuple[BlockTerm, ...]

    def __post_init__(self):
        if self.bound < 1:
            raise StructuralError(f"block sum bound must be >= 1, got {self.bound}")
        if not self.body:
            raise StructuralError("block sum needs a nonempty body")


FormulaItem = Run | BlockSum


class Formula:
    """One cover-image formula: an ordered list of runs and block sums over
    the symbols of a fixed source level.

    ``lengths`` are the source level's cycle lengths; they determine every
    term's edge length and are captured at construction together with the
    cumulative prefix sums the position queries binary-search over.
    """

    __slots__ = ("items", "lengths", "_ends", "length")

    def __init__(self, items: Sequence[FormulaItem], lengths: Sequence[int]):
        self.items = tuple(items)
        self.lengths = tuple(lengths)
        if not self.items:
            raise StructuralError("a formula needs at least one term")
        ends = []
        total = 0
        for item in self.items:
            total += self._item_length(item)
            ends.append(total)
        if ends != sorted(set(ends)):
            raise StructuralError("prefix sums must be strictly increasing")
        self._ends = ends
        self.length = total

    # -- lengths ------------------------------------------------------------

    def _cycle_len(self, cycle: int) -> int:
        if cycle == 0:
            return 1
        if cycle > len(self.lengths):
            raise StructuralError(f"formula references cycle {cycle} of a "
                                  f"{len(self.lengths)}-cycle level")
        return self.lengths[cycle - 1]

    def _block_coeffs(self, bs: BlockSum) -> tuple[int, int]:
        # per-iteration length  A + B*j
        a = sum(t.const * self._cycle_len(t.cycle) for t in bs.body)
        b = sum(t.coef * self._cycle_len(t.cycle) for t in bs.body)
        return a, b

    def _block_prefix(self, bs: BlockSum, j: int) -> int:
        # total edge length of iterations 1..j
        a, b = self._block_coeffs(bs)
        return a * j + b * j * (j + 1) // 2

    def _item_length(self, item: FormulaItem) -> int:
        if isinstance(item, Run):
            return item.count * self._cycle_len(item.cycle)
        return self._block_prefix(item, item.bound)

    # -- position queries ----------------------------------------------------

    def locate(self, offset: int) -> tuple[int, int]:
        """Vertex of the source level at ``offset`` edges into the expansion.

        Returns ``(cycle, position)`` with ``(0, 0)`` for the base vertex.
        Formula boundaries and complete-traversal boundaries are all at the
        base, so the result is well defined for any offset in [0, length].
        """
        if not (0 <= offset <= self.length):
            raise StructuralError(f"offset {offset} outside [0, {self.length}]")
        if offset == 0:
            return (0, 0)
        idx = bisect_left(self._ends, offset)
        item = self.items[idx]
        start = self._ends[idx] - self._item_length(item)
        r = offset - start
        if isinstance(item, Run):
            return self._locate_in_run(item.cycle, r)
        return self._locate_in_block(item, r)

    def _locate_in_run(self, cycle: int, r: int) -> tuple[int, int]:
        if cycle == 0:
            return (0, 0)
        m = r % self._cycle_len(cycle)
        return (0, 0) if m == 0 else (cycle, m)

    def _locate_in_block(self, bs: BlockSum, r: int) -> tuple[int, int]:
        j = self._block_iteration(bs, r)
        rr = r - self._block_prefix(bs, j - 1)
        for term in bs.body:
            tlen = term.count_at(j) * self._cycle_len(term.cycle)
            if rr <= tlen:
                return self._locate_in_run(term.cycle, rr)
            rr -= tlen
        raise AssertionError("offset walked past block iteration")

    def _block_iteration(self, bs: BlockSum, r: int) -> int:
        """Smallest j >= 1 whose cumulative block length reaches r."""
        a, b = self._block_coeffs(bs)
        if b == 0:
            j = (r + a - 1) // a
        else:
            # solve b*j^2 + (b + 2a)*j - 2r >= 0
            c1 = b + 2 * a
            j = (isqrt(c1 * c1 + 8 * b * r) - c1) // (2 * b)
            if j < 1:
                j = 1
        while self._block_prefix(bs, j) < r:
            j += 1
        while j > 1 and self._block_prefix(bs, j - 1) >= r:
            j -= 1
        return j

    # -- occurrence counting and enumeration ---------------------------------

    def count_occurrences(self, cycle: int, pos: int) -> int:
        """Number of offsets in [1, length-1] whose vertex is (cycle, pos)."""
        total = 0
        for item in self.items:
            if isinstance(item, Run):
                total += self._run_occurrences(item.cycle, item.count, cycle)
            else:
                k = item.bound
                for term in item.body:
                    per = self._run_occurrences(
                        term.cycle, term.const * k + term.coef * k * (k + 1) // 2, cycle)
                    total += per
        if cycle == 0:
            total -= 1  # the final offset (== length) is the upper base vertex
        return total

    @staticmethod
    def _run_occurrences(run_cycle: int, count: int, target_cycle: int) -> int:
        # base edges contribute `count` base offsets; a cycle run contributes
        # one base offset per traversal and one hit per traversal for each of
        # its interior positions
        if target_cycle == 0:
            return count
        return count if run_cycle == target_cycle else 0

    def iter_occurrences(self, cycle: int, pos: int) -> Iterator[int]:
        """Offsets in [1, length-1] whose vertex is (cycle, pos), ascending.

        Lazy: block sums are walked iteration by iteration, so truncated
        consumers never expand astronomically large bounds.
        """
        start = 0
        for item in self.items:
            if isinstance(item, Run):
                yield from self._iter_in_run(start, item.cycle, item.count, cycle, pos)
                start += self._item_length(item)
            else:
                for j in range(1, item.bound + 1):
                    for term in item.body:
                        cnt = term.count_at(j)
                        if cnt:
                            yield from self._iter_in_run(start, term.cycle, cnt, cycle, pos)
                            start += cnt * self._cycle_len(term.cycle)

    def _iter_in_run(self, start: int, run_cycle: int, count: int,
                     cycle: int, pos: int) -> Iterator[int]:
        length = self.length
        clen = self._cycle_len(run_cycle)
        if cycle == 0:
            for t in range(1, count + 1):
                p = start + t * clen
                if p < length:
                    yield p
        elif run_cycle == cycle:
            for t in range(count):
                yield start + t * clen + pos

    # -- literal expansion ----------------------------------------------------

    def iter_runs(self) -> Iterator[Run]:
        """Literal runs of the formula with block sums expanded.

        Callers must budget-check first: the cycle-1 formulas of deep levels
        have astronomically many blocks.
        """
        for item in self.items:
            if isinstance(item, Run):
                yield item
            else:
                for j in range(1, item.bound + 1):
                    for term in item.body:
                        cnt = term.count_at(j)
                        if cnt:
                            yield Run(term.cycle, cnt)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Formula) and self.items == other.items
                and self.lengths == other.lengths)

    def __repr__(self) -> str:
        return f"Formula({len(self.items)} items, length={self.length})"


# ---------------------------------------------------------------------------
# Level specs.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSpec:
    """Symbolic description of one level and of the cover onto it.

    ``cycle_lengths`` are the lengths of this level's cycles,
    ``k_value = 2 * (1 + sum(cycle_lengths))`` and ``image_formulas[i-1]`` is
    the image of cycle ``i`` of the next level, written over this level's
    symbols.  There are ``level + 1`` formulas.
    """

    level: int
    cycle_lengths: tuple[int, ...]
    k_value: int
    image_formulas: tuple[Formula, ...]


_spec_cache: dict[int, LevelSpec] = {}
_spec_lock = threading.Lock()


def build_level_spec(n: int) -> LevelSpec:
    """Level spec for level ``n``; memoized, built bottom-up."""
    if n < 0:
        raise StructuralError(f"level must be >= 0, got {n}")
    if n > SOFT_LEVEL_LIMIT:
        warnings.warn(
            f"level {n} exceeds the practical limit {SOFT_LEVEL_LIMIT}; "
            "cycle lengths roughly double in bit size per level",
            stacklevel=2)
    spec = _spec_cache.get(n)
    if spec is not None:
        return spec
    for lvl in range(n + 1):
        if lvl in _spec_cache:
            continue
        spec = _make_spec(lvl)
        with _spec_lock:
            _spec_cache.setdefault(lvl, spec)
    return _spec_cache[n]


def _make_spec(n: int) -> LevelSpec:
    if n == 0:
        formula = Formula([Run(0, INITIAL_CYCLE_LENGTH)], lengths=())
        return LevelSpec(0, (), 2, (formula,))
    below = _spec_cache[n - 1]
    lengths = tuple(f.length for f in below.image_formulas)
    k = 2 * (1 + sum(lengths))
    formulas = []
    # cycle 1 of level n+1
    items: list[FormulaItem] = [
        BlockSum(k, (BlockTerm(0, 0, 1), BlockTerm(1, 2, 0))),
        Run(0, 1),
    ]
    items.extend(Run(i, 2) for i in range(2, n + 1))
    items.append(Run(0, 1))
    formulas.append(Formula(items, lengths))
    # cycles 2..n of level n+1
    for i in range(2, n + 1):
        items = [Run(0, 1)]
        items.extend(Run(i2, 2) for i2 in range(i, n + 1))
        items.append(Run(0, 1))
        formulas.append(Formula(items, lengths))
    # cycle n+1 of level n+1: a pure base run
    formulas.append(Formula([Run(0, (n + 2) ** 2 * sum(lengths))], lengths))
    return LevelSpec(n, lengths, k, tuple(formulas))


def cycle_length(n: int, i: int) -> int:
    """Length of cycle ``i`` at level ``n``."""
    spec = build_level_spec(n)
    if not (1 <= i <= n):
        raise StructuralError(f"level {n} has cycles 1..{n}, asked for {i}")
    return spec.cycle_lengths[i - 1]


def level_spec_json(spec: LevelSpec) -> dict:
    """JSON-ready spec record; large counts are decimal strings."""
    def item_json(item: FormulaItem) -> dict:
        if isinstance(item, Run):
            kind = "edges" if item.cycle == 0 else "cycle"
            rec: dict = {"kind": kind, "count": str(item.count)}
            if item.cycle:
                rec["index"] = item.cycle
            return rec
        return {
            "kind": "sum",
            "bound": str(item.bound),
            "body": [{"cycle": t.cycle, "const": str(t.const), "coef": str(t.coef)}
                     for t in item.body],
        }

    return {
        "level": spec.level,
        "k": str(spec.k_value),
        "cycle_lengths": [str(length) for length in spec.cycle_lengths],
        "image_formulas": [[item_json(it) for it in f.items]
                           for f in spec.image_formulas],
    }


# ---------------------------------------------------------------------------
# Vertex addresses.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexAddr:
    """A vertex of one level: the base (cycle 0, pos 0) or position ``pos``
    along cycle ``cycle``, counting edges from the base."""

    level: int
    cycle: int
    pos: int

    @property
    def is_base(self) -> bool:
        return self.cycle == 0

    def __str__(self) -> str:
        return f"{self.level}:{self.cycle}:{self.pos}"


def base_addr(level: int) -> VertexAddr:
    return VertexAddr(level, 0, 0)


def check_addr(a: VertexAddr) -> None:
    """Raise unless the address denotes an actual vertex of its level."""
    if a.level < 0:
        raise StructuralError(f"negative level in {a}")
    if a.cycle == 0:
        if a.pos != 0:
            raise StructuralError(f"base address must have pos 0: {a}")
        return
    if not (1 <= a.cycle <= a.level):
        raise StructuralError(f"cycle {a.cycle} does not exist at level {a.level}")
    length = cycle_length(a.level, a.cycle)
    if not (1 <= a.pos < length):
        raise StructuralError(
            f"position {a.pos} outside [1, {length - 1}] on cycle {a.cycle} "
            f"of level {a.level}")


def project_addr(a: VertexAddr) -> VertexAddr:
    """Image of a level-(n+1) vertex under the cover onto level n."""
    if a.level < 1:
        raise StructuralError("level 0 has nothing below it")
    check_addr(a)
    if a.is_base:
        return base_addr(a.level - 1)
    spec = build_level_spec(a.level - 1)
    cycle, pos = spec.image_formulas[a.cycle - 1].locate(a.pos)
    return VertexAddr(a.level - 1, cycle, pos)


def project_to(a: VertexAddr, level: int) -> VertexAddr:
    """Repeated projection down to ``level``."""
    if level > a.level:
        raise StructuralError(f"cannot project level {a.level} up to {level}")
    while a.level > level:
        a = project_addr(a)
    return a


@dataclass(frozen=True)
class LiftReport:
    """Preimages of an address one level up: a truncated ascending list plus
    the exact total count."""

    address: VertexAddr
    choices: tuple[VertexAddr, ...]
    total: int
    truncated: bool


def lift_choices(a: VertexAddr, max_results: int = 64) -> LiftReport:
    """All level-(n+1) addresses projecting onto ``a``, in increasing
    (cycle, position) order, truncated to ``max_results``."""
    check_addr(a)
    spec = build_level_spec(a.level)
    up = a.level + 1
    total = 0
    choices: list[VertexAddr] = []
    if a.is_base:
        total += 1  # the base of the upper level
        if len(choices) < max_results:
            choices.append(base_addr(up))
    for i, formula in enumerate(spec.image_formulas, start=1):
        total += formula.count_occurrences(a.cycle, a.pos)
        if len(choices) < max_results:
            for p in formula.iter_occurrences(a.cycle, a.pos):
                choices.append(VertexAddr(up, i, p))
                if len(choices) >= max_results:
                    break
    return LiftReport(a, tuple(choices), total, truncated=total > len(choices))


# ---------------------------------------------------------------------------
# Occurrence scanning.
# ---------------------------------------------------------------------------

def _run_stream(level_from: int, cycle: int, level_to: int) -> Iterator[Run]:
    """Literal runs at ``level_to`` for one full traversal of the given cycle."""
    if level_from == level_to:
        yield Run(cycle, 1)
        return
    spec = build_level_spec(level_from - 1)
    for run in spec.image_formulas[cycle - 1].iter_runs():
        if run.cycle == 0 or level_from - 1 == level_to:
            yield run
        else:
            for _ in range(run.count):
                yield from _run_stream(level_from - 1, run.cycle, level_to)


@dataclass
class OccurrenceReport:
    """Complete copies of a target cycle inside a projected source cycle.

    Offsets are starts of complete base-to-base traversals; gaps are the edge
    counts between consecutive copy end and copy start.  ``prefix_length`` /
    ``suffix_length`` describe the segments before the first and after the
    last copy (the whole path when there are no copies).
    """

    source_level: int
    source_cycle: int
    target_level: int
    target_cycle: int
    total_length: int
    copy_length: int
    copy_count: int
    offsets: tuple[int, ...]
    offsets_truncated: bool
    gap_histogram: dict[int, int]
    gaps_all_base: bool
    prefix_length: int
    prefix_all_base: bool
    suffix_length: int
    suffix_all_base: bool
    budget: int

    def realized_gaps(self) -> tuple[int, ...]:
        return tuple(sorted(self.gap_histogram))

    def to_json(self) -> dict:
        return {
            "source": {"level": self.source_level, "cycle": self.source_cycle},
            "target": {"level": self.target_level, "cycle": self.target_cycle},
            "total_length": str(self.total_length),
            "copy_length": str(self.copy_length),
            "copy_count": self.copy_count,
            "offsets": [str(p) for p in self.offsets],
            "offsets_truncated": self.offsets_truncated,
            "gap_histogram": {str(g): c for g, c in sorted(self.gap_histogram.items())},
            "gaps_all_base": self.gaps_all_base,
            "prefix": {"length": str(self.prefix_length), "all_base": self.prefix_all_base},
            "suffix": {"length": str(self.suffix_length), "all_base": self.suffix_all_base},
            "budget": self.budget,
        }


def find_occurrences(m: int, m_prime: int, target_cycle: int, source_cycle: int,
                     budget: int = DEFAULT_SCAN_BUDGET,
                     max_offsets: int = 200_000) -> OccurrenceReport:
    """Scan the projection of one source-cycle traversal for complete copies
    of the target cycle.

    The walk is over symbolic run segments, never materialized; the budget
    bounds the projected path's edge length (which equals the source cycle's
    length, covers being edge-count preserving).
    """
    if not (0 <= m < m_prime):
        raise StructuralError(f"need 0 <= m < m', got {m}..{m_prime}")
    if not (1 <= target_cycle <= m):
        raise StructuralError(f"level {m} has no cycle {target_cycle}")
    if not (1 <= source_cycle <= m_prime):
        raise StructuralError(f"level {m_prime} has no cycle {source_cycle}")
    total_length = cycle_length(m_prime, source_cycle)
    if total_length > budget:
        raise BudgetExceeded(
            f"occurrence scan of cycle {source_cycle} at level {m_prime}",
            required=total_length, budget=budget)
    copy_length = cycle_length(m, target_cycle)

    offset = 0
    offsets: list[int] = []
    copy_count = 0
    truncated = False
    gap_histogram: dict[int, int] = {}
    gaps_all_base = True
    prefix_length = -1
    prefix_all_base = True
    suffix_all_base = True
    prev_end = -1
    clean_since_prev = True  # no foreign cycle edges since the last copy end
    for run in _run_stream(m_prime, source_cycle, m):
        if run.cycle == target_cycle:
            for t in range(run.count):
                start = offset + t * copy_length
                if prev_end < 0:
                    prefix_length = start
                else:
                    gap = start - prev_end
                    gap_histogram[gap] = gap_histogram.get(gap, 0) + 1
                    if not clean_since_prev:
                        gaps_all_base = False
                prev_end = start + copy_length
                clean_since_prev = True
                copy_count += 1
                if len(offsets) < max_offsets:
                    offsets.append(start)
                else:
                    truncated = True
            offset += run.count * copy_length
        else:
            if run.cycle != 0:
                if prev_end < 0:
                    prefix_all_base = False
                clean_since_prev = False
            offset += run.count * (1 if run.cycle == 0
                                   else cycle_length(m, run.cycle))
    if prev_end < 0:
        prefix_length = total_length
        suffix_length = total_length
    else:
        suffix_length = total_length - prev_end
        suffix_all_base = clean_since_prev
    return OccurrenceReport(
        source_level=m_prime, source_cycle=source_cycle,
        target_level=m, target_cycle=target_cycle,
        total_length=total_length, copy_length=copy_length,
        copy_count=copy_count, offsets=tuple(offsets),
        offsets_truncated=truncated, gap_histogram=gap_histogram,
        gaps_all_base=gaps_all_base,
        prefix_length=prefix_length, prefix_all_base=prefix_all_base,
        suffix_length=suffix_length, suffix_all_base=suffix_all_base,
        budget=budget)


# ---------------------------------------------------------------------------
# Materialization bridge.
# ---------------------------------------------------------------------------

@dataclass
class MaterializedLevel:
    """Explicit bouquet graph for one level plus the cover onto the level
    below (None at level 0)."""

    level: int
    graph: MaterializedGraph
    cover: CoverMap | None
    cycle_starts: tuple[int, ...]  # first vertex id of each cycle
    cycle_lengths: tuple[int, ...]

    def addr_to_id(self, a: VertexAddr) -> int:
        if a.level != self.level:
            raise StructuralError(f"{a} is not a level-{self.level} address")
        if a.is_base:
            if a.pos != 0:
                raise StructuralError(f"base address must have pos 0: {a}")
            return 0
        if not (1 <= a.cycle <= len(self.cycle_lengths)):
            raise StructuralError(f"no cycle {a.cycle} at level {self.level}")
        if not (1 <= a.pos < self.cycle_lengths[a.cycle - 1]):
            raise StructuralError(f"position out of range: {a}")
        return self.cycle_starts[a.cycle - 1] + a.pos - 1

    def id_to_addr(self, vid: int) -> VertexAddr:
        if not (0 <= vid < self.graph.vertex_count):
            raise StructuralError(f"vertex id {vid} out of range")
        if vid == 0:
            return base_addr(self.level)
        i = bisect_left(self.cycle_starts, vid + 1)
        return VertexAddr(self.level, i, vid - self.cycle_starts[i - 1] + 1)


def estimate_vertex_count(n: int, spec_for=None) -> int:
    spec = (spec_for or build_level_spec)(n)
    return 1 + sum(length - 1 for length in spec.cycle_lengths)


_EDGE_STEP = (1 << 32) | 1


def materialize_graph(n: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET,
                      spec_for=None) -> MaterializedLevel:
    """Materialize level ``n`` (and the cover onto level ``n-1``) explicitly.

    ``spec_for`` maps a level index to its :class:`LevelSpec` and defaults to
    the built-in construction.  Refuses levels whose vertex count exceeds the
    budget; level 4 of the built-in tower is already around 7e13 vertices and
    must never be materialized.
    """
    if spec_for is None:
        spec_for = build_level_spec
    estimate = estimate_vertex_count(n, spec_for)
    if estimate > vertex_budget:
        raise BudgetExceeded(f"materialize level {n}", required=estimate,
                             budget=vertex_budget)
    spec = spec_for(n)
    lengths = spec.cycle_lengths
    starts = []
    next_id = 1
    for length in lengths:
        starts.append(next_id)
        next_id += length - 1
    vertex_count = next_id

    packed = array("q", [0])  # base self-loop (0, 0)
    for start in starts:
        packed.append(start)  # (0, start): base into the cycle
    for start, length in zip(starts, lengths):
        first = (start << 32) | (start + 1)
        packed.extend(array("q", range(first, first + (length - 2) * _EDGE_STEP,
                                       _EDGE_STEP)))
        packed.append((start + length - 2) << 32)  # last cycle vertex back to base
    graph = MaterializedGraph._from_packed(vertex_count, packed)

    cover = None
    if n >= 1:
        below = materialize_graph(n - 1, vertex_budget, spec_for)
        vm = array("q", bytes(8 * vertex_count))  # zero-filled: base image
        prev_spec = spec_for(n - 1)
        blocks: dict[int, array] = {}
        for i in range(1, n + 1):
            formula = prev_spec.image_formulas[i - 1]
            vid = starts[i - 1]  # id of the vertex one edge past the walk cursor
            for run in formula.iter_runs():
                if run.cycle == 0:
                    vid += run.count  # base positions: image stays 0
                    continue
                clen = prev_spec.cycle_lengths[run.cycle - 1]
                block = blocks.get(run.cycle)
                if block is None:
                    img_start = below.cycle_starts[run.cycle - 1]
                    block = array("q", range(img_start, img_start + clen - 1))
                    blocks[run.cycle] = block
                for _ in range(run.count):
                    # interior positions of one traversal; the traversal-end
                    # position maps to the base and keeps its zero fill
                    vm[vid:vid + clen - 1] = block
                    vid += clen
        cover = CoverMap._from_array(graph, below.graph, vm)
    return MaterializedLevel(n, graph, cover, tuple(starts), lengths)
