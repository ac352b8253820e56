"""Empirical chaos analysis: degrees, proximality, Li-Yorke pairs, mixing.

Finite computation cannot decide asymptotic behavior, so this module is
split along an honest line:

* *certificates* -- things a finite scan genuinely witnesses: base-hit times
  (proximality), moments of small distance, moments of separation, realized
  gap sets of cover images;
* *verdicts* -- conclusions that follow from the structure theory (degree
  arithmetic excludes asymptotic pairs), reported with the reason spelled
  out and clearly separate from what was scanned.

Every report embeds the handles, depths, horizons and budgets needed to
reproduce it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bouquet import (
    DEFAULT_SCAN_BUDGET,
    OccurrenceReport,
    build_level_spec,
    find_occurrences,
)
from .dynamics import (
    DistanceValue,
    OrbitCursor,
    PointHandle,
    column_of,
    distance,
    exhaustion_time,
    next_base_time,
    step,
)
from .errors import StructuralError

DEFAULT_PROX_DEPTH = 2   # both columns at the base through level 2: d <= 2^-3
DEFAULT_SEP_DEPTH = 3    # a difference at level <= 3: d >= 2^-3
DEFAULT_HORIZON = 10**4


# ---------------------------------------------------------------------------
# Degrees.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeValue:
    """Cycle-index degree; ``index`` is None for an all-base column."""

    index: int | None

    @property
    def is_infinite(self) -> bool:
        return self.index is None

    def __str__(self) -> str:
        return "inf" if self.index is None else str(self.index)

    def __le__(self, bound: int) -> bool:
        return self.index is not None and self.index <= bound


def degree_of_column(h: PointHandle, depth: int | None = None) -> DegreeValue:
    """Minimum vertex degree over levels ``0..depth`` at the current time.

    This is the depth-limited estimate of the point's true degree (an upper
    bound that is exact once the column has stabilized on one cycle).
    """
    best: int | None = None
    for addr in column_of(h, depth):
        if addr.cycle and (best is None or addr.cycle < best):
            best = addr.cycle
    return DegreeValue(best)


# ---------------------------------------------------------------------------
# Proximality certificates.
# ---------------------------------------------------------------------------

@dataclass
class WindowHit:
    start: int
    length: int
    hit: int | None  # absolute time of the first base-hit inside the window

    def to_json(self) -> dict:
        return {"start": str(self.start), "length": str(self.length),
                "hit": None if self.hit is None else str(self.hit)}


@dataclass
class ProximalReport:
    handle: PointHandle
    target_level: int
    windows: list[WindowHit]

    @property
    def all_hit(self) -> bool:
        return all(w.hit is not None for w in self.windows)

    def to_json(self) -> dict:
        return {"handle": self.handle.to_json(),
                "target_level": self.target_level,
                "all_hit": self.all_hit,
                "windows": [w.to_json() for w in self.windows]}


def proximal_certificate(h: PointHandle, target_level: int,
                         windows: list[tuple[int, int]]) -> ProximalReport:
    """First base-hit time of the level-``target_level`` coordinate in each
    window.

    A hit at time ``t`` certifies distance at most ``2**-(target_level+1)``
    to the fixed point at that moment.  Windows at least one full cycle
    length wide are guaranteed a hit by the base-gap bound.
    """
    results = []
    for start, length in windows:
        d = next_base_time(step(h, start), target_level)
        hit = start + d if d < length else None
        results.append(WindowHit(start, length, hit))
    return ProximalReport(h, target_level, results)


# ---------------------------------------------------------------------------
# Li-Yorke pair scanning.
# ---------------------------------------------------------------------------

@dataclass
class LiYorkeReport:
    """Scan outcome for one pair: a moment of closeness and a moment of
    separation, each with the time and the measured distance."""

    handle_a: PointHandle
    handle_b: PointHandle
    horizon: int
    prox_depth: int
    sep_depth: int
    proximal_witness: tuple[int, DistanceValue] | None
    separation_witness: tuple[int, DistanceValue] | None

    def to_json(self) -> dict:
        def witness(w):
            if w is None:
                return None
            t, d = w
            return {"time": str(t), "distance": str(d)}

        return {
            "a": self.handle_a.to_json(),
            "b": self.handle_b.to_json(),
            "horizon": self.horizon,
            "prox_depth": self.prox_depth,
            "sep_depth": self.sep_depth,
            "proximal_witness": witness(self.proximal_witness),
            "separation_witness": witness(self.separation_witness),
        }


def _find_proximal(a: PointHandle, b: PointHandle, depth: int,
                   horizon: int) -> tuple[int, DistanceValue] | None:
    # jump between synchronized base-hit times: both coordinates at the base
    # through `depth` bounds the distance by 2^-(depth+1)
    t = 0
    while t <= horizon:
        ha = step(a, t)
        hb = step(b, t)
        da = next_base_time(ha, depth)
        db = next_base_time(hb, depth)
        if da == 0 and db == 0:
            return t, distance(ha, hb)
        t += max(da, db, 1)
    # the jumps can leapfrog a short overlap of the two base-dwell windows;
    # finish with an exhaustive cursor walk so a miss is a real miss
    ca = OrbitCursor(a)
    cb = OrbitCursor(b)
    for t in range(horizon + 1):
        if all(ca.column[lvl].is_base and cb.column[lvl].is_base
               for lvl in range(1, depth + 1)):
            return t, distance(step(a, t), step(b, t))
        if t < horizon:
            ca.advance()
            cb.advance()
    return None


def _find_separation(a: PointHandle, b: PointHandle, depth: int,
                     horizon: int) -> tuple[int, DistanceValue] | None:
    ca = OrbitCursor(a)
    cb = OrbitCursor(b)
    limit = min(depth, a.spine_level, b.spine_level)
    for t in range(horizon + 1):
        for level in range(1, limit + 1):
            if ca.column[level] != cb.column[level]:
                return t, DistanceValue(exact=True, level=level)
        if t < horizon:
            ca.advance()
            cb.advance()
    return None


def li_yorke_test(a: PointHandle, b: PointHandle,
                  horizon: int = DEFAULT_HORIZON,
                  prox_depth: int = DEFAULT_PROX_DEPTH,
                  sep_depth: int = DEFAULT_SEP_DEPTH) -> LiYorkeReport:
    """Search one horizon for both halves of Li-Yorke behavior.

    The proximal search synchronizes base-hit times (it never scans step by
    step unless the jumps degenerate); the separation search walks the
    orbits comparing columns down to ``sep_depth``.
    """
    for h in (a, b):
        ex = exhaustion_time(h)
        if ex is not None and ex <= horizon:
            raise StructuralError(
                f"handle {h} exhausts at +{ex}, too early for horizon {horizon}")
    return LiYorkeReport(
        handle_a=a, handle_b=b, horizon=horizon,
        prox_depth=prox_depth, sep_depth=sep_depth,
        proximal_witness=_find_proximal(a, b, prox_depth, horizon),
        separation_witness=_find_separation(a, b, sep_depth, horizon),
    )


# ---------------------------------------------------------------------------
# Mixing gap reports.
# ---------------------------------------------------------------------------

@dataclass
class MixingGapReport:
    """Occurrence scan of the first cycle across ``depth`` cover levels,
    checked against the three structural claims that drive mixing:

    * gaps between consecutive copies realize (almost) every length up to
      ``claimed_max_gap``;
    * the projected path starts with ``depth`` base edges followed by a
      complete copy;
    * the trailing segment after the last copy is at most
      ``claimed_max_gap - depth`` edges.

    The literal expansion misses gap 1 (a single base edge only ever occurs
    before the first copy); ``missing_gaps`` records that deviation.
    """

    base_level: int
    depth: int
    occurrences: OccurrenceReport
    claimed_max_gap: int
    realized_gaps: tuple[int, ...]
    missing_gaps: tuple[int, ...]
    extra_gaps: tuple[int, ...]
    prefix_matches: bool
    suffix_bound: int
    suffix_within_bound: bool

    def to_json(self) -> dict:
        return {
            "base_level": self.base_level,
            "depth": self.depth,
            "claimed_max_gap": str(self.claimed_max_gap),
            "realized_gap_count": len(self.realized_gaps),
            "missing_gaps": [str(g) for g in self.missing_gaps],
            "extra_gaps": [str(g) for g in self.extra_gaps],
            "prefix_matches": self.prefix_matches,
            "suffix_bound": str(self.suffix_bound),
            "suffix_within_bound": self.suffix_within_bound,
            "occurrences": self.occurrences.to_json(),
        }


def mixing_gap_report(m: int, j: int,
                      budget: int = DEFAULT_SCAN_BUDGET) -> MixingGapReport:
    """Scan copies of cycle 1 of level ``m`` inside the projection of cycle 1
    of level ``m + j`` and evaluate the mixing claims."""
    if m < 1 or j < 1:
        raise StructuralError("need m >= 1 and j >= 1")
    report = find_occurrences(m, m + j, target_cycle=1, source_cycle=1,
                              budget=budget)
    k_top = build_level_spec(m + j - 1).k_value
    realized = report.realized_gaps()
    realized_set = set(realized)
    missing = tuple(g for g in range(0, k_top + 1) if g not in realized_set)
    extra = tuple(g for g in realized if g > k_top)
    prefix_ok = (report.copy_count > 0 and report.prefix_length == j
                 and report.prefix_all_base)
    suffix_bound = k_top - j
    suffix_ok = (report.copy_count > 0 and report.suffix_length <= suffix_bound
                 and report.suffix_all_base)
    return MixingGapReport(
        base_level=m, depth=j, occurrences=report,
        claimed_max_gap=k_top, realized_gaps=realized,
        missing_gaps=missing, extra_gaps=extra,
        prefix_matches=prefix_ok,
        suffix_bound=suffix_bound, suffix_within_bound=suffix_ok)


def return_length_differences(report: OccurrenceReport) -> set[int]:
    """Positive differences of start-to-start return lengths of the target
    cycle; the generated numerical semigroup being cofinite is the
    transitivity-to-mixing witness."""
    returns = sorted(report.copy_length + g for g in report.realized_gaps())
    return {r2 - r1 for i, r1 in enumerate(returns) for r2 in returns[i + 1:]}


# ---------------------------------------------------------------------------
# Numerical semigroup arithmetic.
# ---------------------------------------------------------------------------

def representable(n: int, generators: tuple[int, ...]) -> bool:
    """Whether ``n`` is a nonnegative integer combination of the generators."""
    reachable = bytearray(n + 1)
    reachable[0] = 1
    for v in range(1, n + 1):
        for g in generators:
            if g <= v and reachable[v - g]:
                reachable[v] = 1
                break
    return bool(reachable[n])


def frobenius_number(generators: tuple[int, ...]) -> int:
    """Largest integer not representable by the generators (gcd must be 1).

    Brute force: scan upward until ``min(generators)`` consecutive
    representable values appear; everything past that run is representable.
    """
    from math import gcd
    from functools import reduce

    if reduce(gcd, generators) != 1:
        raise StructuralError("generators must be coprime overall")
    lo = min(generators)
    reachable = bytearray(1)
    reachable[0] = 1
    run = 0
    last_missing = 0
    v = 0
    while run < lo:
        v += 1
        reachable.append(0)
        for g in generators:
            if g <= v and reachable[v - g]:
                reachable[v] = 1
                break
        if reachable[v]:
            run += 1
        else:
            run = 0
            last_missing = v
    return last_missing


# ---------------------------------------------------------------------------
# Degree invariance along orbits.
# ---------------------------------------------------------------------------

@dataclass
class StabilityResult:
    handle: PointHandle
    cycle: int | None       # stable cycle index at the spine (None: fixed point)
    stable_from: int | None  # smallest level of the all-one-cycle tail
    ok: bool

    def to_json(self) -> dict:
        return {"handle": self.handle.to_json(), "cycle": self.cycle,
                "stable_from": self.stable_from, "ok": self.ok}


@dataclass
class StabilityReport:
    results: list[StabilityResult]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "results": [r.to_json() for r in self.results]}


def degree_stability_check(handles: list[PointHandle]) -> StabilityReport:
    """One-step degree invariance on the cycle-stable tail of each column.

    For a column whose levels ``N..M`` all sit on cycle ``i``, one step keeps
    levels ``N+1..M`` on cycle ``i`` (image formulas start and end with base
    edges, so a coordinate can only fall to the base if the one below it is
    already there).  The fixed point is trivially stable.
    """
    results = []
    for h in handles:
        col = column_of(h)
        top = h.spine_level
        i = col[top].cycle
        if i == 0:
            results.append(StabilityResult(h, None, None, ok=True))
            continue
        stable_from = top
        while stable_from > 1 and col[stable_from - 1].cycle == i:
            stable_from -= 1
        col2 = column_of(step(h, 1))
        ok = all(col2[lvl].cycle == i for lvl in range(stable_from + 1, top + 1))
        results.append(StabilityResult(h, i, stable_from, ok))
    return StabilityReport(results)


def degree_window_min(h: PointHandle, level: int, start: int,
                      window: int) -> DegreeValue:
    """Minimum degree of the level-``level`` coordinate over times
    ``start..start+window`` (inclusive)."""
    if not (0 <= level <= h.spine_level):
        raise StructuralError(f"level {level} outside [0, {h.spine_level}]")
    cursor = OrbitCursor(step(h, start))
    best: int | None = None
    for t in range(window + 1):
        cycle = cursor.column[level].cycle
        if cycle and (best is None or cycle < best):
            best = cycle
        if t < window:
            cursor.advance()
    return DegreeValue(best)


# ---------------------------------------------------------------------------
# Pair classification.
# ---------------------------------------------------------------------------

VERDICT_FIXED = "fixed"
VERDICT_IDENTICAL = "identical"
VERDICT_EXPECTED_LI_YORKE = "expected_li_yorke"

_PROXIMAL_CITATION = ("every orbit accumulates on the fixed point, so all "
                      "pairs are proximal")


@dataclass
class PairClassification:
    """Theory-derived verdict for a pair, with the reasons cited and the
    empirical scan attached.

    The verdict is what the structure theory implies (distinct points are
    Li-Yorke); only the attached witnesses are finite evidence.
    """

    deg_a: DegreeValue
    deg_b: DegreeValue
    verdict: str
    citations: list[str] = field(default_factory=list)
    report: LiYorkeReport | None = None

    def to_json(self) -> dict:
        return {"deg_a": str(self.deg_a), "deg_b": str(self.deg_b),
                "verdict": self.verdict, "citations": self.citations,
                "report": None if self.report is None else self.report.to_json()}


def classify_pair(a: PointHandle, b: PointHandle,
                  horizon: int = DEFAULT_HORIZON,
                  prox_depth: int = DEFAULT_PROX_DEPTH,
                  sep_depth: int = DEFAULT_SEP_DEPTH,
                  attach_witnesses: bool = True) -> PairClassification:
    deg_a = degree_of_column(a)
    deg_b = degree_of_column(b)
    shared = min(a.spine_level, b.spine_level)
    if column_of(a, shared) == column_of(b, shared):
        verdict = VERDICT_FIXED if deg_a.is_infinite else VERDICT_IDENTICAL
        return PairClassification(deg_a, deg_b, verdict)

    citations = [_PROXIMAL_CITATION]
    if deg_a.is_infinite or deg_b.is_infinite:
        citations.append("no point other than the fixed point is asymptotic "
                         "to the fixed point")
    else:
        gap = abs(deg_a.index - deg_b.index)
        if gap >= 2:
            citations.append("asymptotic pairs have degrees differing by at "
                             "most 1")
        elif gap == 1:
            citations.append("pairs whose degrees differ by exactly 1 are "
                             "never asymptotic")
        else:
            citations.append("asymptotic pairs of equal finite degree are "
                             "equal as points")
    report = None
    if attach_witnesses:
        report = li_yorke_test(a, b, horizon, prox_depth, sep_depth)
    return PairClassification(deg_a, deg_b, VERDICT_EXPECTED_LI_YORKE,
                              citations, report)
