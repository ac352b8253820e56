"""Explicit finite graphs, graph homomorphisms, and cover-axiom validators.

These materialized objects are the verification oracle for the symbolic
machinery in :mod:`chaoscope.bouquet`: everything here is stored explicitly
(vertex counts, sorted edge arrays, dense vertex maps) and all checks are
exhaustive scans that return complete violation lists rather than booleans.

A graph is a finite set of vertices ``0..vertex_count-1`` with directed
edges.  A cover map is a vertex map between two graphs; the three validators
check the axioms that make it a usable covering:

* edge-surjectivity -- every vertex has an incoming and an outgoing edge;
* homomorphism      -- edges map to edges;
* bidirectionality  -- all out-neighbors (resp. in-neighbors) of a vertex
  share a single image, which is what makes the limit dynamics
  single-valued and invertible.

Edges are packed as ``(u << 32) | v`` in a sorted int array, so graphs in
the millions of vertices stay within a few tens of megabytes.
"""

from __future__ import annotations

import json
from array import array
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

from .errors import StructuralError

_SHIFT = 32
_MASK = (1 << _SHIFT) - 1
_MAX_VERTICES = 1 << 31


def _pack(u: int, v: int) -> int:
    return (u << _SHIFT) | v


class MaterializedGraph:
    """A finite directed graph with dense integer vertex ids.

    Vertex ids must be in ``0..vertex_count-1``; malformed edges are rejected
    at construction.  Instances are immutable.
    """

    __slots__ = ("vertex_count", "_edges")

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]]):
        if vertex_count < 0 or vertex_count > _MAX_VERTICES:
            raise StructuralError(f"vertex_count {vertex_count} out of range")
        packed = array("q")
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise StructuralError(f"edge ({u}, {v}) references a vertex >= {vertex_count}")
            packed.append(_pack(u, v))
        dedup = sorted(set(packed))
        self.vertex_count = vertex_count
        self._edges = array("q", dedup)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def has_edge(self, u: int, v: int) -> bool:
        key = _pack(u, v)
        i = bisect_left(self._edges, key)
        return i < len(self._edges) and self._edges[i] == key

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield edges as (source, target) pairs in sorted order."""
        for key in self._edges:
            yield key >> _SHIFT, key & _MASK

    def successors(self, u: int) -> list[int]:
        lo = bisect_left(self._edges, _pack(u, 0))
        out = []
        for i in range(lo, len(self._edges)):
            key = self._edges[i]
            if key >> _SHIFT != u:
                break
            out.append(key & _MASK)
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MaterializedGraph)
            and self.vertex_count == other.vertex_count
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return f"MaterializedGraph(vertices={self.vertex_count}, edges={self.edge_count})"

    @classmethod
    def _from_packed(cls, vertex_count: int, packed: array) -> "MaterializedGraph":
        # internal fast path: caller guarantees ids are in range and distinct
        g = cls.__new__(cls)
        g.vertex_count = vertex_count
        g._edges = array("q", sorted(packed))
        return g


class CoverMap:
    """A vertex map from one materialized graph onto another.

    Only structure is enforced here (map length = source vertex count, images
    in range); the cover axioms are checked by the validators below.
    """

    __slots__ = ("source", "target", "vertex_map")

    def __init__(self, source: MaterializedGraph, target: MaterializedGraph,
                 vertex_map: Sequence[int]):
        if len(vertex_map) != source.vertex_count:
            raise StructuralError(
                f"vertex map has {len(vertex_map)} entries for {source.vertex_count} vertices"
            )
        for img in vertex_map:
            if not (0 <= img < target.vertex_count):
                raise StructuralError(f"image {img} outside target graph")
        self.source = source
        self.target = target
        self.vertex_map = array("q", vertex_map)

    def __call__(self, u: int) -> int:
        return self.vertex_map[u]

    def __repr__(self) -> str:
        return (f"CoverMap({self.source.vertex_count} -> {self.target.vertex_count} vertices)")

    @classmethod
    def _from_array(cls, source: MaterializedGraph, target: MaterializedGraph,
                    vertex_map: array) -> "CoverMap":
        # internal fast path: caller guarantees length and image ranges
        c = cls.__new__(cls)
        c.source = source
        c.target = target
        c.vertex_map = vertex_map
        return c


@dataclass(frozen=True)
class VertexPath:
    """A walk given by its vertex sequence; length is counted in edges."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise StructuralError("a path needs at least one vertex")

    @property
    def edge_count(self) -> int:
        return len(self.vertices) - 1

    @classmethod
    def checked(cls, graph: MaterializedGraph, vertices: Sequence[int]) -> "VertexPath":
        path = cls(tuple(vertices))
        bad = path.first_break(graph)
        if bad is not None:
            u, v = bad
            raise StructuralError(f"({u}, {v}) is not an edge of the ambient graph")
        return path

    def first_break(self, graph: MaterializedGraph) -> tuple[int, int] | None:
        """First consecutive pair that is not an edge of ``graph``, if any."""
        for u, v in zip(self.vertices, self.vertices[1:]):
            if not graph.has_edge(u, v):
                return (u, v)
        return None


# ---------------------------------------------------------------------------
# Validators.  Each returns an exhaustive violation list; empty means pass.
# ---------------------------------------------------------------------------

def validate_edge_surjective(g: MaterializedGraph) -> list[tuple[int, str]]:
    """Vertices lacking an in-edge or an out-edge, as (vertex, "in"|"out") pairs."""
    has_out = bytearray(g.vertex_count)
    has_in = bytearray(g.vertex_count)
    for key in g._edges:
        has_out[key >> _SHIFT] = 1
        has_in[key & _MASK] = 1
    violations: list[tuple[int, str]] = []
    for v in range(g.vertex_count):
        if not has_in[v]:
            violations.append((v, "in"))
        if not has_out[v]:
            violations.append((v, "out"))
    return violations


def validate_homomorphism(c: CoverMap) -> list[tuple[int, int]]:
    """Source edges whose images are not edges of the target."""
    vm = c.vertex_map
    target = c.target
    violations: list[tuple[int, int]] = []
    for key in c.source._edges:
        u = key >> _SHIFT
        v = key & _MASK
        if not target.has_edge(vm[u], vm[v]):
            violations.append((u, v))
    return violations


def validate_bidirectional(c: CoverMap) -> list[tuple[str, int, int, int]]:
    """Branching vertices whose out- (or in-) neighbors map to distinct images.

    Each violation is ("out"|"in", vertex, image_seen_first, conflicting_image).
    """
    vm = c.vertex_map
    n = c.source.vertex_count
    out_img = array("q", [-1]) * n
    in_img = array("q", [-1]) * n
    violations: list[tuple[str, int, int, int]] = []
    for key in c.source._edges:
        u = key >> _SHIFT
        v = key & _MASK
        iu, iv = vm[u], vm[v]
        prev = out_img[u]
        if prev == -1:
            out_img[u] = iv
        elif prev != iv:
            violations.append(("out", u, prev, iv))
        prev = in_img[v]
        if prev == -1:
            in_img[v] = iu
        elif prev != iu:
            violations.append(("in", v, prev, iu))
    return violations


def apply_cover_to_path(c: CoverMap, p: VertexPath) -> VertexPath:
    """Image of a path under a cover map; edge count is preserved."""
    bad = p.first_break(c.source)
    if bad is not None:
        raise StructuralError(f"path edge {bad} is not in the source graph")
    vm = c.vertex_map
    return VertexPath(tuple(vm[u] for u in p.vertices))


def compose_covers(outer: CoverMap, inner: CoverMap) -> CoverMap:
    """Compose two covers: the result maps inner.source into outer.target."""
    if inner.target is not outer.source and inner.target != outer.source:
        raise StructuralError("inner.target does not match outer.source")
    om = outer.vertex_map
    return CoverMap(inner.source, outer.target, [om[i] for i in inner.vertex_map])


def identity_cover(g: MaterializedGraph) -> CoverMap:
    return CoverMap(g, g, list(range(g.vertex_count)))


# ---------------------------------------------------------------------------
# Exports.
# ---------------------------------------------------------------------------

def write_dot(g: MaterializedGraph, out: TextIO, name: str = "G") -> None:
    """DOT rendering, one line per edge; the base vertex 0 is labeled v0."""
    out.write(f"digraph {name} {{\n")
    out.write('  0 [label="v0"];\n')
    for u, v in g.edges():
        out.write(f"  {u} -> {v};\n")
    out.write("}\n")


def graph_stats(g: MaterializedGraph, level: int | None = None,
                cycle_lengths: Sequence[int] | None = None) -> dict:
    """JSON-ready stats record for a materialized graph."""
    record: dict = {
        "vertex_count": g.vertex_count,
        "edge_count": g.edge_count,
    }
    if level is not None:
        record["level"] = level
    if cycle_lengths is not None:
        record["cycle_lengths"] = [str(length) for length in cycle_lengths]
    return record


def stats_json(g: MaterializedGraph, level: int | None = None,
               cycle_lengths: Sequence[int] | None = None) -> str:
    return json.dumps(graph_stats(g, level, cycle_lengths), sort_keys=True)
