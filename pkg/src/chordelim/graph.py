"""Undirected graphs with vertex elimination and chordal extensions.

Vertices carry stable 0-based labels assigned at construction. Eliminating a
vertex connects its former neighbors into a clique and removes the vertex
from the active set; labels never shift, so orderings and policies always
refer to original labels.

Adjacency is stored as one integer bitmask per label. Clique insertion over
a neighborhood is then a few word-wide OR operations per neighbor, which
keeps elimination cheap on the dense intermediate graphs that appear
mid-ordering. Neighbor lists derived from the masks are always in ascending
label order, so iteration is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptyGraphError,
    FormatError,
    InvalidOrderingError,
    InvalidVertexError,
)


def _bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Simple undirected graph over labels ``0..num_labels-1`` with an active set.

    All public operations leave the instance unchanged (they return new
    graphs or plain values), so instances can be shared read-only across
    workers. ``add_edge`` is the one builder-phase exception and is meant
    for single-threaded construction.
    """

    __slots__ = ("num_labels", "_rows", "_active")

    def __init__(self, num_labels: int):
        if num_labels < 0:
            raise ValueError(f"num_labels must be non-negative, got {num_labels}")
        self.num_labels = num_labels
        self._rows: list[int] = [0] * num_labels
        self._active = (1 << num_labels) - 1 if num_labels else 0

    @classmethod
    def _raw(cls, num_labels: int, rows: list[int], active: int) -> "Graph":
        g = object.__new__(cls)
        g.num_labels = num_labels
        g._rows = rows
        g._active = active
        return g

    @classmethod
    def from_edges(cls, num_labels: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(num_labels)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    def add_edge(self, u: int, v: int) -> None:
        self._require_active(u)
        self._require_active(v)
        if u == v:
            raise InvalidVertexError(f"self-loop on vertex {u} is not allowed")
        self._rows[u] |= 1 << v
        self._rows[v] |= 1 << u

    def copy(self) -> "Graph":
        return Graph._raw(self.num_labels, list(self._rows), self._active)

    def __eq__(self, other: object):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_labels == other.num_labels
            and self._active == other._active
            and self._rows == other._rows
        )

    __hash__ = None  # mutable during construction

    def __repr__(self) -> str:
        return (
            f"Graph(num_labels={self.num_labels}, active={self.num_active}, "
            f"edges={self.num_edges})"
        )

    def _require_active(self, v: int) -> None:
        if not 0 <= v < self.num_labels:
            raise InvalidVertexError(
                f"vertex {v} is out of range for a graph with {self.num_labels} labels"
            )
        if not self._active >> v & 1:
            raise InvalidVertexError(f"vertex {v} has already been eliminated")

    @property
    def num_active(self) -> int:
        return self._active.bit_count()

    @property
    def num_edges(self) -> int:
        return sum(self._rows[v].bit_count() for v in _bits(self._active)) // 2

    def active_labels(self) -> list[int]:
        return list(_bits(self._active))

    def is_active(self, v: int) -> bool:
        return 0 <= v < self.num_labels and bool(self._active >> v & 1)

    def degree(self, v: int) -> int:
        self._require_active(v)
        return self._rows[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        self._require_active(v)
        return list(_bits(self._rows[v]))

    def has_edge(self, u: int, v: int) -> bool:
        self._require_active(u)
        self._require_active(v)
        return bool(self._rows[u] >> v & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as (u, v) with u < v, in ascending lexicographic order."""
        for u in _bits(self._active):
            upper = self._rows[u] & ~((1 << (u + 1)) - 1)
            for v in _bits(upper):
                yield u, v

    def min_degree_nodes(self) -> list[int]:
        """All active vertices of minimum degree, ascending."""
        if not self._active:
            raise EmptyGraphError("graph has no active vertices")
        best = -1
        out: list[int] = []
        for v in _bits(self._active):
            d = self._rows[v].bit_count()
            if best < 0 or d < best:
                best = d
                out = [v]
            elif d == best:
                out.append(v)
        return out

    def fill_count_if_eliminated(self, v: int) -> int:
        """Number of edges eliminating ``v`` would insert, without eliminating it."""
        self._require_active(v)
        mask = self._rows[v]
        deg = mask.bit_count()
        present = 0
        for u in _bits(mask):
            upper = mask & ~((1 << (u + 1)) - 1)
            present += (self._rows[u] & upper).bit_count()
        return deg * (deg - 1) // 2 - present

    def _eliminate_in_place(self, v: int) -> int:
        """Eliminate ``v`` mutating this instance; returns the fill count.

        Private fast path for rollouts that own their working copy.
        """
        mask = self._rows[v]
        vbit = 1 << v
        fill = 0
        for u in _bits(mask):
            upper = mask & ~((1 << (u + 1)) - 1)
            fill += (upper & ~self._rows[u]).bit_count()
            self._rows[u] = (self._rows[u] | (mask & ~(1 << u))) & ~vbit
        self._rows[v] = 0
        self._active &= ~vbit
        return fill

    def eliminate(self, v: int) -> "EliminationResult":
        """Connect the neighbors of ``v`` into a clique and remove ``v``.

        Returns the new graph together with the list of inserted edges; this
        instance is left unchanged.
        """
        self._require_active(v)
        mask = self._rows[v]
        fill_edges: list[tuple[int, int]] = []
        for u in _bits(mask):
            upper = mask & ~((1 << (u + 1)) - 1)
            for w in _bits(upper & ~self._rows[u]):
                fill_edges.append((u, w))
        out = self.copy()
        out._eliminate_in_place(v)
        return EliminationResult(graph=out, fill_edges=fill_edges, fill_count=len(fill_edges))

    def is_chordal(self) -> bool:
        """True iff the active subgraph has no induced chordless cycle of length >= 4.

        Runs maximum-cardinality search and verifies that the reverse visit
        order is a perfect elimination ordering. Empty and single-vertex
        graphs count as chordal.
        """
        active = self.active_labels()
        if len(active) <= 2:
            return True
        numbered = 0
        visit: list[int] = []
        for _ in active:
            best = -1
            best_w = -1
            for v in active:
                if numbered >> v & 1:
                    continue
                w = (self._rows[v] & numbered).bit_count()
                if w > best_w:
                    best = v
                    best_w = w
            visit.append(best)
            numbered |= 1 << best
        peo = visit[::-1]
        pos = {v: i for i, v in enumerate(peo)}
        remaining = self._active
        for v in peo:
            remaining &= ~(1 << v)
            later = self._rows[v] & remaining
            if later:
                u = min(_bits(later), key=pos.__getitem__)
                if later & ~(1 << u) & ~self._rows[u]:
                    return False
        return True

    def adjacency_matrix(self, nodes: Sequence[int] | None = None) -> np.ndarray:
        """Dense 0/1 adjacency over ``nodes`` (default: active labels ascending)."""
        if nodes is None:
            nodes = self.active_labels()
        nbytes = max(1, (self.num_labels + 7) // 8)
        idx = np.asarray(nodes, dtype=np.intp)
        a = np.empty((len(nodes), len(nodes)), dtype=np.float64)
        for i, u in enumerate(nodes):
            row = np.unpackbits(
                np.frombuffer(self._rows[u].to_bytes(nbytes, "little"), dtype=np.uint8),
                bitorder="little",
            )
            a[i] = row[idx]
        return a


@dataclass(frozen=True)
class EliminationResult:
    """Outcome of one elimination step: new graph plus inserted edges."""

    graph: Graph
    fill_edges: list[tuple[int, int]]
    fill_count: int


def chordal_extension(g: Graph, ordering: Sequence[int]) -> tuple[Graph, int]:
    """Extend ``g`` with the fill edges of eliminating along ``ordering``.

    Returns the extension (on the same vertex set, original edges included)
    and the total number of inserted edges. The ordering must be a
    permutation of the active vertices.
    """
    order = list(ordering)
    if sorted(order) != g.active_labels():
        raise InvalidOrderingError(
            "ordering must be a permutation of the graph's active vertices"
        )
    work = g.copy()
    ext_rows = list(g._rows)
    total_fill = 0
    for v in order:
        mask = work._rows[v]
        ext_rows[v] |= mask
        for u in _bits(mask):
            ext_rows[u] |= 1 << v
        total_fill += work._eliminate_in_place(v)
    extension = Graph._raw(g.num_labels, ext_rows, g._active)
    return extension, total_fill


def to_edge_list_text(g: Graph) -> str:
    """Serialize as an edge list: header ``n m``, then one ``u v`` line per edge."""
    lines = [f"{g.num_labels} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def from_edge_list_text(text: str) -> Graph:
    """Parse the edge-list format written by :func:`to_edge_list_text`."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise FormatError("edge list is empty, expected an 'n m' header line")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"line 1: expected 'n m' header, got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError(f"line 1: expected two integers, got {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise FormatError(f"line 1: n and m must be non-negative, got {lines[0]!r}")
    g = Graph(n)
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: expected two integers, got {line!r}") from None
        if u == v:
            raise FormatError(f"line {lineno}: self-loop {u} {v} is not allowed")
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"line {lineno}: edge {u} {v} out of range for n={n}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add(key)
        g.add_edge(u, v)
    if len(seen) != m:
        raise FormatError(f"header promised {m} edges but file contains {len(seen)}")
    return g
