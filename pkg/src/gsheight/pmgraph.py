"""Polarized metrized graphs and their structural calculus.

A pm-graph is a connected metrized multigraph (loops and parallel edges
allowed, exact rational edge lengths) together with a nonnegative integer
genus marking q on vertices, subject to effectivity of the canonical
divisor K(p) = v(p) - 2 + 2 q(p).  These are the polarized dual graphs of
stable curves, edge lengths recording the thicknesses of the nodes.

All values are exact rationals; all operations are pure and return new
immutable graphs, so instances are safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    Disconnected,
    GenusZero,
    InvalidGraphData,
    NonEffectiveCanonicalDivisor,
    NonPositiveLength,
    SplitOutOfRange,
    UnknownEdge,
    UnknownVertex,
)


def parse_rational(value) -> Fraction:
    """Parse an int, a string like "3/2", or a Fraction into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidGraphData(f"cannot parse rational {value!r}") from exc
    raise InvalidGraphData(f"cannot parse rational {value!r}")


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, vid: str) -> str:
        if vid == self.u:
            return self.v
        if vid == self.v:
            return self.u
        raise UnknownVertex(f"vertex {vid!r} is not an endpoint of edge {self.id!r}")


@dataclass(frozen=True)
class DeltaVector:
    """Total edge weights by type, index h = 0 .. floor(g/2)."""

    by_type: tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return sum(self.by_type, Fraction(0))

    def __getitem__(self, h: int) -> Fraction:
        if 0 <= h < len(self.by_type):
            return self.by_type[h]
        return Fraction(0)


@dataclass(frozen=True)
class PmGraph:
    """A validated polarized metrized graph.

    Construction validates connectivity, positivity of lengths,
    effectivity of the canonical divisor, and genus >= 1.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if not ids:
            raise InvalidGraphData("vertex set must be non-empty")
        if len(set(ids)) != len(ids):
            raise InvalidGraphData("duplicate vertex ids")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            raise InvalidGraphData("duplicate edge ids")
        vset = set(ids)
        for e in self.edges:
            if e.u not in vset or e.v not in vset:
                raise UnknownVertex(f"edge {e.id!r} has unknown endpoint")
            if not isinstance(e.length, Fraction) or e.length <= 0:
                raise NonPositiveLength(f"edge {e.id!r} has length {e.length}")
        for v in self.vertices:
            if v.genus < 0:
                raise InvalidGraphData(f"vertex {v.id!r} has negative genus")
        if not self._is_connected():
            raise Disconnected("underlying graph is not connected")
        for vid, k in self.canonical_divisor().items():
            if k < 0:
                raise NonEffectiveCanonicalDivisor(
                    f"K({vid}) = {k} < 0 (valence {self.valence(vid)}, "
                    f"genus {self.vertex(vid).genus})"
                )
        if self.genus < 1:
            raise GenusZero(f"genus {self.genus} < 1")

    # -- basic structure -------------------------------------------------

    @cached_property
    def _vertex_map(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _valences(self) -> dict[str, int]:
        val = {v.id: 0 for v in self.vertices}
        for e in self.edges:
            val[e.u] += 1
            val[e.v] += 1
        return val

    def vertex(self, vid: str) -> Vertex:
        try:
            return self._vertex_map[vid]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {vid!r}") from None

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_map[eid]
        except KeyError:
            raise UnknownEdge(f"unknown edge {eid!r}") from None

    def valence(self, vid: str) -> int:
        self.vertex(vid)
        return self._valences[vid]

    def _is_connected(self) -> bool:
        ids = [v.id for v in self.vertices]
        adj: dict[str, list[str]] = {i: [] for i in ids}
        for e in self.edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(ids)

    # -- invariants -------------------------------------------------------

    def canonical_divisor(self) -> dict[str, int]:
        """K(p) = v(p) - 2 + 2 q(p); deg K = 2g - 2 for valid graphs."""
        return {
            v.id: self._valences[v.id] - 2 + 2 * v.genus for v in self.vertices
        }

    @cached_property
    def betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @cached_property
    def genus(self) -> int:
        return self.betti + sum(v.genus for v in self.vertices)

    @cached_property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    # -- subdivision and smoothing ----------------------------------------

    def _fresh_id(self, base: str, taken: set[str]) -> str:
        cand = base
        k = 0
        while cand in taken:
            k += 1
            cand = f"{base}#{k}"
        return cand

    def subdivide_edge(self, eid: str, t: Fraction) -> "PmGraph":
        """Insert a valence-2 genus-0 vertex at arc length t along the edge."""
        e = self.edge(eid)
        t = parse_rational(t)
        if not 0 < t < e.length:
            raise SplitOutOfRange(
                f"split point {t} outside (0, {e.length}) on edge {eid!r}"
            )
        vids = set(self._vertex_map)
        eids = set(self._edge_map)
        wid = self._fresh_id(f"{eid}@{t.numerator}/{t.denominator}", vids)
        ida = self._fresh_id(f"{eid}:a", eids)
        idb = self._fresh_id(f"{eid}:b", eids | {ida})
        new_edges = [x for x in self.edges if x.id != eid]
        new_edges.append(Edge(ida, e.u, wid, t))
        new_edges.append(Edge(idb, wid, e.v, e.length - t))
        return PmGraph(self.vertices + (Vertex(wid, 0),), tuple(new_edges))

    def eliminable_vertices(self) -> list[str]:
        """Valence-2 genus-0 vertices whose two half-edges lie on distinct edges."""
        out = []
        for v in self.vertices:
            if v.genus != 0 or self._valences[v.id] != 2:
                continue
            incident = [e for e in self.edges if v.id in (e.u, e.v)]
            if len(incident) == 2:  # a single loop covers both half-edges
                out.append(v.id)
        return out

    def smooth_eliminable(self) -> "PmGraph":
        """Remove eliminable vertices by merging their incident edges.

        Idempotent, and inverse to subdivide_edge up to relabeling.  A circle
        consisting only of eliminable vertices keeps the lexicographically
        smallest one as base vertex (the vertex set must stay non-empty).
        """
        g = self
        while True:
            elim = g.eliminable_vertices()
            if not elim:
                return g
            vid = max(elim)  # keep the smallest id as eventual base vertex
            e1, e2 = sorted(
                (e for e in g.edges if vid in (e.u, e.v)), key=lambda e: e.id
            )
            w1 = e1.other(vid)
            w2 = e2.other(vid)
            merged = Edge(min(e1.id, e2.id), w1, w2, e1.length + e2.length)
            edges = tuple(
                e for e in g.edges if e.id not in (e1.id, e2.id)
            ) + (merged,)
            verts = tuple(v for v in g.vertices if v.id != vid)
            g = PmGraph(verts, edges)

    # -- contraction -------------------------------------------------------

    def contract(self, edge_ids: Iterable[str]) -> "PmGraph":
        """Contract the given edges to points.

        The polarization of a merged vertex is the pushforward of K:
        q_S(w) = (K_push(w) - val(w) + 2) / 2, which preserves the genus.
        Merged vertex ids are the lexicographic minimum of their class.
        """
        S = set(edge_ids)
        for eid in S:
            self.edge(eid)
        if not S:
            return self

        parent = {v.id: v.id for v in self.vertices}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in S:
            e = self._edge_map[eid]
            ru, rv = find(e.u), find(e.v)
            if ru != rv:
                parent[ru] = rv

        classes: dict[str, list[str]] = {}
        for v in self.vertices:
            classes.setdefault(find(v.id), []).append(v.id)
        rep = {root: min(members) for root, members in classes.items()}
        image = {vid: rep[find(vid)] for vid in parent}

        kdiv = self.canonical_divisor()
        k_push: dict[str, int] = {r: 0 for r in rep.values()}
        for vid, k in kdiv.items():
            k_push[image[vid]] += k

        kept = [
            Edge(e.id, image[e.u], image[e.v], e.length)
            for e in self.edges
            if e.id not in S
        ]
        val: dict[str, int] = {r: 0 for r in rep.values()}
        for e in kept:
            val[e.u] += 1
            val[e.v] += 1

        verts = []
        for r in sorted(rep.values()):
            num = k_push[r] - val[r] + 2
            assert num % 2 == 0 and num >= 0, "pushforward polarization failed"
            verts.append(Vertex(r, num // 2))
        return PmGraph(tuple(verts), tuple(kept))

    def restrict_to(self, edge_ids: Iterable[str]) -> "PmGraph":
        """Contract every edge outside the given set."""
        S = set(edge_ids)
        for eid in S:
            self.edge(eid)
        return self.contract([e.id for e in self.edges if e.id not in S])

    # -- edge types --------------------------------------------------------

    def _component_split(self, eid: str) -> tuple[set[str], set[str]] | None:
        """Vertex sets of the two sides after removing the edge interior,
        or None if the graph stays connected."""
        e = self._edge_map[eid]
        if e.is_loop:
            return None
        adj: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for x in self.edges:
            if x.id == eid:
                continue
            adj[x.u].append(x.v)
            adj[x.v].append(x.u)
        seen = {e.u}
        stack = [e.u]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if e.v in seen:
            return None
        return seen, {v.id for v in self.vertices} - seen

    def _side_genus(self, vids: set[str], skip: str) -> int:
        nedges = sum(
            1 for e in self.edges if e.id != skip and e.u in vids and e.v in vids
        )
        b1 = nedges - len(vids) + 1
        return b1 + sum(self._vertex_map[v].genus for v in vids)

    def classify_edges(self) -> tuple[dict[str, int], DeltaVector]:
        """Type of every edge plus the aggregated weight vector.

        An edge has type 0 when removing its interior keeps the graph
        connected; otherwise its type is the minimum of the genera of the
        two resulting pm-graph sides, an integer in [1, g/2].
        """
        g = self.genus
        types: dict[str, int] = {}
        totals = [Fraction(0)] * (g // 2 + 1)
        for e in self.edges:
            split = self._component_split(e.id)
            if split is None:
                h = 0
            else:
                side_u, side_v = split
                h = min(
                    self._side_genus(side_u, e.id), self._side_genus(side_v, e.id)
                )
                assert 1 <= h <= g // 2, f"edge type {h} out of range for g={g}"
            types[e.id] = h
            totals[h] += e.length
        return types, DeltaVector(tuple(totals))

    def delta(self) -> DeltaVector:
        return self.classify_edges()[1]

    # -- wedge decomposition -------------------------------------------------

    def _blocks(self) -> list[set[str]]:
        """Edge sets of the biconnected blocks (loops are their own block)."""
        blocks = [{e.id} for e in self.edges if e.is_loop]
        adj: dict[str, list[Edge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            if not e.is_loop:
                adj[e.u].append(e)
                adj[e.v].append(e)

        index: dict[str, int] = {}
        low: dict[str, int] = {}
        counter = [0]
        estack: list[str] = []

        def dfs(root: str):
            stack: list[tuple[str, str | None, int]] = [(root, None, 0)]
            while stack:
                v, parent_eid, ei = stack.pop()
                if ei == 0:
                    index[v] = low[v] = counter[0]
                    counter[0] += 1
                advanced = False
                while ei < len(adj[v]):
                    e = adj[v][ei]
                    ei += 1
                    if e.id == parent_eid:
                        continue
                    w = e.other(v)
                    if w not in index:
                        estack.append(e.id)
                        stack.append((v, parent_eid, ei))
                        stack.append((w, e.id, 0))
                        advanced = True
                        break
                    if index[w] < index[v]:
                        estack.append(e.id)
                        low[v] = min(low[v], index[w])
                if advanced:
                    continue
                # v is finished; propagate low to the parent frame and pop
                # the block of v's tree edge if the parent is a cut point
                if stack and parent_eid is not None:
                    pv = stack[-1][0]
                    low[pv] = min(low[pv], low[v])
                    if low[v] >= index[pv]:
                        block = set()
                        while True:
                            eid = estack.pop()
                            block.add(eid)
                            if eid == parent_eid:
                                break
                        blocks.append(block)

        for v in self.vertices:
            if v.id not in index:
                dfs(v.id)
        return blocks

    def wedge_decompose(self) -> tuple["PmGraph", ...]:
        """Irreducible components, each realized as a pm-graph of genus g
        by contracting all edges outside the component."""
        if not self.edges:
            return (self,)
        blocks = self._blocks()
        blocks.sort(key=lambda b: min(b))
        return tuple(self.restrict_to(b) for b in blocks)

    # -- canonical relabeling ------------------------------------------------

    def canonical_signature(self):
        """Hashable isomorphism signature by iterated color refinement.

        Sorted degree/genus/length refinement only; sufficient for test
        graphs, not a general isomorphism decision.
        """
        color: dict[str, tuple] = {
            v.id: (v.genus, self._valences[v.id]) for v in self.vertices
        }
        for _ in range(len(self.vertices)):
            nxt = {}
            for v in self.vertices:
                nbrs = []
                for e in self.edges:
                    if e.u == v.id:
                        nbrs.append((e.length, color[e.v]))
                    if e.v == v.id:
                        nbrs.append((e.length, color[e.u]))
                nxt[v.id] = (color[v.id], tuple(sorted(nbrs)))
            if len(set(nxt.values())) == len(set(color.values())):
                color = nxt
                break
            color = nxt
        vsig = tuple(sorted(color.values()))
        esig = tuple(
            sorted(
                (tuple(sorted((color[e.u], color[e.v]))), e.length)
                for e in self.edges
            )
        )
        return vsig, esig

    def is_isomorphic(self, other: "PmGraph") -> bool:
        return self.canonical_signature() == other.canonical_signature()

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v.id, "genus": v.genus} for v in self.vertices],
            "edges": [
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    "length": str(e.length),
                }
                for e in self.edges
            ],
        }


def validate(data) -> PmGraph:
    """Build a PmGraph from a raw description (mapping or PmGraph).

    Raises Disconnected, NonEffectiveCanonicalDivisor, NonPositiveLength,
    GenusZero or InvalidGraphData on rejection.
    """
    if isinstance(data, PmGraph):
        return data
    if not isinstance(data, Mapping):
        raise InvalidGraphData(f"expected a mapping, got {type(data).__name__}")
    try:
        raw_vs = data["vertices"]
        raw_es = data.get("edges", [])
    except KeyError as exc:
        raise InvalidGraphData(f"missing key {exc}") from exc
    vertices = []
    for rv in raw_vs:
        try:
            vertices.append(Vertex(str(rv["id"]), int(rv["genus"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGraphData(f"bad vertex entry {rv!r}") from exc
    edges = []
    for re_ in raw_es:
        try:
            edges.append(
                Edge(
                    str(re_["id"]),
                    str(re_["u"]),
                    str(re_["v"]),
                    parse_rational(re_["length"]),
                )
            )
        except KeyError as exc:
            raise InvalidGraphData(f"bad edge entry {re_!r}") from exc
    return PmGraph(tuple(vertices), tuple(edges))


def load_graph(path) -> PmGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return validate(json.load(fh))
