"""Weighted graphs carrying two volume measures.

A graph here is a finite multigraph (self-loops allowed) together with

* a vertex measure ``V`` (one positive weight per vertex),
* an edge measure ``E`` determined by a conductance ``a_e > 0`` and a
  length ``l_e > 0`` per edge, ``E(e) = a_e * l_e``,
* a distinguished (possibly empty) set of boundary vertices.

Edges are stored with an orientation (tail ``u`` -> head ``v``) purely as a
bookkeeping convention for vector fields; nothing downstream depends on the
choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "Edge",
    "WeightedGraph",
    "HalfDegreeStats",
    "LStats",
    "build_graph",
    "half_degrees",
    "natural_measure",
    "from_markov_chain",
    "double",
    "DoubledGraph",
    "L_stats",
    "subdivide_edge",
    "with_boundary",
    "is_connected",
]

VertexId = Hashable


class GraphError(ValueError):
    """Raised for ill-formed graph data (bad weights, unknown vertices, ...)."""


@dataclass(frozen=True)
class Edge:
    u: VertexId
    v: VertexId
    a: float = 1.0
    length: float = 1.0

    @property
    def measure(self) -> float:
        return self.a * self.length

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


class WeightedGraph:
    """Immutable-ish container; numpy views are built once and cached."""

    def __init__(
        self,
        vertices: Sequence[VertexId],
        measures: Sequence[float],
        edges: Sequence[Edge],
        boundary: Iterable[VertexId] = (),
    ):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        self._index = {vid: i for i, vid in enumerate(self.vertices)}
        self.vmeasure = np.asarray(measures, dtype=float)
        if self.vmeasure.shape != (len(self.vertices),):
            raise GraphError("vertex measure length mismatch")
        if not np.all(self.vmeasure > 0):
            raise GraphError("vertex measures must be positive")
        self.boundary = frozenset(boundary)
        unknown = self.boundary - set(self.vertices)
        if unknown:
            raise GraphError(f"boundary vertices not in graph: {sorted(map(str, unknown))}")
        self.edges = list(edges)
        for e in self.edges:
            if e.u not in self._index or e.v not in self._index:
                raise GraphError(f"edge endpoint not in graph: {e.u!r}-{e.v!r}")
            if not (e.a > 0 and e.length > 0):
                raise GraphError("edge weights and lengths must be positive")
        self._build_arrays()

    def _build_arrays(self) -> None:
        m = len(self.edges)
        self.eu = np.fromiter((self._index[e.u] for e in self.edges), dtype=int, count=m)
        self.ev = np.fromiter((self._index[e.v] for e in self.edges), dtype=int, count=m)
        self.ea = np.fromiter((e.a for e in self.edges), dtype=float, count=m)
        self.elen = np.fromiter((e.length for e in self.edges), dtype=float, count=m)
        self.emeasure = self.ea * self.elen
        self.loop_mask = self.eu == self.ev
        # incidence lists: for each vertex, (edge index, sign) pairs; sign +1
        # when the vertex is the head v, -1 when the tail u.  A self-loop
        # appears once with sign 0.
        inc: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
        for k, e in enumerate(self.edges):
            iu, iv = self.eu[k], self.ev[k]
            if iu == iv:
                inc[iu].append((k, 0))
            else:
                inc[iu].append((k, -1))
                inc[iv].append((k, +1))
        self.incidence = inc
        self.interior_mask = np.ones(len(self.vertices), dtype=bool)
        for b in self.boundary:
            self.interior_mask[self._index[b]] = False

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def is_closed(self) -> bool:
        return not self.boundary

    def index(self, vid: VertexId) -> int:
        try:
            return self._index[vid]
        except KeyError:
            raise GraphError(f"unknown vertex {vid!r}") from None

    def total_measure(self) -> float:
        return float(self.vmeasure.sum())

    def interior_indices(self) -> np.ndarray:
        return np.nonzero(self.interior_mask)[0]

    def neighbors(self, i: int) -> set[int]:
        """Vertex indices joined to ``i`` by some edge (a loop makes i its own)."""
        out = set()
        for k, sign in self.incidence[i]:
            if sign == 0:
                out.add(i)
            else:
                out.add(int(self.ev[k]) if sign < 0 else int(self.eu[k]))
        return out

    # -- (de)serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [
                {
                    "id": vid,
                    "measure": float(self.vmeasure[i]),
                    "boundary": vid in self.boundary,
                }
                for i, vid in enumerate(self.vertices)
            ],
            "edges": [
                {"u": e.u, "v": e.v, "a": e.a, "length": e.length} for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "WeightedGraph":
        try:
            vspecs = data["vertices"]
            especs = data.get("edges", [])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph document: {exc}") from exc
        vertices, measures, boundary = [], [], []
        for spec in vspecs:
            if isinstance(spec, Mapping):
                vid = spec["id"]
                vertices.append(vid)
                measures.append(float(spec.get("measure", 1.0)))
                if spec.get("boundary", False):
                    boundary.append(vid)
            else:
                vertices.append(spec)
                measures.append(1.0)
        edges = [
            Edge(
                s["u"],
                s["v"],
                float(s.get("a", 1.0)),
                float(s.get("length", 1.0)),
            )
            for s in especs
        ]
        return cls(vertices, measures, edges, boundary)


def build_graph(
    vertices,
    edges,
    measures=None,
    boundary=(),
) -> WeightedGraph:
    """Convenience constructor.

    ``vertices`` may be ids or (id, measure) pairs; ``edges`` may be Edge
    objects, (u, v) pairs, or (u, v, a[, length]) tuples.  Unspecified vertex
    measures default to 1 (the traditional normalization).
    """
    vids, vmeas = [], []
    for spec in vertices:
        if isinstance(spec, tuple) and len(spec) == 2 and not isinstance(spec[0], tuple):
            vids.append(spec[0])
            vmeas.append(float(spec[1]))
        else:
            vids.append(spec)
            vmeas.append(1.0)
    if measures is not None:
        if isinstance(measures, Mapping):
            vmeas = [float(measures.get(v, 1.0)) for v in vids]
        else:
            vmeas = [float(x) for x in measures]
    es = []
    for spec in edges:
        if isinstance(spec, Edge):
            es.append(spec)
        else:
            es.append(Edge(*spec))
    return WeightedGraph(vids, vmeas, es, boundary)


# -- half degrees ----------------------------------------------------------


@dataclass
class HalfDegreeStats:
    rho: np.ndarray
    rho_sup: float
    rho_inf: float
    regularity: float | None  # r such that rho == r/2, or None

    def is_regular(self, r: float, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.rho - r / 2.0) <= tol * (1.0 + abs(r))))


def half_degrees(g: WeightedGraph, tol: float = 1e-12) -> HalfDegreeStats:
    """rho(v) = V(v)^-1 * sum over incident edges of E(e)/2.

    A self-loop counts once (a single incidence contributing E(e)/2), which
    is what makes a reversible chain with holding probabilities exactly
    1-regular.
    """
    acc = np.zeros(g.n)
    np.add.at(acc, g.eu, g.emeasure / 2.0)
    mask = ~g.loop_mask
    np.add.at(acc, g.ev[mask], g.emeasure[mask] / 2.0)
    rho = acc / g.vmeasure
    sup = float(rho.max()) if g.n else 0.0
    inf = float(rho.min()) if g.n else 0.0
    reg = None
    if g.n and sup - inf <= tol * (1.0 + sup):
        reg = 2.0 * float(rho.mean())
    return HalfDegreeStats(rho, sup, inf, reg)


def natural_measure(g: WeightedGraph) -> WeightedGraph:
    """Replace V by the measure induced by E; the result is 1-regular."""
    stats = half_degrees(g)
    nat = stats.rho * g.vmeasure
    if not np.all(nat > 0):
        raise GraphError("isolated vertex: natural measure would vanish")
    return WeightedGraph(g.vertices, nat, g.edges, g.boundary)


# -- reversible Markov chains ----------------------------------------------


def from_markov_chain(pi, K, labels=None, tol: float = 1e-9) -> WeightedGraph:
    """Graph of a reversible chain: V = pi, unit lengths, E(e) = pi(u)K(u,v).

    ``pi`` and ``K`` are arrays (or mappings keyed by label).  Reversibility
    |pi(u)K(u,v) - pi(v)K(v,u)| <= tol * max scale is required; rows of K must
    sum to 1 within tol.  The result is 1-regular (rho == 1/2).
    """
    if isinstance(pi, Mapping):
        labels = list(pi.keys()) if labels is None else list(labels)
        pvec = np.array([float(pi[l]) for l in labels])
        Kmat = np.array([[float(K.get((a, b), 0.0)) for b in labels] for a in labels])
    else:
        pvec = np.asarray(pi, dtype=float)
        Kmat = np.asarray(K, dtype=float)
        if labels is None:
            labels = list(range(len(pvec)))
    n = len(pvec)
    if Kmat.shape != (n, n):
        raise GraphError("kernel shape mismatch")
    if np.any(pvec <= 0):
        raise GraphError("stationary measure must be positive")
    if np.any(Kmat < 0):
        raise GraphError("kernel must be nonnegative")
    rows = Kmat.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > tol):
        raise GraphError("kernel rows must sum to 1")
    flux = pvec[:, None] * Kmat
    scale = max(flux.max(), 1.0)
    if np.max(np.abs(flux - flux.T)) > tol * scale:
        raise GraphError("chain is not reversible (detailed balance fails)")
    edges = []
    for i in range(n):
        if Kmat[i, i] > 0:
            edges.append(Edge(labels[i], labels[i], a=float(flux[i, i]), length=1.0))
        for j in range(i + 1, n):
            w = (flux[i, j] + flux[j, i]) / 2.0
            if w > 0:
                edges.append(Edge(labels[i], labels[j], a=float(w), length=1.0))
    return WeightedGraph(labels, pvec, edges)


# -- doubling ----------------------------------------------------------------


@dataclass
class DoubledGraph:
    graph: WeightedGraph
    involution: dict  # vertex id of the double -> its mirror image


def double(g: WeightedGraph) -> DoubledGraph:
    """Two copies of g glued along the boundary.

    Interior vertex ``x`` becomes ``x`` and ``x'`` (ids are stringified to
    attach the prime); a boundary vertex keeps one copy with doubled measure
    and stops being boundary.  Every edge is copied into both sheets, so an
    edge between two boundary vertices becomes a doubled (parallel) edge.
    The closed result carries the sheet-swapping involution.
    """
    plus = {vid: str(vid) for vid in g.vertices}
    minus = {
        vid: str(vid) if vid in g.boundary else str(vid) + "'" for vid in g.vertices
    }
    taken = set(plus.values())
    for vid in g.vertices:
        if vid not in g.boundary and minus[vid] in taken:
            base = minus[vid]
            while base in taken:
                base += "'"
            minus[vid] = base
        taken.add(minus[vid])
    vertices, measures = [], []
    for i, vid in enumerate(g.vertices):
        vertices.append(plus[vid])
        measures.append(g.vmeasure[i] * (2.0 if vid in g.boundary else 1.0))
    for i, vid in enumerate(g.vertices):
        if vid not in g.boundary:
            vertices.append(minus[vid])
            measures.append(float(g.vmeasure[i]))
    edges = [Edge(plus[e.u], plus[e.v], e.a, e.length) for e in g.edges]
    edges += [Edge(minus[e.u], minus[e.v], e.a, e.length) for e in g.edges]
    involution = {plus[vid]: minus[vid] for vid in g.vertices}
    involution.update({minus[vid]: plus[vid] for vid in g.vertices})
    return DoubledGraph(WeightedGraph(vertices, measures, edges), involution)


# -- the Laplacian scale function L ------------------------------------------


@dataclass
class LStats:
    values: np.ndarray  # L(v) = V(v)^-1 sum_{e at v, not a loop} a_e / l_e
    sup: float


def L_stats(g: WeightedGraph) -> LStats:
    acc = np.zeros(g.n)
    mask = ~g.loop_mask
    w = g.ea[mask] / g.elen[mask]
    np.add.at(acc, g.eu[mask], w)
    np.add.at(acc, g.ev[mask], w)
    vals = acc / g.vmeasure
    return LStats(vals, float(vals.max(initial=0.0)))


# -- small structural helpers -------------------------------------------------


def subdivide_edge(
    g: WeightedGraph,
    edge_index: int,
    frac: float,
    new_id: VertexId,
    measure: float = 1e-300,
) -> WeightedGraph:
    """Split edge k at parameter ``frac`` of its length (measured from u).

    The conductance is inherited by both halves so the edge measure splits
    proportionally; the new vertex gets a (tiny, by default) mass.
    """
    e = g.edges[edge_index]
    if e.is_loop:
        raise GraphError("cannot subdivide a self-loop")
    if not 0.0 < frac < 1.0:
        raise GraphError("subdivision point must be interior to the edge")
    if new_id in g._index:
        raise GraphError(f"vertex id {new_id!r} already used")
    edges = list(g.edges)
    edges[edge_index] = Edge(e.u, new_id, e.a, e.length * frac)
    edges.append(Edge(new_id, e.v, e.a, e.length * (1.0 - frac)))
    return WeightedGraph(
        list(g.vertices) + [new_id],
        np.concatenate([g.vmeasure, [measure]]),
        edges,
        g.boundary,
    )


def with_boundary(g: WeightedGraph, boundary: Iterable[VertexId]) -> WeightedGraph:
    return WeightedGraph(g.vertices, g.vmeasure, g.edges, boundary)


def is_connected(g: WeightedGraph) -> bool:
    if g.n == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in g.neighbors(i):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == g.n
