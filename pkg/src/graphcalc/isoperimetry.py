"""Exact isoperimetric constants by enumeration.

The admissible sets can be restricted to connected, vertex-determined subsets
disjoint from the boundary without changing any of the constants (Yau's
observation: the quotient of a disjoint union is at least the smaller of the
quotients, and partial edge segments only add area).  Connected subsets are
enumerated canonically (each exactly once) over bitmasks; a vectorized
interval sweep handles long path graphs where the generic enumerator would
be too slow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, WeightedGraph
from .functions import VertexFunction, grad_lp_norm, lp_norm_vertex

__all__ = [
    "AdmissibleSet",
    "IsoReport",
    "iso_constant",
    "magnification",
    "sobolev_quotient",
    "characteristic_approx",
    "enumerate_connected_subsets",
    "neighborhood",
]

DEFAULT_CAP = 22
MAGNIFICATION_CAP = 20


@dataclass(frozen=True)
class AdmissibleSet:
    vertices: frozenset
    area: float  # A(boundary) = sum of a_e over edges leaving the set
    vmass: float


@dataclass
class IsoReport:
    nu: float
    variant: str  # "open" | "tilde" | "tilde_prime"
    value: float
    witness: AdmissibleSet | None


def _neighbor_masks(g: WeightedGraph) -> list[int]:
    masks = [0] * g.n
    for k in range(len(g.edges)):
        i, j = int(g.eu[k]), int(g.ev[k])
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return masks


def enumerate_connected_subsets(g: WeightedGraph, allowed_mask: int):
    """Yield every nonempty connected subset of ``allowed_mask`` once, as a bitmask.

    Canonical scheme: a subset is generated from its minimum vertex; the
    search only ever extends by neighbors above that minimum, and a vertex
    declined at some branch is forbidden in all its siblings.
    """
    nbr = _neighbor_masks(g)

    def rec(S: int, cand: int, forb: int):
        yield S
        c = cand & ~forb
        while c:
            v = c & (-c)
            c ^= v
            vi = v.bit_length() - 1
            newcand = (cand | (nbr[vi] & gt)) & ~(S | v | forb)
            yield from rec(S | v, newcand, forb)
            forb |= v

    rest = allowed_mask
    while rest:
        s = rest & (-rest)
        rest ^= s
        si = s.bit_length() - 1
        gt = allowed_mask & ~((1 << (si + 1)) - 1)
        yield from rec(s, nbr[si] & gt, 0)


def _mask_area(g: WeightedGraph, mask: int) -> float:
    area = 0.0
    for k in range(len(g.edges)):
        if g.loop_mask[k]:
            continue
        inu = (mask >> int(g.eu[k])) & 1
        inv = (mask >> int(g.ev[k])) & 1
        if inu != inv:
            area += g.ea[k]
    return area


def _mask_set(g: WeightedGraph, mask: int) -> frozenset:
    return frozenset(g.vertices[i] for i in range(g.n) if (mask >> i) & 1)


def _open_value(area: float, mass: float, nu: float) -> float:
    if nu == math.inf:
        return area / mass
    if nu == 1:
        return area
    return area / mass ** (1.0 - 1.0 / nu)


def _tilde_value(area, mass, comass, nu, variant) -> float:
    small = min(mass, comass)
    if nu == math.inf:
        return area / small
    if variant == "tilde":
        return area * small ** (1.0 / nu - 1.0)
    return area * (mass ** (1.0 - nu) + comass ** (1.0 - nu)) ** (1.0 / nu)


def _is_simple_path(g: WeightedGraph) -> list[int] | None:
    """Vertex order along the path if g is a simple path graph, else None."""
    if g.n < 2 or len(g.edges) != g.n - 1 or bool(g.loop_mask.any()):
        return None
    deg = np.zeros(g.n, dtype=int)
    np.add.at(deg, g.eu, 1)
    np.add.at(deg, g.ev, 1)
    if deg.max() > 2 or np.sum(deg == 1) != 2:
        return None
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for k in range(len(g.edges)):
        adj[int(g.eu[k])].append(int(g.ev[k]))
        adj[int(g.ev[k])].append(int(g.eu[k]))
    start = int(np.nonzero(deg == 1)[0].min())
    order, prev, cur = [start], -1, start
    while len(order) < g.n:
        nxt = [x for x in adj[cur] if x != prev]
        if not nxt:
            return None
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def _iso_open_path(g: WeightedGraph, nu: float) -> IsoReport:
    """O(n^2) vectorized interval sweep for open-variant constants on paths."""
    order = _is_simple_path(g)
    assert order is not None
    pos_interior = [p for p, vi in enumerate(order) if g.interior_mask[vi]]
    lo, hi = pos_interior[0], pos_interior[-1]
    if hi - lo + 1 != len(pos_interior):
        raise GraphError("interior not contiguous on the path")
    # edge weight between consecutive positions
    w = np.empty(g.n - 1)
    edge_at = {}
    for k in range(len(g.edges)):
        edge_at[frozenset((int(g.eu[k]), int(g.ev[k])))] = g.ea[k]
    for p in range(g.n - 1):
        w[p] = edge_at[frozenset((order[p], order[p + 1]))]
    meas = g.vmeasure[np.array(order)]
    cmass = np.concatenate([[0.0], np.cumsum(meas)])
    i = np.arange(lo, hi + 1)
    I, J = np.meshgrid(i, i, indexing="ij")
    valid = J >= I
    left = np.where(I > 0, w[np.maximum(I - 1, 0)], 0.0)
    right = np.where(J < g.n - 1, w[np.minimum(J, g.n - 2)], 0.0)
    area = left + right
    mass = cmass[J + 1] - cmass[I]
    with np.errstate(divide="ignore", invalid="ignore"):
        if nu == math.inf:
            vals = area / mass
        elif nu == 1:
            vals = area.astype(float)
        else:
            vals = area / mass ** (1.0 - 1.0 / nu)
    vals = np.where(valid, vals, np.inf)
    kmin = np.unravel_index(np.argmin(vals), vals.shape)
    besti, bestj = int(I[kmin]), int(J[kmin])
    ids = frozenset(g.vertices[order[p]] for p in range(besti, bestj + 1))
    witness = AdmissibleSet(ids, float(area[kmin]), float(mass[kmin]))
    return IsoReport(nu, "open", float(vals[kmin]), witness)


def iso_constant(
    g: WeightedGraph,
    nu: float,
    variant: str = "open",
    max_subset: int = DEFAULT_CAP,
    force: bool = False,
) -> IsoReport:
    if variant not in ("open", "tilde", "tilde_prime"):
        raise GraphError(f"unknown variant {variant!r}")
    if nu != math.inf and nu < 1:
        raise GraphError("nu must be in [1, inf]")
    # constants are pure in (graph, nu, variant); memoize on the graph, which
    # is immutable once constructed
    cache = g.__dict__.setdefault("_iso_cache", {})
    if (nu, variant) in cache:
        return cache[(nu, variant)]
    if variant == "open":
        pool = [i for i in range(g.n) if g.interior_mask[i]]
        if not pool:
            raise GraphError("no interior vertices")
        if _is_simple_path(g) is not None and g.n > 64:
            rep = _iso_open_path(g, nu)
            cache[(nu, variant)] = rep
            return rep
    else:
        if not g.is_closed:
            raise GraphError("tilde variants require a closed graph")
        pool = list(range(g.n))
    if len(pool) > max_subset and not force:
        raise GraphError(
            f"{len(pool)} free vertices exceeds the enumeration cap "
            f"{max_subset}; pass force=True to proceed"
        )
    allowed = 0
    for i in pool:
        allowed |= 1 << i
    total = g.total_measure()
    best_val, best_wit, best_key = math.inf, None, None
    for mask in enumerate_connected_subsets(g, allowed):
        mass = float(sum(g.vmeasure[i] for i in range(g.n) if (mask >> i) & 1))
        if variant != "open":
            comass = total - mass
            if comass <= 0:
                continue
        area = _mask_area(g, mask)
        if variant == "open":
            val = _open_value(area, mass, nu)
        else:
            val = _tilde_value(area, mass, total - mass, nu, variant)
        if best_wit is None or val < best_val - 1e-15 * (1 + abs(best_val)):
            key = tuple(sorted(map(str, _mask_set(g, mask))))
            best_val, best_key = val, key
            best_wit = AdmissibleSet(_mask_set(g, mask), area, mass)
        elif best_key is not None and val <= best_val + 1e-15 * (1 + abs(best_val)):
            key = tuple(sorted(map(str, _mask_set(g, mask))))
            if key < best_key:
                best_key = key
                best_wit = AdmissibleSet(_mask_set(g, mask), area, mass)
    rep = IsoReport(nu, variant, best_val, best_wit)
    cache[(nu, variant)] = rep
    return rep


# -- magnification -------------------------------------------------------------


def neighborhood(g: WeightedGraph, vertex_ids) -> frozenset:
    """Gamma(A): vertices (possibly inside A) having an edge to A."""
    nbr = _neighbor_masks(g)
    mask = 0
    for vid in vertex_ids:
        mask |= nbr[g.index(vid)]
    return _mask_set(g, mask)


def magnification(
    g: WeightedGraph, max_subset: int = MAGNIFICATION_CAP, force: bool = False
):
    """c = min over admissible A of V(Gamma(A))/V(A) - 1, with witness.

    A ranges over ALL nonempty subsets of the interior (connectedness cannot
    be assumed here: neighborhoods of separate components may overlap); on a
    closed graph only V(A) <= V(G)/2 competes.
    """
    cached = g.__dict__.get("_magnification_cache")
    if cached is not None:
        return cached
    pool = [i for i in range(g.n) if g.interior_mask[i]]
    if not pool:
        raise GraphError("no interior vertices")
    if len(pool) > max_subset and not force:
        raise GraphError(
            f"{len(pool)} free vertices exceeds the enumeration cap "
            f"{max_subset}; pass force=True to proceed"
        )
    nbr = _neighbor_masks(g)
    total = g.total_measure()
    half = total / 2.0
    closed = g.is_closed
    npool = len(pool)
    best = (math.inf, None)
    # incremental masks/masses over the subset lattice of the pool
    gamma = np.zeros(1 << npool, dtype=object)
    mass = np.zeros(1 << npool)
    gamma[0] = 0
    for sub in range(1, 1 << npool):
        low = sub & (-sub)
        i = pool[low.bit_length() - 1]
        gamma[sub] = gamma[sub ^ low] | nbr[i]
        mass[sub] = mass[sub ^ low] + g.vmeasure[i]
        if closed and mass[sub] > half + 1e-12 * total:
            continue
        gm = gamma[sub]
        gmass = sum(g.vmeasure[j] for j in range(g.n) if (gm >> j) & 1)
        ratio = gmass / mass[sub] - 1.0
        if ratio < best[0] - 1e-15:
            best = (ratio, sub)
    c, sub = best
    witness = frozenset(
        g.vertices[pool[b]] for b in range(npool) if (sub >> b) & 1
    )
    g.__dict__["_magnification_cache"] = (c, witness)
    return c, witness


# -- quotients and characteristic approximants --------------------------------


def sobolev_quotient(f: VertexFunction, nu: float) -> float:
    """s_nu(f) = ||grad f||_1 / ||f||_{nu'} (gradient against E, f against V)."""
    nup = 1.0 if nu == math.inf else (math.inf if nu == 1 else nu / (nu - 1.0))
    denom = lp_norm_vertex(f, nup)
    if denom == 0.0:
        raise GraphError("quotient undefined for f identically zero")
    return grad_lp_norm(f, 1) / denom


def characteristic_approx(
    g: WeightedGraph, S, eps: float
) -> tuple[WeightedGraph, VertexFunction]:
    """Smoothed characteristic function of a vertex set S.

    Every edge leaving S is subdivided at distance eps from its S-side
    endpoint; the function is 1 on S, 0 from the new vertex outward.  Its
    gradient 1-norm is exactly A(boundary S) for every eps, and the vertex
    norms converge to those of the (discontinuous) characteristic function as
    the subdivision masses are negligible (1e-300).
    """
    from .graph import subdivide_edge

    sids = set(S)
    if not sids or not sids.issubset(set(g.vertices)):
        raise GraphError("S must be a nonempty subset of the vertices")
    if any(v in g.boundary for v in sids):
        raise GraphError("S must avoid the boundary")
    if eps <= 0 or eps >= min((e.length for e in g.edges), default=1.0):
        raise GraphError("eps must lie in (0, min edge length)")
    cur = g
    count = 0
    for k, e in enumerate(list(g.edges)):
        inu, inv = e.u in sids, e.v in sids
        if inu == inv:
            continue
        frac = eps / e.length if inu else 1.0 - eps / e.length
        cur = subdivide_edge(cur, k, frac, f"__cut{count}", measure=1e-300)
        count += 1
    values = np.array([1.0 if v in sids else 0.0 for v in cur.vertices])
    return cur, VertexFunction(cur, values)
