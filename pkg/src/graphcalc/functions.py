"""Edgewise-linear functions and their exact norms.

A function is stored by its vertex values; the edgewise-linear extension to
the geometric realization is implicit.  That class is exactly the minimizing
class for gradient norms (subdividing an edge and moving the new value off
the chord never helps), so every L^p quantity below has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .graph import GraphError, WeightedGraph

__all__ = [
    "VertexFunction",
    "LevelSetSweep",
    "lp_norm_vertex",
    "lp_norm_edge",
    "grad_lp_norm",
    "edge_integral",
    "vertex_integral",
    "midpoint_l2_sq",
    "balance_point",
    "balance_interval",
    "split_interval",
    "is_split",
    "split_shift",
    "coarea",
]


@dataclass
class VertexFunction:
    graph: WeightedGraph
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.graph.n,):
            raise GraphError("function length does not match vertex count")

    @classmethod
    def from_map(cls, g: WeightedGraph, m: Mapping) -> "VertexFunction":
        return cls(g, np.array([float(m.get(v, 0.0)) for v in g.vertices]))

    @classmethod
    def from_values(cls, g: WeightedGraph, values: Sequence[float]) -> "VertexFunction":
        return cls(g, np.asarray(values, dtype=float))

    def __call__(self, vid) -> float:
        return float(self.values[self.graph.index(vid)])

    @property
    def is_dirichlet(self) -> bool:
        g = self.graph
        return all(self.values[g.index(b)] == 0.0 for b in g.boundary)

    def shifted(self, a: float) -> "VertexFunction":
        return VertexFunction(self.graph, self.values - a)


def _check_p(p) -> float:
    if p != math.inf and p < 1:
        raise GraphError("p must be >= 1 or infinity")
    return p


def lp_norm_vertex(f: VertexFunction, p) -> float:
    """(sum_v |f(v)|^p V(v))^(1/p); max |f| for p = infinity."""
    _check_p(p)
    if p == math.inf:
        return float(np.max(np.abs(f.values), initial=0.0))
    v = f.graph.vmeasure
    return float(np.sum(np.abs(f.values) ** p * v) ** (1.0 / p))


def vertex_integral(f: VertexFunction) -> float:
    return float(np.dot(f.values, f.graph.vmeasure))


def _spow(x: np.ndarray, r: float) -> np.ndarray:
    """{x}^r = |x|^(r-1) x, the sign-preserving power."""
    return np.sign(x) * np.abs(x) ** r


def _edge_abs_power_integrals(f: VertexFunction, p: float) -> np.ndarray:
    """Exact per-edge integral of |f|^p against E.

    On an edge from value b to value c, f(s) = b + (c-b)s for s in [0,1] and
    d/ds {f}^{p+1} = (p+1)(c-b)|f|^p, valid across a sign change (the
    antiderivative is C^1 for p >= 1), so a single endpoint evaluation works
    whatever the signs.
    """
    g = f.graph
    b = f.values[g.eu]
    c = f.values[g.ev]
    m = c - b
    out = np.empty(len(g.edges))
    flat = np.abs(m) <= 1e-15 * (np.abs(b) + np.abs(c))
    flat |= m == 0.0
    out[flat] = np.abs(b[flat]) ** p
    nz = ~flat
    out[nz] = (_spow(c[nz], p + 1.0) - _spow(b[nz], p + 1.0)) / ((p + 1.0) * m[nz])
    return out * g.emeasure


def lp_norm_edge(f: VertexFunction, p) -> float:
    """Exact L^p norm of the edgewise-linear extension against E."""
    _check_p(p)
    g = f.graph
    if not g.edges:
        return 0.0
    if p == math.inf:
        return float(
            max(np.max(np.abs(f.values[g.eu])), np.max(np.abs(f.values[g.ev])))
        )
    return float(np.sum(_edge_abs_power_integrals(f, p)) ** (1.0 / p))


def edge_integral(f: VertexFunction) -> float:
    """int f dE; trapezoid is exact for linear data (a loop is constant)."""
    g = f.graph
    if not g.edges:
        return 0.0
    avg = (f.values[g.eu] + f.values[g.ev]) / 2.0
    # on a loop both endpoint values coincide, so avg is already f(v)
    return float(np.sum(avg * g.emeasure))


def midpoint_l2_sq(f: VertexFunction) -> float:
    """sum_e E(e) * ((f(u)+f(v))/2)^2, the edge-midpoint-averaged square norm."""
    g = f.graph
    if not g.edges:
        return 0.0
    avg = (f.values[g.eu] + f.values[g.ev]) / 2.0
    return float(np.sum(avg * avg * g.emeasure))


def grad_lp_norm(f: VertexFunction, p) -> float:
    """|grad f| is |f(u)-f(v)|/l_e on edge e; self-loops contribute nothing."""
    _check_p(p)
    g = f.graph
    if not g.edges:
        return 0.0
    d = np.abs(f.values[g.eu] - f.values[g.ev])
    d[g.loop_mask] = 0.0
    slope = d / g.elen
    if p == math.inf:
        return float(np.max(slope, initial=0.0))
    return float(np.sum(g.emeasure * slope**p) ** (1.0 / p))


# -- balancing ----------------------------------------------------------------


def balance_point(f: VertexFunction, p) -> float:
    """The unique a minimizing ||f - a||_p for p > 1 (midpoint rule at p=inf).

    Characterized by sum {f - a}^(p-1) V = 0; the left side is strictly
    decreasing in a, so we bisect on [min f, max f].
    """
    if p == math.inf:
        return float((f.values.max() + f.values.min()) / 2.0)
    if p <= 1:
        raise GraphError("balance_point needs p > 1 (use balance_interval at p=1)")
    if f.graph.total_measure() <= 0:
        raise GraphError("zero total measure")
    vals, meas = f.values, f.graph.vmeasure
    lo, hi = float(vals.min()), float(vals.max())
    if lo == hi:
        return lo
    tol = 1e-12 * (1.0 + (hi - lo))

    def h(t):
        return float(np.sum(_spow(vals - t, p - 1.0) * meas))

    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def _median_interval(f: VertexFunction) -> tuple[float, float]:
    """[t_lo, t_hi] where both strict sign sets of f - t have mass <= half.

    Both endpoints are attained at vertex values: if the condition holds
    anywhere strictly between two consecutive distinct values it also holds
    at both of them (the strict level sets only shrink there).
    """
    vals, meas = f.values, f.graph.vmeasure
    vs, inv = np.unique(vals, return_inverse=True)
    ms = np.zeros(len(vs))
    np.add.at(ms, inv, meas)
    cum = np.cumsum(ms)
    total = cum[-1]
    below = cum - ms  # V{f < vs[k]}
    above = total - cum  # V{f > vs[k]}
    ok = (below <= total / 2.0) & (above <= total / 2.0)
    idx = np.nonzero(ok)[0]
    return float(vs[idx[0]]), float(vs[idx[-1]])


def balance_interval(f: VertexFunction) -> tuple[float, float]:
    """Endpoints of the interval of minimizers of ||f - t||_1 (weighted median)."""
    return _median_interval(f)


def split_interval(f: VertexFunction) -> tuple[float, float]:
    """J = {t : f - t is split}, i.e. V{f > t} <= V/2 and V{f < t} <= V/2.

    V is supported on vertices, so only strict vertex signs matter; for
    atomic measures J coincides with the L^1-balancing interval, consistent
    with I being contained in J.
    """
    return _median_interval(f)


def is_split(f: VertexFunction) -> bool:
    lo, hi = split_interval(f)
    return lo <= 0.0 <= hi


def split_shift(f: VertexFunction) -> VertexFunction:
    """f minus the midpoint of its split interval — always split."""
    lo, hi = split_interval(f)
    return f.shifted((lo + hi) / 2.0)


# -- co-area ------------------------------------------------------------------


@dataclass
class LevelSetSweep:
    """Boundary area of the super-level sets as a step function of the level.

    ``breakpoints`` is a sorted list of (t, area) pairs; ``area`` is
    A(boundary of {f > t}) on the open interval from this t to the next
    (zero after the last breakpoint and before the first).
    """

    breakpoints: list

    def area_at(self, t: float) -> float:
        area = 0.0
        for tk, ak in self.breakpoints:
            if tk < t:
                area = ak
            else:
                break
        return area

    def integral(self) -> float:
        total = 0.0
        for (t0, a0), (t1, _) in zip(self.breakpoints, self.breakpoints[1:]):
            total += a0 * (t1 - t0)
        return total


def coarea(f: VertexFunction) -> LevelSetSweep:
    """Sweep of A(boundary Omega_f(t)) over levels t.

    An edge is crossed by level t exactly when t lies strictly between its
    endpoint values, so the area is a step function with jumps +-a_e at the
    sorted vertex values, and its integral is sum a_e |f(u)-f(v)| =
    ||grad f||_1 exactly.
    """
    g = f.graph
    events: dict[float, float] = {}
    for k in range(len(g.edges)):
        if g.loop_mask[k]:
            continue
        b, c = f.values[g.eu[k]], f.values[g.ev[k]]
        if b == c:
            continue
        lo, hi = (b, c) if b < c else (c, b)
        events[lo] = events.get(lo, 0.0) + g.ea[k]
        events[hi] = events.get(hi, 0.0) - g.ea[k]
    breakpoints = []
    area = 0.0
    for t in sorted(events):
        area += events[t]
        breakpoints.append((t, area))
    if breakpoints:
        # close the final interval exactly (accumulated float error -> 0)
        t_last, _ = breakpoints[-1]
        breakpoints[-1] = (t_last, 0.0)
    return LevelSetSweep(breakpoints)
