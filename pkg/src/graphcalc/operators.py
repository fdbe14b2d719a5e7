"""Divergence, Laplacian, and spectral decompositions.

The Laplacian acts on vertex values by

    (Lap f)(v) = V(v)^-1 sum_{e ~ {u,v}} a_e (f(v) - f(u)) / l_e

(self-loops drop out), which is V-symmetric and nonnegative.  Eigensolves go
through the similarity-symmetrized matrix S = V^{1/2} M V^{-1/2}, dense, with
a deterministic sign convention so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GraphError, WeightedGraph
from .functions import VertexFunction

__all__ = [
    "EdgeField",
    "SpectralDecomposition",
    "laplacian_matrix",
    "laplacian_apply",
    "divergence",
    "normal_flux",
    "spectral_decomposition",
    "operator_norm_report",
    "OperatorNormReport",
]

MAX_DENSE = 2000


@dataclass
class EdgeField:
    """Edgewise-constant vector field: signed magnitude per stored edge.

    X_e > 0 points along the stored orientation u -> v; at the head v the
    outward normal satisfies n_{e,v} . X = +X_e, at the tail -X_e.  Self-loop
    entries are ignored by the divergence.
    """

    graph: WeightedGraph
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.graph.edges),):
            raise GraphError("field length does not match edge count")


def gradient_field(f: VertexFunction) -> EdgeField:
    """grad f as an EdgeField: (f(v) - f(u))/l_e along u -> v."""
    g = f.graph
    d = (f.values[g.ev] - f.values[g.eu]) / g.elen
    d[g.loop_mask] = 0.0
    return EdgeField(g, d)


def normal_flux(X: EdgeField) -> VertexFunction:
    """(n~ . X)(v) = V(v)^-1 sum_e a_e n_{e,v} . X|_e(v)  (net inflow)."""
    g = X.graph
    acc = np.zeros(g.n)
    mask = ~g.loop_mask
    w = g.ea[mask] * X.values[mask]
    np.add.at(acc, g.ev[mask], w)
    np.add.at(acc, g.eu[mask], -w)
    return VertexFunction(g, acc / g.vmeasure)


def divergence(g: WeightedGraph, X: EdgeField) -> VertexFunction:
    """div X = -(n~ . X): positive where the field leaves the vertex."""
    nf = normal_flux(X)
    return VertexFunction(g, -nf.values)


def laplacian_matrix(g: WeightedGraph, mode: str = "closed") -> tuple[np.ndarray, np.ndarray]:
    """(M, idx): the Laplacian matrix over the selected vertices.

    mode "closed" keeps every vertex; "dirichlet" restricts rows and columns
    to the interior (the boundary condition).  idx maps matrix rows back to
    vertex indices.
    """
    if mode == "closed":
        idx = np.arange(g.n)
    elif mode == "dirichlet":
        idx = g.interior_indices()
        if len(idx) == 0:
            raise GraphError("dirichlet mode needs a nonempty interior")
    else:
        raise GraphError(f"unknown mode {mode!r}")
    pos = -np.ones(g.n, dtype=int)
    pos[idx] = np.arange(len(idx))
    W = np.zeros((len(idx), len(idx)))
    for k in range(len(g.edges)):
        if g.loop_mask[k]:
            continue
        i, j = pos[g.eu[k]], pos[g.ev[k]]
        w = g.ea[k] / g.elen[k]
        if i >= 0:
            W[i, i] += w
        if j >= 0:
            W[j, j] += w
        if i >= 0 and j >= 0:
            W[i, j] -= w
            W[j, i] -= w
    M = W / g.vmeasure[idx][:, None]
    return M, idx


def laplacian_apply(g: WeightedGraph, f: VertexFunction) -> VertexFunction:
    acc = np.zeros(g.n)
    mask = ~g.loop_mask
    w = g.ea[mask] / g.elen[mask]
    d = f.values[g.eu[mask]] - f.values[g.ev[mask]]
    np.add.at(acc, g.eu[mask], w * d)
    np.add.at(acc, g.ev[mask], -w * d)
    return VertexFunction(g, acc / g.vmeasure)


@dataclass
class SpectralDecomposition:
    graph: WeightedGraph
    mode: str  # "closed" | "dirichlet"
    eigenvalues: np.ndarray  # ascending
    # eigenfunctions as columns of an n-by-k array over ALL vertices
    # (zero on the boundary in dirichlet mode), V-orthonormal
    eigenfunctions: np.ndarray

    def eigenfunction(self, i: int) -> VertexFunction:
        return VertexFunction(self.graph, self.eigenfunctions[:, i])

    @property
    def k(self) -> int:
        return len(self.eigenvalues)


def spectral_decomposition(
    g: WeightedGraph, mode: str = "closed", k: int | None = None
) -> SpectralDecomposition:
    if g.n > MAX_DENSE:
        raise GraphError(f"dense eigensolve capped at {MAX_DENSE} vertices")
    cache = g.__dict__.setdefault("_spectral_cache", {})
    if mode in cache:
        dec = cache[mode]
        if k is None:
            return dec
        return SpectralDecomposition(
            g, mode, dec.eigenvalues[:k], dec.eigenfunctions[:, :k]
        )
    M, idx = laplacian_matrix(g, mode)
    v = g.vmeasure[idx]
    s = np.sqrt(v)
    S = M * (s[:, None] / s[None, :])
    S = (S + S.T) / 2.0
    evals, Y = np.linalg.eigh(S)
    # map back: phi = V^{-1/2} y is V-orthonormal when y is orthonormal
    phi = Y / s[:, None]
    # deterministic sign: first coordinate exceeding a relative threshold positive
    for j in range(phi.shape[1]):
        col = phi[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))[0]
        if len(nz) and col[nz[0]] < 0:
            phi[:, j] = -col
            Y[:, j] = -Y[:, j]
    full = np.zeros((g.n, phi.shape[1]))
    full[idx, :] = phi
    evals = np.maximum(evals, 0.0) if mode == "closed" else evals
    dec = SpectralDecomposition(g, mode, evals, full)
    cache[mode] = dec
    if k is not None:
        return SpectralDecomposition(g, mode, evals[:k], full[:, :k])
    return dec


@dataclass
class OperatorNormReport:
    L_sup: float
    rayleigh_max: float  # largest eigenvalue = ||Lap|| on a finite graph

    @property
    def sandwich_holds(self) -> bool:
        lo, hi = self.L_sup, 2.0 * self.L_sup
        eps = 1e-9 * (1.0 + hi)
        return lo - eps <= self.rayleigh_max <= hi + eps


def operator_norm_report(g: WeightedGraph) -> OperatorNormReport:
    """L_sup together with the top Dirichlet eigenvalue; L_sup <= ||Lap|| <= 2 L_sup."""
    from .graph import L_stats

    stats = L_stats(g)
    mode = "dirichlet" if g.boundary else "closed"
    dec = spectral_decomposition(g, mode)
    return OperatorNormReport(stats.sup, float(dec.eigenvalues[-1]))
