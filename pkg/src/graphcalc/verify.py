"""Randomized verification suites behind `graphcalc verify`.

Each suite draws seeded random functions (and fields) on a given graph and
checks one family of identities or inequalities, returning a summary dict
with a failure count; determinism is total given the seed.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import WeightedGraph, half_degrees, GraphError
from .functions import (
    VertexFunction,
    coarea,
    edge_integral,
    grad_lp_norm,
    lp_norm_edge,
    lp_norm_vertex,
    split_shift,
    vertex_integral,
)
from .operators import EdgeField, divergence, laplacian_apply, normal_flux
from .isoperimetry import iso_constant, sobolev_quotient
from . import sobolev as sb

__all__ = ["run_suite", "SUITES"]


def _random_function(g: WeightedGraph, rng, dirichlet=False) -> VertexFunction:
    vals = rng.standard_normal(g.n)
    if dirichlet:
        vals = vals * g.interior_mask
    return VertexFunction(g, vals)


def _suite_coarea(g, trials, rng):
    worst = 0.0
    for _ in range(trials):
        f = _random_function(g, rng)
        sweep = coarea(f)
        worst = max(worst, abs(sweep.integral() - grad_lp_norm(f, 1)))
    return {"max_residual": worst, "failures": int(worst > 1e-12)}


def _suite_green(g, trials, rng):
    worst = 0.0
    for _ in range(trials):
        f = _random_function(g, rng, dirichlet=True)
        X = EdgeField(g, rng.standard_normal(len(g.edges)))
        div = divergence(g, X)
        pair = float(np.sum(div.values * f.values * g.vmeasure))
        mask = ~g.loop_mask
        edge_sum = float(
            np.sum(g.ea[mask] * X.values[mask] * (f.values[g.ev[mask]] - f.values[g.eu[mask]]))
        )
        worst = max(worst, abs(pair + edge_sum))
        # V-symmetry of the Laplacian on the same draw
        h = _random_function(g, rng, dirichlet=True)
        lf, lh = laplacian_apply(g, f), laplacian_apply(g, h)
        s1 = float(np.sum(lf.values * h.values * g.vmeasure))
        s2 = float(np.sum(f.values * lh.values * g.vmeasure))
        scale = 1.0 + abs(s1)
        worst = max(worst, abs(s1 - s2) / scale)
    return {"max_residual": worst, "failures": int(worst > 1e-11)}


def _suite_ff(g, trials, rng):
    """Federer-Fleming: s_nu(f) >= I_nu (open) / I~-variants (closed)."""
    failures = 0
    nus = [1.5, 2.0, 3.0, math.inf]
    if g.boundary:
        consts = {nu: iso_constant(g, nu, "open", force=True).value for nu in nus}
        for _ in range(trials):
            f = _random_function(g, rng, dirichlet=True)
            if np.all(f.values == 0):
                continue
            for nu in nus:
                if sobolev_quotient(f, nu) < consts[nu] - 1e-9:
                    failures += 1
    else:
        tilde = {nu: iso_constant(g, nu, "tilde", force=True).value for nu in nus}
        prime = {nu: iso_constant(g, nu, "tilde_prime", force=True).value for nu in nus}
        from .functions import balance_interval, balance_point

        for _ in range(trials):
            f = _random_function(g, rng)
            fs = split_shift(f)
            for nu in nus:
                nup = 1.0 if nu == math.inf else nu / (nu - 1.0)
                if grad_lp_norm(fs, 1) < tilde[nu] * lp_norm_vertex(fs, nup) - 1e-9:
                    failures += 1
                # the min-shift quotient needs the true nu'-balancing shift
                a = balance_interval(f)[0] if nup == 1.0 else balance_point(f, nup)
                best = lp_norm_vertex(f.shifted(a), nup)
                if grad_lp_norm(f, 1) < prime[nu] * best - 1e-9:
                    failures += 1
    return {"failures": failures}


def _suite_sobolev(g, trials, rng):
    failures, checks = 0, []
    for _ in range(trials):
        f = _random_function(g, rng, dirichlet=bool(g.boundary))
        for p, nu in ((1.0, 2.0), (2.0, 3.0), (1.5, 4.0)):
            c = sb.sobolev_check(f, p, nu, force=True)
            checks.append(c)
            failures += int(not c.passed)
        c = sb.general_F_check(f, r=2.0, p=2.0, nu=4.0, force=True)
        checks.append(c)
        failures += int(not c.passed)
        c = sb.sup_embedding_check(f, p=3.0, nu=2.0, force=True)
        failures += int(not c.passed)
    return {"failures": failures}


def _suite_nash(g, trials, rng):
    failures = 0
    for _ in range(trials):
        f = _random_function(g, rng, dirichlet=bool(g.boundary))
        if not np.any(f.values):
            continue
        for nu in (2.5, 3.0, 4.0):
            c = sb.nash_check(f, nu, force=True)
            failures += int(not c.passed)
    return {"failures": failures}


def _suite_trudinger(g, trials, rng):
    failures = 0
    exact0 = None
    for _ in range(trials):
        f = _random_function(g, rng, dirichlet=bool(g.boundary))
        if grad_lp_norm(f, 3.0) == 0:
            continue
        for gamma in (0.0, 0.3, 0.7):
            c = sb.trudinger_check(f, gamma, 3.0, force=True)
            failures += int(not c.passed)
            if gamma == 0.0:
                exact0 = abs(c.lhs - c.rhs)
    return {"failures": failures, "gamma0_gap": exact0}


def _suite_gennash(g, trials, rng):
    """Scale the edge weights so the isoperimetric hypothesis I_nu >= 1 holds,
    then check the general Nash form."""
    if not g.boundary:
        raise GraphError("gennash suite needs a graph with boundary")
    failures = 0
    for nu in (2.5, 3.0):
        I = iso_constant(g, nu, "open", force=True).value
        if I <= 0:
            continue
        scaled = WeightedGraph(
            g.vertices,
            g.vmeasure,
            [type(e)(e.u, e.v, e.a / I, e.length) for e in g.edges],
            g.boundary,
        )
        for _ in range(trials):
            f = _random_function(scaled, rng, dirichlet=True)
            if not np.any(f.values):
                continue
            c = sb.gennash_check(f, nu, force=True)
            failures += int(not c.passed)
    return {"failures": failures}


def _suite_identities(g, trials, rng):
    """rho-integral identity, the two edge-norm identities, and positivity."""
    rho = half_degrees(g).rho
    unit = bool(np.all(g.elen == 1.0))
    loopfree = not bool(g.loop_mask.any())
    worst = 0.0
    from .functions import midpoint_l2_sq

    for _ in range(trials):
        f = _random_function(g, rng)
        if loopfree:
            lhs = edge_integral(f)
            rhs = float(np.sum(rho * f.values * g.vmeasure))
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
        if unit and loopfree:
            rhs = float(np.sum(rho * f.values**2 * g.vmeasure))
            mo = lp_norm_edge(f, 2) ** 2 + grad_lp_norm(f, 2) ** 2 / 6.0
            worst = max(worst, abs(mo - rhs) / (1.0 + abs(rhs)))
            av = midpoint_l2_sq(f) + grad_lp_norm(f, 2) ** 2 / 4.0
            worst = max(worst, abs(av - rhs) / (1.0 + abs(rhs)))
        # rho-concavity comparison and Laplacian positivity
        if loopfree:
            for p in (1.0, 2.0, 3.0):
                lhsn = lp_norm_edge(f, p)
                rhsn = half_degrees(g).rho_sup ** (1.0 / p) * lp_norm_vertex(f, p)
                if lhsn > rhsn + 1e-9 * (1 + rhsn):
                    worst = max(worst, lhsn - rhsn)
        lf = laplacian_apply(g, f)
        quad = float(np.sum(lf.values * f.values * g.vmeasure))
        worst = max(worst, abs(quad - grad_lp_norm(f, 2) ** 2) / (1.0 + quad))
    return {"max_residual": worst, "failures": int(worst > 1e-11)}


SUITES = {
    "coarea": _suite_coarea,
    "green": _suite_green,
    "ff": _suite_ff,
    "sobolev": _suite_sobolev,
    "nash": _suite_nash,
    "trudinger": _suite_trudinger,
    "gennash": _suite_gennash,
    "identities": _suite_identities,
}


def run_suite(g: WeightedGraph, suite: str, trials: int = 100, seed: int = 0) -> dict:
    if suite not in SUITES:
        raise GraphError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    rng = np.random.default_rng(seed)
    out = SUITES[suite](g, trials, rng)
    out.update({"suite": suite, "trials": trials, "seed": seed})
    out.setdefault("failures", 0)
    return out
