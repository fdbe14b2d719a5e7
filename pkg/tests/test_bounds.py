import math
from fractions import Fraction

import numpy as np
import pytest

from graphcalc import (
    Edge,
    EdgeField,
    GraphError,
    VertexFunction,
    alon_field,
    alon_field_checks,
    bobkov_bound,
    bound_report,
    build_graph,
    certified_magnification,
    half_degrees,
    nodal_region_reduction,
    q1_quotient,
    q2_quotient,
    rayleigh_quotient,
    true_lambda,
)
from graphcalc.isoperimetry import enumerate_connected_subsets
from graphcalc.generators import complete, cycle, hypercube, path, radial_graph, random_graph


def test_c4_exact_values():
    rep = bound_report(cycle(4))
    assert rep.lam == pytest.approx(2.0, abs=1e-12)
    vals = {b.name: b for b in rep.bounds}
    assert vals["dodziuk"].value == pytest.approx(0.25, abs=1e-12)
    assert vals["mohar"].value == pytest.approx(2.0 - math.sqrt(3.0), abs=1e-12)
    assert rep.sound


def test_mohar_at_least_dodziuk_unit_lengths():
    rng = np.random.default_rng(3)
    graphs = [cycle(n) for n in range(3, 9)] + [complete(4), hypercube(3)]
    graphs += [random_graph(8, rng, weighted=True, unit_lengths=True) for _ in range(10)]
    for g in graphs:
        rep = bound_report(g)
        vals = {b.name: b for b in rep.bounds}
        assert vals["mohar"].applicable
        assert vals["mohar"].value >= vals["dodziuk"].value - 1e-12
        assert rep.sound


def test_mohar_skipped_for_nonunit_lengths():
    g = build_graph(["a", "b"], [Edge("a", "b", length=2.0)])
    assert not next(b for b in bound_report(g).bounds if b.name == "mohar").applicable


def test_soundness_on_families():
    graphs = [path(n) for n in (3, 5, 8)]
    graphs += [path(n, boundary=[n]) for n in (3, 6)]
    graphs += [cycle(n) for n in range(3, 13)]
    graphs += [complete(n) for n in (3, 4, 5, 6)]
    graphs += [hypercube(3), hypercube(4)]
    graphs += [radial_graph(n, nu) for n in (5, 9, 12) for nu in (2.0, 3.0, 4.0)]
    for g in graphs:
        assert bound_report(g).sound


def test_soundness_on_random_graphs():
    rng = np.random.default_rng(101)
    for _ in range(40):
        g = random_graph(int(rng.integers(3, 10)), rng, weighted=True,
                         boundary_fraction=float(rng.uniform(0, 0.4)))
        assert bound_report(g).sound


def test_bobkov_applicability():
    # K3 with a_e = 2 = V(u) + V(v): applicable, c = 1 -> 3/14... check value
    g = build_graph(["a", "b", "c"],
                    [Edge("a", "b", 2.0), Edge("b", "c", 2.0), Edge("a", "c", 2.0)])
    b = bobkov_bound(g)
    assert b.applicable
    assert b.value == pytest.approx(1.0 * 3.0 / 14.0)
    assert b.value <= true_lambda(g, "closed") + 1e-9
    assert not bobkov_bound(cycle(4)).applicable  # a = 1 != 2


def test_certified_magnification_k4():
    g = complete(4)
    assert certified_magnification(g, [1, 2]) == Fraction(1)
    assert certified_magnification(g, [1]) == Fraction(2)


def test_alon_field_k4():
    g = complete(4)
    af = alon_field(g, [1, 2])
    assert af.c == Fraction(1)
    checks = alon_field_checks(g, af)
    assert checks["magnitude"] and checks["unit_inflow"]
    assert checks["divergence_on_A"] and checks["divergence_off_A"]
    assert checks["rho_sq_bound"]


def test_alon_field_every_small_set_q3():
    g = hypercube(3)
    pool = (1 << g.n) - 1
    for mask in enumerate_connected_subsets(g, pool):
        size = bin(mask).count("1")
        if size > g.n // 2:
            continue
        A = [g.vertices[i] for i in range(g.n) if (mask >> i) & 1]
        af = alon_field(g, A)
        checks = alon_field_checks(g, af)
        flags = {k: v for k, v in checks.items() if isinstance(v, bool)}
        assert all(flags.values()), (A, flags)


def test_alon_field_infeasible_c_raises():
    g = cycle(6)
    with pytest.raises(GraphError):
        alon_field(g, [1, 2], c=Fraction(5))


def test_alon_field_requires_traditional():
    g = build_graph([("a", 2.0), ("b", 1.0)], [Edge("a", "b")])
    with pytest.raises(GraphError):
        alon_field(g, ["b"])
    af = alon_field(g, ["b"], generalized=True)
    assert alon_field_checks(g, af)["divergence_on_A"]


def test_q1_q2_inequality():
    # Cauchy-Schwarz: Q1(f, X) <= 2 Q2(f, X) sqrt(R(f))
    rng = np.random.default_rng(7)
    for _ in range(20):
        g = random_graph(8, rng, weighted=True, unit_lengths=True)
        f = VertexFunction(g, rng.standard_normal(8))
        X = EdgeField(g, rng.uniform(-1, 1, len(g.edges)))
        q1 = q1_quotient(f, X)
        q2 = q2_quotient(f, X)
        assert q1 <= 2.0 * q2 * math.sqrt(rayleigh_quotient(f)) + 1e-9


def test_rayleigh_quotient_bounds_lambda():
    g = cycle(6)
    lam = true_lambda(g, "closed")
    rng = np.random.default_rng(15)
    for _ in range(20):
        vals = rng.standard_normal(6)
        vals -= np.mean(vals)  # V is uniform here
        f = VertexFunction(g, vals)
        assert rayleigh_quotient(f) >= lam - 1e-9


def test_nodal_region_reduction():
    g = cycle(8)
    sub, bound, lam2 = nodal_region_reduction(g)
    assert bound.value <= lam2 + 1e-9
    assert sub.boundary
    with pytest.raises(GraphError):
        nodal_region_reduction(path(3, boundary=[3]))
