import math

import numpy as np
import pytest

from graphcalc import (
    Edge,
    GraphError,
    VertexFunction,
    balance_interval,
    balance_point,
    build_graph,
    coarea,
    edge_integral,
    grad_lp_norm,
    half_degrees,
    is_split,
    lp_norm_edge,
    lp_norm_vertex,
    midpoint_l2_sq,
    split_shift,
)
from graphcalc.generators import path, random_graph


def _single_edge_fn(fu, fv, a=1.0, length=1.0):
    g = build_graph(["u", "v"], [Edge("u", "v", a, length)])
    return VertexFunction.from_map(g, {"u": fu, "v": fv})


def test_edge_l2_of_linear_ramp():
    # int_0^1 s^2 ds = 1/3
    f = _single_edge_fn(0.0, 1.0)
    assert lp_norm_edge(f, 2) == pytest.approx((1 / 3) ** 0.5, abs=1e-14)


def test_edge_l1_across_sign_change():
    # int_0^1 |2s - 1| ds = 1/2, and the measure scales it
    f = _single_edge_fn(-1.0, 1.0, a=3.0, length=2.0)
    assert lp_norm_edge(f, 1) == pytest.approx(6.0 * 0.5, abs=1e-13)


def test_edge_lp_matches_quadrature():
    from scipy.integrate import quad

    rng = np.random.default_rng(3)
    for _ in range(20):
        b, c = rng.standard_normal(2)
        a, ell = rng.uniform(0.5, 2.0, 2)
        p = rng.uniform(1.0, 5.0)
        f = _single_edge_fn(b, c, a, ell)
        pts = [b / (b - c)] if b * c < 0 else None
        exact, _ = quad(lambda s: abs(b + (c - b) * s) ** p, 0.0, 1.0, limit=200, points=pts)
        assert lp_norm_edge(f, p) ** p == pytest.approx(a * ell * exact, rel=1e-9)


def test_edge_norm_flat_edge():
    f = _single_edge_fn(2.0, 2.0, a=1.5, length=1.0)
    assert lp_norm_edge(f, 3) == pytest.approx(1.5 ** (1 / 3) * 2.0, abs=1e-13)
    assert lp_norm_edge(f, math.inf) == 2.0


def test_edge_sup_norm():
    f = _single_edge_fn(-3.0, 1.0)
    assert lp_norm_edge(f, math.inf) == 3.0


def test_edge_integral_is_trapezoid():
    f = _single_edge_fn(1.0, 3.0, a=2.0, length=1.0)
    assert edge_integral(f) == pytest.approx(2.0 * 2.0)  # E * midpoint value
    # loop: E * f(v)
    g = build_graph(["a"], [Edge("a", "a", a=3.0)])
    fl = VertexFunction(g, np.array([5.0]))
    assert edge_integral(fl) == pytest.approx(15.0)


def test_grad_norms_on_path():
    g = path(3)
    f = VertexFunction(g, np.array([0.0, 1.0, 3.0]))
    assert grad_lp_norm(f, 1) == pytest.approx(3.0)
    assert grad_lp_norm(f, 2) == pytest.approx(math.sqrt(5.0))
    assert grad_lp_norm(f, math.inf) == pytest.approx(2.0)


def test_grad_norm_ignores_loops():
    g = build_graph(["a", "b"], [Edge("a", "b"), Edge("a", "a", a=4.0)])
    f = VertexFunction(g, np.array([0.0, 2.0]))
    assert grad_lp_norm(f, 1) == pytest.approx(2.0)


def test_vertex_norms():
    g = build_graph([("a", 2.0), ("b", 0.5)], [])
    f = VertexFunction(g, np.array([-1.0, 4.0]))
    assert lp_norm_vertex(f, 1) == pytest.approx(2.0 + 2.0)
    assert lp_norm_vertex(f, 2) == pytest.approx(math.sqrt(2.0 + 8.0))
    assert lp_norm_vertex(f, math.inf) == 4.0


def test_balance_point_p2_is_weighted_mean():
    g = build_graph([("a", 1.0), ("b", 3.0)], [])
    f = VertexFunction(g, np.array([0.0, 4.0]))
    assert balance_point(f, 2) == pytest.approx(3.0, abs=1e-10)


def test_balance_point_pinf_is_midrange():
    g = build_graph(["a", "b", "c"], [])
    f = VertexFunction(g, np.array([-1.0, 0.0, 5.0]))
    assert balance_point(f, math.inf) == 2.0


def test_balance_point_minimizes_norm():
    rng = np.random.default_rng(7)
    g = random_graph(8, rng, weighted=True)
    f = VertexFunction(g, rng.standard_normal(8))
    for p in (1.5, 2.0, 4.0):
        a = balance_point(f, p)
        base = lp_norm_vertex(f.shifted(a), p)
        for da in (-1e-3, 1e-3):
            assert base <= lp_norm_vertex(f.shifted(a + da), p) + 1e-12


def test_balance_interval_weighted_median():
    # masses 1, 1, 3 at values 0, 1, 2: median is 2 (mass above 0, below 2)
    g = build_graph([("a", 1.0), ("b", 1.0), ("c", 3.0)], [])
    f = VertexFunction(g, np.array([0.0, 1.0, 2.0]))
    assert balance_interval(f) == (2.0, 2.0)


def test_balance_interval_with_ties():
    g = build_graph([("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0)], [])
    f = VertexFunction(g, np.array([0.0, 1.0, 1.0, 5.0]))
    assert balance_interval(f) == (1.0, 1.0)
    f2 = VertexFunction(g, np.array([0.0, 0.0, 1.0, 1.0]))
    assert balance_interval(f2) == (0.0, 1.0)


def test_split_shift_makes_split():
    rng = np.random.default_rng(11)
    g = random_graph(9, rng, weighted=True)
    for _ in range(25):
        f = VertexFunction(g, rng.standard_normal(9))
        assert is_split(split_shift(f))


def test_coarea_integral_equals_grad_l1():
    rng = np.random.default_rng(13)
    for _ in range(25):
        g = random_graph(int(rng.integers(3, 12)), rng, weighted=True)
        f = VertexFunction(g, rng.standard_normal(g.n))
        sweep = coarea(f)
        assert sweep.integral() == pytest.approx(grad_lp_norm(f, 1), abs=1e-12)


def test_coarea_area_at_level():
    g = path(3)
    f = VertexFunction(g, np.array([0.0, 1.0, 2.0]))
    sweep = coarea(f)
    # {f > t} for t in (0,1) cuts one edge; for t in (1,2) also one edge
    assert sweep.area_at(0.5) == pytest.approx(1.0)
    assert sweep.area_at(1.5) == pytest.approx(1.0)
    assert sweep.area_at(2.5) == 0.0


def test_rho_identity_loop_free():
    rng = np.random.default_rng(17)
    for _ in range(20):
        g = random_graph(int(rng.integers(2, 15)), rng, weighted=True)
        rho = half_degrees(g).rho
        f = VertexFunction(g, rng.standard_normal(g.n))
        lhs = edge_integral(f)
        rhs = float(np.sum(rho * f.values * g.vmeasure))
        assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(rhs)))


def test_unit_length_norm_identities():
    rng = np.random.default_rng(19)
    for _ in range(20):
        g = random_graph(int(rng.integers(2, 15)), rng, weighted=True, unit_lengths=True)
        rho = half_degrees(g).rho
        f = VertexFunction(g, rng.standard_normal(g.n))
        rhs = float(np.sum(rho * f.values**2 * g.vmeasure))
        assert lp_norm_edge(f, 2) ** 2 + grad_lp_norm(f, 2) ** 2 / 6.0 == pytest.approx(
            rhs, abs=1e-12 * (1 + abs(rhs))
        )
        assert midpoint_l2_sq(f) + grad_lp_norm(f, 2) ** 2 / 4.0 == pytest.approx(
            rhs, abs=1e-12 * (1 + abs(rhs))
        )


def test_vertex_function_validation():
    g = path(3)
    with pytest.raises(GraphError):
        VertexFunction(g, np.zeros(2))
    f = VertexFunction.from_map(g, {1: 1.0, 2: 2.0, 3: 3.0})
    assert f(2) == 2.0
    gb = path(3, boundary=[3])
    fb = VertexFunction.from_map(gb, {1: 1.0, 2: 2.0, 3: 0.0})
    assert fb.is_dirichlet
    fnb = VertexFunction.from_map(gb, {1: 1.0, 2: 2.0, 3: 3.0})
    assert not fnb.is_dirichlet
