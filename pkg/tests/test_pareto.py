import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import fsolve

from pareto_spinor import pareto as pc

vec = st.tuples(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))


# classify_jacobian ------------------------------------------------------------

def test_identity_rows_are_regular():
    lab = pc.classify_jacobian(np.eye(2))
    assert not lab.critical and lab.rank == 2 and lab.multiplier is None


def test_opposite_gradients():
    lab = pc.classify_jacobian([1, 0], [-1, 0])
    assert lab.critical and lab.rank == 1 and lab.multiplier == pytest.approx((0.5, 0.5))


def test_vanishing_gradients():
    lab = pc.classify_jacobian([0, 0], [0, 0])
    assert lab.critical and lab.rank == 0 and lab.multiplier == (0.5, 0.5)


def test_parallel_same_orientation_is_regular():
    lab = pc.classify_jacobian([1, 0], [2, 0])
    assert not lab.critical and lab.rank == 1


def test_one_vanishing_gradient_gets_vertex_multiplier():
    lab = pc.classify_jacobian([0, 0], [1, 1])
    assert lab.critical and lab.rank == 1 and lab.multiplier == pytest.approx((1.0, 0.0))


def test_nonpositive_tol_rejected():
    with pytest.raises(ValueError):
        pc.classify_jacobian(np.eye(2), tol=0)


@given(vec, vec)
@settings(max_examples=200)
def test_label_invariants(g1, g2):
    g1, g2 = np.array(g1), np.array(g2)
    lab = pc.classify_jacobian(g1, g2)
    if lab.rank == 2:
        assert not lab.critical
    if lab.critical:
        l1, l2 = lab.multiplier
        assert l1 >= 0 and l2 >= 0 and math.isclose(l1 + l2, 1)
        thr = 1e-9 * max(1, np.linalg.norm(g1), np.linalg.norm(g2))
        assert np.linalg.norm(l1 * g1 + l2 * g2) <= thr


@given(vec, vec)
@settings(max_examples=200)
def test_vectorized_matches_scalar(g1, g2):
    crit, rank, lam = pc.classify_many(np.array([g1]), np.array([g2]))
    lab = pc.classify_jacobian(g1, g2)
    assert bool(crit[0]) == lab.critical and int(rank[0]) == lab.rank


@given(vec, vec)
@settings(max_examples=200)
def test_oracle_agrees_away_from_the_boundary(g1, g2):
    g1, g2 = np.array(g1), np.array(g2)
    n1, n2 = np.linalg.norm(g1), np.linalg.norm(g2)
    if min(n1, n2) < 1e-3:
        return
    # the grid of directions cannot resolve angles within 2 pi / K of pi
    cosang = g1 @ g2 / (n1 * n2)
    if abs(math.acos(max(-1, min(1, cosang))) - math.pi) < 4 * math.pi / 1440:
        return
    assert pc.classify_jacobian(g1, g2).critical == pc.direction_oracle(g1, g2)


def test_oracle_flip_near_pi():
    K = 1440
    thetas = np.linspace(math.pi - 0.05, math.pi + 0.05, 2001)
    flags = [pc.direction_oracle([1, 0], [math.cos(t), math.sin(t)], K) for t in thetas]
    hits = thetas[np.array(flags)]
    assert hits.size > 0
    assert np.all(np.abs(hits - math.pi) <= 2 * math.pi / K)


def test_oracle_needs_enough_directions():
    with pytest.raises(ValueError):
        pc.direction_oracle([1, 0], [0, 1], K=4)


# quadratic pairs ----------------------------------------------------------------

@pytest.mark.parametrize("A1, A2", [
    ((1, 0, 1), (1, Fraction(1, 2), 1)),
    ((0, 1, 0), (1, 0, -1)),
])
def test_only_origin(A1, A2):
    s = pc.quadratic_pareto_set(pc.QuadraticPair(A1, A2))
    assert s.origin_critical and s.lines == [] and s.pencil_roots == []


def test_mixed_pair_line():
    s = pc.quadratic_pareto_set(pc.QuadraticPair((1, 0, 1), (1, 0, -1)))
    (line,) = s.lines
    assert line.lam == Fraction(1, 2) and line.exact
    assert line.direction[0] == 0


@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6))
@settings(max_examples=200)
def test_reported_lines_lie_in_pencil_kernel(c):
    pair = pc.QuadraticPair(tuple(c[:3]), tuple(c[3:]))
    try:
        s = pc.quadratic_pareto_set(pair)
    except pc.DegeneratePencilError:
        return
    except ValueError:
        assert not any(c)
        return
    for line in s.lines:
        assert 0 <= line.lam <= 1
        m11, m12, m22 = pc.pencil_matrix(pair, line.lam)
        x, y = line.direction
        r = (m11 * x + m12 * y, m12 * x + m22 * y)
        if line.exact:
            assert r == (0, 0)
        else:
            assert math.hypot(*map(float, r)) < 1e-9


def test_degenerate_pencil_reports_common_kernel():
    with pytest.raises(pc.DegeneratePencilError) as err:
        pc.quadratic_pareto_set(pc.QuadraticPair((1, 0, 0), (2, 0, 0)))
    k = err.value.common_kernel
    assert k[0] == 0 and k[1] != 0


def test_irrational_roots_fall_back_to_floats():
    # the only pencil root in [0, 1] is sqrt 7 - 2
    s = pc.quadratic_pareto_set(pc.QuadraticPair((-2, -2, -1), (-2, -1, -2)))
    assert len(s.lines) == 1 and not s.lines[0].exact
    assert s.lines[0].lam == pytest.approx(math.sqrt(7) - 2, abs=1e-14)


# grid scans --------------------------------------------------------------------

def test_identity_map_has_no_critical_nodes():
    g = pc.grid_scan(pc.identity_map(), (-1, 1, -1, 1), (21, 21))
    assert not g.critical.any()


def test_mixed_pair_grid_column():
    pair = pc.QuadraticPair((1, 0, 1), (1, 0, -1))
    g = pc.grid_scan(pc.quadratic_map(pair), (-1, 1, -1, 1), (101, 101))
    cols = np.nonzero(g.critical.any(axis=0))[0]
    assert list(cols) == [50] and g.critical[:, 50].all()
    assert pc.oracle_agreement(g) == 1.0


def test_grid_rejects_tiny_resolution():
    with pytest.raises(ValueError):
        pc.grid_scan(pc.identity_map(), (0, 1, 0, 1), (1, 5))


def test_nonfinite_jacobian_marks_invalid():
    def jac(x, y):
        g = np.stack([np.where(x > 0.5, np.nan, 1.0), np.zeros_like(x)], axis=-1)
        return g, -g
    g = pc.grid_scan(pc.SmoothMap(None, jac, "nan"), (0, 1, 0, 1), (11, 11))
    assert not g.valid[:, -1].any() and g.valid[:, 0].all()
    assert not g.critical[~g.valid].any()


def test_csv_export(tmp_path):
    g = pc.grid_scan(pc.identity_map(), (0, 1, 0, 1), (3, 4))
    g.write_csv(tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "x1,x2,kind,rank,lambda1,lambda2,jac_norm"
    assert len(lines) == 13


def test_thread_count_does_not_change_result(monkeypatch):
    smap = pc.klein_bottle_utilities(3.0)
    base = pc.grid_scan(smap, pc.KLEIN_RECT, (60, 60), adaptive=True)
    monkeypatch.setenv("PARETO_SPINOR_THREADS", "4")
    threaded = pc.grid_scan(smap, pc.KLEIN_RECT, (60, 60), adaptive=True)
    assert np.array_equal(base.critical, threaded.critical)
    assert np.array_equal(base.rank, threaded.rank)


# Klein bottle ---------------------------------------------------------------------

def test_klein_requires_r_above_two():
    with pytest.raises(ValueError):
        pc.klein_bottle_utilities(2.0)


def test_klein_jacobian_matches_finite_differences():
    smap = pc.klein_bottle_utilities(3.0)
    rng = np.random.default_rng(3)
    h = 1e-6
    for th, v in rng.uniform(-3, 3, size=(20, 2)):
        G1, G2 = smap.jacobian(th, v)
        u_th = (np.array(smap.value(th + h, v)) - np.array(smap.value(th - h, v))) / (2 * h)
        u_v = (np.array(smap.value(th, v + h)) - np.array(smap.value(th, v - h))) / (2 * h)
        assert np.allclose(G1, [u_th[0], u_v[0]], atol=1e-7)
        assert np.allclose(G2, [u_th[1], u_v[1]], atol=1e-7)


def test_klein_jacobian_never_vanishes():
    # the v-column is a rotation of (cos v, 2 cos 2v), which has no common zero
    smap = pc.klein_bottle_utilities(3.0)
    th, v = np.meshgrid(np.linspace(-np.pi, np.pi, 400), np.linspace(0, 2 * np.pi, 400))
    G1, G2 = smap.jacobian(th, v)
    assert np.min(np.hypot(G1[..., 1], G2[..., 1])) > 0.5


def _gradient_zeros(smap, k):
    """Independent zeros of gradient k from a coarse seed lattice."""
    found = []
    for th0 in np.linspace(-math.pi, math.pi, 13):
        for v0 in np.linspace(0, 2 * math.pi, 13):
            f = lambda p: smap.jacobian(p[0], p[1])[k]
            p, info, ier, _ = fsolve(f, [th0, v0], full_output=True, xtol=1e-13)
            if ier != 1 or np.linalg.norm(f(p)) > 1e-10:
                continue
            th = p[0]
            v = p[1] % (2 * math.pi)
            if not -math.pi <= th < math.pi:
                continue
            if all(math.hypot(th - a, min(abs(v - b), 2 * math.pi - abs(v - b))) > 1e-6
                   for a, b in found):
                found.append((th, v))
    return found


@pytest.mark.parametrize("res", [400, 800])
def test_klein_terminal_points_match_gradient_zeros(res):
    smap = pc.klein_bottle_utilities(3.0)
    grid = pc.grid_scan(smap, pc.KLEIN_RECT, (res, res), adaptive=True)
    strata = pc.extract_strata(grid, wrap=(False, True))
    crit = grid.critical
    assert (crit & (grid.rank == 1)).any() and not (crit & (grid.rank == 0)).any()
    pts = strata.terminal_points
    for k in (0, 1):
        ref = _gradient_zeros(smap, k)
        mine = [(x, y) for x, y, kk in pts if kk == k + 1]
        assert len(mine) == len(ref)
        for x, y in mine:
            assert min(math.hypot(x - a, y - b) for a, b in ref) < 1e-7
    assert len(pts) == 16


def test_cluster_nodes_wraps():
    clusters = pc.cluster_nodes([(0, 5), (99, 5), (50, 50)], 3, shape=(100, 100),
                                wrap=(False, True))
    assert sorted(len(c) for c in clusters) == [1, 2]
