import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pareto_spinor import hamiltonians as hm
from pareto_spinor.algebra import ETA, TAU, XI, PolyMatrix2

SQ3 = math.sqrt(3)


def test_elasticity_matrix_entries():
    A = Fraction(1, 3)
    H = hm.elasticity_spatial(hm.ElasticityParams(A))
    assert H == PolyMatrix2.symmetric_from(XI * XI + ETA * ETA * A, XI * ETA * A,
                                           XI * XI * A + ETA * ETA)


def test_full_symbol_adds_tau_squared():
    full = hm.full_symbol()
    assert full + hm.elasticity_spatial() == PolyMatrix2.diag(TAU * TAU, TAU * TAU)


def test_standard_radicand_is_structure_factor_modulus():
    # textbook form 3 + 2cos(sqrt3 p1 a) + 4cos(sqrt3 p1 a/2)cos(3 p2 a/2)
    rng = np.random.default_rng(1)
    p = rng.uniform(-5, 5, size=(200, 2))
    a = 1.3
    expected = 3 + 2 * np.cos(SQ3 * p[:, 0] * a) + 4 * np.cos(SQ3 * p[:, 0] * a / 2) * np.cos(1.5 * p[:, 1] * a)
    got = hm.radicand(p[:, 0], p[:, 1], hm.GrapheneParams(1.0, a, "standard"))
    assert np.allclose(got, expected, atol=1e-12)


@pytest.mark.parametrize("t", [1.0, -0.7, 2.5])
def test_origin_value(t):
    assert abs(hm.graphene_dispersion([0, 0], hm.GrapheneParams(t, 1.0)) - 3 * abs(t)) < 1e-12


@given(st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=50)
def test_standard_dispersion_is_lattice_periodic(x, y):
    params = hm.GrapheneParams(1.0, 0.8)
    b1, b2 = params.reciprocal_basis
    base = hm.graphene_dispersion([x, y], params)
    for shift in (b1, b2, b1 - 2 * b2):
        assert abs(hm.graphene_dispersion(np.array([x, y]) + shift, params) - base) < 1e-9


def test_known_dirac_point_and_fermi_velocity():
    a = 2.0
    params = hm.GrapheneParams(1.0, a)
    K = np.array([4 * math.pi / (3 * SQ3 * a), 0.0])
    assert hm.graphene_dispersion(K, params) < 1e-14
    eps = 1e-6
    for ang in (0.0, 1.0, 2.5):
        d = eps * np.array([math.cos(ang), math.sin(ang)])
        slope = hm.graphene_dispersion(K + d, params) / eps
        assert abs(slope - params.fermi_velocity) < 1e-5


def test_two_dirac_points_are_inequivalent_zeros():
    params = hm.GrapheneParams(1.0, 1.0)
    pts = hm.find_dirac_points(params)
    assert len(pts) == 2 and all(p.refined for p in pts)
    f = [np.linalg.solve(params.reciprocal_basis.T, p.p) for p in pts]
    d = f[0] - f[1]
    assert np.linalg.norm(d - np.round(d)) > 0.1


def test_dirac_points_independent_of_cell_shift():
    params = hm.GrapheneParams(1.0, 1.0)
    x0, x1, y0, y1 = params.default_cell
    shifted = (x0 + 0.37, x1 + 0.37, y0 - 0.21, y1 - 0.21)
    assert len(hm.find_dirac_points(params, cell=shifted)) == 2


def test_dirac_search_errors():
    with pytest.raises(ValueError):
        hm.find_dirac_points(hm.GrapheneParams(0.0, 1.0))
    with pytest.raises(ValueError):
        hm.find_dirac_points(hm.GrapheneParams(1.0, 1.0), res=50)
    with pytest.raises(ValueError):
        hm.GrapheneParams(1.0, 1.0, "other")


def test_as_printed_variant_is_not_the_standard_one():
    p = hm.GrapheneParams(1.0, 1.0, "as-printed")
    assert abs(hm.graphene_dispersion([0, 0], p) - 3) < 1e-12
    # zeros form curves, so many more isolated candidates are reported
    assert len(hm.find_dirac_points(p)) > 2


def test_as_printed_negative_radicand_raises():
    p = hm.GrapheneParams(1.0, 1.0, "as-printed")
    probe = np.array([5.44, 4.044])  # near the grid minimum of the radicand
    assert hm.radicand(*probe, p) < 0
    with pytest.raises(hm.ModelInconsistencyError):
        hm.graphene_dispersion(probe, p)


def test_printed_velocity_agrees_only_at_unit_lattice_constant():
    assert hm.GrapheneParams(1.0, 1.0).printed_fermi_velocity == hm.GrapheneParams(1.0, 1.0).fermi_velocity
    p = hm.GrapheneParams(1.0, 2.0)
    assert p.printed_fermi_velocity != p.fermi_velocity
