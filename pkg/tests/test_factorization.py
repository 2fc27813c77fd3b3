from fractions import Fraction

import pytest

from pareto_spinor import factorization as fz
from pareto_spinor import hamiltonians as hm
from pareto_spinor.algebra import ETA, XI, PolyMatrix2, Polynomial, QSqrt2

HALF = Fraction(1, 2)
RHO = XI * XI + ETA * ETA


def test_utility_derivatives():
    u1, u2 = fz.elasticity_factorization().u
    assert u1.diff("eta") == ETA * QSqrt2(0, -HALF)
    assert u1 * QSqrt2(0, 2) == XI * XI - ETA * ETA  # times 2 sqrt 2


def test_exact_factorization_and_truncations():
    H = hm.elasticity_spatial(hm.ElasticityParams(HALF))
    data = fz.elasticity_factorization()
    assert fz.verify_pareto_factorization(H, data).is_zero()
    for order in (2, 3, 6):
        assert fz.verify_pareto_factorization(H, data, order).is_zero()


def test_residual_sign_is_factorized_minus_target():
    H = hm.elasticity_spatial(hm.ElasticityParams(HALF))
    bumped = H + PolyMatrix2.diag(XI * XI * XI, 0)
    res = fz.verify_pareto_factorization(bumped, fz.elasticity_factorization())
    assert res == PolyMatrix2.diag(-(XI * XI * XI), 0)


def test_other_elastic_constants_are_not_factorized_by_this_data():
    H = hm.elasticity_spatial(hm.ElasticityParams(Fraction(1, 3)))
    assert not fz.verify_pareto_factorization(H, fz.elasticity_factorization()).is_zero()


def test_conjugator_is_applied_to_the_target():
    # with the identity conjugator nothing changes
    data = fz.elasticity_factorization()
    withA = fz.FactorizationData(data.u, data.C, PolyMatrix2.identity())
    H = hm.elasticity_spatial()
    assert fz.verify_pareto_factorization(H, withA).is_zero()


def test_errors():
    data = fz.elasticity_factorization()
    with pytest.raises(ValueError):
        fz.verify_pareto_factorization(PolyMatrix2([[XI, ETA], [0, 1]]), data)
    singular = fz.FactorizationData(data.u, PolyMatrix2.diag(XI, 1))
    with pytest.raises(ValueError):
        fz.verify_pareto_factorization(hm.elasticity_spatial(), singular)
    with pytest.raises(ValueError):
        fz.FactorizationData(data.u, PolyMatrix2([[1, XI], [0, 1]]))


def test_sigma2_conjugation():
    M = PolyMatrix2([[XI, ETA], [Polynomial.constant(3), XI * ETA]])
    assert fz.sigma2_conj(M) == PolyMatrix2([[XI * ETA, -Polynomial.constant(3)], [-ETA, XI]])
    assert fz.sigma2_conj(fz.sigma2_conj(M)) == M
    S = PolyMatrix2.symmetric_from(XI, ETA, 1)
    assert fz.skew_conj(S) == fz.sigma2_conj(S)
    with pytest.raises(ValueError):
        fz.skew_conj(M)


def test_sigma2_conjugation_of_the_jacobian():
    # sigma2 u' sigma2^* = u' for this utility map
    du = fz.elasticity_factorization().du
    assert fz.sigma2_conj(du) == du


def test_skew_diagonalization_forms():
    rep = fz.skew_diag_check()
    assert rep.corrected_form_residual.is_zero()
    du = fz.elasticity_factorization().du
    assert rep.printed_form_residual == PolyMatrix2.diag(0, 1).conjugate_by(du).map(lambda p: -(p * RHO))
    js = rep.to_json()
    assert js["corrected_residual_is_zero"] and not js["printed_residual_is_zero"]


def test_sides_are_symmetric():
    lhs, rhs = fz.skew_diag_sides(PolyMatrix2.diag(HALF, 1))
    assert lhs.symmetric and rhs.symmetric and lhs == rhs


def test_determinant_of_factorized_form():
    data = fz.elasticity_factorization()
    assert fz.factorized(data).det2() == data.C.det2() * data.du.det2() * data.du.det2()
    assert data.du.det2() * data.du.det2() == RHO * RHO * Fraction(1, 4)
