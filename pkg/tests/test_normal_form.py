import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pareto_spinor import normal_form as nf
from pareto_spinor.algebra import ETA, XI, PolyMatrix2, Polynomial, QSqrt2


def _rank(A):
    M = [row[:] for row in A]
    r = 0
    for c in range(len(M[0])):
        p = next((i for i in range(r, len(M)) if not M[i][c].is_zero()), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inv()
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
    return r


@pytest.mark.parametrize("a, b", [(i, 5 - i) for i in range(6)] + [(1, 2), (2, 4)])
def test_L1_is_diagonal_with_resonance(a, b):
    m = Polynomial({(a, b): 1})
    assert nf.homological_L(1, m) == m * (2 * a - b)


def test_L2_action():
    assert nf.homological_L(2, XI * ETA) == ETA * ETA * 2 + XI * XI
    with pytest.raises(ValueError):
        nf.homological_L(3, XI)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_homological_map_has_two_dimensional_cokernel(k):
    A, basis, rows = nf.homological_system(k)
    assert len(rows) == 3 * (k + 1)
    assert _rank(A) == 3 * (k + 1) - 2


def test_zero_perturbation_gives_zero_correction():
    corr = nf.solve_graded(nf.base_hamiltonian(), 8)
    assert corr.is_zero() and corr.achieved_order == 8


@pytest.mark.parametrize("N", [3, 6, 10])
def test_realizable_perturbations_solve_exactly(N):
    for seed in range(5):
        H = nf.realizable_perturbation(random.Random(seed), N=N)
        corr = nf.solve_graded(H, N)
        assert nf.reconstruction_residual(H, corr, N).is_zero()
        assert corr.achieved_order == N


def test_fifty_realizable_cases_at_order_six():
    for seed in range(50):
        H = nf.realizable_perturbation(random.Random(1000 + seed), N=6)
        assert nf.reconstruction_residual(H, nf.solve_graded(H, 6), 6).is_zero()


def test_gram_matrix_of_reconstruction():
    corr = nf.GradedCorrection()
    full, gram = nf.reconstruct(corr, 4)
    rho = XI * XI + ETA * ETA
    assert full == nf.base_hamiltonian()
    assert gram == PolyMatrix2.diag(rho * Fraction(1, 2), rho * Fraction(1, 2))


def test_generic_perturbation_is_obstructed_at_degree_three():
    H = nf.random_perturbation(random.Random(0))
    with pytest.raises(nf.ObstructionError) as err:
        nf.solve_graded(H, 6)
    assert err.value.degree == 3
    assert not nf.determinant_obstruction(H).is_zero()


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_determinant_criterion_predicts_degree_three_solvability(seed):
    rng = random.Random(seed)
    H = nf.random_perturbation(rng, degrees=(3,), density=rng.choice([0.2, 0.6]))
    predicted = nf.determinant_obstruction(H).is_zero()
    try:
        nf.solve_graded(H, 3)
        solved = True
    except nf.ObstructionError:
        solved = False
    assert solved == predicted


def test_remainder_mod_rho():
    rho = XI * XI + ETA * ETA
    p = XI * XI * XI * ETA + ETA * 3
    q, r = p - nf.remainder_mod_rho(p), nf.remainder_mod_rho(p)
    assert all(m[0] <= 1 for m in r.terms)
    # q is divisible by rho: the remainder of rho times anything is zero
    assert nf.remainder_mod_rho(rho * (XI * ETA + 7)).is_zero()
    assert nf.remainder_mod_rho(q).is_zero()


def test_input_validation():
    H = nf.base_hamiltonian()
    with pytest.raises(ValueError):
        nf.solve_graded(H, 2)
    with pytest.raises(ValueError):
        nf.solve_graded(H, 11)
    with pytest.raises(ValueError):
        nf.solve_graded(H + PolyMatrix2.diag(XI, 0), 4)
    with pytest.raises(ValueError):
        nf.solve_graded(H + PolyMatrix2.diag(XI * XI, 0), 4)
    with pytest.raises(ValueError):
        nf.solve_graded(PolyMatrix2([[XI * XI, ETA * ETA], [0, 1]]), 4)


def test_correction_json_round_trip():
    H = nf.realizable_perturbation(random.Random(4), N=5)
    corr = nf.solve_graded(H, 5)
    assert nf.GradedCorrection.from_json(corr.to_json()) == corr


def test_correction_coefficients_live_in_q_sqrt2():
    H = nf.realizable_perturbation(random.Random(9), N=4)
    corr = nf.solve_graded(H, 4)
    for p in (corr.f1, corr.f2, corr.a, corr.b, corr.d):
        assert all(isinstance(c, QSqrt2) for _, c in p.items())
