"""Degree-by-degree Pareto factorization of perturbed elasticity Hamiltonians.

Given ``H = H_0 + O(|xi, eta|^3)`` with ``H_0`` the elasticity momentum matrix
at ``A = 1/2``, we look for ``v = u_0 + f`` and ``C = diag(2, 1) + [[a, b], [b, d]]``
with ``v' C (v')^T = H`` through a target degree. At total degree ``k`` the
unknowns are the degree-``k`` parts of ``f`` and the degree-``k-2`` parts of
``a, b, d``; every other contribution is already fixed, so each degree is an
exact linear system over Q(sqrt 2).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    ZERO, PolyMatrix2, Polynomial, QSqrt2, jacobian, monomials,
)
from .factorization import elasticity_factorization
from .hamiltonians import ElasticityParams, elasticity_spatial

DEFAULT_MAX_ORDER = 10


class ObstructionError(ArithmeticError):
    """The homological system at some degree has no solution."""

    def __init__(self, degree: int, component: str, residual):
        super().__init__(f"obstruction at degree {degree} in entry {component}: {residual}")
        self.degree = degree
        self.component = component
        self.residual = residual


def homological_L(which: int, f: Polynomial) -> Polynomial:
    """``L1 f = 2 xi f_xi - eta f_eta``; ``L2 f = 2 eta f_xi + xi f_eta``."""
    xi = Polynomial.var("xi")
    eta = Polynomial.var("eta")
    if which == 1:
        return xi * f.diff(0) * 2 - eta * f.diff(1)
    if which == 2:
        return eta * f.diff(0) * 2 + xi * f.diff(1)
    raise ValueError("which must be 1 or 2")


def base_hamiltonian() -> PolyMatrix2:
    return elasticity_spatial(ElasticityParams(Fraction(1, 2)))


def check_perturbed(H: PolyMatrix2) -> None:
    if not H.symmetric:
        raise ValueError("H must be symmetric")
    if any(p.uses_tau() for p in H.entries):
        raise ValueError("H must depend on (xi, eta) only")
    if H.homogeneous_part(2) != base_hamiltonian():
        raise ValueError("the quadratic part of H must be the elasticity matrix at A = 1/2")
    if not (H.homogeneous_part(0).is_zero() and H.homogeneous_part(1).is_zero()):
        raise ValueError("H must not contain terms of degree 0 or 1")


@dataclass
class GradedCorrection:
    f1: Polynomial = field(default_factory=Polynomial)
    f2: Polynomial = field(default_factory=Polynomial)
    a: Polynomial = field(default_factory=Polynomial)
    b: Polynomial = field(default_factory=Polynomial)
    d: Polynomial = field(default_factory=Polynomial)
    achieved_order: int = 2

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in (self.f1, self.f2, self.a, self.b, self.d))

    def utility(self) -> tuple[Polynomial, Polynomial]:
        u1, u2 = elasticity_factorization().u
        return u1 + self.f1, u2 + self.f2

    def C(self) -> PolyMatrix2:
        return PolyMatrix2.symmetric_from(2 + self.a, self.b, 1 + self.d)

    def to_json(self) -> dict:
        return {
            "achieved_order": self.achieved_order,
            **{k: getattr(self, k).to_json() for k in ("f1", "f2", "a", "b", "d")},
        }

    @classmethod
    def from_json(cls, data: dict) -> "GradedCorrection":
        return cls(**{k: Polynomial.from_json(data[k]) for k in ("f1", "f2", "a", "b", "d")},
                   achieved_order=int(data["achieved_order"]))


def reconstruct(corr: GradedCorrection, N: int) -> tuple[PolyMatrix2, PolyMatrix2]:
    """``v' C (v')^T`` and ``v' (v')^T``, both truncated above degree ``N``."""
    dv = jacobian(corr.utility())
    full = corr.C().conjugate_by(dv, N)
    gram = PolyMatrix2.identity().conjugate_by(dv, N)
    return full, gram


def _linear_image(f1: Polynomial, f2: Polynomial, a: Polynomial, b: Polynomial,
                  d: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """Part of ``v' C (v')^T`` linear in the unknowns: entries (11, 12, 22)."""
    du0 = elasticity_factorization().du
    C0 = PolyMatrix2.diag(2, 1)
    df = jacobian((f1, f2))
    cross = du0.matmul(C0).matmul(df.transpose())
    dC = PolyMatrix2.symmetric_from(a, b, d).conjugate_by(du0)
    M = cross + cross.transpose() + dC
    return M[0, 0], M[0, 1], M[1, 1]


def _unknown_basis(k: int):
    """(slot, monomial) pairs in the fixed order f1, f2, a, b, d."""
    basis = []
    for slot in ("f1", "f2"):
        basis += [(slot, m) for m in monomials(k)]
    for slot in ("a", "b", "d"):
        basis += [(slot, m) for m in monomials(k - 2)]
    return basis


def _image_of(slot: str, mono) -> tuple[Polynomial, Polynomial, Polynomial]:
    e = Polynomial({mono: 1})
    z = Polynomial()
    args = {s: z for s in ("f1", "f2", "a", "b", "d")}
    args[slot] = e
    return _linear_image(**args)


_SYSTEM_CACHE: dict[int, tuple[list, list, list]] = {}


def homological_system(k: int):
    """Exact matrix of the degree-``k`` homological map.

    Rows are the coefficients of entries 11, 12, 22 on the degree-``k``
    monomials; columns follow :func:`_unknown_basis`.
    """
    if k not in _SYSTEM_CACHE:
        basis = _unknown_basis(k)
        rows_idx = [(e, m) for e in range(3) for m in monomials(k)]
        cols = [_image_of(slot, m) for slot, m in basis]
        A = [[cols[c][e].coeff(m) for c in range(len(basis))] for e, m in rows_idx]
        _SYSTEM_CACHE[k] = (A, basis, rows_idx)
    A, basis, rows_idx = _SYSTEM_CACHE[k]
    return [row[:] for row in A], basis, rows_idx


_ENTRY_NAMES = ("11", "12", "22")


def _solve_exact(A: list[list[QSqrt2]], rhs: list[QSqrt2], k: int, rows_idx):
    """Gauss-Jordan elimination; columns in order, first usable row as pivot."""
    n_rows, n_cols = len(A), len(A[0])
    M = [A[i][:] + [rhs[i]] for i in range(n_rows)]
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, n_rows) if not M[i][c].is_zero()), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inv()
        M[r] = [x * inv for x in M[r]]
        for i in range(n_rows):
            if i != r and not M[i][c].is_zero():
                fac = M[i][c]
                M[i] = [x - fac * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if not M[i][n_cols].is_zero():
            e, mono = rows_idx[i]
            raise ObstructionError(k, _ENTRY_NAMES[e], {"monomial": mono, "value": str(M[i][n_cols])})
    x = [ZERO] * n_cols
    for i, c in enumerate(pivots):
        x[c] = M[i][n_cols]
    return x


def solve_graded(H: PolyMatrix2, N: int, max_order: int = DEFAULT_MAX_ORDER) -> GradedCorrection:
    """Corrections ``f`` and ``dC`` with ``v' C (v')^T = H`` through degree ``N``.

    Free variables of the underdetermined systems are set to zero. Raises
    :class:`ObstructionError` if some degree has no solution.
    """
    if not 3 <= N <= max_order:
        raise ValueError(f"target order must lie in [3, {max_order}]")
    check_perturbed(H)
    corr = GradedCorrection()
    for k in range(3, N + 1):
        current, _ = reconstruct(corr, k)
        R = (H - current).homogeneous_part(k)
        corr.achieved_order = k
        if R.is_zero():
            continue
        A, basis, rows_idx = homological_system(k)
        rhs = [(R[0, 0], R[0, 1], R[1, 1])[e].coeff(m) for e, m in rows_idx]
        x = _solve_exact(A, rhs, k, rows_idx)
        upd = {s: {} for s in ("f1", "f2", "a", "b", "d")}
        for (slot, mono), val in zip(basis, x):
            if not val.is_zero():
                upd[slot][mono] = val
        for slot, terms in upd.items():
            if terms:
                setattr(corr, slot, getattr(corr, slot) + Polynomial(terms))
    return corr


def reconstruction_residual(H: PolyMatrix2, corr: GradedCorrection, N: int) -> PolyMatrix2:
    full, _ = reconstruct(corr, N)
    return full - H.truncate(N)


def random_perturbation(rng: random.Random, degrees=(3, 4, 5), max_num: int = 5,
                        max_den: int = 4, density: float = 0.6) -> PolyMatrix2:
    """Base Hamiltonian plus a random symmetric perturbation with small rational coefficients."""

    def rand_poly():
        terms = {}
        for k in degrees:
            for m in monomials(k):
                if rng.random() < density:
                    terms[m] = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
        return Polynomial(terms)

    pert = PolyMatrix2.symmetric_from(rand_poly(), rand_poly(), rand_poly())
    return base_hamiltonian() + pert


def realizable_perturbation(rng: random.Random, degrees=(3, 4, 5), max_num: int = 3,
                            max_den: int = 4, N: int = 6) -> PolyMatrix2:
    """``v' C (v')^T`` truncated at degree ``N`` for random rational ``f`` and ``dC``.

    Such a Hamiltonian admits a factorization by construction, so the solver
    must succeed on it at every order up to ``N``.
    """

    def rnd(degs):
        return Polynomial({m: Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
                           for k in degs for m in monomials(k)})

    dC_degs = tuple(k - 2 for k in degrees)
    corr = GradedCorrection(rnd(degrees), rnd(degrees), rnd(dC_degs), rnd(dC_degs), rnd(dC_degs))
    full, _ = reconstruct(corr, N)
    a, b, _, d = full.entries
    return PolyMatrix2.symmetric_from(a, b, d)


def remainder_mod_rho(p: Polynomial) -> Polynomial:
    """Remainder of ``p`` on division by ``xi^2 + eta^2`` (at most linear in xi)."""
    out: dict = {}
    for (i, j, k), c in p.terms.items():
        mono = (i % 2, j + 2 * (i // 2), k)
        term = c if (i // 2) % 2 == 0 else -c
        out[mono] = out[mono] + term if mono in out else term
    return Polynomial(out)


def determinant_obstruction(H: PolyMatrix2) -> Polynomial:
    """Degree-3 obstruction to factorizing ``H``.

    ``det H = det C (det v')^2`` forces the degree-5 part of ``det H`` to be a
    multiple of ``xi^2 + eta^2``; this returns its remainder, which vanishes
    exactly when the degree-3 homological system is solvable.
    """
    return remainder_mod_rho(H.det2().homogeneous_part(5))
