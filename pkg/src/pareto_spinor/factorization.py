"""Exact checks of factorizations ``H = u' C (u')^T`` of 2x2 symbol matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import ETA, TAU, XI, PolyMatrix2, Polynomial, QSqrt2, jacobian
from .hamiltonians import ElasticityParams, elasticity_spatial

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class FactorizationData:
    """Utility map ``u = (u1, u2)``, integrating factor ``C`` and optional elliptic conjugator."""

    u: tuple[Polynomial, Polynomial]
    C: PolyMatrix2
    conjugator: PolyMatrix2 | None = None

    def __post_init__(self):
        if not self.C.symmetric:
            raise ValueError("C must be symmetric")

    @property
    def du(self) -> PolyMatrix2:
        return jacobian(self.u)

    def C0_det(self) -> QSqrt2:
        return self.C.det2().coeff((0, 0, 0))


def elasticity_factorization() -> FactorizationData:
    """``u1 = (xi^2 - eta^2)/(2 sqrt 2)``, ``u2 = xi eta / sqrt 2``, ``C = diag(2, 1)``."""
    inv_2r2 = QSqrt2(0, Fraction(1, 4))  # 1/(2 sqrt 2)
    inv_r2 = QSqrt2(0, HALF)  # 1/sqrt 2
    u1 = (XI * XI - ETA * ETA) * inv_2r2
    u2 = XI * ETA * inv_r2
    return FactorizationData((u1, u2), PolyMatrix2.diag(2, 1))


def factorized(data: FactorizationData, max_degree: int | None = None) -> PolyMatrix2:
    """``u' C (u')^T``."""
    return data.C.conjugate_by(data.du, max_degree)


def verify_pareto_factorization(
    H: PolyMatrix2, data: FactorizationData, order: int | None = None
) -> PolyMatrix2:
    """Residual ``u' C (u')^T - A^T H A`` (``A`` the conjugator, identity if absent).

    A zero residual means the factorization holds exactly; with ``order`` the
    residual is truncated above that total degree, so zero means agreement of
    the germs through that order.
    """
    if not H.symmetric:
        raise ValueError("H must be symmetric")
    if data.C0_det().is_zero():
        raise ValueError("C is singular at the origin")
    target = H if data.conjugator is None else H.conjugate_by(data.conjugator.transpose())
    res = factorized(data, order) - target
    if order is not None:
        res = res.truncate(order)
    return res


def sigma2_conj(M: PolyMatrix2) -> PolyMatrix2:
    """``sigma2 M sigma2^*`` for ``sigma2 = [[0, i], [-i, 0]]``, valid for any real M.

    Works out to ``[[m22, -m21], [-m12, m11]]``; no complex numbers appear.
    """
    m11, m12, m21, m22 = M.entries
    return PolyMatrix2(((m22, -m21), (-m12, m11)), symmetric=M.symmetric or None)


def skew_conj(M: PolyMatrix2) -> PolyMatrix2:
    """sigma2 conjugation of a real symmetric matrix: ``[[m22, -m12], [-m12, m11]]``."""
    if not M.symmetric:
        raise ValueError("skew_conj expects a symmetric matrix")
    m11, m12, _, m22 = M.entries
    return PolyMatrix2.symmetric_from(m22, -m12, m11)


@dataclass
class SkewDiagReport:
    printed_form_residual: PolyMatrix2
    corrected_form_residual: PolyMatrix2

    def to_json(self) -> dict:
        return {
            "printed_residual_is_zero": self.printed_form_residual.is_zero(),
            "corrected_residual_is_zero": self.corrected_form_residual.is_zero(),
            "residuals": [
                {"form": "diag(1/2,0)", "residual": self.printed_form_residual.to_json()},
                {"form": "diag(1/2,1)", "residual": self.corrected_form_residual.to_json()},
            ],
        }


def skew_diag_sides(D: PolyMatrix2, data: FactorizationData | None = None,
                    H: PolyMatrix2 | None = None) -> tuple[PolyMatrix2, PolyMatrix2]:
    """Both sides of the sigma2 identity multiplied through by ``rho = xi^2 + eta^2``.

    Left: ``rho/2 * sigma2 (H - tau^2) sigma2^*``.
    Right: ``u' (rho D - tau^2 Id) (u')^T``.
    """
    data = data or elasticity_factorization()
    H = H if H is not None else elasticity_spatial(ElasticityParams(HALF))
    rho = XI * XI + ETA * ETA
    tau2 = TAU * TAU
    shifted = H - PolyMatrix2.diag(tau2, tau2)
    lhs = skew_conj(shifted).scale(HALF).map(lambda p: p * rho)
    inner = D.map(lambda p: p * rho) - PolyMatrix2.diag(tau2, tau2)
    rhs = PolyMatrix2(inner.rows(), symmetric=True).conjugate_by(data.du)
    return lhs, rhs


def skew_diag_check() -> SkewDiagReport:
    """Residual ``right - left`` for the printed ``diag(1/2, 0)`` and for ``diag(1/2, 1)``."""
    out = []
    for D in (PolyMatrix2.diag(HALF, 0), PolyMatrix2.diag(HALF, 1)):
        lhs, rhs = skew_diag_sides(D)
        out.append(rhs - lhs)
    return SkewDiagReport(*out)
