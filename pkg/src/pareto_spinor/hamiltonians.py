"""The elasticity Hamiltonian with constant coupling and the graphene band dispersion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ETA, TAU, XI, PolyMatrix2, QSqrt2

RADICAND_TOL = 1e-12
SQRT3 = math.sqrt(3.0)


class ModelInconsistencyError(ValueError):
    """The dispersion radicand is negative beyond rounding."""


@dataclass(frozen=True)
class ElasticityParams:
    A: QSqrt2 = QSqrt2(Fraction(1, 2))

    def __post_init__(self):
        object.__setattr__(self, "A", QSqrt2.coerce(self.A))


def elasticity_spatial(params: ElasticityParams | None = None) -> PolyMatrix2:
    """Momentum part ``[[xi^2 + A eta^2, A xi eta], [A xi eta, A xi^2 + eta^2]]``."""
    A = (params or ElasticityParams()).A
    return PolyMatrix2.symmetric_from(
        XI * XI + ETA * ETA * A,
        XI * ETA * A,
        XI * XI * A + ETA * ETA,
    )


def full_symbol(params: ElasticityParams | None = None) -> PolyMatrix2:
    """``tau^2 Id - elasticity_spatial(params)``."""
    tau2 = TAU * TAU
    return PolyMatrix2.diag(tau2, tau2) - elasticity_spatial(params)


# graphene -------------------------------------------------------------------

VARIANTS = ("as-printed", "standard")


@dataclass(frozen=True)
class GrapheneParams:
    t: float = 1.0
    a: float = 1.0
    variant: str = "standard"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("lattice constant a must be positive")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")

    @property
    def reciprocal_basis(self) -> np.ndarray:
        """Rows are the two reciprocal lattice vectors of the standard dispersion."""
        b = 2 * math.pi / (SQRT3 * self.a)
        c = 2 * math.pi / (3 * self.a)
        return np.array([[b, c], [b, -c]])

    @property
    def default_cell(self) -> tuple[float, float, float, float]:
        return (0.0, 4 * math.pi / (SQRT3 * self.a), 0.0, 4 * math.pi / (3 * self.a))

    @property
    def fermi_velocity(self) -> float:
        """Slope of the standard dispersion at a Dirac point, ``3|t|a/2``."""
        return 1.5 * abs(self.t) * self.a

    @property
    def printed_fermi_velocity(self) -> float:
        """``3t/(2a)``, the printed expression; equals the slope only when ``a = 1``."""
        return 3 * self.t / (2 * self.a)


def _structure_factor(p1, p2, a):
    # radicand of the standard variant equals |1 + 2 cos(sqrt3 p1 a/2) e^{i 3 p2 a/2}|^2
    return 1 + 2 * np.cos(SQRT3 * p1 * a / 2) * np.exp(1.5j * p2 * a)


def radicand(p1, p2, params: GrapheneParams):
    """The expression under the square root, without the factor t^2."""
    a = params.a
    if params.variant == "standard":
        return np.abs(_structure_factor(p1, p2, a)) ** 2
    return (3 + 2 * np.cos(SQRT3 * p1 * a)
            + 4 * np.cos(SQRT3 * p2 * a / 2) * np.cos(1.5 * p2 * a))


def graphene_dispersion(p, params: GrapheneParams):
    """Upper band ``|lambda(p)|``; ``p`` is a 2-vector or an array with last axis 2."""
    p = np.asarray(p, dtype=float)
    p1, p2 = p[..., 0], p[..., 1]
    if params.variant == "standard":
        out = abs(params.t) * np.abs(_structure_factor(p1, p2, params.a))
    else:
        r = radicand(p1, p2, params)
        if np.any(r < -RADICAND_TOL):
            raise ModelInconsistencyError(
                f"negative radicand {np.min(r):.3e} in the as-printed dispersion"
            )
        out = abs(params.t) * np.sqrt(np.maximum(r, 0.0))
    return float(out) if out.ndim == 0 else out


@dataclass
class DiracPoint:
    p: tuple[float, float]
    lam: float
    refined: bool = True
    iterations: int = 0

    def to_json(self) -> dict:
        return {"p": list(self.p), "lambda": self.lam, "refined": self.refined}


def _residual_and_jacobian(p, params: GrapheneParams):
    a = params.a
    p1, p2 = p
    if params.variant == "standard":
        c, s = math.cos(SQRT3 * p1 * a / 2), math.sin(SQRT3 * p1 * a / 2)
        ph = 1.5 * p2 * a
        F = np.array([1 + 2 * c * math.cos(ph), 2 * c * math.sin(ph)])
        J = np.array([
            [-SQRT3 * a * s * math.cos(ph), -3 * a * c * math.sin(ph)],
            [-SQRT3 * a * s * math.sin(ph), 3 * a * c * math.cos(ph)],
        ])
        return F, J
    r = float(radicand(p1, p2, params))
    g = np.array([
        -2 * SQRT3 * a * math.sin(SQRT3 * p1 * a),
        -2 * SQRT3 * a * math.sin(SQRT3 * p2 * a / 2) * math.cos(1.5 * p2 * a)
        - 6 * a * math.cos(SQRT3 * p2 * a / 2) * math.sin(1.5 * p2 * a),
    ])
    return np.array([r]), g[None, :]


def _refine(p0, params: GrapheneParams, max_iter: int = 50):
    # Gauss-Newton on lambda^2 = t^2 |F|^2 (exact Newton on F = 0 when F is 2-dimensional)
    p = np.array(p0, dtype=float)
    for it in range(1, max_iter + 1):
        F, J = _residual_and_jacobian(p, params)
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        p = p + step
        if np.linalg.norm(step) < 1e-15 * max(1.0, np.linalg.norm(p)):
            return p, True, it
        lam2 = params.t ** 2 * float(radicand(p[0], p[1], params))
        if abs(lam2) < 1e-30:
            return p, True, it
    return p, False, max_iter


def _lattice_reduce(p, params: GrapheneParams) -> np.ndarray:
    B = params.reciprocal_basis
    frac = np.linalg.solve(B.T, p)
    return frac - np.floor(frac)


def _same_class(f1, f2, tol) -> bool:
    d = f1 - f2
    d = d - np.round(d)
    return bool(np.linalg.norm(d) < tol)


def find_dirac_points(
    params: GrapheneParams,
    cell: tuple[float, float, float, float] | None = None,
    res: int = 240,
    threshold: float = 1e-16,
    dedup_tol: float = 1e-6,
) -> list[DiracPoint]:
    """Zeros of the dispersion in ``cell = (x0, x1, y0, y1)``.

    Local minima of lambda^2 on a ``res x res`` grid are refined by Newton
    iterations. For the standard variant the cell is treated as periodic and
    the zeros are deduplicated modulo the reciprocal lattice; the as-printed
    dispersion is not lattice periodic, so its zeros are deduplicated by
    distance only and reported with their residuals.
    """
    if params.t == 0:
        raise ValueError("t = 0 makes the dispersion vanish identically")
    if res < 200:
        raise ValueError("grid resolution must be at least 200")
    x0, x1, y0, y1 = cell if cell is not None else params.default_cell
    periodic = params.variant == "standard"
    xs = np.linspace(x0, x1, res, endpoint=not periodic)
    ys = np.linspace(y0, y1, res, endpoint=not periodic)
    P1, P2 = np.meshgrid(xs, ys, indexing="xy")
    lam2 = params.t ** 2 * radicand(P1, P2, params)
    obj = lam2 if periodic else np.abs(lam2)

    if periodic:
        padded = np.pad(obj, 1, mode="wrap")
    else:
        padded = np.pad(obj, 1, mode="constant", constant_values=np.inf)
    is_min = np.ones_like(obj, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = padded[1 + di: 1 + di + obj.shape[0], 1 + dj: 1 + dj + obj.shape[1]]
            is_min &= obj <= nb
    candidates = [(P1[i, j], P2[i, j]) for i, j in zip(*np.nonzero(is_min))]

    found: list[DiracPoint] = []
    keys: list[np.ndarray] = []
    for c in candidates:
        p, ok, it = _refine(c, params)
        lam2_p = params.t ** 2 * float(radicand(p[0], p[1], params))
        lam = math.sqrt(abs(lam2_p))
        if periodic:
            key = _lattice_reduce(p, params)
            if any(_same_class(key, k, dedup_tol) for k in keys):
                continue
        else:
            key = p
            if any(np.linalg.norm(key - k) < dedup_tol for k in keys):
                continue
        if ok and abs(lam2_p) < threshold:
            keys.append(key)
            found.append(DiracPoint((float(p[0]), float(p[1])), lam, True, it))
        elif not ok:
            keys.append(key)
            found.append(DiracPoint((float(c[0]), float(c[1])), lam, False, it))
    return found
