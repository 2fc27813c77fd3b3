"""Bessel eigenfields and the spinor solutions of the elasticity Helmholtz problem.

Conventions: the momentum ``xi`` stands for ``-i h d/dx`` (and ``eta`` for
``-i h d/dy``). The scalar fields

    phi1 = J0(k1 r),  k1 = sqrt(2) tau / h,
    psi1 = J0(k2 r),  k2 = tau / h,

solve ``-h^2 Lap phi1 = 2 tau^2 phi1`` and ``-h^2 Lap psi1 = tau^2 psi1``. The
spinor is ``w = sigma2 u'(-i h grad) (phi1, psi1)^T``. Because ``u'`` is linear
in the momenta, ``u'(-i h grad) = -i h D`` with the real first-order operator

    D = (1/sqrt 2) [[d_x, -d_y], [d_y, d_x]],

and ``sigma2 (-i h) = h [[0, 1], [-1, 0]]``, so ``w = h (Y2, -Y1)`` with
``Y = D (phi1, psi1)^T``: a real field. ``pre_sigma`` stores ``h Y`` (the
pre-sigma2 pair with the common factor ``-i`` dropped).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .bessel import j0, j1

INV_SQRT2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class FieldGrid:
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("field grids need at least 3 nodes per axis")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("empty rectangle")

    @classmethod
    def square(cls, half_width: float, n: int) -> "FieldGrid":
        return cls(-half_width, half_width, -half_width, half_width, n, n)

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays of shape (ny, nx)."""
        x = np.linspace(self.x0, self.x1, self.nx)
        y = np.linspace(self.y0, self.y1, self.ny)
        return np.meshgrid(x, y, indexing="xy")

    def refined(self) -> "FieldGrid":
        """Same rectangle with the spacing halved."""
        return FieldGrid(self.x0, self.x1, self.y0, self.y1, 2 * self.nx - 1, 2 * self.ny - 1)


@dataclass
class SpinorField:
    phi: np.ndarray
    psi: np.ndarray
    grid: FieldGrid
    tau: float
    h: float
    pre_sigma: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        shape = (self.grid.ny, self.grid.nx)
        if self.phi.shape != shape or self.psi.shape != shape:
            raise ValueError("field arrays do not match the grid")


def _check(tau, h):
    if not (tau > 0 and h > 0):
        raise ValueError("tau and h must be positive")


def eigenfields(tau: float, h: float, grid: FieldGrid) -> tuple[np.ndarray, np.ndarray]:
    """Samples of ``J0(r sqrt2 tau/h)`` and ``J0(r tau/h)``."""
    _check(tau, h)
    X, Y = grid.mesh()
    r = np.hypot(X, Y)
    return j0(r * math.sqrt(2) * tau / h), j0(r * tau / h)


def _radial_gradient(k: float, X, Y):
    # grad J0(k r) = -k J1(k r) (x, y)/r, extended by 0 at r = 0
    r = np.hypot(X, Y)
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.where(r > 0, -k * j1(k * r) / np.where(r > 0, r, 1.0), 0.0)
    return g * X, g * Y


def pre_sigma_pair(tau: float, h: float, X, Y) -> tuple[np.ndarray, np.ndarray]:
    """``h D (phi1, psi1)^T`` at the points (X, Y)."""
    _check(tau, h)
    k1, k2 = math.sqrt(2) * tau / h, tau / h
    px, py = _radial_gradient(k1, X, Y)
    qx, qy = _radial_gradient(k2, X, Y)
    return h * INV_SQRT2 * (px - qy), h * INV_SQRT2 * (py + qx)


def synthesize_spinor(tau: float, h: float, grid: FieldGrid) -> SpinorField:
    """Spinor ``w = sigma2 u'(-i h grad) (phi1, psi1)^T`` sampled on ``grid``."""
    X, Y = grid.mesh()
    y1, y2 = pre_sigma_pair(tau, h, X, Y)
    return SpinorField(y2, -y1, grid, tau, h, pre_sigma=(y1, y2))


def _d2(f, dx, dy):
    fxx = (f[1:-1, 2:] - 2 * f[1:-1, 1:-1] + f[1:-1, :-2]) / dx ** 2
    fyy = (f[2:, 1:-1] - 2 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / dy ** 2
    fxy = (f[2:, 2:] - f[:-2, 2:] - f[2:, :-2] + f[:-2, :-2]) / (4 * dx * dy)
    return fxx, fyy, fxy


def residual_check(field, tau: float, h: float, grid: FieldGrid, component: str = "phi",
                   normalize: bool = True) -> float:
    """Largest interior finite-difference residual of the Helmholtz equations.

    For a scalar array, ``component`` picks ``-h^2 Lap f - 2 tau^2 f`` (``"phi"``)
    or ``-h^2 Lap f - tau^2 f`` (``"psi"``) on the 5-point stencil. For a
    :class:`SpinorField` the constant-coefficient operator
    ``H(-i h grad) - tau^2`` of the elasticity matrix at ``A = 1/2`` is applied
    with the 9-point mixed-derivative stencil. With ``normalize`` the result is
    divided by the largest field amplitude.
    """
    if grid.nx < 5 or grid.ny < 5:
        raise ValueError("grid too coarse: fewer than 3 interior nodes per axis")
    dx, dy = grid.dx, grid.dy
    h2, t2 = h * h, tau * tau
    if isinstance(field, SpinorField):
        w1, w2 = field.phi, field.psi
        a_xx, a_yy, a_xy = _d2(w1, dx, dy)
        b_xx, b_yy, b_xy = _d2(w2, dx, dy)
        r1 = -h2 * (a_xx + 0.5 * a_yy + 0.5 * b_xy) - t2 * w1[1:-1, 1:-1]
        r2 = -h2 * (0.5 * a_xy + 0.5 * b_xx + b_yy) - t2 * w2[1:-1, 1:-1]
        res = max(np.max(np.abs(r1)), np.max(np.abs(r2)))
        amp = max(np.max(np.abs(w1)), np.max(np.abs(w2)))
    else:
        f = np.asarray(field, dtype=float)
        if f.shape != (grid.ny, grid.nx):
            raise ValueError("field does not match the grid")
        energy = {"phi": 2.0, "psi": 1.0}[component] * t2
        fxx, fyy, _ = _d2(f, dx, dy)
        res = np.max(np.abs(-h2 * (fxx + fyy) - energy * f[1:-1, 1:-1]))
        amp = np.max(np.abs(f))
    if normalize:
        return float(res / amp) if amp > 0 else float(res)
    return float(res)


def convergence_ratio(kind: str, tau: float, h: float, grid: FieldGrid) -> tuple[float, float, float]:
    """Residuals on ``grid`` and on its refinement, and their ratio.

    ``kind`` is ``"phi"``, ``"psi"`` or ``"spinor"``.
    """
    out = []
    for g in (grid, grid.refined()):
        if kind == "spinor":
            out.append(residual_check(synthesize_spinor(tau, h, g), tau, h, g))
        else:
            phi, psi = eigenfields(tau, h, g)
            out.append(residual_check(phi if kind == "phi" else psi, tau, h, g, component=kind))
    return out[0], out[1], out[0] / out[1]


# export ---------------------------------------------------------------------

MAGIC = b"PSGRID01"
# header: magic, uint32 nx, uint32 ny, uint32 ncomp, float64 x0, x1, y0, y1;
# then ncomp float64 arrays of shape (ny, nx), row-major, little endian
_HEADER = struct.Struct("<8sIII4d")


def write_binary(path, grid: FieldGrid, *arrays: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, grid.nx, grid.ny, len(arrays),
                              grid.x0, grid.x1, grid.y0, grid.y1))
        for a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def read_binary(path) -> tuple[FieldGrid, list[np.ndarray]]:
    with open(path, "rb") as fh:
        magic, nx, ny, nc, x0, x1, y0, y1 = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != MAGIC:
            raise ValueError("not a field grid file")
        grid = FieldGrid(x0, x1, y0, y1, nx, ny)
        arrays = [np.frombuffer(fh.read(8 * nx * ny), dtype="<f8").reshape(ny, nx).copy()
                  for _ in range(nc)]
    return grid, arrays


def write_csv(path, grid: FieldGrid, names: list[str], *arrays: np.ndarray) -> None:
    X, Y = grid.mesh()
    cols = [X.ravel(), Y.ravel()] + [a.ravel() for a in arrays]
    with open(path, "w") as fh:
        fh.write(",".join(["x", "y", *names]) + "\n")
        for row in zip(*cols):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
