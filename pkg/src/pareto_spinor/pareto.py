"""Pareto critical sets of pairs of functions of two variables.

A point is Pareto critical when no direction increases both functions to
first order; for two functions this happens exactly when a convex combination
of the two gradients vanishes.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

REGULAR = "Regular"
CRITICAL = "Critical"


@dataclass(frozen=True)
class ParetoLabel:
    kind: str
    rank: int
    multiplier: tuple[float, float] | None = None

    @property
    def critical(self) -> bool:
        return self.kind == CRITICAL


def _best_multiplier(g1: np.ndarray, g2: np.ndarray) -> tuple[float, float]:
    """Minimizer over the simplex of ``|l1 g1 + l2 g2|``."""
    d = g1 - g2
    dd = float(d @ d)
    if dd == 0.0:
        return 0.5, 0.5
    lam = min(1.0, max(0.0, -float(g2 @ d) / dd))
    return lam, 1.0 - lam


def classify_jacobian(g1, g2=None, tol: float = 1e-9, abs_tol: float = 0.0) -> ParetoLabel:
    """Classify a point from the gradients ``g1``, ``g2`` of the two utilities.

    ``g1`` may also be a 2x2 Jacobian whose rows are the gradients. The point is
    critical when some ``l`` in the 1-simplex gives
    ``|l1 g1 + l2 g2| <= max(tol * max(1, |g1|, |g2|), abs_tol)``; ``abs_tol``
    lets grid scans widen the test to the local grid scale.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g2 is None:
        J = np.asarray(g1, dtype=float)
        g1, g2 = J[0], J[1]
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    n1, n2 = float(np.linalg.norm(g1)), float(np.linalg.norm(g2))
    thr = max(tol * max(1.0, n1, n2), abs_tol)

    if max(n1, n2) < thr:
        return ParetoLabel(CRITICAL, 0, (0.5, 0.5))
    s = np.linalg.svd(np.vstack([g1, g2]), compute_uv=False)
    rank = int(np.sum(s > thr))
    l1, l2 = _best_multiplier(g1, g2)
    if float(np.linalg.norm(l1 * g1 + l2 * g2)) <= thr:
        return ParetoLabel(CRITICAL, min(rank, 1), (l1, l2))
    return ParetoLabel(REGULAR, rank, None)


def classify_many(G1: np.ndarray, G2: np.ndarray, tol: float = 1e-9, abs_tol=0.0):
    """Vectorized :func:`classify_jacobian` over arrays of shape (..., 2).

    Returns ``(critical, rank, lam1)`` arrays; ``lam1`` is NaN at regular points.
    """
    G1 = np.asarray(G1, float)
    G2 = np.asarray(G2, float)
    n1 = np.linalg.norm(G1, axis=-1)
    n2 = np.linalg.norm(G2, axis=-1)
    thr = np.maximum(tol * np.maximum(1.0, np.maximum(n1, n2)), abs_tol)

    J = np.stack([G1, G2], axis=-2)
    s = np.linalg.svd(J, compute_uv=False)
    rank = np.sum(s > thr[..., None], axis=-1)

    d = G1 - G2
    dd = np.sum(d * d, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = np.where(dd > 0, -np.sum(G2 * d, axis=-1) / np.where(dd > 0, dd, 1.0), 0.5)
    lam = np.clip(lam, 0.0, 1.0)
    comb = lam[..., None] * G1 + (1 - lam)[..., None] * G2
    critical = np.linalg.norm(comb, axis=-1) <= thr
    rank0 = np.maximum(n1, n2) < thr
    lam = np.where(rank0, 0.5, lam)
    critical |= rank0
    rank = np.where(rank0, 0, np.where(critical, np.minimum(rank, 1), rank))
    lam = np.where(critical, lam, np.nan)
    return critical, rank, lam


def direction_oracle(g1, g2, K: int = 1440, tol: float = 1e-9) -> bool:
    """Brute-force test of whether no direction increases both utilities.

    Scans ``K`` equally spaced unit directions and returns True when none has
    ``g1.v > tol`` and ``g2.v > tol``.
    """
    if K < 8:
        raise ValueError("need at least 8 directions")
    ang = 2 * np.pi * np.arange(K) / K
    V = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    ok = (V @ np.asarray(g1, float) > tol) & (V @ np.asarray(g2, float) > tol)
    return not bool(ok.any())


def direction_oracle_many(G1, G2, K: int = 1440, tol: float = 1e-9) -> np.ndarray:
    ang = 2 * np.pi * np.arange(K) / K
    V = np.stack([np.cos(ang), np.sin(ang)], axis=0)
    G1 = np.asarray(G1, float).reshape(-1, 2)
    G2 = np.asarray(G2, float).reshape(-1, 2)
    out = np.empty(len(G1), dtype=bool)
    for start in range(0, len(G1), 4096):
        sl = slice(start, start + 4096)
        ok = (G1[sl] @ V > tol) & (G2[sl] @ V > tol)
        out[sl] = ~ok.any(axis=1)
    return out


# quadratic pairs ------------------------------------------------------------

class DegeneratePencilError(ValueError):
    def __init__(self, message, common_kernel):
        super().__init__(message)
        self.common_kernel = common_kernel


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x) if isinstance(x, int) else x


@dataclass(frozen=True)
class QuadraticPair:
    """Hessians of ``u_i(x) = x^T A_i x / 2``, each given as ``(m11, m12, m22)``."""

    A1: tuple
    A2: tuple

    def __post_init__(self):
        for A in (self.A1, self.A2):
            if len(A) != 3:
                raise ValueError("symmetric 2x2 matrices are given as (m11, m12, m22)")

    @staticmethod
    def _full(A):
        return np.array([[float(A[0]), float(A[1])], [float(A[1]), float(A[2])]])

    def hessians(self):
        return self._full(self.A1), self._full(self.A2)

    def gradients(self, x1, x2):
        """Gradient arrays ``(G1, G2)`` of shape (..., 2) at the points (x1, x2)."""
        A1, A2 = self.hessians()
        X = np.stack([np.asarray(x1, float), np.asarray(x2, float)], axis=-1)
        return X @ A1.T, X @ A2.T


@dataclass
class PencilLine:
    lam: object
    direction: tuple
    exact: bool

    def to_json(self):
        return {
            "lambda": str(self.lam) if self.exact else float(self.lam),
            "direction": [str(c) if self.exact else float(c) for c in self.direction],
            "exact": self.exact,
        }


@dataclass
class ExactStrata:
    lines: list[PencilLine] = field(default_factory=list)
    origin_critical: bool = True
    pencil_roots: list = field(default_factory=list)
    whole_plane: bool = False

    def to_json(self):
        return {
            "origin_critical": self.origin_critical,
            "whole_plane": self.whole_plane,
            "pencil_roots": [str(r) if isinstance(r, Fraction) else float(r)
                             for r in self.pencil_roots],
            "lines": [ln.to_json() for ln in self.lines],
        }


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _kernel(m11, m12, m22):
    if m11 == 0 and m12 == 0 and m22 == 0:
        return None
    if m11 != 0 or m12 != 0:
        return (-m12, m11)
    return (m22, -m12)


def pencil_matrix(pair: QuadraticPair, lam):
    return tuple(lam * a + (1 - lam) * b for a, b in zip(pair.A1, pair.A2))


def quadratic_pareto_set(pair: QuadraticPair) -> ExactStrata:
    """Pareto critical set of a pair of quadratic forms.

    The gradients are ``A_1 x`` and ``A_2 x``, so ``x`` is critical iff
    ``(l A_1 + (1-l) A_2) x = 0`` for some ``l`` in [0, 1]. The roots of the
    pencil determinant (a polynomial of degree <= 2 in ``l``) are found exactly
    when the data are rational and the discriminant is a rational square.
    """
    exact = all(isinstance(c, (int, Fraction)) for c in (*pair.A1, *pair.A2))
    conv = Fraction if exact else float
    A1 = tuple(conv(c) for c in pair.A1)
    A2 = tuple(conv(c) for c in pair.A2)
    if all(c == 0 for c in A1 + A2):
        raise ValueError("both quadratic forms vanish")

    B = tuple(x - y for x, y in zip(A1, A2))
    c0 = A2[0] * A2[2] - A2[1] ** 2
    c1 = A2[0] * B[2] + B[0] * A2[2] - 2 * A2[1] * B[1]
    c2 = B[0] * B[2] - B[1] ** 2

    if c0 == 0 and c1 == 0 and c2 == 0:
        k1, k2 = _kernel(*A1), _kernel(*A2)
        common = None
        if k1 is None:
            common = k2
        elif k2 is None:
            common = k1
        elif k1[0] * k2[1] - k1[1] * k2[0] == 0:
            common = k1
        raise DegeneratePencilError(
            f"degenerate pencil: det(l A1 + (1-l) A2) vanishes identically; common kernel {common}",
            common,
        )

    if c2 == 0:
        roots = [] if c1 == 0 else [-c0 / c1]
        is_exact = exact
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc < 0:
            roots, is_exact = [], exact
        else:
            sq = _rational_sqrt(disc) if exact else None
            if sq is not None:
                roots = [(-c1 - sq) / (2 * c2), (-c1 + sq) / (2 * c2)]
                is_exact = True
            else:
                s = math.sqrt(float(disc))
                roots = [(-float(c1) - s) / (2 * float(c2)), (-float(c1) + s) / (2 * float(c2))]
                is_exact = False
    roots = sorted(set(r for r in roots if 0 <= r <= 1))

    out = ExactStrata(pencil_roots=roots)
    for r in roots:
        M = pencil_matrix(pair if not is_exact else QuadraticPair(A1, A2), r)
        if not is_exact:
            # floating root: pick the kernel of the better conditioned row
            M = tuple(float(r) * float(a) + (1 - float(r)) * float(b) for a, b in zip(A1, A2))
            row1, row2 = np.hypot(M[0], M[1]), np.hypot(M[1], M[2])
            if max(row1, row2) < 1e-14:
                out.whole_plane = True
                continue
            k = (-M[1], M[0]) if row1 >= row2 else (M[2], -M[1])
            n = math.hypot(*k)
            out.lines.append(PencilLine(r, (k[0] / n, k[1] / n), False))
            continue
        k = _kernel(*M)
        if k is None:
            out.whole_plane = True
            continue
        out.lines.append(PencilLine(r, k, True))
    return out


# grid scans -----------------------------------------------------------------

@dataclass
class SmoothMap:
    """A map of two variables described by its values and analytic Jacobian.

    ``jacobian(x, y)`` returns ``(G1, G2)``, arrays of shape (..., 2) holding the
    gradients of the two components.
    """

    value: Callable
    jacobian: Callable
    name: str = "map"
    periodic: tuple[bool, bool] = (False, False)
    half_open: tuple[bool, bool] = (False, False)


def quadratic_map(pair: QuadraticPair) -> SmoothMap:
    A1, A2 = pair.hessians()

    def value(x, y):
        X = np.stack([np.asarray(x, float), np.asarray(y, float)], axis=-1)
        return (0.5 * np.einsum("...i,ij,...j", X, A1, X),
                0.5 * np.einsum("...i,ij,...j", X, A2, X))

    return SmoothMap(value, pair.gradients, name="quadratic")


def identity_map() -> SmoothMap:
    def jac(x, y):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        G1 = np.zeros(shape + (2,))
        G2 = np.zeros(shape + (2,))
        G1[..., 0] = 1.0
        G2[..., 1] = 1.0
        return G1, G2

    return SmoothMap(lambda x, y: (np.asarray(x, float), np.asarray(y, float)), jac,
                     name="identity")


def klein_bottle_utilities(r: float) -> SmoothMap:
    """``u = (sqrt(x1^2 + x2^2), x3)`` on the figure-eight immersed Klein bottle.

    With ``c = cos(theta/2)``, ``s = sin(theta/2)`` the composite is
    ``(r + c sin v - s sin 2v, s sin v + c sin 2v)``; ``r > 2`` keeps the radial
    coordinate positive so the square root needs no case split.
    """
    if not r > 2:
        raise ValueError("the figure-eight immersion needs r > 2")

    def value(theta, v):
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return (r + c * np.sin(v) - s * np.sin(2 * v), s * np.sin(v) + c * np.sin(2 * v))

    def jac(theta, v):
        theta, v = np.broadcast_arrays(np.asarray(theta, float), np.asarray(v, float))
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        sv, s2v, cv, c2v = np.sin(v), np.sin(2 * v), np.cos(v), np.cos(2 * v)
        G1 = np.stack([-0.5 * s * sv - 0.5 * c * s2v, c * cv - 2 * s * c2v], axis=-1)
        G2 = np.stack([0.5 * c * sv - 0.5 * s * s2v, s * cv + 2 * c * c2v], axis=-1)
        return G1, G2

    # v is 2pi-periodic; theta is glued to itself only through v -> -v, so it is not
    return SmoothMap(value, jac, name=f"klein(r={r})", periodic=(False, True),
                     half_open=(True, True))


KLEIN_RECT = (-math.pi, math.pi, 0.0, 2 * math.pi)


@dataclass
class LabeledGrid:
    x: np.ndarray
    y: np.ndarray
    critical: np.ndarray
    rank: np.ndarray
    lam1: np.ndarray
    jac_norm: np.ndarray
    valid: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    grid_tol: np.ndarray
    periodic: tuple[bool, bool] = (False, False)
    smap: SmoothMap | None = None

    @property
    def shape(self):
        return self.critical.shape

    def critical_points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.y, indexing="xy")
        return np.stack([X[self.critical], Y[self.critical]], axis=1)

    def write_csv(self, path, xname="x1", yname="x2"):
        X, Y = np.meshgrid(self.x, self.y, indexing="xy")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([xname, yname, "kind", "rank", "lambda1", "lambda2", "jac_norm"])
            for i in range(self.shape[0]):
                for j in range(self.shape[1]):
                    if not self.valid[i, j]:
                        kind = "Invalid"
                    else:
                        kind = CRITICAL if self.critical[i, j] else REGULAR
                    l1 = self.lam1[i, j]
                    w.writerow([
                        repr(float(X[i, j])), repr(float(Y[i, j])), kind, int(self.rank[i, j]),
                        "" if np.isnan(l1) else repr(float(l1)),
                        "" if np.isnan(l1) else repr(float(1 - l1)),
                        repr(float(self.jac_norm[i, j])),
                    ])


def _worker_count() -> int:
    env = os.environ.get("PARETO_SPINOR_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _grid_scale(G1, G2, periodic):
    # half the largest change of either gradient to an axis neighbour
    scale = np.zeros(G1.shape[:2])
    for G in (G1, G2):
        for axis in (0, 1):
            if periodic[1 - axis]:
                diff = np.linalg.norm(np.roll(G, -1, axis=axis) - G, axis=-1)
                back = np.roll(diff, 1, axis=axis)
            else:
                diff = np.linalg.norm(np.diff(G, axis=axis), axis=-1)
                pad = [(0, 0), (0, 0)]
                pad[axis] = (0, 1)
                fwd = np.pad(diff, pad, mode="edge")
                pad[axis] = (1, 0)
                back = np.pad(diff, pad, mode="edge")
                diff = fwd
            scale = np.maximum(scale, np.maximum(diff, back))
    return 0.5 * scale


def grid_scan(
    smap: SmoothMap,
    rect: Sequence[float],
    res: tuple[int, int] | int,
    tol: float = 1e-9,
    adaptive: bool = False,
    endpoint: bool | None = None,
) -> LabeledGrid:
    """Label every node of a rectangular grid as Regular or Critical.

    ``rect`` is ``(x0, x1, y0, y1)`` and ``res`` is ``(nx, ny)``. With
    ``adaptive=True`` the criticality and rank tests are additionally widened to
    half the local change of the gradients between neighbouring nodes, so that
    curves of critical points lying between nodes are still picked up.
    ``endpoint`` defaults to False along half-open axes of the map's domain.
    """
    nx, ny = (res, res) if isinstance(res, int) else res
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 nodes per axis")
    x0, x1, y0, y1 = rect
    px, py = smap.periodic
    hx, hy = smap.half_open
    xs = np.linspace(x0, x1, nx, endpoint=(not hx) if endpoint is None else endpoint)
    ys = np.linspace(y0, y1, ny, endpoint=(not hy) if endpoint is None else endpoint)
    X, Y = np.meshgrid(xs, ys, indexing="xy")

    nthreads = _worker_count()
    chunks = np.array_split(np.arange(ny), max(1, min(nthreads, ny)))
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            parts = list(ex.map(lambda rows: smap.jacobian(X[rows], Y[rows]), chunks))
    else:
        parts = [smap.jacobian(X[rows], Y[rows]) for rows in chunks]
    G1 = np.concatenate([p[0] for p in parts], axis=0)
    G2 = np.concatenate([p[1] for p in parts], axis=0)

    valid = np.all(np.isfinite(G1), axis=-1) & np.all(np.isfinite(G2), axis=-1)
    G1 = np.where(valid[..., None], G1, 0.0)
    G2 = np.where(valid[..., None], G2, 0.0)
    abs_tol = _grid_scale(G1, G2, (px, py)) if adaptive else np.zeros((ny, nx))
    critical, rank, lam1 = classify_many(G1, G2, tol, abs_tol)
    critical &= valid
    lam1 = np.where(valid, lam1, np.nan)
    jac_norm = np.sqrt(np.sum(G1 ** 2, axis=-1) + np.sum(G2 ** 2, axis=-1))
    n1 = np.linalg.norm(G1, axis=-1)
    n2 = np.linalg.norm(G2, axis=-1)
    grid_tol = np.maximum(tol * np.maximum(1.0, np.maximum(n1, n2)), abs_tol)
    return LabeledGrid(xs, ys, critical, rank, lam1, jac_norm, valid, G1, G2, grid_tol,
                       (px, py), smap)


def oracle_agreement(grid: LabeledGrid, K: int = 1440, tol: float = 1e-9) -> float:
    """Fraction of valid nodes where the grid label matches :func:`direction_oracle`."""
    orc = direction_oracle_many(grid.G1, grid.G2, K, tol).reshape(grid.shape)
    v = grid.valid
    return float(np.mean(orc[v] == grid.critical[v]))


# strata ---------------------------------------------------------------------

@dataclass
class Stratum:
    nodes: list[tuple[int, int]]
    rank1: int
    rank0: int
    terminal: int

    def to_json(self):
        return {"size": len(self.nodes), "rank1": self.rank1, "rank0": self.rank0,
                "terminal": self.terminal}


@dataclass
class StrataSummary:
    components: list[Stratum]
    rank0_nodes: list[tuple[int, int]]
    terminal_nodes: list[tuple[int, int]]
    terminal_points: list[tuple[float, float, int]] = field(default_factory=list)

    def to_json(self):
        return {
            "n_components": len(self.components),
            "components": [c.to_json() for c in self.components],
            "rank0_nodes": [list(n) for n in self.rank0_nodes],
            "terminal_nodes": [list(n) for n in self.terminal_nodes],
            "terminal_points": [{"x": x, "y": y, "vanishing_gradient": k}
                                for x, y, k in self.terminal_points],
        }


def _merge_wrap(labels: np.ndarray, wrap: tuple[bool, bool]) -> np.ndarray:
    parent = {}

    def find(a):
        while parent.get(a, a) != a:
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    ny, nx = labels.shape
    if wrap[0]:
        for i in range(ny):
            for di in (-1, 0, 1):
                k = i + di
                if 0 <= k < ny and labels[i, nx - 1] and labels[k, 0]:
                    union(labels[i, nx - 1], labels[k, 0])
    if wrap[1]:
        for j in range(nx):
            for dj in (-1, 0, 1):
                k = j + dj
                if 0 <= k < nx and labels[ny - 1, j] and labels[0, k]:
                    union(labels[ny - 1, j], labels[0, k])
    if not parent:
        return labels
    out = labels.copy()
    for lab in np.unique(labels[labels > 0]):
        out[labels == lab] = find(lab)
    return out


def _local_min(a: np.ndarray, periodic: tuple[bool, bool]) -> np.ndarray:
    mode_y = "wrap" if periodic[1] else "edge"
    mode_x = "wrap" if periodic[0] else "edge"
    padded = np.pad(a, ((1, 1), (0, 0)), mode=mode_y)
    padded = np.pad(padded, ((0, 0), (1, 1)), mode=mode_x)
    out = np.ones(a.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                out &= a <= padded[1 + di: 1 + di + a.shape[0], 1 + dj: 1 + dj + a.shape[1]]
    return out


def terminal_mask(grid: LabeledGrid) -> np.ndarray:
    """Critical nodes nearest to a point where one of the gradients vanishes.

    Segments of the critical set can only end where the multiplier reaches a
    vertex of the simplex, i.e. where one gradient is zero. A node is marked
    when that gradient's norm is within the grid tolerance and is a local
    minimum over the 8 neighbours.
    """
    mask = np.zeros(grid.shape, dtype=bool)
    for G in (grid.G1, grid.G2):
        n = np.linalg.norm(G, axis=-1)
        mask |= (n <= grid.grid_tol) & _local_min(n, grid.periodic)
    return mask & grid.critical & grid.valid


def _newton_zero(jac: Callable, k: int, p0, h: float = 1e-6, max_iter: int = 50):
    p = np.array(p0, dtype=float)
    for _ in range(max_iter):
        g = jac(p[0], p[1])[k]
        D = np.empty((2, 2))
        for c in range(2):
            e = np.zeros(2)
            e[c] = h
            D[:, c] = (jac(*(p + e))[k] - jac(*(p - e))[k]) / (2 * h)
        try:
            step = np.linalg.solve(D, -g)
        except np.linalg.LinAlgError:
            return p, False
        p = p + step
        if np.linalg.norm(step) < 1e-13:
            return p, True
    return p, bool(np.linalg.norm(jac(p[0], p[1])[k]) < 1e-10)


def terminal_points(grid: LabeledGrid, tol: float = 1e-7) -> list[tuple[float, float, int]]:
    """Refine the terminal nodes to zeros of the vanishing gradient.

    Each candidate from :func:`terminal_mask` is polished by Newton's method
    (finite-difference derivative of the analytic Jacobian); converged points
    farther than three grid cells from their seed, or outside the scanned
    rectangle, are dropped, and the rest are deduplicated.
    """
    if grid.smap is None:
        return []
    cand = terminal_mask(grid)
    dx = grid.x[1] - grid.x[0]
    dy = grid.y[1] - grid.y[0]
    span = (grid.x[-1] - grid.x[0] + dx, grid.y[-1] - grid.y[0] + dy)
    found: list[tuple[float, float, int]] = []
    for i, j in zip(*np.nonzero(cand)):
        n1 = np.linalg.norm(grid.G1[i, j])
        n2 = np.linalg.norm(grid.G2[i, j])
        k = 0 if n1 <= n2 else 1
        p, ok = _newton_zero(grid.smap.jacobian, k, (grid.x[j], grid.y[i]))
        if not ok:
            continue
        off = p - (grid.x[j], grid.y[i])
        for ax in (0, 1):
            if grid.periodic[ax]:
                off[ax] -= span[ax] * np.round(off[ax] / span[ax])
                lo = (grid.x, grid.y)[ax][0]
                p[ax] = lo + (p[ax] - lo) % span[ax]
        if abs(off[0]) > 3 * dx or abs(off[1]) > 3 * dy:
            continue
        dup = False
        for q in found:
            d = np.array([p[0] - q[0], p[1] - q[1]])
            for ax in (0, 1):
                if grid.periodic[ax]:
                    d[ax] -= span[ax] * np.round(d[ax] / span[ax])
            if np.linalg.norm(d) < tol and q[2] == k + 1:
                dup = True
                break
        if not dup:
            found.append((float(p[0]), float(p[1]), k + 1))
    return found


def extract_strata(grid: LabeledGrid, wrap: tuple[bool, bool] = (False, False)) -> StrataSummary:
    """8-connected components of critical nodes with their rank profile.

    ``wrap`` optionally identifies opposite edges (without any twist).
    """
    labels, n = ndimage.label(grid.critical, structure=np.ones((3, 3), dtype=int))
    if n and any(wrap):
        labels = _merge_wrap(labels, wrap)
    term = terminal_mask(grid)
    comps = []
    for lab in sorted(np.unique(labels[labels > 0])):
        mask = labels == lab
        idx = list(zip(*np.nonzero(mask)))
        comps.append(Stratum(
            nodes=[(int(i), int(j)) for i, j in idx],
            rank1=int(np.sum(grid.rank[mask] == 1)),
            rank0=int(np.sum(grid.rank[mask] == 0)),
            terminal=int(np.sum(term[mask])),
        ))
    rank0 = [(int(i), int(j)) for i, j in zip(*np.nonzero(grid.critical & (grid.rank == 0)))]
    terminal = [(int(i), int(j)) for i, j in zip(*np.nonzero(term))]
    return StrataSummary(comps, rank0, terminal, terminal_points(grid))


def cluster_nodes(nodes: Sequence[tuple[int, int]], radius: float,
                  shape: tuple[int, int] | None = None,
                  wrap: tuple[bool, bool] = (False, False)) -> list[list[tuple[int, int]]]:
    """Single-linkage clusters of grid nodes closer than ``radius`` grid cells."""
    nodes = list(nodes)
    parent = list(range(len(nodes)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            di = abs(nodes[a][0] - nodes[b][0])
            dj = abs(nodes[a][1] - nodes[b][1])
            if shape is not None:
                if wrap[1]:
                    di = min(di, shape[0] - di)
                if wrap[0]:
                    dj = min(dj, shape[1] - dj)
            if math.hypot(di, dj) <= radius:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list] = {}
    for k, node in enumerate(nodes):
        groups.setdefault(find(k), []).append(node)
    return list(groups.values())
