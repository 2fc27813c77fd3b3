"""Bessel functions J0 and J1 of real argument.

Power series up to |z| = 12, Hankel's asymptotic expansion (truncated at its
smallest term) beyond.
"""

from __future__ import annotations

import math

import numpy as np

CROSSOVER = 12.0
_MAX_SERIES_TERMS = 80
_MAX_ASYMP_TERMS = 60


def _series(order: int, z: np.ndarray) -> np.ndarray:
    x = z / 2
    x2 = x * x
    term = np.ones_like(z) if order == 0 else x.copy()
    total = term.copy()
    for k in range(1, _MAX_SERIES_TERMS):
        term = -term * x2 / (k * (k + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel(order: int, z: np.ndarray) -> np.ndarray:
    mu = 4.0 * order * order
    P = np.ones_like(z)
    Q = np.zeros_like(z)
    term = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, _MAX_ASYMP_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        mag = np.abs(term)
        active &= mag < prev
        if not active.any():
            break
        # a_k/z^k enters P (even k) or Q (odd k) with sign (-1)^(k//2)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P = np.where(active, P + sign * term, P)
        else:
            Q = np.where(active, Q + sign * term, Q)
        prev = np.where(active, mag, prev)
        active &= mag > 1e-17
    chi = z - (0.5 * order + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * z)) * (P * np.cos(chi) - Q * np.sin(chi))


def bessel_j(order: int, z):
    """J_order(z) for order 0 or 1; accepts scalars or arrays."""
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are implemented")
    z_arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z_arr)):
        raise ValueError("bessel_j needs finite arguments")
    a = np.abs(z_arr)
    out = np.empty_like(a)
    small = a <= CROSSOVER
    if small.any():
        out[small] = _series(order, a[small])
    if (~small).any():
        out[~small] = _hankel(order, a[~small])
    if order == 1:
        out = np.where(z_arr < 0, -out, out)
    return float(out) if out.ndim == 0 else out


def j0(z):
    return bessel_j(0, z)


def j1(z):
    return bessel_j(1, z)
