"""Exact arithmetic over Q(sqrt 2), sparse polynomials in (xi, eta, tau) and 2x2
polynomial matrices.

All objects are immutable. Polynomials always carry three exponent slots
(xi, eta, tau); a polynomial that never mentions tau is simply a polynomial in
two variables.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

VARS = ("xi", "eta", "tau")
_VAR_INDEX = {"xi": 0, "eta": 1, "tau": 2, "ξ": 0, "η": 1, "τ": 2}
SQRT2 = math.sqrt(2.0)

Monomial = tuple[int, int, int]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class QSqrt2:
    """An element ``a + b*sqrt(2)`` of Q(sqrt 2) with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _as_fraction(a))
        object.__setattr__(self, "b", _as_fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @classmethod
    def coerce(cls, x) -> "QSqrt2":
        if isinstance(x, QSqrt2):
            return x
        return cls(x, 0)

    @property
    def rat_part(self) -> Fraction:
        return self.a

    @property
    def sqrt2_part(self) -> Fraction:
        return self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "QSqrt2":
        """Galois conjugate ``a - b*sqrt(2)``."""
        return QSqrt2(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def inv(self) -> "QSqrt2":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(sqrt 2)")
        n = self.norm()
        return QSqrt2(self.a / n, -self.b / n)

    def __truediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return QSqrt2.coerce(other) * self.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result, base = QSqrt2(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT2

    def __repr__(self):
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self):
        return self.to_string()

    def to_string(self) -> str:
        """Serialize as ``"p/q+r/s√2"``, omitting zero parts (zero is ``"0"``)."""
        parts = []
        if self.a != 0:
            parts.append(str(self.a))
        if self.b != 0:
            s = f"{self.b}√2"
            if parts and self.b > 0:
                s = "+" + s
            parts.append(s)
        return "".join(parts) or "0"

    @classmethod
    def parse(cls, text: str) -> "QSqrt2":
        """Inverse of :meth:`to_string`; also accepts ``sqrt2`` for the radical."""
        s = text.replace(" ", "").replace("sqrt2", "√2")
        if not s:
            raise ValueError("empty Q(sqrt 2) literal")
        try:
            if "√2" not in s:
                return cls(Fraction(s))
            if not s.endswith("√2") or s.count("√2") != 1:
                raise ValueError
            body = s[:-2]
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                a, b = body[:cut], body[cut:]
            else:
                a, b = "0", body
            if b in ("", "+", "-"):
                b += "1"
            return cls(Fraction(a), Fraction(b))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a Q(sqrt 2) literal: {text!r}") from None


ZERO = QSqrt2(0)
ONE = QSqrt2(1)
R2 = QSqrt2(0, 1)


def qsqrt2_arith(x: QSqrt2, y: QSqrt2 | None, op: str) -> QSqrt2:
    """Dispatch helper: ``op`` is ``"add"``, ``"mul"`` or ``"inv"`` (inverse of x)."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op in ("inv", "inv-of-x"):
        return x.inv()
    raise ValueError(f"unknown op {op!r}")


def _glex_key(mono: Monomial):
    # descending graded-lex with xi > eta > tau
    return (-sum(mono), tuple(-e for e in mono))


class Polynomial:
    """Sparse polynomial over Q(sqrt 2) in the variables (xi, eta, tau)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None):
        clean: dict[Monomial, QSqrt2] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) == 2:
                mono = mono + (0,)
            if len(mono) != 3 or min(mono) < 0:
                raise ValueError(f"bad exponent tuple {mono}")
            c = QSqrt2.coerce(c)
            if mono in clean:
                c = clean[mono] + c
            if c.is_zero():
                clean.pop(mono, None)
            else:
                clean[mono] = c
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "_terms", terms)
        object.__setattr__(p, "_hash", None)
        return p

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        mono = [0, 0, 0]
        mono[_VAR_INDEX[name]] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def coerce(cls, x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        return cls.constant(x)

    @property
    def terms(self) -> dict[Monomial, QSqrt2]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, QSqrt2]]:
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self._terms.items(), key=lambda kv: _glex_key(kv[0]))

    def coeff(self, mono: Sequence[int]) -> QSqrt2:
        mono = tuple(mono)
        if len(mono) == 2:
            mono = mono + (0,)
        return self._terms.get(mono, ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(m) for m in self._terms), default=-1)

    def uses_tau(self) -> bool:
        return any(m[2] for m in self._terms)

    def __add__(self, other):
        try:
            o = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            s = out[m] + c if m in out else c
            if s.is_zero():
                del out[m]
            else:
                out[m] = s
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return self.mul(other)
        try:
            c = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        if c.is_zero():
            return Polynomial._raw({})
        return Polynomial._raw({m: v * c for m, v in self._terms.items()})

    __rmul__ = __mul__

    def mul(self, other: "Polynomial", max_degree: int | None = None) -> "Polynomial":
        """Product, optionally dropping every term of total degree above ``max_degree``."""
        out: dict[Monomial, QSqrt2] = {}
        for m1, c1 in self._terms.items():
            d1 = m1[0] + m1[1] + m1[2]
            for m2, c2 in other._terms.items():
                if max_degree is not None and d1 + m2[0] + m2[1] + m2[2] > max_degree:
                    continue
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                c = c1 * c2
                if m in out:
                    c = out[m] + c
                out[m] = c
        return Polynomial._raw({m: c for m, c in out.items() if not c.is_zero()})

    def __truediv__(self, other):
        c = QSqrt2.coerce(other)
        return self * c.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Polynomial.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        try:
            return self._terms == Polynomial.coerce(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    def diff(self, var: str | int) -> "Polynomial":
        """Formal partial derivative with respect to ``var``."""
        i = _VAR_INDEX[var] if isinstance(var, str) else int(var)
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                nm = list(m)
                nm[i] -= 1
                out[tuple(nm)] = c * m[i]
        return Polynomial._raw(out)

    def homogeneous_part(self, d: int) -> "Polynomial":
        if d < 0:
            raise ValueError("degree must be non-negative")
        return Polynomial._raw({m: c for m, c in self._terms.items() if sum(m) == d})

    def truncate(self, max_degree: int) -> "Polynomial":
        """Drop all terms of total degree above ``max_degree``."""
        return Polynomial._raw({m: c for m, c in self._terms.items() if sum(m) <= max_degree})

    def eval(self, point: Sequence[float]) -> float:
        """Floating evaluation; ``point`` is (xi, eta) or (xi, eta, tau)."""
        if len(point) not in (2, 3):
            raise ValueError("point must have 2 or 3 coordinates")
        if len(point) == 2 and self.uses_tau():
            raise ValueError("polynomial depends on tau but only (xi, eta) was given")
        x = [float(v) for v in point] + [0.0] * (3 - len(point))
        total = 0.0
        for m, c in self._terms.items():
            total += float(c) * x[0] ** m[0] * x[1] ** m[1] * x[2] ** m[2]
        return total

    __call__ = eval

    def eval_array(self, xi, eta, tau=0.0):
        """Vectorized evaluation on numpy arrays."""
        import numpy as np

        xi, eta, tau = np.asarray(xi, float), np.asarray(eta, float), np.asarray(tau, float)
        total = np.zeros(np.broadcast(xi, eta, tau).shape)
        for m, c in self._terms.items():
            total = total + float(c) * xi ** m[0] * eta ** m[1] * tau ** m[2]
        return total

    def to_json(self) -> list[dict]:
        return [{"exponents": list(m), "coeff": c.to_string()} for m, c in self.items()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "Polynomial":
        return cls({tuple(t["exponents"]): QSqrt2.parse(t["coeff"]) for t in data})

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for m, c in self.items():
            mon = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(("ξ", "η", "τ"), m) if e
            )
            cs = c.to_string()
            if mon:
                out.append(mon if cs == "1" else f"({cs})*{mon}")
            else:
                out.append(f"({cs})")
        return " + ".join(out)


XI = Polynomial.var("xi")
ETA = Polynomial.var("eta")
TAU = Polynomial.var("tau")


def poly_arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def monomials(d: int) -> list[Monomial]:
    """Degree-``d`` monomials in (xi, eta), descending graded-lex order."""
    return [(d - j, j, 0) for j in range(d + 1)]


class PolyMatrix2:
    """2x2 matrix with Polynomial entries, stored row-major."""

    __slots__ = ("entries", "symmetric")

    def __init__(self, entries, symmetric: bool | None = None):
        (a, b), (c, d) = entries
        ents = tuple(Polynomial.coerce(e) for e in (a, b, c, d))
        is_sym = ents[1] == ents[2]
        if symmetric and not is_sym:
            raise ValueError("matrix flagged symmetric but entry(1,2) != entry(2,1)")
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "symmetric", is_sym if symmetric is None else bool(symmetric))

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix2 is immutable")

    @classmethod
    def diag(cls, a, d) -> "PolyMatrix2":
        return cls(((a, 0), (0, d)))

    @classmethod
    def identity(cls) -> "PolyMatrix2":
        return cls.diag(1, 1)

    @classmethod
    def zero(cls) -> "PolyMatrix2":
        return cls.diag(0, 0)

    @classmethod
    def symmetric_from(cls, m11, m12, m22) -> "PolyMatrix2":
        return cls(((m11, m12), (m12, m22)), symmetric=True)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[2 * i + j]

    def rows(self):
        e = self.entries
        return ((e[0], e[1]), (e[2], e[3]))

    def _zip(self, other, f):
        return PolyMatrix2(
            ((f(self.entries[0], other.entries[0]), f(self.entries[1], other.entries[1])),
             (f(self.entries[2], other.entries[2]), f(self.entries[3], other.entries[3])))
        )

    def __add__(self, other):
        return self._zip(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._zip(other, lambda x, y: x - y)

    def __neg__(self):
        return self.map(lambda p: -p)

    def map(self, f) -> "PolyMatrix2":
        e = [f(p) for p in self.entries]
        return PolyMatrix2(((e[0], e[1]), (e[2], e[3])))

    def scale(self, c) -> "PolyMatrix2":
        return self.map(lambda p: p * c)

    def __mul__(self, other):
        if isinstance(other, PolyMatrix2):
            return self.matmul(other)
        return self.scale(other)

    __rmul__ = scale

    def matmul(self, other: "PolyMatrix2", max_degree: int | None = None) -> "PolyMatrix2":
        a, b, c, d = self.entries
        p, q, r, s = other.entries

        def m(x, y):
            return x.mul(y, max_degree)

        return PolyMatrix2(((m(a, p) + m(b, r), m(a, q) + m(b, s)),
                            (m(c, p) + m(d, r), m(c, q) + m(d, s))))

    def transpose(self) -> "PolyMatrix2":
        a, b, c, d = self.entries
        return PolyMatrix2(((a, c), (b, d)))

    T = property(transpose)

    def conjugate_by(self, n: "PolyMatrix2", max_degree: int | None = None) -> "PolyMatrix2":
        """Return ``N M N^T``; the result of a symmetric ``M`` is symmetric."""
        out = n.matmul(self, max_degree).matmul(n.transpose(), max_degree)
        if self.symmetric:
            a, b, _, d = out.entries
            return PolyMatrix2.symmetric_from(a, b, d)
        return out

    def det2(self) -> Polynomial:
        a, b, c, d = self.entries
        return a * d - b * c

    def trace(self) -> Polynomial:
        return self.entries[0] + self.entries[3]

    def homogeneous_part(self, d: int) -> "PolyMatrix2":
        return self.map(lambda p: p.homogeneous_part(d))

    def truncate(self, max_degree: int) -> "PolyMatrix2":
        return self.map(lambda p: p.truncate(max_degree))

    def degree(self) -> int:
        return max(p.degree() for p in self.entries)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.entries)

    def eval(self, point):
        import numpy as np

        return np.array([[p.eval(point) for p in row] for row in self.rows()])

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix2):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def to_json(self) -> list[list]:
        return [[p.to_json() for p in row] for row in self.rows()]

    @classmethod
    def from_json(cls, data) -> "PolyMatrix2":
        return cls([[Polynomial.from_json(p) for p in row] for row in data])

    def __repr__(self):
        (a, b), (c, d) = self.rows()
        return f"PolyMatrix2([[{a}, {b}], [{c}, {d}]])"


def mat_ops(op: str, m: PolyMatrix2, n: PolyMatrix2 | None = None):
    """Dispatch helper for ``conjugate`` (returns N M N^T), ``add``, ``mul`` and ``det2``."""
    if op == "conjugate":
        return m.conjugate_by(n)
    if op == "add":
        return m + n
    if op == "mul":
        return m.matmul(n)
    if op == "det2":
        return m.det2()
    raise ValueError(f"unknown op {op!r}")


def jacobian(u: Sequence[Polynomial]) -> PolyMatrix2:
    """Jacobian of ``(u1, u2)`` in (xi, eta); row i is the gradient of u_i."""
    u1, u2 = u
    return PolyMatrix2(((u1.diff(0), u1.diff(1)), (u2.diff(0), u2.diff(1))))


def iter_degrees(p: Polynomial) -> Iterator[int]:
    return iter(sorted({sum(m) for m in p.terms}))
