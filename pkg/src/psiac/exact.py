"""Exact rational scalars, matrices and polynomials.

``fractions.Fraction`` is the scalar: it keeps numerator and denominator in
lowest terms with a positive denominator, which is all we need. Matrices and
polynomials are small immutable wrappers around tuples of Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

from .errors import SingularMatrix

Rational = Fraction


def to_rational(value) -> Fraction:
    """Convert ints, Fractions, floats (exactly) or "p/q" strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def rat_str(q: Fraction) -> str:
    """Serialize as "p/q" (denominator always written)."""
    q = to_rational(q)
    return f"{q.numerator}/{q.denominator}"


def binom(n: int, k: int) -> Fraction:
    if k < 0 or n < 0 or k > n:
        return Fraction(0)
    return Fraction(comb(n, k))


def multi_indices(length: int, total: int):
    """All tuples of ``length`` non-negative ints summing to ``total``."""
    if length == 0:
        if total == 0:
            yield ()
        return
    for combo in combinations_with_replacement(range(length), total):
        alpha = [0] * length
        for c in combo:
            alpha[c] += 1
        yield tuple(alpha)


class RatMatrix:
    """Dense row-major matrix of Fractions. Immutable."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(to_rational(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def from_rows(cls, rows) -> RatMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(n, n, [int(i == j) for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diag(cls, values) -> RatMatrix:
        values = list(values)
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def column(cls, values) -> RatMatrix:
        values = list(values)
        return cls(len(values), 1, values)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def transpose(self) -> RatMatrix:
        return RatMatrix(self.cols, self.rows,
                         [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def reverse_rows(self) -> RatMatrix:
        return RatMatrix.from_rows(self.to_rows()[::-1])

    def reverse_cols(self) -> RatMatrix:
        return RatMatrix.from_rows([r[::-1] for r in self.to_rows()])

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return RatMatrix(self.rows, other.cols, out)

    def __add__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, s) -> RatMatrix:
        s = to_rational(s)
        return RatMatrix(self.rows, self.cols, [s * e for e in self.entries])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.rows))
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def to_float(self):
        import numpy as np
        return np.array([float(e) for e in self.entries], dtype=float).reshape(self.rows, self.cols)

    def to_strings(self) -> list:
        return [[rat_str(e) for e in self.row(i)] for i in range(self.rows)]


def rat_solve(A: RatMatrix, B: RatMatrix) -> RatMatrix:
    """Solve ``A X = B`` exactly by Gauss-Jordan elimination.

    Pivots are chosen by largest absolute value in the column; with exact
    arithmetic this only matters for keeping intermediate fractions small.
    """
    n = A.rows
    if A.cols != n:
        raise ValueError("A must be square")
    if B.rows != n:
        raise ValueError("B.rows must equal A.rows")
    m = B.cols
    work = [list(A.row(i)) + list(B.row(i)) for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(work[r][col]))
        if work[piv][col] == 0:
            raise SingularMatrix(f"no pivot in column {col}")
        work[col], work[piv] = work[piv], work[col]
        prow = work[col]
        inv = 1 / prow[col]
        prow[:] = [e * inv for e in prow]
        for r in range(n):
            if r == col:
                continue
            f = work[r][col]
            if f:
                row = work[r]
                for c in range(col, n + m):
                    if prow[c]:
                        row[c] -= f * prow[c]
    return RatMatrix(n, m, [e for row in work for e in row[n:]])


def rat_inverse(A: RatMatrix) -> RatMatrix:
    return rat_solve(A, RatMatrix.identity(A.rows))


class RatPoly:
    """Dense univariate polynomial, constant term first.

    Trailing zeros are stripped, so the zero polynomial has no coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [to_rational(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    @classmethod
    def constant(cls, c) -> RatPoly:
        return cls([c])

    @classmethod
    def monomial(cls, power: int, c=1) -> RatPoly:
        return cls([0] * power + [c])

    @classmethod
    def linear(cls, c0, c1) -> RatPoly:
        return cls([c0, c1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other) -> RatPoly:
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return RatPoly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> RatPoly:
        return RatPoly([-a for a in self.coeffs])

    def __sub__(self, other) -> RatPoly:
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> RatPoly:
        return _as_poly(other) - self

    def __mul__(self, other) -> RatPoly:
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RatPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> RatPoly:
        out = RatPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatPoly([other])
        if not isinstance(other, RatPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RatPoly({[str(c) for c in self.coeffs]})"

    def derivative(self, order: int = 1) -> RatPoly:
        c = list(self.coeffs)
        for _ in range(order):
            c = [i * c[i] for i in range(1, len(c))]
        return RatPoly(c)

    def antiderivative(self) -> RatPoly:
        return RatPoly([0] + [a / (i + 1) for i, a in enumerate(self.coeffs)])

    def compose_linear(self, alpha, beta) -> RatPoly:
        """Return ``x -> p(alpha*x + beta)``."""
        lin = RatPoly([beta, alpha])
        out = RatPoly()
        for a in reversed(self.coeffs):
            out = out * lin + a
        return out

    def to_strings(self) -> list:
        return [rat_str(c) for c in self.coeffs]


def _as_poly(x) -> RatPoly:
    if isinstance(x, RatPoly):
        return x
    return RatPoly([x])


def poly_eval(p: RatPoly, x):
    """Horner evaluation; exact for Fraction/int ``x``."""
    acc = 0
    for a in reversed(p.coeffs):
        acc = acc * x + a
    return acc if p.coeffs else (Fraction(0) if isinstance(x, (int, Fraction)) else 0 * x)


def integrate_on(p: RatPoly, a, b) -> Fraction:
    """Exact integral of ``p`` over ``[a, b]``."""
    a, b = to_rational(a), to_rational(b)
    if a > b:
        raise ValueError("integrate_on requires a <= b")
    P = p.antiderivative()
    return poly_eval(P, b) - poly_eval(P, a)
