"""Exact Gaussian-rational scalars and a small exact linear-algebra helper."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class QI:
    """A Gaussian rational ``re + i*im`` with ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> QI:
        if isinstance(value, QI):
            return value
        if isinstance(value, (int, Rational)):
            return cls(value)
        if isinstance(value, complex):
            return cls(_exact_float(value.real), _exact_float(value.imag))
        if isinstance(value, float):
            return cls(_exact_float(value))
        raise TypeError(f"cannot make an exact scalar from {value!r}")

    def __add__(self, other):
        other = QI.coerce(other)
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QI.coerce(other))

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        other = QI.coerce(other)
        return QI(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QI.coerce(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("exact division by zero")
        num = self * other.conjugate()
        return QI(num.re / den, num.im / den)

    def conjugate(self) -> QI:
        return QI(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self})"

    def __str__(self):
        if not self.im:
            return _frac_str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"({_frac_str(self.re)}{sign}{_imag_str(abs(self.im))})"


I = QI(0, 1)
ONE = QI(1)
ZERO = QI(0)


def _exact_float(x: float) -> Fraction:
    f = Fraction(x)
    # matrix entries are small Gaussian integers; refuse anything else
    if f.denominator > 1 << 20:
        raise ValueError(f"{x!r} is not an exactly representable small rational")
    return f


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"({f})"


def _imag_str(f: Fraction) -> str:
    if f == 1:
        return "i"
    if f == -1:
        return "-i"
    return f"{_frac_str(f)}*i"


def exact_rank(rows) -> int:
    """Rank over Q(i) of a list of equal-length rows (entries coercible to QI)."""
    mat = [[QI.coerce(v) for v in row] for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        piv = mat[rank][col]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                factor = mat[r][col] / piv
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
