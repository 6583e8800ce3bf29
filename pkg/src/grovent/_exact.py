"""Exact scalar arithmetic used by the orbit classifiers.

Provides complex numbers with rational parts, continued-fraction
rationalisation of floats, and small exact matrix helpers.  Floats never
enter this layer silently; they must be rationalised first.
"""

from __future__ import annotations

import math
from fractions import Fraction


class QC:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero complex rational")
        return QC(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    def __rtruediv__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __eq__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QC({self.re}, {self.im})"


def _as_qc(x):
    if isinstance(x, QC):
        return x
    if isinstance(x, (int, Fraction)):
        return QC(x)
    return NotImplemented


def scalar_abs(x) -> float:
    """|x| as a float, for exact or floating scalars."""
    if isinstance(x, QC):
        return math.hypot(float(x.re), float(x.im))
    if isinstance(x, Fraction):
        return abs(float(x))
    return abs(complex(x))


def simplest_in_interval(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator in the closed interval [lo, hi]."""
    if hi < lo:
        lo, hi = hi, lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_in_interval(-hi, -lo)
    # 0 < lo <= hi: take the smallest integer inside, else recurse on the
    # fractional part (the continued-fraction / Stern-Brocot walk).
    ceil_lo = -((-lo.numerator) // lo.denominator)
    if ceil_lo <= hi:
        return Fraction(ceil_lo)
    floor_lo = lo.numerator // lo.denominator
    return floor_lo + 1 / simplest_in_interval(1 / (hi - floor_lo), 1 / (lo - floor_lo))


def nearest_fraction(x: float, tol: float) -> Fraction:
    """Simplest rational within ±tol of x (continued-fraction rounding)."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot rationalise {x}")
    if tol < 0:
        raise ValueError("tol must be non-negative")
    exact = Fraction(x)
    if tol == 0:
        return exact
    t = Fraction(tol)
    return simplest_in_interval(exact - t, exact + t)


def rationalize_scalar(z: complex, tol: float):
    """Rationalise a complex float; returns a Fraction when the result is real."""
    z = complex(z)
    re = nearest_fraction(z.real, tol)
    im = nearest_fraction(z.imag, tol)
    if im == 0:
        return re
    return QC(re, im)


def det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def independent_rows(rows) -> list[int]:
    """Indices of a greedy maximal set of linearly independent rows (exact)."""
    basis = []  # reduced echelon rows, each (pivot_col, row)
    keep = []
    for i, row in enumerate(rows):
        r = list(row)
        for pc, b in basis:
            if r[pc] != 0:
                f = r[pc] / b[pc]
                r = [x - f * y for x, y in zip(r, b)]
        pivot = next((c for c, x in enumerate(r) if x != 0), None)
        if pivot is not None:
            basis.append((pivot, r))
            keep.append(i)
    return keep
