"""Truncated formal power series in hbar and the coupling lambda.

The coefficient ring for everything downstream.  Coefficients are exact
(ExactComplex); truncation orders travel with each value and mixed-order
operations take the minimum, so orders never silently inflate.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exact import EC_ONE, ExactComplex

DEFAULT_TRUNC_H = 2
DEFAULT_TRUNC_L = 2


class SeriesError(Exception):
    pass


class ExpOfNonNilpotentConstant(SeriesError):
    """exp of a series with nonzero constant term has no exact expansion."""


class NonInvertibleLeadingTerm(SeriesError):
    """inverse needs an invertible (nonzero) constant term."""


class FormalSeries:
    """Polynomial in (hbar, lambda) truncated at (trunc_h, trunc_l).

    coeff maps (h_power, l_power) -> ExactComplex; zero coefficients are not
    stored and keys never exceed the truncation orders.
    """

    __slots__ = ("coeff", "trunc_h", "trunc_l")

    def __init__(self, coeff=None, trunc_h: int = DEFAULT_TRUNC_H,
                 trunc_l: int = DEFAULT_TRUNC_L):
        clean = {}
        if coeff:
            for (h, l), c in coeff.items():
                if h < 0 or l < 0:
                    raise ValueError("negative series order")
                if h > trunc_h or l > trunc_l:
                    continue
                c = ExactComplex.lift(c)
                if c:
                    clean[(h, l)] = c
        object.__setattr__(self, "coeff", clean)
        object.__setattr__(self, "trunc_h", trunc_h)
        object.__setattr__(self, "trunc_l", trunc_l)

    def __setattr__(self, name, value):
        raise AttributeError("FormalSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, value, trunc_h: int = DEFAULT_TRUNC_H,
              trunc_l: int = DEFAULT_TRUNC_L) -> "FormalSeries":
        return cls({(0, 0): ExactComplex.lift(value)}, trunc_h, trunc_l)

    @classmethod
    def zero(cls, trunc_h: int = DEFAULT_TRUNC_H,
             trunc_l: int = DEFAULT_TRUNC_L) -> "FormalSeries":
        return cls({}, trunc_h, trunc_l)

    @classmethod
    def one(cls, trunc_h: int = DEFAULT_TRUNC_H,
            trunc_l: int = DEFAULT_TRUNC_L) -> "FormalSeries":
        return cls.const(1, trunc_h, trunc_l)

    @classmethod
    def hbar(cls, trunc_h: int = DEFAULT_TRUNC_H,
             trunc_l: int = DEFAULT_TRUNC_L) -> "FormalSeries":
        return cls({(1, 0): EC_ONE}, trunc_h, trunc_l)

    @classmethod
    def coupling(cls, trunc_h: int = DEFAULT_TRUNC_H,
                 trunc_l: int = DEFAULT_TRUNC_L) -> "FormalSeries":
        return cls({(0, 1): EC_ONE}, trunc_h, trunc_l)

    # -- ring operations ---------------------------------------------------

    def _join(self, other) -> tuple["FormalSeries", int, int]:
        if not isinstance(other, FormalSeries):
            other = FormalSeries.const(other, self.trunc_h, self.trunc_l)
        return (other, min(self.trunc_h, other.trunc_h),
                min(self.trunc_l, other.trunc_l))

    def __add__(self, other):
        o, th, tl = self._join(other)
        out = dict(self.coeff)
        for k, c in o.coeff.items():
            out[k] = out.get(k, 0) + c
        return FormalSeries(out, th, tl)

    __radd__ = __add__

    def __sub__(self, other):
        o, th, tl = self._join(other)
        out = dict(self.coeff)
        for k, c in o.coeff.items():
            out[k] = out.get(k, 0) - c
        return FormalSeries(out, th, tl)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FormalSeries({k: -c for k, c in self.coeff.items()},
                            self.trunc_h, self.trunc_l)

    def __mul__(self, other):
        o, th, tl = self._join(other)
        out = {}
        for (h1, l1), c1 in self.coeff.items():
            for (h2, l2), c2 in o.coeff.items():
                h, l = h1 + h2, l1 + l2
                if h > th or l > tl:
                    continue
                key = (h, l)
                out[key] = out.get(key, 0) + c1 * c2
        return FormalSeries(out, th, tl)

    __rmul__ = __mul__

    def scale(self, c) -> "FormalSeries":
        c = ExactComplex.lift(c)
        return FormalSeries({k: v * c for k, v in self.coeff.items()},
                            self.trunc_h, self.trunc_l)

    def shift(self, dh: int = 0, dl: int = 0) -> "FormalSeries":
        """Multiply by hbar^dh * lambda^dl (coefficients beyond truncation drop)."""
        return FormalSeries({(h + dh, l + dl): c
                             for (h, l), c in self.coeff.items()},
                            self.trunc_h, self.trunc_l)

    def exp(self) -> "FormalSeries":
        if (0, 0) in self.coeff:
            raise ExpOfNonNilpotentConstant(
                "constant term must vanish for an exact exponential")
        out = FormalSeries.one(self.trunc_h, self.trunc_l)
        term = FormalSeries.one(self.trunc_h, self.trunc_l)
        for n in range(1, self.trunc_h + self.trunc_l + 1):
            term = term * self
            if not term.coeff:
                break
            out = out + term.scale(Fraction(1, math.factorial(n)))
        return out

    def inv(self) -> "FormalSeries":
        c0 = self.coeff.get((0, 0))
        if not c0:
            raise NonInvertibleLeadingTerm("constant term is zero")
        u = self.scale(EC_ONE / c0) - 1  # nilpotent part
        out = FormalSeries.one(self.trunc_h, self.trunc_l)
        term = FormalSeries.one(self.trunc_h, self.trunc_l)
        sign = -1
        for _ in range(self.trunc_h + self.trunc_l):
            term = term * u
            if not term.coeff:
                break
            out = out + term if sign > 0 else out - term
            sign = -sign
        return out.scale(EC_ONE / c0)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = FormalSeries.one(self.trunc_h, self.trunc_l)
        for _ in range(n):
            out = out * self
        return out

    # -- queries -----------------------------------------------------------

    def coefficient(self, h: int, l: int = 0) -> ExactComplex:
        return self.coeff.get((h, l), ExactComplex(0))

    def truncate(self, trunc_h: int, trunc_l: int) -> "FormalSeries":
        return FormalSeries(self.coeff, trunc_h, trunc_l)

    def conjugate(self) -> "FormalSeries":
        return FormalSeries({k: c.conjugate() for k, c in self.coeff.items()},
                            self.trunc_h, self.trunc_l)

    def h_part(self, h: int) -> "FormalSeries":
        """Sub-series with hbar-order exactly h (hbar power kept)."""
        return FormalSeries({k: c for k, c in self.coeff.items() if k[0] == h},
                            self.trunc_h, self.trunc_l)

    def is_zero(self) -> bool:
        return not self.coeff

    def __bool__(self):
        return bool(self.coeff)

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            if isinstance(other, (int, Fraction, float, complex, ExactComplex)):
                other = FormalSeries.const(other, self.trunc_h, self.trunc_l)
            else:
                return NotImplemented
        return (self.coeff == other.coeff
                and self.trunc_h == other.trunc_h
                and self.trunc_l == other.trunc_l)

    def __hash__(self):
        return hash((frozenset(self.coeff.items()), self.trunc_h, self.trunc_l))

    def to_complex(self, hbar: float = 1.0, lam: float = 1.0) -> complex:
        """Numerical evaluation at given parameter values."""
        return sum((c.to_complex() * hbar ** h * lam ** l
                    for (h, l), c in self.coeff.items()), 0j)

    # -- serialization -----------------------------------------------------

    def to_records(self) -> list[dict]:
        recs = []
        for (h, l) in sorted(self.coeff):
            c = self.coeff[(h, l)]
            recs.append({"h": h, "l": l, "re": str(c.re), "im": str(c.im)})
        return recs

    @classmethod
    def from_records(cls, recs, trunc_h: int = DEFAULT_TRUNC_H,
                     trunc_l: int = DEFAULT_TRUNC_L) -> "FormalSeries":
        coeff = {}
        for r in recs:
            coeff[(int(r["h"]), int(r["l"]))] = ExactComplex(
                Fraction(r["re"]), Fraction(r["im"]))
        return cls(coeff, trunc_h, trunc_l)

    def __repr__(self):
        if not self.coeff:
            return "FormalSeries(0)"
        parts = []
        for (h, l) in sorted(self.coeff):
            c = self.coeff[(h, l)]
            s = str(c.re) if c.im == 0 else f"({c.re}+{c.im}i)"
            mono = "".join(["" if h == 0 else f"*h^{h}",
                            "" if l == 0 else f"*l^{l}"])
            parts.append(s + mono)
        return "FormalSeries(" + " + ".join(parts) + ")"
