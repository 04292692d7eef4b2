"""Singular distributions on the line, paired against plateau test functions.

Test functions are finite sums of polynomial * window atoms, where the
window equals 1 exactly on [-r0, r0] and 0 outside [-R, R].  On the plateau
a test function IS its polynomial, so Taylor subtractions and derivatives at
the origin are available in closed form and the singular part of every
pairing integral can be done exactly; adaptive quadrature only ever sees the
smooth annulus.

Pairings with the homogeneous kinds below use the standard finite-part /
analytic-continuation formulas.  For kinds of positive divergence degree the
value returned is therefore already one particular extension; it coincides
with the honest pairing whenever the test function vanishes to the required
order at the origin.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
from scipy import integrate


class DistError(Exception):
    pass


class DivergentPairing(DistError):
    """Pairing has a genuine pole (e.g. x_+^a at a negative integer)."""


class NotHomogeneousClass(DistError):
    pass


# ---------------------------------------------------------------------------
# test functions


def _window_scalar(x: float, r0: float, R: float) -> float:
    ax = abs(x)
    if ax <= r0:
        return 1.0
    if ax >= R:
        return 0.0
    u = (R - ax) / (R - r0)
    a = math.exp(-1.0 / u)
    b = math.exp(-1.0 / (1.0 - u))
    return a / (a + b)


def _window(x, r0: float, R: float):
    if np.isscalar(x):
        return _window_scalar(float(x), r0, R)
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.zeros_like(ax)
    out[ax <= r0] = 1.0
    mid = (ax > r0) & (ax < R)
    if mid.any():
        u = (R - ax[mid]) / (R - r0)
        a = np.exp(-1.0 / u)
        b = np.exp(-1.0 / (1.0 - u))
        out[mid] = a / (a + b)
    return out


class TestFunction1D:
    """Sum of coeff * p(x) * window(x; r0, R) atoms; smooth, compact support,
    identically polynomial on the common plateau."""

    __slots__ = ("atoms", "_core")

    def __init__(self, atoms):
        cleaned = []
        for coeff, poly, r0, R in atoms:
            r0, R = float(r0), float(R)
            if not (0 < r0 < R):
                raise ValueError("need 0 < r0 < R")
            poly = tuple(complex(c) for c in poly)
            while poly and poly[-1] == 0:
                poly = poly[:-1]
            if coeff and poly:
                cleaned.append((complex(coeff), poly, r0, R))
        self.atoms = tuple(cleaned)
        self._core = None

    @classmethod
    def plateau(cls, r0: float = 0.5, R: float = 1.0, coeff=1.0):
        return cls([(coeff, (1.0,), r0, R)])

    @classmethod
    def monomial(cls, degree: int, r0: float = 0.5, R: float = 1.0, coeff=1.0):
        poly = (0.0,) * degree + (1.0,)
        return cls([(coeff, poly, r0, R)])

    @classmethod
    def from_poly(cls, poly, r0: float = 0.5, R: float = 1.0, coeff=1.0):
        return cls([(coeff, tuple(poly), r0, R)])

    @classmethod
    def random_probe(cls, rng, max_degree: int = 4, n_atoms: int = 2):
        atoms = []
        for _ in range(n_atoms):
            deg = rng.randint(0, max_degree)
            poly = [rng.uniform(-2, 2) for _ in range(deg + 1)]
            r0 = rng.uniform(0.2, 0.7)
            R = r0 + rng.uniform(0.3, 1.0)
            atoms.append((rng.uniform(-2, 2), poly, r0, R))
        return cls(atoms)

    @property
    def support_radius(self) -> float:
        return max((R for _, _, _, R in self.atoms), default=0.0)

    @property
    def plateau_radius(self) -> float:
        return min((r0 for _, _, r0, _ in self.atoms), default=0.0)

    @property
    def core_poly(self) -> tuple:
        # combined polynomial valid on |x| <= plateau_radius
        if self._core is None:
            deg = max((len(p) for _, p, _, _ in self.atoms), default=0)
            core = [0j] * deg
            for coeff, poly, _, _ in self.atoms:
                for j, c in enumerate(poly):
                    core[j] += coeff * c
            self._core = tuple(core)
        return self._core

    def derivative_at_0(self, k: int) -> complex:
        core = self.core_poly
        if k >= len(core):
            return 0j
        return core[k] * math.factorial(k)

    def __call__(self, x):
        if np.isscalar(x):
            out = 0j
            for coeff, poly, r0, R in self.atoms:
                w = _window_scalar(float(x), r0, R)
                if w:
                    p = 0j
                    for c in reversed(poly):
                        p = p * x + c
                    out += coeff * p * w
            return out
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for coeff, poly, r0, R in self.atoms:
            p = np.zeros(x.shape, dtype=complex)
            for c in reversed(poly):
                p = p * x + c
            out += coeff * p * _window(x, r0, R)
        return out

    def __add__(self, other):
        if not isinstance(other, TestFunction1D):
            return NotImplemented
        return TestFunction1D(list(self.atoms) + list(other.atoms))

    def __mul__(self, scalar):
        return TestFunction1D(
            [(coeff * scalar, poly, r0, R) for coeff, poly, r0, R in self.atoms])

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * (-1)

    def mirror(self):
        """x -> f(-x)."""
        out = []
        for coeff, poly, r0, R in self.atoms:
            out.append((coeff,
                        tuple(c * (-1) ** j for j, c in enumerate(poly)),
                        r0, R))
        return TestFunction1D(out)

    def stretched(self, c):
        """x -> f(c x) for c > 0."""
        c = float(c)
        if c <= 0:
            raise ValueError("need c > 0")
        out = []
        for coeff, poly, r0, R in self.atoms:
            out.append((coeff,
                        tuple(p * c ** j for j, p in enumerate(poly)),
                        r0 / c, R / c))
        return TestFunction1D(out)

    def taylor_remainder(self, x, order: int):
        """f(x) - sum_{j<order} f_j x^j, with f_j the exact core coefficients."""
        core = self.core_poly
        val = self(x)
        for j in range(min(order, len(core))):
            val = val - core[j] * np.asarray(x, dtype=float) ** j
        return val


# ---------------------------------------------------------------------------
# quadrature helpers

_QUAD_OPTS = dict(limit=400, epsabs=1e-13, epsrel=1e-12)


def _quad_complex(func, a: float, b: float, points=None) -> complex:
    if b <= a:
        return 0j
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b)
        pts = pts or None
    re = integrate.quad(lambda x: func(x).real, a, b, points=pts, **_QUAD_OPTS)[0]
    im = integrate.quad(lambda x: func(x).imag, a, b, points=pts, **_QUAD_OPTS)[0]
    return re + 1j * im


def _breakpoints(f: TestFunction1D):
    pts = set()
    for _, _, r0, R in f.atoms:
        pts.update((r0, R, -r0, -R))
    return pts


def _power_log_integral(b: complex, p: int, upper: float) -> complex:
    """int_0^upper x^b log^p(x) dx, Re b > -1."""
    lu = math.log(upper)
    ub = upper ** (b + 1) if isinstance(b, float) else cmath.exp((b + 1) * lu)
    total = 0j
    for i in range(p + 1):
        total += ((-1) ** (p - i) * math.factorial(p) / math.factorial(i)
                  * lu ** i / (b + 1) ** (p - i + 1))
    return ub * total


# ---------------------------------------------------------------------------
# symbolic distributions

# term kinds:
#   ("delta", k)            k-th derivative of delta
#   ("monomial", m)         x^m on the whole line
#   ("heaviside", m)        theta(x) x^m
#   ("power_i0", s, a)      (x + s*i0)^a, s = +-1
#   ("halfline", s, a, p)   x_+^a log^p x  (s=+1)  or  x_-^a log^p|x|  (s=-1)

_SD_RULES = {
    "delta": lambda k: 1 + k,
    "monomial": lambda m: -m,
    "heaviside": lambda m: -m,
    "power_i0": lambda s, a: -complex(a).real,
    "halfline": lambda s, a, p=0: -complex(a).real,
}


class SymbolicDistribution1D:
    """Finite sum of coeff * (homogeneous model term)."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        cleaned = []
        for coeff, kind in terms:
            if kind[0] not in _SD_RULES:
                raise DistError(f"unknown term kind {kind[0]!r}")
            if coeff:
                cleaned.append((complex(coeff), tuple(kind)))
        self.terms = tuple(cleaned)

    @classmethod
    def delta(cls, k: int = 0, coeff=1.0):
        return cls([(coeff, ("delta", k))])

    @classmethod
    def monomial(cls, m: int, coeff=1.0):
        return cls([(coeff, ("monomial", m))])

    @classmethod
    def heaviside(cls, m: int = 0, coeff=1.0):
        return cls([(coeff, ("heaviside", m))])

    @classmethod
    def power_i0(cls, a, sign: int = 1, coeff=1.0):
        if sign not in (1, -1):
            raise ValueError("sign must be +-1")
        return cls([(coeff, ("power_i0", sign, complex(a)))])

    @classmethod
    def halfline(cls, a, side: int = 1, log_power: int = 0, coeff=1.0):
        if side not in (1, -1):
            raise ValueError("side must be +-1")
        return cls([(coeff, ("halfline", side, complex(a), log_power))])

    def __add__(self, other):
        if not isinstance(other, SymbolicDistribution1D):
            return NotImplemented
        return SymbolicDistribution1D(list(self.terms) + list(other.terms))

    def __mul__(self, scalar):
        return SymbolicDistribution1D(
            [(c * scalar, k) for c, k in self.terms])

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * (-1)

    def scaling_degree(self) -> float:
        """Largest scaling degree among the terms (symbolic rule)."""
        if not self.terms:
            raise NotHomogeneousClass("empty distribution")
        out = None
        for _, kind in self.terms:
            sd = _SD_RULES[kind[0]](*kind[1:])
            out = sd if out is None else max(out, sd)
        return float(out)

    def pair(self, f: TestFunction1D) -> complex:
        out = 0j
        for coeff, kind in self.terms:
            out += coeff * _pair_term(kind, f)
        return out

    def pair_scaled(self, lam: float, f: TestFunction1D) -> complex:
        """<t(lam x), f(x)> = (1/lam) <t, f(x/lam)>."""
        if lam <= 0:
            raise ValueError("need lam > 0")
        return self.pair(f.stretched(1.0 / lam)) / lam

    def __repr__(self):
        return f"SymbolicDistribution1D({list(self.terms)})"


def _pair_term(kind, f: TestFunction1D) -> complex:
    tag = kind[0]
    if tag == "delta":
        k = kind[1]
        return (-1) ** k * f.derivative_at_0(k)
    if tag == "monomial":
        m = kind[1]
        R = f.support_radius
        return _quad_complex(lambda x: x ** m * f(x), -R, R,
                             points=_breakpoints(f) | {0.0})
    if tag == "heaviside":
        m = kind[1]
        R = f.support_radius
        return _quad_complex(lambda x: x ** m * f(x), 0.0, R,
                             points=_breakpoints(f))
    if tag == "power_i0":
        _, sign, a = kind
        return _pair_power_i0(sign, complex(a), f)
    if tag == "halfline":
        _, side, a, p = kind
        g = f if side == 1 else f.mirror()
        return _pair_halfline_plus(complex(a), p, g)
    raise DistError(f"unknown term kind {tag!r}")


def _is_int(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.imag) < tol and abs(z.real - round(z.real)) < tol


def _pair_power_i0(sign: int, a: complex, f: TestFunction1D) -> complex:
    if _is_int(a):
        n = int(round(a.real))
        if n >= 0:
            return _pair_term(("monomial", n), f)
        n = -n
        # (x + s i0)^-n = Fp x^-n - s i pi (-1)^(n-1) delta^(n-1) / (n-1)!
        fp = _finite_part(n, f)
        d = f.derivative_at_0(n - 1) / math.factorial(n - 1)
        return fp - sign * 1j * math.pi * d
    # branch cut split: (x + s i0)^a = x_+^a + e^{s i pi a} x_-^a
    plus = _pair_halfline_plus(a, 0, f)
    minus = _pair_halfline_plus(a, 0, f.mirror())
    return plus + cmath.exp(sign * 1j * math.pi * a) * minus


def _finite_part(n: int, f: TestFunction1D) -> complex:
    """Fp int x^-n f(x) dx, the parity-symmetric finite part.

    Splits at the plateau radius: inside, f is exactly its core polynomial and
    the integral is done termwise; outside, the Taylor-subtracted integrand is
    smooth and goes to quadrature.  The boundary terms at |x| = 1 come from
    the subtracted polynomial, odd powers cancelling by parity.
    """
    core = f.core_poly
    delta = min(f.plateau_radius, 1.0)
    out = 0j
    # exact inner part: sum_{j>=n} f_j int_{-d}^{d} x^{j-n}
    for j in range(n, len(core)):
        m = j - n
        if m % 2 == 0:
            out += core[j] * 2.0 * delta ** (m + 1) / (m + 1)
    # outer subtracted part on delta <= |x| <= 1
    if delta < 1.0:
        sub = lambda x: f.taylor_remainder(x, n) / x ** n
        pts = _breakpoints(f)
        out += _quad_complex(sub, delta, 1.0, points=pts)
        out += _quad_complex(sub, -1.0, -delta, points=pts)
    # boundary terms at 1 from the dropped Taylor polynomial
    for j in range(min(n, len(core))):
        if (n - j) % 2 == 0:
            out += core[j] * 2.0 / (j - n + 1)
    # far part |x| > 1
    R = f.support_radius
    if R > 1.0:
        far = lambda x: f(x) / x ** n
        pts = _breakpoints(f)
        out += _quad_complex(far, 1.0, R, points=pts)
        out += _quad_complex(far, -R, -1.0, points=pts)
    return out


def principal_value(f: TestFunction1D) -> complex:
    """PV int f(x)/x dx."""
    return _finite_part(1, f)


def _pair_halfline_plus(a: complex, p: int, f: TestFunction1D) -> complex:
    """<x_+^a log^p x, f> by analytic continuation: subtract the Taylor
    polynomial to order N-1 on (0, 1), N minimal with Re(a) + N > -1, and add
    back the boundary moments.  At negative integer a = -n the j = n-1
    moment is a genuine pole; the pairing exists only on test functions
    whose order-(n-1) jet vanishes (as after a w-scheme projection), and
    then the pole term is simply absent."""
    core = f.core_poly
    skip_j = None
    if _is_int(a) and round(a.real) <= -1:
        skip_j = -round(a.real) - 1
        jet = core[skip_j] if skip_j < len(core) else 0.0
        scale = max([1.0] + [abs(c) for c in core])
        if abs(jet) > 1e-9 * scale:
            raise DivergentPairing(
                f"x_+^{a} has a pole against a nonzero order-{skip_j} jet; "
                "extend or regularize instead")
    N = max(0, int(math.floor(-a.real)))
    while a.real + N <= -1:
        N += 1
    delta = min(f.plateau_radius, 1.0)
    out = 0j
    # exact inner part on (0, delta): f equals its core polynomial
    for j in range(N, len(core)):
        out += core[j] * _power_log_integral(a + j, p, delta)
    # numeric part on (delta, 1) with explicit subtraction
    if delta < 1.0:
        out += _quad_complex(lambda x: complex(x) ** a
                             * (math.log(x) ** p if p else 1.0)
                             * f.taylor_remainder(x, N),
                             delta, 1.0, points=_breakpoints(f))
    # boundary moments int_0^1 x^(a+j) log^p
    for j in range(min(N, len(core))):
        if j == skip_j:
            continue  # pole term, jet checked to vanish above
        out += core[j] * ((-1) ** p * math.factorial(p)
                          / (a + j + 1) ** (p + 1))
    # far part (1, R)
    R = f.support_radius
    if R > 1.0:
        out += _quad_complex(lambda x: complex(x) ** a
                             * (math.log(x) ** p if p else 1.0) * f(x),
                             1.0, R, points=_breakpoints(f))
    return out


def pointwise_power_product(t1: SymbolicDistribution1D,
                            t2: SymbolicDistribution1D) -> SymbolicDistribution1D:
    """Product of two single-term boundary values (x + s i0)^a with the SAME
    side s; exponents add.  Other products are not defined here."""
    if len(t1.terms) != 1 or len(t2.terms) != 1:
        raise DistError("only single-term products are supported")
    c1, k1 = t1.terms[0]
    c2, k2 = t2.terms[0]
    if k1[0] != "power_i0" or k2[0] != "power_i0" or k1[1] != k2[1]:
        raise DistError("product needs matching (x + s i0)^a factors")
    return SymbolicDistribution1D(
        [(c1 * c2, ("power_i0", k1[1], k1[2] + k2[2]))])
