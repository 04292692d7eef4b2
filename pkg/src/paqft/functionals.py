"""Polynomial functionals of lattice field configurations.

A PolyFunctional is a sparse multivariate polynomial in the site variables
phi[s], with FormalSeries coefficients: monomial keys are sorted site tuples.
Constructors bake the volume weight a_t*a_x into every site sum that stands
for an integral; functional derivatives divide it back out, so contraction
pairings (Peierls bracket, star products) reduce to plain partial-derivative
sums against the kernels with all measure factors cancelled exactly.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exact import ExactComplex, to_fraction
from .lattice import ExactPropagators, Lattice1p1, kg_apply
from .series import DEFAULT_TRUNC_H, DEFAULT_TRUNC_L, FormalSeries


class FunctionalError(Exception):
    pass


class DimensionMismatch(FunctionalError):
    pass


class MaxDegreeExceeded(FunctionalError):
    pass


class CutoffTooSmall(FunctionalError):
    """Cutoff function is not identically 1 around a probed site."""


def _lift_value(v):
    if isinstance(v, ExactComplex):
        return v
    if isinstance(v, complex):
        return ExactComplex.lift(v)
    return ExactComplex(to_fraction(v))


class PolyFunctional:
    """Sparse polynomial functional; immutable by convention."""

    __slots__ = ("lat", "terms", "trunc_h", "trunc_l")

    def __init__(self, lat: Lattice1p1, terms=None,
                 trunc_h: int = DEFAULT_TRUNC_H, trunc_l: int = DEFAULT_TRUNC_L):
        clean = {}
        if terms:
            for key, c in terms.items():
                key = tuple(sorted(key))
                for s in key:
                    if not 0 <= s < lat.n_sites:
                        raise DimensionMismatch(f"site {s} outside lattice")
                if not isinstance(c, FormalSeries):
                    c = FormalSeries.const(c, trunc_h, trunc_l)
                else:
                    c = c.truncate(trunc_h, trunc_l)
                if key in clean:
                    c = clean[key] + c
                if c:
                    clean[key] = c
                elif key in clean:
                    del clean[key]
        self.lat = lat
        self.terms = clean
        self.trunc_h = trunc_h
        self.trunc_l = trunc_l

    # -- constructors --------------------------------------------------------

    @classmethod
    def constant(cls, lat, value, trunc_h: int = DEFAULT_TRUNC_H,
                 trunc_l: int = DEFAULT_TRUNC_L) -> "PolyFunctional":
        return cls(lat, {(): value}, trunc_h, trunc_l)

    @classmethod
    def unit(cls, lat, trunc_h: int = DEFAULT_TRUNC_H,
             trunc_l: int = DEFAULT_TRUNC_L) -> "PolyFunctional":
        return cls.constant(lat, 1, trunc_h, trunc_l)

    # -- structure -----------------------------------------------------------

    @property
    def max_degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def is_local(self) -> bool:
        return all(len(set(k)) <= 1 for k in self.terms)

    def support(self) -> set[int]:
        out: set[int] = set()
        for k in self.terms:
            out.update(k)
        return out

    def coefficient(self, key) -> FormalSeries:
        return self.terms.get(tuple(sorted(key)),
                              FormalSeries.zero(self.trunc_h, self.trunc_l))

    # -- algebra -------------------------------------------------------------

    def _wrap(self, terms) -> "PolyFunctional":
        return PolyFunctional(self.lat, terms, self.trunc_h, self.trunc_l)

    def __add__(self, other):
        if not isinstance(other, PolyFunctional):
            other = PolyFunctional.constant(self.lat, other,
                                            self.trunc_h, self.trunc_l)
        th = min(self.trunc_h, other.trunc_h)
        tl = min(self.trunc_l, other.trunc_l)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return PolyFunctional(self.lat, out, th, tl)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * (-1) if isinstance(other, PolyFunctional)
                       else -_lift_value(other))

    def __neg__(self):
        return self * (-1)

    def __mul__(self, other):
        """Scalar multiple (number or FormalSeries); use pointwise_product for F*G."""
        if isinstance(other, PolyFunctional):
            return pointwise_product(self, other)
        if isinstance(other, FormalSeries):
            return self._wrap({k: c * other for k, c in self.terms.items()})
        v = _lift_value(other)
        return self._wrap({k: c.scale(v) for k, c in self.terms.items()})

    __rmul__ = __mul__

    def conjugate(self) -> "PolyFunctional":
        return self._wrap({k: c.conjugate() for k, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PolyFunctional):
            return NotImplemented
        return (self.terms == other.terms and self.trunc_h == other.trunc_h
                and self.trunc_l == other.trunc_l)

    def __hash__(self):
        return hash((frozenset(self.terms), self.trunc_h, self.trunc_l))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, phi) -> FormalSeries:
        """Exact evaluation; phi is a site-indexed sequence/dict of rationals."""
        total = FormalSeries.zero(self.trunc_h, self.trunc_l)
        cache = {}
        for key, c in self.terms.items():
            v = ExactComplex(1)
            for s in key:
                if s not in cache:
                    cache[s] = _lift_value(phi[s])
                v = v * cache[s]
            total = total + c.scale(v)
        return total

    def evaluate_float(self, phi, hbar: float = 1.0, lam: float = 1.0) -> complex:
        total = 0j
        for key, c in self.terms.items():
            v = complex(1.0)
            for s in key:
                v *= complex(phi[s])
            total += c.to_complex(hbar, lam) * v
        return total

    # -- derivatives ---------------------------------------------------------

    def partial(self, site: int) -> "PolyFunctional":
        """Plain partial derivative d/dphi[site] (no measure factor)."""
        out = {}
        for key, c in self.terms.items():
            m = key.count(site)
            if not m:
                continue
            i = key.index(site)
            new = key[:i] + key[i + 1:]
            add = c.scale(m)
            out[new] = out[new] + add if new in out else add
        return self._wrap(out)

    def func_derivative(self, site: int) -> "PolyFunctional":
        """delta F / delta phi(site): partial derivative over the volume weight."""
        return self.partial(site) * (Fraction(1) / self.lat.volume_weight)

    def gradient(self, phi) -> dict[int, FormalSeries]:
        """Evaluated functional derivative on the support, as site -> series."""
        return {s: self.func_derivative(s).evaluate(phi) for s in self.support()}

    def __repr__(self):
        return (f"PolyFunctional({len(self.terms)} terms, "
                f"deg {self.max_degree}, trunc=({self.trunc_h},{self.trunc_l}))")


def smeared_field(lat: Lattice1p1, f, trunc_h: int = DEFAULT_TRUNC_H,
                  trunc_l: int = DEFAULT_TRUNC_L) -> PolyFunctional:
    """Phi(f) = sum_s f[s] * (a_t a_x) * phi[s]; f a dict site->value or sequence."""
    w = lat.volume_weight
    items = f.items() if isinstance(f, dict) else enumerate(f)
    terms = {}
    for s, v in items:
        v = _lift_value(v) * w
        if v:
            terms[(s,)] = v
    return PolyFunctional(lat, terms, trunc_h, trunc_l)


def local_power(lat: Lattice1p1, f, power: int,
                trunc_h: int = DEFAULT_TRUNC_H,
                trunc_l: int = DEFAULT_TRUNC_L) -> PolyFunctional:
    """Integral of f * phi^power: sum_s f[s] * (a_t a_x) * phi[s]^power."""
    w = lat.volume_weight
    items = f.items() if isinstance(f, dict) else enumerate(f)
    terms = {}
    for s, v in items:
        v = _lift_value(v) * w
        if v:
            terms[(s,) * power] = v
    return PolyFunctional(lat, terms, trunc_h, trunc_l)


def interaction_vertex(lat: Lattice1p1, f, power: int = 4,
                       trunc_h: int = DEFAULT_TRUNC_H,
                       trunc_l: int = DEFAULT_TRUNC_L) -> PolyFunctional:
    """lambda/power! * integral of f phi^power: the quartic vertex carries one
    formal power of the coupling."""
    import math
    base = local_power(lat, f, power, trunc_h, trunc_l)
    coeff = FormalSeries.coupling(trunc_h, trunc_l).scale(
        Fraction(1, math.factorial(power)))
    return base * coeff


def pointwise_product(F: PolyFunctional, G: PolyFunctional,
                      degree_cap: int | None = None) -> PolyFunctional:
    if F.lat is not G.lat:
        raise DimensionMismatch("functionals live on different lattices")
    th = min(F.trunc_h, G.trunc_h)
    tl = min(F.trunc_l, G.trunc_l)
    out = {}
    for k1, c1 in F.terms.items():
        for k2, c2 in G.terms.items():
            if degree_cap is not None and len(k1) + len(k2) > degree_cap:
                raise MaxDegreeExceeded(
                    f"degree {len(k1) + len(k2)} exceeds cap {degree_cap}")
            key = tuple(sorted(k1 + k2))
            c = c1 * c2
            out[key] = out[key] + c if key in out else c
    return PolyFunctional(F.lat, out, th, tl)


def peierls_bracket(F: PolyFunctional, G: PolyFunctional,
                    xp: ExactPropagators) -> PolyFunctional:
    """{F, G} = <Delta F^(1), G^(1)> with volume weights; exact coefficients.

    In partial-derivative form the weights cancel:
    sum_{y,z} dF/dphi[y] Delta(y,z) dG/dphi[z].
    """
    th = min(F.trunc_h, G.trunc_h)
    tl = min(F.trunc_l, G.trunc_l)
    out = PolyFunctional(F.lat, {}, th, tl)
    for y in sorted(F.support()):
        dF = F.partial(y)
        if dF.is_zero():
            continue
        for z in sorted(G.support()):
            d = xp.causal_entry(y, z)
            if not d:
                continue
            dG = G.partial(z)
            if dG.is_zero():
                continue
            out = out + pointwise_product(dF, dG) * ExactComplex(d)
    return out


class GeneralizedLagrangian:
    """Cutoff action for the scalar field with an optional quartic term.

    Density (forward differences, periodic space):
        1/2 (d_t phi)^2 - 1/2 (d_x phi)^2 - 1/2 m^2 phi^2 - lam/4! phi^4
    summed against the cutoff with weight a_t*a_x.  Its second derivative at
    phi = 0 on interior sites is exactly the linearized operator E used by
    the Green functions.
    """

    def __init__(self, lat: Lattice1p1, cutoff, lam=Fraction(0)):
        self.lat = lat
        self.cutoff = [to_fraction(v) for v in cutoff]
        if len(self.cutoff) != lat.n_sites:
            raise DimensionMismatch("cutoff length != number of sites")
        self.lam = to_fraction(lam)

    def action(self, trunc_h: int = DEFAULT_TRUNC_H,
               trunc_l: int = DEFAULT_TRUNC_L) -> PolyFunctional:
        lat = self.lat
        w = lat.volume_weight
        m2 = to_fraction(lat.mass) ** 2
        at2 = lat.a_t ** 2
        ax2 = lat.a_x ** 2
        terms: dict[tuple, Fraction] = {}

        def add(key, val):
            key = tuple(sorted(key))
            terms[key] = terms.get(key, Fraction(0)) + val

        for t in range(lat.n_t):
            for x in range(lat.n_x):
                s = lat.site(t, x)
                fw = self.cutoff[s] * w
                if not fw:
                    continue
                if t + 1 < lat.n_t:
                    sp = lat.site(t + 1, x)
                    half = fw / (2 * at2)
                    add((sp, sp), half)
                    add((sp, s), -2 * half)
                    add((s, s), half)
                sx = lat.site(t, x + 1)
                halfx = fw / (2 * ax2)
                add((sx, sx), -halfx)
                add((sx, s), 2 * halfx)
                add((s, s), -halfx)
                add((s, s), -fw * m2 / 2)
                if self.lam:
                    add((s, s, s, s), -fw * self.lam / 24)
        return PolyFunctional(lat, terms, trunc_h, trunc_l)

    def euler_lagrange(self, phi, probe=None) -> np.ndarray:
        """S'(phi) as a site vector: -((box + m^2) phi + lam/3! phi^3) where
        the cutoff is identically 1; raises CutoffTooSmall if a probed site's
        stencil neighborhood leaves the flat region."""
        lat = self.lat
        if probe is None:
            probe = lat.interior_sites()
        for s in probe:
            t, x = lat.coords(s)
            if not lat.is_interior_time(t):
                raise CutoffTooSmall(f"site {s} touches the time boundary")
            for nb in (s, lat.site(t + 1, x), lat.site(t - 1, x),
                       lat.site(t, x + 1), lat.site(t, x - 1)):
                if self.cutoff[nb] != 1:
                    raise CutoffTooSmall(
                        f"cutoff not 1 on the stencil around site {s}")
        arr = np.asarray(phi, dtype=float).reshape(lat.n_t, lat.n_x)
        out = -(kg_apply(lat, arr)
                + float(self.lam) / 6.0 * arr ** 3)
        out[0, :] = 0.0
        out[-1, :] = 0.0
        return out.reshape(-1)

    def solve_leapfrog(self, phi0, phi1) -> np.ndarray:
        """March the (nonlinear) field equation from two initial time rows;
        the result satisfies euler_lagrange == 0 on interior sites exactly
        up to rounding."""
        lat = self.lat
        at2 = float(lat.a_t) ** 2
        ax2 = float(lat.a_x) ** 2
        m2 = lat.mass ** 2
        phi = np.zeros((lat.n_t, lat.n_x))
        phi[0] = np.asarray(phi0, dtype=float)
        phi[1] = np.asarray(phi1, dtype=float)
        for t in range(1, lat.n_t - 1):
            dxx = (np.roll(phi[t], -1) - 2 * phi[t] + np.roll(phi[t], 1)) / ax2
            phi[t + 1] = (2 * phi[t] - phi[t - 1]
                          + at2 * (dxx - m2 * phi[t]
                                   - float(self.lam) / 6.0 * phi[t] ** 3))
        return phi
