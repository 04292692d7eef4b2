"""Deformation quantization of lattice functionals.

All four products share one engine,

    F x_K G = sum_n (hbar^n / n!) <F^(n), K^(x n) G^(n)>,

differing only in the contraction kernel K: (i/2)Delta for the star product,
the positive-frequency kernel for the Wick-ordered star product, i*DiracD and
Feynman for the two time-ordered products.  Coefficients stay exact, so the
algebraic identities (commutation relations, equivalences, factorisation) are
checked with equality.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from .exact import EC_ONE, ExactComplex
from .functionals import (MaxDegreeExceeded, PolyFunctional,
                          pointwise_product, local_power)
from .lattice import ExactPropagators
from .series import FormalSeries

PRODUCT_KINDS = ("pointwise", "star", "star_H", "timeordered_D", "timeordered_F")


class QuantizationError(Exception):
    pass


class NoLambdaGrading(QuantizationError):
    """Interaction term must carry at least one power of the coupling."""


class RankDeficient(QuantizationError):
    """Probe family too small to certify the rank; enlarge the probe set."""


def _remove_one(key: tuple, site: int) -> tuple:
    i = key.index(site)
    return key[:i] + key[i + 1:]


def kernel_product(F: PolyFunctional, G: PolyFunctional, kernel,
                   trunc_h: int, trunc_l: int,
                   degree_cap: int | None = None) -> PolyFunctional:
    """Exponential-contraction product of two functionals with line kernel
    hbar*K; kernel is (site, site) -> ExactComplex."""
    # two-bank polynomial: (keyF, keyG) -> series
    bi: dict[tuple, FormalSeries] = {}
    for k1, c1 in F.terms.items():
        for k2, c2 in G.terms.items():
            if degree_cap is not None and len(k1) + len(k2) > degree_cap:
                raise MaxDegreeExceeded(
                    f"degree {len(k1) + len(k2)} exceeds cap {degree_cap}")
            key = (k1, k2)
            c = c1 * c2
            bi[key] = bi[key] + c if key in bi else c

    out: dict[tuple, FormalSeries] = {}
    n = 0
    while bi:
        # merge current contraction order with weight hbar^n / n!
        fac = Fraction(1, math.factorial(n))
        for (k0, k1), c in bi.items():
            key = tuple(sorted(k0 + k1))
            add = c.scale(fac).shift(dh=n)
            if add:
                out[key] = out[key] + add if key in out else add
        n += 1
        if n > trunc_h:
            break
        nxt: dict[tuple, FormalSeries] = {}
        for (k0, k1), c in bi.items():
            for y in set(k0):
                m0 = k0.count(y)
                k0r = _remove_one(k0, y)
                for z in set(k1):
                    kv = kernel(y, z)
                    if not kv:
                        continue
                    m1 = k1.count(z)
                    key = (k0r, _remove_one(k1, z))
                    add = c.scale(kv * (m0 * m1))
                    nxt[key] = nxt[key] + add if key in nxt else add
        bi = nxt
    return PolyFunctional(F.lat, out, min(F.trunc_h, G.trunc_h),
                          min(F.trunc_l, G.trunc_l))


def gamma_apply(F: PolyFunctional, kernel) -> PolyFunctional:
    """Gamma_K F = sum_{y,z} K(y,z) d^2 F / dphi[y] dphi[z] (single bank)."""
    out: dict[tuple, FormalSeries] = {}
    for key, c in F.terms.items():
        for y in set(key):
            m0 = key.count(y)
            k1 = _remove_one(key, y)
            for z in set(k1):
                kv = kernel(y, z)
                if not kv:
                    continue
                m1 = k1.count(z)
                k2 = _remove_one(k1, z)
                add = c.scale(kv * (m0 * m1))
                out[k2] = out[k2] + add if k2 in out else add
    return PolyFunctional(F.lat, out, F.trunc_h, F.trunc_l)


def exp_gamma(F: PolyFunctional, kernel, prefactor: Fraction) -> PolyFunctional:
    """e^{prefactor * hbar * Gamma_K} F, truncated in hbar."""
    out = F
    term = F
    for n in range(1, F.trunc_h + 1):
        term = gamma_apply(term, kernel)
        if term.is_zero():
            break
        fac = prefactor ** n / math.factorial(n)
        out = out + term * FormalSeries(
            {(n, 0): ExactComplex(fac)}, F.trunc_h, F.trunc_l)
    return out


class QuantProduct:
    """One of the product structures, bound to a lattice's exact kernels."""

    def __init__(self, xp: ExactPropagators, kind: str,
                 degree_cap: int | None = None):
        if kind not in PRODUCT_KINDS:
            raise ValueError(f"unknown product kind {kind!r}")
        self.xp = xp
        self.kind = kind
        self.kernel = xp.kernel(kind)
        self.degree_cap = degree_cap

    def product(self, F: PolyFunctional, G: PolyFunctional) -> PolyFunctional:
        return kernel_product(F, G, self.kernel,
                              min(F.trunc_h, G.trunc_h),
                              min(F.trunc_l, G.trunc_l), self.degree_cap)

    def multi(self, factors) -> PolyFunctional:
        """Iterated product; for the commutative time-ordered kinds this equals
        the n-fold product with all cross contractions."""
        factors = list(factors)
        if not factors:
            raise ValueError("need at least one factor")
        out = factors[0]
        for f in factors[1:]:
            out = self.product(out, f)
        return out

    def commutator(self, F: PolyFunctional, G: PolyFunctional) -> PolyFunctional:
        return self.product(F, G) - self.product(G, F)

    def power(self, F: PolyFunctional, n: int) -> PolyFunctional:
        out = PolyFunctional.unit(F.lat, F.trunc_h, F.trunc_l)
        for _ in range(n):
            out = self.product(out, F)
        return out


def alpha_H(xp: ExactPropagators, F: PolyFunctional, sign: int = 1) -> PolyFunctional:
    """Wick-transform e^{sign (hbar/2) Gamma_H}; sign=-1 normal-orders."""
    if sign not in (1, -1):
        raise ValueError("sign must be +-1")
    kern = lambda i, j: ExactComplex(xp.hadamard_entry(i, j))
    return exp_gamma(F, kern, Fraction(sign, 2))


def time_order_op(xp: ExactPropagators, F: PolyFunctional, sign: int = 1,
                  kind: str = "timeordered_D") -> PolyFunctional:
    """The time-ordering operator e^{sign (hbar/2) Gamma_K} for K the
    time-ordered kernel; conjugating the pointwise product by it gives the
    corresponding time-ordered product."""
    if kind not in ("timeordered_D", "timeordered_F"):
        raise ValueError("kind must be a time-ordered kernel")
    return exp_gamma(F, xp.kernel(kind), Fraction(sign, 2))


def star_H_equivalence_check(xp: ExactPropagators, F: PolyFunctional,
                             G: PolyFunctional) -> PolyFunctional:
    """F *_H G - alpha_H(alpha_H^-1 F * alpha_H^-1 G); zero when exact."""
    sH = QuantProduct(xp, "star_H")
    s = QuantProduct(xp, "star")
    lhs = sH.product(F, G)
    rhs = alpha_H(xp, s.product(alpha_H(xp, F, -1), alpha_H(xp, G, -1)), +1)
    return lhs - rhs


def wick_theorem_demo(xp: ExactPropagators, f1, f2,
                      trunc_h: int = 2, trunc_l: int = 2) -> dict:
    """Expand (integral of phi^2 f1) *_H (integral of phi^2 f2) and certify
    the three-term structure with normal-ordered binding coefficients
    (1, 4, 2) on the (no, one, two)-contraction terms."""
    lat = xp.lat
    F = local_power(lat, f1, 2, trunc_h, trunc_l)
    G = local_power(lat, f2, 2, trunc_h, trunc_l)
    prod = QuantProduct(xp, "star_H").product(F, G)

    w2 = lat.volume_weight ** 2
    items1 = f1.items() if isinstance(f1, dict) else enumerate(f1)
    items1 = [(s, v) for s, v in items1 if v]
    items2 = f2.items() if isinstance(f2, dict) else enumerate(f2)
    items2 = [(s, v) for s, v in items2 if v]

    one_terms: dict[tuple, FormalSeries] = {}
    two_terms: dict[tuple, FormalSeries] = {}
    for s1, v1 in items1:
        for s2, v2 in items2:
            wp = xp.wightman_entry(s1, s2)
            base = ExactComplex.lift(v1) * ExactComplex.lift(v2) * w2
            key = tuple(sorted((s1, s2)))
            c1 = FormalSeries({(1, 0): base * wp * 4}, trunc_h, trunc_l)
            one_terms[key] = one_terms.get(
                key, FormalSeries.zero(trunc_h, trunc_l)) + c1
            c2 = FormalSeries({(2, 0): base * wp * wp * 2}, trunc_h, trunc_l)
            two_terms[()] = two_terms.get(
                (), FormalSeries.zero(trunc_h, trunc_l)) + c2
    expected = (pointwise_product(F, G)
                + PolyFunctional(lat, one_terms, trunc_h, trunc_l)
                + PolyFunctional(lat, two_terms, trunc_h, trunc_l))

    rows = [
        {"contractions": 0, "hbar_power": 0, "binding_coefficient": 1,
         "structure": "(phi^2 f1)(phi^2 f2)"},
        {"contractions": 1, "hbar_power": 1, "binding_coefficient": 4,
         "structure": "(phi f1) W (phi f2)"},
        {"contractions": 2, "hbar_power": 2, "binding_coefficient": 2,
         "structure": "f1 W^2 f2"},
    ]
    return {"product": prod, "expected": expected,
            "match": prod == expected, "terms": rows}


class BogoliubovMap:
    """R_{S_I} and its inverse, built from the time-ordered exponential.

    R F = (e_T^{S_I})^{*-1} * (e_T^{S_I} x_T F)
    R^-1 F = e_T^{-S_I} x_T (e_T^{S_I} * F)

    The interaction must carry the formal coupling, which makes every series
    finite per order.
    """

    def __init__(self, xp: ExactPropagators, S_I: PolyFunctional,
                 time_kind: str = "timeordered_F", star_kind: str = "star_H",
                 degree_cap: int | None = None):
        for c in S_I.terms.values():
            if any(l == 0 for (_, l) in c.coeff):
                raise NoLambdaGrading(
                    "interaction has a coupling-order-zero part")
        self.xp = xp
        self.S_I = S_I
        self.tp = QuantProduct(xp, time_kind, degree_cap)
        self.sp = QuantProduct(xp, star_kind, degree_cap)
        self._eT = self.exp_T(S_I)
        self._eT_neg = self.exp_T(S_I * (-1))
        self._eT_star_inv = self.star_inverse(self._eT)

    def exp_T(self, V: PolyFunctional) -> PolyFunctional:
        """Time-ordered exponential sum_n V^{x_T n} / n!."""
        out = PolyFunctional.unit(V.lat, V.trunc_h, V.trunc_l)
        term = out
        for n in range(1, V.trunc_l + 1):
            term = self.tp.product(term, V) * Fraction(1, n)
            if term.is_zero():
                break
            out = out + term
        return out

    def star_inverse(self, A: PolyFunctional) -> PolyFunctional:
        """Geometric series in the coupling grading; A must be 1 + O(coupling)."""
        lat = A.lat
        one = PolyFunctional.unit(lat, A.trunc_h, A.trunc_l)
        a = A - one
        for c in a.terms.values():
            if any(l == 0 for (_, l) in c.coeff):
                raise NoLambdaGrading("star_inverse needs 1 + O(coupling)")
        out = one
        term = one
        sign = -1
        for _ in range(A.trunc_l):
            term = self.sp.product(term, a)
            if term.is_zero():
                break
            out = out + term * sign
            sign = -sign
        return out

    def R(self, F: PolyFunctional) -> PolyFunctional:
        return self.sp.product(self._eT_star_inv, self.tp.product(self._eT, F))

    def Rinv(self, F: PolyFunctional) -> PolyFunctional:
        return self.tp.product(self._eT_neg, self.sp.product(self._eT, F))

    def star_interacting(self, F: PolyFunctional,
                         G: PolyFunctional) -> PolyFunctional:
        return self.Rinv(self.sp.product(self.R(F), self.R(G)))


def causally_later(lat, F: PolyFunctional, G: PolyFunctional) -> bool:
    """True when no point of supp F lies in the closed past cone of a point
    of supp G, i.e. F is nowhere earlier than G."""
    for y in F.support():
        for z in G.support():
            if lat.in_past_cone(y, z):
                return False
    return True


def causal_factorization_check(xp: ExactPropagators, V1: PolyFunctional,
                               V2: PolyFunctional,
                               kind: str = "timeordered_F",
                               star_kind: str = "star_H") -> PolyFunctional:
    """S(V1 + V2) - S(V1) * S(V2) for V1 nowhere earlier than V2.

    Returns the residual functional; it vanishes identically whenever the
    support condition holds, because the time-ordered kernel coincides with
    the Wick kernel off the past cone.
    """
    if not causally_later(xp.lat, V1, V2):
        raise ValueError("supp V1 intersects the past of supp V2")
    star = QuantProduct(xp, star_kind)
    lhs = s_matrix(xp, V1 + V2, kind)
    rhs = star.product(s_matrix(xp, V1, kind), s_matrix(xp, V2, kind))
    return lhs - rhs


def s_matrix(xp: ExactPropagators, V: PolyFunctional,
             kind: str = "timeordered_F",
             degree_cap: int | None = None) -> PolyFunctional:
    """Formal S-matrix sum_n T_n(V,..,V)/n! to the coupling truncation."""
    bog = BogoliubovMap.__new__(BogoliubovMap)
    bog.xp = xp
    bog.tp = QuantProduct(xp, kind, degree_cap)
    for c in V.terms.values():
        if any(l == 0 for (_, l) in c.coeff):
            raise NoLambdaGrading("S-matrix argument must carry the coupling")
    return bog.exp_T(V)


def multilocal_injectivity_check(basis, degree: int, n_probes: int | None = None,
                                 seed: int = 7, max_enlarge: int = 3) -> dict:
    """Rank of the multiplication map on degree-`degree` symmetric products of
    the basis functionals, certified on exact rational probe configurations.

    Expected rank (injectivity) is the multiset count C(n+k-1, k)."""
    basis = list(basis)
    n = len(basis)
    expected = math.comb(n + degree - 1, degree) if n else 0
    if n == 0:
        return {"n_basis": 0, "degree": degree, "rank": 0,
                "expected": 0, "injective": True}
    for b in basis:
        if () in b.terms:
            raise ValueError("basis functionals must vanish at phi = 0")
    lat = basis[0].lat
    products = []
    for combo in itertools.combinations_with_replacement(range(n), degree):
        P = basis[combo[0]]
        for i in combo[1:]:
            P = pointwise_product(P, basis[i])
        products.append(P)
    support = sorted(set().union(*[b.support() for b in basis]))

    rng = random.Random(seed)
    m = n_probes or 2 * expected + 4
    for _ in range(max_enlarge):
        probes = []
        for _ in range(m):
            phi = {}
            for s in support:
                phi[s] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            probes.append(phi)
        rows = [[P.evaluate(phi).coefficient(0, 0) for phi in probes]
                for P in products]
        rank = _exact_rank(rows)
        if rank == expected:
            return {"n_basis": n, "degree": degree, "rank": rank,
                    "expected": expected, "injective": True,
                    "n_probes": m}
        m *= 2
    if rank < expected:
        raise RankDeficient(
            f"rank {rank} < expected {expected} with {m // 2} probes")
    return {"n_basis": n, "degree": degree, "rank": rank,
            "expected": expected, "injective": rank == expected, "n_probes": m}


def _exact_rank(rows: list[list[ExactComplex]]) -> int:
    """Gaussian elimination over the exact rational-complex field."""
    mat = [list(r) for r in rows]
    rank = 0
    n_cols = len(mat[0]) if mat else 0
    col = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rank, len(mat)):
            if mat[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        for r in range(rank + 1, len(mat)):
            if mat[r][col]:
                f = mat[r][col] / pv
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
