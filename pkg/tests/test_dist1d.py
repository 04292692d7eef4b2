"""Model distributions on the line, checked against quadrature oracles.

The oracles at the top are written straight from the defining formulas
(principal value via the Cauchy weight, finite parts via the eta-limit with
polynomial extrapolation, half-line powers via explicit subtraction) and
never call into the pairing rules they are checking.
"""
import cmath
import math
import random

import numpy as np
import pytest
from scipy import integrate

from paqft.dist1d import (TestFunction1D, SymbolicDistribution1D, DistError,
                          DivergentPairing, NotHomogeneousClass,
                          principal_value, pointwise_power_product)

RNG = random.Random(404)


def probes(n=4, max_degree=4):
    return [TestFunction1D.random_probe(RNG, max_degree=max_degree)
            for _ in range(n)]


# --------------------------------------------------------------------------
# oracles

def oracle_quad(density, f, a, b, extra_points=()):
    """Direct quadrature of density(x) * f(x) over [a, b]."""
    pts = sorted({p for p in extra_points if a < p < b})

    def run(part):
        return integrate.quad(lambda x: part(density(x) * f(x)), a, b,
                              points=pts or None, limit=400,
                              epsabs=1e-13, epsrel=1e-12)[0]

    return run(lambda z: z.real) + 1j * run(lambda z: z.imag)


def oracle_pv(f):
    """PV int f/x via the built-in Cauchy weight, split to dodge the
    requirement that the pole be interior."""
    R = f.support_radius

    def run(part):
        return integrate.quad(lambda x: part(f(x)), -R, R,
                              weight="cauchy", wvar=0.0, limit=400)[0]

    return run(lambda z: z.real) + 1j * run(lambda z: z.imag)


def oracle_fp2(f):
    """Fp int f/x^2 as the eta-limit int_{|x|>eta} f/x^2 - 2 f(0)/eta.

    On the plateau the defect is an odd polynomial in eta, so polynomial
    extrapolation through a few eta values recovers the limit exactly up to
    quadrature error.
    """
    f0 = f(0.0)
    delta = f.plateau_radius

    def S(eta):
        out = oracle_quad(lambda x: 1.0 / x ** 2, f, eta, f.support_radius)
        out += oracle_quad(lambda x: 1.0 / x ** 2, f, -f.support_radius, -eta)
        return out - 2.0 * f0 / eta

    etas = [delta / k for k in (2.0, 3.0, 4.0, 5.0, 6.0)]
    vals = [S(e) for e in etas]
    deg = len(etas) - 1
    re = np.polyfit(etas, [v.real for v in vals], deg)[-1]
    im = np.polyfit(etas, [v.imag for v in vals], deg)[-1]
    return re + 1j * im


def oracle_derivatives(f, up_to):
    """Jet of f at 0 recovered from point samples on the plateau, where f is
    exactly its core polynomial."""
    deg = max(up_to, len(f.core_poly) - 1)
    xs = np.linspace(-f.plateau_radius, f.plateau_radius, 2 * deg + 5)
    ys = np.array([f(x) for x in xs])
    co_re = np.polyfit(xs, ys.real, deg)[::-1]
    co_im = np.polyfit(xs, ys.imag, deg)[::-1]
    out = []
    for k in range(up_to + 1):
        c = (co_re[k] + 1j * co_im[k]) if k < len(co_re) else 0j
        out.append(c * math.factorial(k))
    return out


def oracle_halfline(a, p, f):
    """int_0^inf x^a log^p(x) f(x) dx for -2 < Re a < -1 (or a > -1, p >= 0)
    by one explicit subtraction at the origin."""
    f0 = f(0.0)
    R = f.support_radius

    # substitute x = u^2 so the subtracted integrand is mild at the endpoint
    def g(u):
        w = u ** (2 * a + 1) * ((2 * math.log(u)) ** p if p else 1.0)
        return 2.0 * w * (f(u * u) - f0)

    near = oracle_quad(lambda u: 1.0, g, 1e-12, 1.0)
    # int_0^1 x^a log^p = (-1)^p p! / (a+1)^{p+1}
    moment = (-1) ** p * math.factorial(p) / (a + 1) ** (p + 1)
    far = oracle_quad(lambda x: x ** a * (math.log(x) ** p if p else 1.0),
                      f, 1.0, max(R, 1.0 + 1e-9))
    return near + f0 * moment + far


# --------------------------------------------------------------------------
# test function machinery

def test_plateau_window_shape():
    f = TestFunction1D.plateau(0.5, 1.0)
    for x in (0.0, 0.3, -0.5):
        assert f(x) == pytest.approx(1.0)
    for x in (1.0, -1.2, 5.0):
        assert f(x) == pytest.approx(0.0, abs=1e-15)
    mid = f(0.75)
    assert 0.0 < abs(mid) < 1.0
    assert f.core_poly == (1.0 + 0j,)
    assert f.support_radius == 1.0 and f.plateau_radius == 0.5


def test_test_function_algebra_and_jets():
    f = TestFunction1D.from_poly((1.0, -2.0, 0.5), r0=0.4, R=0.9)
    g = TestFunction1D.monomial(1, r0=0.5, R=1.1, coeff=3.0)
    h = f + g - f
    assert h(0.3) == pytest.approx(g(0.3))
    jets = oracle_derivatives(f, 2)
    for k in range(3):
        assert f.derivative_at_0(k) == pytest.approx(jets[k], abs=1e-8)
    assert f.mirror()(0.2) == pytest.approx(f(-0.2))
    assert f.stretched(2.0)(0.1) == pytest.approx(f(0.2))
    rem = f.taylor_remainder(0.2, 2)
    assert rem == pytest.approx(f(0.2) - 1.0 + 2.0 * 0.2)
    with pytest.raises(ValueError):
        TestFunction1D.plateau(1.0, 0.5)
    with pytest.raises(ValueError):
        f.stretched(0.0)


# --------------------------------------------------------------------------
# pairings against the oracles

def test_delta_derivatives_are_signed_jets():
    for f in probes():
        jets = oracle_derivatives(f, 3)
        for k in range(4):
            got = SymbolicDistribution1D.delta(k).pair(f)
            assert got == pytest.approx((-1) ** k * jets[k], abs=1e-7)


def test_monomial_pairing_matches_quadrature():
    for f in probes(3):
        R = f.support_radius
        for m in (0, 1, 3):
            got = SymbolicDistribution1D.monomial(m).pair(f)
            want = oracle_quad(lambda x: x ** m, f, -R, R, {0.0})
            assert got == pytest.approx(want, abs=1e-10)


def test_heaviside_pairing_matches_quadrature():
    for f in probes(3):
        R = f.support_radius
        for m in (0, 2):
            got = SymbolicDistribution1D.heaviside(m).pair(f)
            want = oracle_quad(lambda x: x ** m, f, 0.0, R)
            assert got == pytest.approx(want, abs=1e-10)


def test_principal_value_matches_cauchy_weight():
    for f in probes(4):
        assert principal_value(f) == pytest.approx(oracle_pv(f), abs=1e-8)


def test_power_i0_first_order_pole():
    for f in probes(3):
        pv = oracle_pv(f)
        f0 = f(0.0)
        for sign in (1, -1):
            got = SymbolicDistribution1D.power_i0(-1, sign).pair(f)
            assert got == pytest.approx(pv - sign * 1j * math.pi * f0,
                                        abs=1e-8)


def test_power_i0_second_order_pole():
    for f in probes(3, max_degree=3):
        got = SymbolicDistribution1D.power_i0(-2, +1).pair(f)
        f1 = oracle_derivatives(f, 1)[1]
        want = oracle_fp2(f) - 1j * math.pi * f1
        assert got == pytest.approx(want, abs=1e-6)


def test_power_i0_noninteger_sides():
    a = -0.6
    for f in probes(3):
        plus = oracle_halfline(a, 0, f)
        minus = oracle_halfline(a, 0, f.mirror())
        for sign in (1, -1):
            got = SymbolicDistribution1D.power_i0(a, sign).pair(f)
            want = plus + cmath.exp(sign * 1j * math.pi * a) * minus
            assert got == pytest.approx(want, abs=1e-7)


def test_halfline_subtracted_continuation():
    for a in (-1.5, -1.2):
        for f in probes(3):
            got = SymbolicDistribution1D.halfline(a, +1).pair(f)
            assert got == pytest.approx(oracle_halfline(a, 0, f), abs=1e-6)


def test_halfline_with_log():
    for f in probes(3):
        got = SymbolicDistribution1D.halfline(-0.5, +1, log_power=1).pair(f)
        assert got == pytest.approx(oracle_halfline(-0.5, 1, f), abs=1e-6)


def test_halfline_minus_side_mirrors():
    for f in probes(2):
        got = SymbolicDistribution1D.halfline(-1.3, -1).pair(f)
        want = SymbolicDistribution1D.halfline(-1.3, +1).pair(f.mirror())
        assert got == pytest.approx(want, rel=1e-12)


def test_negative_integer_halfline_needs_vanishing_jet():
    # f = x^2 (c2 + c3 x) near 0: x_+^-1 and x_+^-2 both pair by plain quad
    f = TestFunction1D.from_poly((0.0, 0.0, 1.0, -0.7), r0=0.5, R=1.2)
    for n, dens in ((1, lambda x: 1.0 / x), (2, lambda x: 1.0 / x ** 2)):
        got = SymbolicDistribution1D.halfline(-n, +1).pair(f)
        want = oracle_quad(dens, f, 1e-14, f.support_radius)
        assert got == pytest.approx(want, abs=1e-9)
    bad = TestFunction1D.plateau(0.5, 1.0)
    with pytest.raises(DivergentPairing):
        SymbolicDistribution1D.halfline(-1, +1).pair(bad)
    with pytest.raises(DivergentPairing):
        SymbolicDistribution1D.halfline(-2, +1).pair(
            TestFunction1D.monomial(1, 0.5, 1.0))


# --------------------------------------------------------------------------
# scaling behaviour

def test_pair_scaled_homogeneity():
    f = TestFunction1D.from_poly((0.8, -0.3, 0.4), r0=0.5, R=1.3)
    lam = 2.0
    cases = [
        (SymbolicDistribution1D.delta(0), lam ** -1),
        (SymbolicDistribution1D.delta(2), lam ** -3),
        (SymbolicDistribution1D.monomial(1), lam ** 1),
        (SymbolicDistribution1D.heaviside(2), lam ** 2),
        (SymbolicDistribution1D.halfline(-1.5, +1), lam ** -1.5),
        (SymbolicDistribution1D.power_i0(-0.3, +1), lam ** -0.3),
    ]
    for t, factor in cases:
        base = t.pair(f)
        assert t.pair_scaled(lam, f) == pytest.approx(factor * base,
                                                      rel=1e-9, abs=1e-12)
    with pytest.raises(ValueError):
        cases[0][0].pair_scaled(-1.0, f)


def test_scaling_degree_rules():
    sd = lambda t: t.scaling_degree()
    assert sd(SymbolicDistribution1D.delta(0)) == 1
    assert sd(SymbolicDistribution1D.delta(3)) == 4
    assert sd(SymbolicDistribution1D.monomial(2)) == -2
    assert sd(SymbolicDistribution1D.heaviside(1)) == -1
    assert sd(SymbolicDistribution1D.power_i0(-1.5, +1)) == 1.5
    assert sd(SymbolicDistribution1D.halfline(-2.0, +1, 1)) == 2.0
    both = SymbolicDistribution1D.delta(1) + SymbolicDistribution1D.monomial(0)
    assert sd(both) == 2
    with pytest.raises(NotHomogeneousClass):
        SymbolicDistribution1D([]).scaling_degree()


def test_linear_structure():
    f = TestFunction1D.random_probe(RNG)
    t = SymbolicDistribution1D.delta(0) * 2.0 \
        - SymbolicDistribution1D.heaviside(0)
    want = 2.0 * f(0.0) - oracle_quad(lambda x: 1.0, f, 0.0,
                                      f.support_radius)
    assert t.pair(f) == pytest.approx(want, abs=1e-9)
    assert SymbolicDistribution1D.delta(0, coeff=0.0).terms == ()


def test_pointwise_power_product_adds_exponents():
    t1 = SymbolicDistribution1D.power_i0(-0.7, +1)
    t2 = SymbolicDistribution1D.power_i0(-0.6, +1)
    prod = pointwise_power_product(t1, t2)
    ref = SymbolicDistribution1D.power_i0(-1.3, +1)
    f = TestFunction1D.from_poly((1.0, 0.5), r0=0.5, R=1.0)
    assert prod.pair(f) == pytest.approx(ref.pair(f), rel=1e-12)
    with pytest.raises(DistError):
        pointwise_power_product(t1, SymbolicDistribution1D.power_i0(-0.6, -1))
    with pytest.raises(DistError):
        pointwise_power_product(t1 + t2, t2)
    with pytest.raises(DistError):
        pointwise_power_product(SymbolicDistribution1D.delta(0), t2)


def test_constructor_guards():
    with pytest.raises(DistError):
        SymbolicDistribution1D([(1.0, ("mystery", 0))])
    with pytest.raises(ValueError):
        SymbolicDistribution1D.power_i0(-1.0, sign=2)
    with pytest.raises(ValueError):
        SymbolicDistribution1D.halfline(-1.0, side=0)
