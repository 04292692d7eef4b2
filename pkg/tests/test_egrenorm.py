"""Extension of singular model distributions across the origin.

Oracles: the minimal-subtraction value of the 1/x family has a closed
subtracted-quadrature form, and extension ambiguities are validated on
held-out probes rather than the fitting set.
"""
import math
import random
import warnings

import numpy as np
import pytest
from scipy import integrate

from paqft.dist1d import (TestFunction1D, SymbolicDistribution1D,
                          DivergentPairing)
from paqft import egrenorm as eg

RNG = random.Random(1311)


def probe(poly=(1.0, 0.5, -0.25), r0=0.5, R=1.0):
    return TestFunction1D.from_poly(poly, r0, R)


def ms_oracle_inverse_x(f):
    """MS value of the x_+^{zeta-1} family at zeta = 0:
    int_0^1 (f - f(0))/x + int_1^R f/x, by direct quadrature."""
    f0 = f(0.0).real
    pts = [f.plateau_radius]
    a = integrate.quad(lambda x: (f(x).real - f0) / x, 0.0, 1.0,
                       points=pts, limit=400)[0]
    b = integrate.quad(lambda x: f(x).real / x, 1.0,
                       max(f.support_radius, 1.0 + 1e-9), limit=400)[0]
    return a + b


# --------------------------------------------------------------------------
# scaling degrees

def test_regression_recovers_symbolic_degrees():
    cases = [
        (SymbolicDistribution1D.delta(0), 1.0),
        (SymbolicDistribution1D.delta(2), 3.0),
        (SymbolicDistribution1D.heaviside(0), 0.0),
        (SymbolicDistribution1D.monomial(2), -2.0),
        (SymbolicDistribution1D.halfline(-1.5, +1), 1.5),
        (SymbolicDistribution1D.power_i0(-1.0, +1), 1.0),
    ]
    for t, want in cases:
        assert eg.scaling_degree(t) == want
        assert eg.scaling_degree_regression(t) == pytest.approx(want, abs=0.05)
        assert eg.divergence_degree(t) == want - 1.0


def test_regression_raises_at_halfline_pole():
    with pytest.raises(DivergentPairing):
        eg.scaling_degree_regression(SymbolicDistribution1D.halfline(-1, +1))


def test_regression_needs_nonzero_samples():
    with pytest.raises(eg.ExtensionError):
        eg.scaling_degree_regression(SymbolicDistribution1D([]))


# --------------------------------------------------------------------------
# the W-scheme projection

def test_w_projection_kills_the_jet():
    w = eg.make_w_projection(2)
    f = probe((0.7, -1.3, 0.2, 0.05))
    g = eg.w_project(f, w)
    for k in range(3):
        assert g.derivative_at_0(k) == 0
    assert g.derivative_at_0(3) == f.derivative_at_0(3)
    with pytest.raises(ValueError):
        eg.make_w_projection(-1)


def test_extension_unique_below_zero_divergence():
    t = SymbolicDistribution1D.halfline(-0.5, +1)  # div = -0.5
    f = probe()
    e = eg.extend(t)
    assert e.pair(f) == t.pair(f)
    with pytest.warns(eg.NegativeDivergenceWarning):
        e2 = eg.extend(t, w_alphas=eg.make_w_projection(1))
    assert e2.pair(f) == t.pair(f)


def test_extension_evaluates_at_the_pole():
    t = SymbolicDistribution1D.halfline(-2, +1)  # div = 1
    f = probe()
    with pytest.raises(DivergentPairing):
        t.pair(f)
    e = eg.extend(t)
    val = e.pair(f)
    assert np.isfinite(val.real) and np.isfinite(val.imag)
    # on probes with a vanishing jet the extension is the plain pairing
    flat = probe((0.0, 0.0, 0.4, -0.2))
    assert e.pair(flat) == pytest.approx(t.pair(flat), rel=1e-12)


def test_extension_family_must_cover_order():
    t = SymbolicDistribution1D.halfline(-2, +1)
    with pytest.raises(eg.ExtensionError):
        eg.extend(t, w_alphas=eg.make_w_projection(0))


def test_two_schemes_differ_by_local_terms():
    t = SymbolicDistribution1D.halfline(-2, +1)
    e1 = eg.extend(t, w_alphas=eg.make_w_projection(1, 0.5, 1.0))
    e2 = eg.extend(t, w_alphas=eg.make_w_projection(1, 0.3, 0.7))
    coeffs, resid = eg.extension_ambiguity(e1, e2, max_order=1)
    assert resid < 1e-9
    # held-out probe: the fitted delta polynomial predicts the difference
    f = probe((0.9, 0.4, -0.1, 0.3), 0.45, 1.2)
    want = sum(c * (-1) ** a * f.derivative_at_0(a)
               for a, c in enumerate(coeffs))
    got = e1.pair(f) - e2.pair(f)
    assert got == pytest.approx(want, abs=1e-8)


def test_nonlocal_difference_is_rejected():
    t = SymbolicDistribution1D.halfline(-2, +1)
    w = eg.make_w_projection(1)
    e1 = eg.extend(t, w_alphas=w)
    smeared = eg.ExtendedDistribution(
        t + SymbolicDistribution1D.heaviside(0, coeff=0.3), w, 1.0)
    with pytest.raises(eg.NonLocalDifference):
        eg.extension_ambiguity(e1, smeared, max_order=1)


# --------------------------------------------------------------------------
# analytic regularization

def test_entire_family_has_no_pole():
    family = lambda z: SymbolicDistribution1D.power_i0(-1.0 + z, +1)
    f = probe()
    rep = eg.analytic_regularization(family, f)
    assert rep["pole_order"] == 0
    assert rep["principal"] == []
    direct = SymbolicDistribution1D.power_i0(-1.0, +1).pair(f)
    assert rep["regular_value"] == pytest.approx(direct, abs=1e-7)


def test_simple_pole_residue_is_the_value_at_zero():
    family = lambda z: SymbolicDistribution1D.halfline(z - 1.0, +1)
    f = probe()
    rep = eg.analytic_regularization(family, f)
    assert rep["pole_order"] == 1
    assert rep["principal"][0] == pytest.approx(f(0.0), abs=1e-7)


def test_second_pole_residue_is_the_first_jet():
    family = lambda z: SymbolicDistribution1D.halfline(z - 2.0, +1)
    f = probe((0.8, -0.6, 0.3))
    rep = eg.analytic_regularization(family, f)
    assert rep["pole_order"] == 1
    assert rep["principal"][0] == pytest.approx(f.derivative_at_0(1),
                                                abs=1e-6)


def test_pole_cap_enforced():
    family = lambda z: SymbolicDistribution1D.halfline(z - 1.0, +1)
    with pytest.raises(eg.PoleOrderExceeded):
        eg.analytic_regularization(family, probe(), pole_cap=0)


def test_minimal_subtraction_against_oracle():
    family = lambda z: SymbolicDistribution1D.halfline(z - 1.0, +1)
    for poly, r0, R in (((1.0, 0.4), 0.5, 1.0),
                        ((0.5, -0.3, 0.2), 0.5, 2.0)):
        f = probe(poly, r0, R)
        got = eg.minimal_subtraction(family, f)
        assert got == pytest.approx(ms_oracle_inverse_x(f), abs=1e-8)
        ext = eg.ms_extension(family)
        assert ext.pair(f) == pytest.approx(got, rel=1e-12)


def test_feynman_square_demo_report():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = eg.feynman_square_demo()
    assert rep["scaling_degree_symbolic"] == 2.0
    assert rep["scaling_degree_regression"] == pytest.approx(2.0, abs=0.05)
    assert rep["divergence_degree"] == 1.0
    assert rep["ambiguity_residual"] < 1e-7
    c0, c1 = rep["ambiguity_coefficients"]
    # the delta' mismatch between the schemes is exactly -i pi
    assert c1 == pytest.approx(-1j * math.pi, abs=1e-6)
    assert abs(c0.imag) < 1e-6
    d = rep["w_value_probe"] - rep["ms_value_probe"]
    assert np.isfinite(d.real) and np.isfinite(d.imag)
