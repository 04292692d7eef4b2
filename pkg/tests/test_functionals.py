"""Polynomial functionals: derivatives against a finite-difference oracle,
field equations, and the classical bracket."""

import random
from fractions import Fraction

import numpy as np
import pytest

from paqft.exact import ExactComplex
from paqft.series import FormalSeries
from paqft.functionals import (PolyFunctional, DimensionMismatch,
                               MaxDegreeExceeded, CutoffTooSmall,
                               smeared_field, local_power, interaction_vertex,
                               pointwise_product, peierls_bracket,
                               GeneralizedLagrangian)
from conftest import make_functional


# ------------------------------------------------------------------ oracle

def fd_partial(F, phi, site, h=1e-6):
    """Central difference of the float evaluation; the oracle for partial."""
    up = phi.copy()
    up[site] += h
    dn = phi.copy()
    dn[site] -= h
    return (F.evaluate_float(up) - F.evaluate_float(dn)) / (2 * h)


def test_partial_matches_finite_differences(lat_small):
    rng = random.Random(21)
    npr = np.random.default_rng(21)
    for _ in range(5):
        F = make_functional(rng, lat_small, max_degree=3, n_terms=3)
        phi = npr.normal(size=lat_small.n_sites)
        for site in sorted(F.support()):
            got = complex(F.partial(site).evaluate_float(phi))
            want = fd_partial(F, phi, site)
            assert got == pytest.approx(want, abs=1e-6, rel=1e-6)


def test_func_derivative_is_partial_over_volume(lat_small):
    rng = random.Random(22)
    F = make_functional(rng, lat_small, max_degree=2, n_terms=2)
    s = sorted(F.support())[0]
    w = Fraction(1) / lat_small.volume_weight
    assert F.func_derivative(s) == F.partial(s) * w


# -------------------------------------------------------------- evaluation

def test_evaluate_exact(lat_small):
    a, b = lat_small.site(2, 1), lat_small.site(3, 3)
    F = PolyFunctional(lat_small, {
        (a, b): FormalSeries({(0, 0): ExactComplex(Fraction(1, 2))}),
        (a,): FormalSeries({(1, 0): ExactComplex(3)}),
    })
    phi = {a: Fraction(2, 3), b: Fraction(-3)}
    got = F.evaluate(phi)
    want = FormalSeries({(0, 0): ExactComplex(Fraction(1, 2) * Fraction(2, 3)
                                              * Fraction(-3)),
                         (1, 0): ExactComplex(2)})
    assert got == want


def test_smeared_field_evaluation(lat_small):
    f = {lat_small.site(1, 0): Fraction(2), lat_small.site(2, 2): Fraction(-1)}
    F = smeared_field(lat_small, f)
    phi = {s: Fraction(1, 2) for s in f}
    got = F.evaluate(phi).coefficient(0, 0)
    want = ExactComplex(sum(v * Fraction(1, 2) for v in f.values())
                        * lat_small.volume_weight)
    assert got == want


def test_site_bounds_checked(lat_small):
    with pytest.raises(DimensionMismatch):
        PolyFunctional(lat_small, {(lat_small.n_sites,): FormalSeries.one()})


def test_pointwise_product_degree_cap(lat_small):
    F = local_power(lat_small, {5: 1}, 3)
    with pytest.raises(MaxDegreeExceeded):
        pointwise_product(F, F, degree_cap=5)


def test_interaction_vertex_carries_coupling(lat_small):
    V = interaction_vertex(lat_small, {5: Fraction(1)}, 4)
    c = V.coefficient((5, 5, 5, 5))
    assert c.coefficient(0, 1) == ExactComplex(
        lat_small.volume_weight * Fraction(1, 24))
    assert c.coefficient(0, 0) == ExactComplex(0)


# --------------------------------------------------------- field equations

def test_leapfrog_solution_satisfies_field_equation():
    from paqft.lattice import Lattice1p1
    lat = Lattice1p1(12, 8, Fraction(1, 2), Fraction(1))
    lag = GeneralizedLagrangian(lat, np.ones(lat.n_sites), lam=Fraction(1, 3))
    rng = np.random.default_rng(4)
    phi0 = rng.normal(size=lat.n_x) * 0.3
    phi1 = phi0 + 0.05 * rng.normal(size=lat.n_x)
    phi = lag.solve_leapfrog(phi0, phi1)
    el = lag.euler_lagrange(phi.reshape(-1))
    rows = lat.interior_sites()
    assert np.max(np.abs(el[rows])) < 1e-12


def test_constant_field_euler_lagrange(lat_small):
    lam = Fraction(3, 2)
    lag = GeneralizedLagrangian(lat_small, np.ones(lat_small.n_sites), lam=lam)
    c = 0.7
    el = lag.euler_lagrange(np.full(lat_small.n_sites, c))
    want = -(lat_small.mass ** 2 * c + float(lam) / 6.0 * c ** 3)
    for s in lat_small.interior_sites():
        assert el[s] == pytest.approx(want, rel=1e-12)


def test_cutoff_too_small(lat_small):
    cut = np.ones(lat_small.n_sites)
    cut[lat_small.site(3, 2)] = 0.0
    lag = GeneralizedLagrangian(lat_small, cut)
    with pytest.raises(CutoffTooSmall):
        lag.euler_lagrange(np.zeros(lat_small.n_sites),
                           probe=[lat_small.site(3, 2)])
    with pytest.raises(CutoffTooSmall):
        lag.euler_lagrange(np.zeros(lat_small.n_sites),
                           probe=[lat_small.site(0, 1)])


def test_action_second_derivative_is_linearized_operator(lat_small):
    """d^2 S / dphi_s dphi_r at zero reproduces the weighted E stencil."""
    from paqft.lattice import el_operator
    lag = GeneralizedLagrangian(lat_small, np.ones(lat_small.n_sites))
    S = lag.action()
    E = el_operator(lat_small)
    w = lat_small.volume_weight
    s = lat_small.site(3, 1)
    for r in range(lat_small.n_sites):
        second = S.partial(s).partial(r).coefficient(()).coefficient(0, 0)
        assert second == ExactComplex(Fraction(E[s, r]) * w)


# ----------------------------------------------------------------- bracket

def test_peierls_antisymmetric_and_bilinear(xp_small, rand_functional):
    F = rand_functional()
    G = rand_functional()
    H = rand_functional()
    assert peierls_bracket(F, G, xp_small) == -peierls_bracket(G, F, xp_small)
    assert (peierls_bracket(F + G, H, xp_small)
            == peierls_bracket(F, H, xp_small)
            + peierls_bracket(G, H, xp_small))


def test_peierls_of_smeared_fields_is_pairing(xp_small):
    lat = xp_small.lat
    f = {lat.site(2, 1): Fraction(1, 2), lat.site(3, 0): Fraction(2)}
    g = {lat.site(4, 2): Fraction(-1, 3)}
    br = peierls_bracket(smeared_field(lat, f), smeared_field(lat, g),
                         xp_small)
    w2 = lat.volume_weight ** 2
    want = sum((fi * xp_small.causal_entry(i, j) * gj
                for i, fi in f.items() for j, gj in g.items()), Fraction(0))
    assert br.coefficient(()).coefficient(0, 0) == ExactComplex(want * w2)


def test_peierls_jacobi_identically_zero(xp_small, rand_functional):
    F = rand_functional(max_degree=2)
    G = rand_functional(max_degree=2)
    H = rand_functional(max_degree=2)
    J = (peierls_bracket(F, peierls_bracket(G, H, xp_small), xp_small)
         + peierls_bracket(G, peierls_bracket(H, F, xp_small), xp_small)
         + peierls_bracket(H, peierls_bracket(F, G, xp_small), xp_small))
    assert J.is_zero()
