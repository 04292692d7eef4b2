"""Numerical wave front estimation and propagation of singularities.

The estimator localizes with a smooth plateau window around a candidate
point, takes the pairing against e^{+ikx} along a dyadic frequency ladder in
each direction, and fits the power-law decay of the amplitude.  Directions
whose decay exponent stays below the threshold are flagged singular.  On top
of that sit the Whitney-sum compatibility test for products, the microcausal
covector condition, and the Hamiltonian flow transporting covectors along
bicharacteristics.
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .dist1d import SymbolicDistribution1D, TestFunction1D, _window
from .lattice import Lattice1p1, PropagatorSet


class MicrolocalError(Exception):
    pass


class WindowTooWide(MicrolocalError):
    """The window's transition annulus covers the singular support."""


class WFRay(NamedTuple):
    center: tuple
    direction: tuple
    exponent: float
    amplitude: float
    singular: bool


class WFEstimate:
    """Decay-exponent table over (center, direction) rays."""

    def __init__(self, rays, threshold: float, meta=None):
        self.rays = list(rays)
        self.threshold = threshold
        self.meta = meta or {}

    def singular(self):
        return [r for r in self.rays if r.singular]

    def singular_at(self, center, tol: float = 1e-9):
        c = np.asarray(center, dtype=float)
        out = []
        for r in self.singular():
            if np.linalg.norm(np.asarray(r.center) - c) <= tol:
                out.append(r)
        return out

    def is_regular(self) -> bool:
        return not self.singular()

    def __repr__(self):
        return (f"WFEstimate({len(self.rays)} rays, "
                f"{len(self.singular())} singular)")


def _fit_decay(rs, amps, amp_floor: float, rel_floor: float):
    """Least-squares slope of -log|A| vs log r, with noise floors.

    Amplitudes that never rise above amp_floor, or whose top-of-ladder value
    has fallen below rel_floor of the peak, count as regular (infinite
    exponent): the fit would only measure the quadrature/window floor.
    """
    amax = max(amps)
    if amax < amp_floor:
        return math.inf, amax
    if amps[-1] <= rel_floor * amax:
        return math.inf, amax
    floor = max(amp_floor, amax * 1e-14)
    ys = [math.log(max(a, floor)) for a in amps]
    xs = [math.log(r) for r in rs]
    slope = np.polyfit(xs, ys, 1)[0]
    return -float(slope), amax


# ---------------------------------------------------------------------------
# one-dimensional estimator


class _WindowedWave:
    """W(x - x0) e^{ikx} with a plateau window; derivatives at the origin are
    exact when the origin sits on the plateau or outside the support."""

    def __init__(self, x0: float, k: float, r0: float, R: float):
        self.x0 = x0
        self.k = k
        self.r0 = r0
        self.R = R

    def window_at_origin(self) -> float:
        ax = abs(self.x0)
        if ax <= self.r0:
            return 1.0
        if ax >= self.R:
            return 0.0
        raise WindowTooWide(
            f"origin lies in the transition annulus of the window at {self.x0}")

    def value(self, x):
        return _window(np.asarray(x) - self.x0, self.r0, self.R) \
            * np.exp(1j * self.k * np.asarray(x))

    def derivative_at_0(self, m: int) -> complex:
        return self.window_at_origin() * (1j * self.k) ** m


def _pair_wave_1d(t, wave: _WindowedWave) -> complex:
    """<t, W e^{ikx}> for the model kinds that appear in the demos."""
    lo, hi = wave.x0 - wave.R, wave.x0 + wave.R
    if callable(t) and not isinstance(t, SymbolicDistribution1D):
        re = integrate.quad(lambda x: (t(x) * wave.value(x)).real, lo, hi,
                            limit=1000, epsabs=1e-12, epsrel=1e-10)[0]
        im = integrate.quad(lambda x: (t(x) * wave.value(x)).imag, lo, hi,
                            limit=1000, epsabs=1e-12, epsrel=1e-10)[0]
        return re + 1j * im
    out = 0j
    for coeff, kind in t.terms:
        tag = kind[0]
        if tag == "delta":
            out += coeff * (-1) ** kind[1] * wave.derivative_at_0(kind[1])
        elif tag == "monomial":
            out += coeff * _pair_wave_1d(lambda x: x ** kind[1], wave)
        elif tag == "heaviside":
            out += coeff * _pair_wave_1d(
                lambda x: np.where(np.asarray(x) >= 0, 1.0, 0.0)
                * np.asarray(x, dtype=float) ** kind[1], wave)
        elif tag == "power_i0" and kind[2] == -1:
            sign = kind[1]
            if lo < 0.0 < hi:
                pv_re = integrate.quad(
                    lambda x: wave.value(x).real, lo, hi,
                    weight="cauchy", wvar=0.0, limit=1000,
                    epsabs=1e-12, epsrel=1e-10)[0]
                pv_im = integrate.quad(
                    lambda x: wave.value(x).imag, lo, hi,
                    weight="cauchy", wvar=0.0, limit=1000,
                    epsabs=1e-12, epsrel=1e-10)[0]
                pv = pv_re + 1j * pv_im
                out += coeff * (pv - sign * 1j * math.pi
                                * wave.window_at_origin())
            else:
                out += coeff * _pair_wave_1d(lambda x: 1.0 / x, wave)
        else:
            raise MicrolocalError(
                f"wave pairing not implemented for kind {kind}")
    return out


def wf_estimate_1d(t, centers=(0.0,), k_base: float = 4.0,
                   n_octaves: int = 7, window=(0.25, 0.5),
                   threshold: float = 4.0, amp_floor: float = 1e-9,
                   rel_floor: float = 1e-6) -> WFEstimate:
    """Wave front estimate of a distribution on the line.

    t is a SymbolicDistribution1D or a smooth callable.  Directions are the
    two signs; the frequency ladder is k_base * 2^j.
    """
    r0, R = window
    rs = [k_base * 2 ** j for j in range(n_octaves + 1)]
    rays = []
    for x0 in centers:
        for s in (1.0, -1.0):
            amps = []
            for r in rs:
                a = _pair_wave_1d(t, _WindowedWave(float(x0), s * r, r0, R))
                amps.append(abs(a))
            expo, amax = _fit_decay(rs, amps, amp_floor, rel_floor)
            rays.append(WFRay((float(x0),), (s,), expo, amax,
                              expo < threshold))
    return WFEstimate(rays, threshold,
                      meta={"k_base": k_base, "ladder": rs, "window": window})


# ---------------------------------------------------------------------------
# two-dimensional sampled estimator


class SampledField2D:
    """Real or complex samples on a rectangular (t, x) grid with spacings
    (a_t, a_x); coordinates are physical."""

    def __init__(self, values: np.ndarray, a_t: float, a_x: float):
        self.values = np.asarray(values)
        self.a_t = float(a_t)
        self.a_x = float(a_x)
        nt, nx = self.values.shape
        self.ts = np.arange(nt) * self.a_t
        self.xs = np.arange(nx) * self.a_x

    def coords(self, it: int, ix: int):
        return (self.ts[it], self.xs[ix])


def wf_estimate_2d(field: SampledField2D, centers, n_rays: int = 16,
                   k_base: float = 1.25, n_octaves: int = 3,
                   sigma: float = 0.5, cut_sigmas: float = 5.0,
                   threshold: float = 2.5, amp_floor: float = 1e-7,
                   rel_floor: float = 1e-4) -> WFEstimate:
    """Windowed-pairing wave front estimate for gridded data.

    The window is a radial Gaussian (truncated at cut_sigmas), whose spectral
    decay is fast enough to resolve power-law fronts over a short dyadic
    ladder; frequencies stay below the grid Nyquist limit.
    """
    kmax = k_base * 2 ** n_octaves
    nyq = math.pi / max(field.a_t, field.a_x)
    if kmax > nyq:
        raise MicrolocalError(
            f"ladder top {kmax:.3g} exceeds grid Nyquist {nyq:.3g}")
    R = sigma * cut_sigmas
    rs = [k_base * 2 ** j for j in range(n_octaves + 1)]
    dirs = [(math.cos(2 * math.pi * j / n_rays),
             math.sin(2 * math.pi * j / n_rays)) for j in range(n_rays)]
    T, X = np.meshgrid(field.ts, field.xs, indexing="ij")
    vals = field.values
    cell = field.a_t * field.a_x
    rays = []
    for (t0, x0) in centers:
        dT, dX = T - t0, X - x0
        dist2 = dT * dT + dX * dX
        mask = dist2 < R * R
        if not mask.any():
            continue
        w = np.exp(-dist2[mask] / (2.0 * sigma * sigma))
        v = vals[mask] * w * cell
        tt, xx = T[mask], X[mask]
        for d in dirs:
            amps = []
            for r in rs:
                phase = np.exp(1j * r * (d[0] * tt + d[1] * xx))
                amps.append(abs(np.sum(v * phase)))
            expo, amax = _fit_decay(rs, amps, amp_floor, rel_floor)
            rays.append(WFRay((t0, x0), d, expo, amax, expo < threshold))
    return WFEstimate(rays, threshold,
                      meta={"ladder": rs, "n_rays": n_rays,
                            "sigma": sigma, "cut": R})


# ---------------------------------------------------------------------------
# compatibility and causality of covector sets


def whitney_sum_witnesses(wf1: WFEstimate, wf2: WFEstimate,
                          pos_tol: float = 1e-9,
                          dir_tol: float = 1e-6):
    """Pairs of singular rays at a common point whose directions cancel,
    i.e. hits of the fibrewise sum on the zero section."""
    out = []
    for r1 in wf1.singular():
        c1 = np.asarray(r1.center)
        d1 = np.asarray(r1.direction)
        for r2 in wf2.singular():
            if np.linalg.norm(c1 - np.asarray(r2.center)) > pos_tol:
                continue
            if np.linalg.norm(d1 + np.asarray(r2.direction)) < dir_tol:
                out.append((r1, r2))
    return out


def product_compatible(wf1: WFEstimate, wf2: WFEstimate, **kw):
    """Hoermander criterion on the estimated sets: the product is admissible
    when no opposite singular covectors sit over the same point."""
    wit = whitney_sum_witnesses(wf1, wf2, **kw)
    return len(wit) == 0, wit


def in_future_cone(k, tol: float = 0.0) -> bool:
    """Closed forward covector cone for signature (+,-): k_t >= |k_x|."""
    return k[0] >= abs(k[1]) - tol


def in_past_cone(k, tol: float = 0.0) -> bool:
    return -k[0] >= abs(k[1]) - tol


def microcausal_check(covectors, tol: float = 0.0) -> bool:
    """True when the tuple avoids both the all-future and the all-past
    configuration (the admissibility cone condition for vertex covectors)."""
    ks = list(covectors)
    if not ks:
        return False
    all_fut = all(in_future_cone(k, tol) for k in ks)
    all_past = all(in_past_cone(k, tol) for k in ks)
    return not all_fut and not all_past


# ---------------------------------------------------------------------------
# bicharacteristic flow


def bicharacteristic_flow(x0, k0, dt: float, n_steps: int,
                          metric_inv=None, fixpoint_iters: int = 12) -> dict:
    """Hamiltonian flow of sigma(x, k) = k . G(x) k with the implicit
    midpoint rule; G is the (position-dependent) inverse metric, default
    diag(1, -1).  Midpoint steps preserve quadratic invariants, so for
    constant G the symbol is conserved to rounding.
    """
    if metric_inv is None:
        G0 = np.diag([1.0, -1.0])
        metric_inv = lambda x: G0
    x = np.asarray(x0, dtype=float).copy()
    k = np.asarray(k0, dtype=float).copy()
    dim = x.size

    def grads(x, k):
        G = metric_inv(x)
        dx = 2.0 * G @ k
        dk = np.zeros(dim)
        h = 1e-6
        for a in range(dim):
            xp = x.copy(); xp[a] += h
            xm = x.copy(); xm[a] -= h
            dk[a] = -(k @ metric_inv(xp) @ k - k @ metric_inv(xm) @ k) / (2 * h)
        return dx, dk

    def sigma(x, k):
        return float(k @ metric_inv(x) @ k)

    xs = [x.copy()]
    ks = [k.copy()]
    sigmas = [sigma(x, k)]
    for _ in range(n_steps):
        xm, km = x.copy(), k.copy()
        for _ in range(fixpoint_iters):
            dxm, dkm = grads((x + xm) / 2, (k + km) / 2)
            xm_new = x + dt * dxm
            km_new = k + dt * dkm
            if (np.max(np.abs(xm_new - xm)) < 1e-15
                    and np.max(np.abs(km_new - km)) < 1e-15):
                xm, km = xm_new, km_new
                break
            xm, km = xm_new, km_new
        x, k = xm, km
        xs.append(x.copy())
        ks.append(k.copy())
        sigmas.append(sigma(x, k))
    sigmas = np.array(sigmas)
    return {
        "x": np.array(xs),
        "k": np.array(ks),
        "sigma": sigmas,
        "sigma_drift": float(np.max(np.abs(sigmas - sigmas[0]))),
        "time": dt * n_steps,
    }


# ---------------------------------------------------------------------------
# propagation of singularities on the lattice


def propagation_check(mass: float = 1.0, n_t: int = 512, n_x: int = 256,
                      a_t: float = 0.05, a_x: float = 0.1,
                      y0=None, annulus=(5.0, 9.3), stride: int = 6,
                      cone_tol_deg: float = 15.0,
                      threshold: float = 2.5) -> dict:
    """Estimate the wave front of the commutator kernel column Delta(., y0)
    and measure how much of the singular amplitude sits near the light cone
    through y0 (position angles within cone_tol_deg of the +-45 degree rays).
    """
    from fractions import Fraction
    lat = Lattice1p1(n_t=n_t, n_x=n_x,
                     a_t=Fraction(a_t).limit_denominator(10 ** 6),
                     a_x=Fraction(a_x).limit_denominator(10 ** 6),
                     mass=mass)
    ps = PropagatorSet(lat)
    if y0 is None:
        y0 = (n_t // 2, n_x // 2)
    t0, x0 = y0
    col = ps.causal_column(t0, x0)
    field = SampledField2D(col, a_t, a_x)
    origin = np.array([t0 * a_t, x0 * a_x])

    lo, hi = annulus
    centers = []
    for it in range(2, n_t - 2, stride):
        for ix in range(2, n_x - 2, stride):
            p = np.array([it * a_t, ix * a_x])
            d = np.linalg.norm(p - origin)
            if lo <= d <= hi:
                centers.append((p[0], p[1]))

    wf = wf_estimate_2d(field, centers, threshold=threshold)

    cone_rays = [np.array([1.0, 1.0]) / math.sqrt(2),
                 np.array([1.0, -1.0]) / math.sqrt(2),
                 np.array([-1.0, 1.0]) / math.sqrt(2),
                 np.array([-1.0, -1.0]) / math.sqrt(2)]
    cos_tol = math.cos(math.radians(cone_tol_deg))

    mass_on, mass_total = 0.0, 0.0
    per_center: dict[tuple, float] = {}
    for r in wf.singular():
        per_center[r.center] = max(per_center.get(r.center, 0.0), r.amplitude)
    for c, m in per_center.items():
        p = np.array(c) - origin
        nrm = np.linalg.norm(p)
        if nrm < 1e-12:
            continue
        u = p / nrm
        on = any(float(u @ ray) >= cos_tol for ray in cone_rays)
        mass_total += m
        if on:
            mass_on += m
    frac = mass_on / mass_total if mass_total else 0.0
    return {
        "fraction_on_cone": frac,
        "passes": frac >= 0.9,
        "n_centers": len(centers),
        "n_singular_centers": len(per_center),
        "mass_total": mass_total,
        "wf": wf,
        "y0_physical": tuple(origin),
    }
