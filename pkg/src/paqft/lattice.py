"""Discretized 1+1D Minkowski spacetime and the free-field propagators.

Periodic in space, open in time.  The linearized field-equation operator is
E = -(box + m^2) with the centered second-difference box; its retarded Green
kernel is built by leapfrog time stepping, so support inside the lattice cone
(one spatial cell per time step) holds with exact zeros outside.

The positive-frequency two-point kernel uses the leapfrog dispersion

    omega_hat_k = (2/a_t) * arcsin(a_t * Omega_k / 2),
    Omega_k^2   = m^2 + (2/a_x * sin(k a_x / 2))^2,

with mode amplitude 1/(2 s_k N_x a_x), s_k = sin(omega_hat_k a_t)/a_t.  With
these choices the mode-sum and time-stepped commutator kernels agree to
rounding and the equal-time canonical pairing is exact, which the exact-lift
layer (ExactPropagators) turns into identities over the rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exact import ExactComplex, to_fraction


class LatticeError(Exception):
    pass


class UnstableStep(LatticeError):
    """Leapfrog stability violated (Courant or massive band-edge bound)."""


class ZeroModeSingular(LatticeError):
    """m = 0 has an undamped k = 0 mode; no positive-frequency split."""


class Lattice1p1:
    """Uniform n_t x n_x grid, spacings a_t, a_x (exact rationals), mass m."""

    def __init__(self, n_t: int = 24, n_x: int = 24,
                 a_t=Fraction(1, 2), a_x=Fraction(1), mass: float = 1.0):
        if n_t < 4 or n_x < 4 or n_x % 2:
            raise ValueError("need n_t >= 4 and even n_x >= 4")
        a_t = to_fraction(a_t)
        a_x = to_fraction(a_x)
        if a_t <= 0 or a_x <= 0:
            raise ValueError("spacings must be positive")
        if a_t > a_x:
            raise UnstableStep(f"Courant condition a_t <= a_x violated: "
                               f"{a_t} > {a_x}")
        if mass < 0:
            raise ValueError("mass must be nonnegative")
        # band edge: a_t^2 * max_k Omega_k^2 < 4 keeps every mode oscillatory
        edge = float(a_t) ** 2 * (mass ** 2 + 4.0 / float(a_x) ** 2)
        if mass > 0 and edge >= 4.0:
            raise UnstableStep(
                f"massive band edge a_t^2 (m^2 + 4/a_x^2) = {edge:.6g} >= 4")
        self.n_t = n_t
        self.n_x = n_x
        self.a_t = a_t
        self.a_x = a_x
        self.mass = float(mass)

    @property
    def n_sites(self) -> int:
        return self.n_t * self.n_x

    @property
    def volume_weight(self) -> Fraction:
        """Exact weight a_t*a_x carried by every site sum standing for an integral."""
        return self.a_t * self.a_x

    def site(self, t: int, x: int) -> int:
        if not 0 <= t < self.n_t:
            raise IndexError(f"time index {t} outside open interval")
        return t * self.n_x + x % self.n_x

    def coords(self, i: int) -> tuple[int, int]:
        return divmod(i, self.n_x)

    def is_interior_time(self, t: int) -> bool:
        return 1 <= t <= self.n_t - 2

    def interior_sites(self) -> list[int]:
        return [self.site(t, x) for t in range(1, self.n_t - 1)
                for x in range(self.n_x)]

    def per_dist(self, x1: int, x2: int) -> int:
        d = abs(x1 - x2) % self.n_x
        return min(d, self.n_x - d)

    def in_past_cone(self, i: int, j: int) -> bool:
        """Site i in the (closed) lattice past cone of site j, slope one cell per step."""
        ti, xi = self.coords(i)
        tj, xj = self.coords(j)
        return ti <= tj and self.per_dist(xi, xj) <= tj - ti

    def __repr__(self):
        return (f"Lattice1p1(n_t={self.n_t}, n_x={self.n_x}, "
                f"a_t={self.a_t}, a_x={self.a_x}, m={self.mass})")


def kg_operator(lat: Lattice1p1) -> np.ndarray:
    """Dense stencil matrix for box + m^2 (signature +,-), interior time rows only."""
    n = lat.n_sites
    at2 = float(lat.a_t) ** 2
    ax2 = float(lat.a_x) ** 2
    m2 = lat.mass ** 2
    P = np.zeros((n, n))
    for t in range(1, lat.n_t - 1):
        for x in range(lat.n_x):
            r = lat.site(t, x)
            P[r, lat.site(t + 1, x)] += 1.0 / at2
            P[r, lat.site(t - 1, x)] += 1.0 / at2
            P[r, r] += -2.0 / at2 + 2.0 / ax2 + m2
            P[r, lat.site(t, x + 1)] += -1.0 / ax2
            P[r, lat.site(t, x - 1)] += -1.0 / ax2
    return P


def el_operator(lat: Lattice1p1) -> np.ndarray:
    """E = S''(0) = -(box + m^2): the linearized field-equation operator."""
    return -kg_operator(lat)


def kg_apply(lat: Lattice1p1, phi: np.ndarray) -> np.ndarray:
    """Apply the box + m^2 stencil to a (n_t, n_x) field; boundary rows zero."""
    at2 = float(lat.a_t) ** 2
    ax2 = float(lat.a_x) ** 2
    out = np.zeros_like(phi, dtype=float)
    dtt = phi[2:, :] - 2.0 * phi[1:-1, :] + phi[:-2, :]
    dxx = (np.roll(phi, -1, axis=1) - 2.0 * phi
           + np.roll(phi, 1, axis=1))[1:-1, :]
    out[1:-1, :] = dtt / at2 - dxx / ax2 + lat.mass ** 2 * phi[1:-1, :]
    return out


class PropagatorSet:
    """All free propagators of one lattice, as translation-invariant tables
    and (for small lattices) dense site-indexed matrices.

    Kernels are continuum normalized: E applied to the retarded kernel gives
    the lattice delta delta_xy/(a_t*a_x) on interior rows.
    """

    def __init__(self, lat: Lattice1p1):
        self.lat = lat
        self._ret_table = None
        self._wightman_table = None
        self._cache = {}

    # -- translation-invariant tables ---------------------------------------

    def ret_table(self) -> np.ndarray:
        """g[n, dx]: retarded response n steps after a unit kernel-delta source."""
        if self._ret_table is None:
            lat = self.lat
            at = float(lat.a_t)
            ax = float(lat.a_x)
            c2 = at * at / (ax * ax)
            m2at2 = lat.mass ** 2 * at * at
            g = np.zeros((lat.n_t, lat.n_x))
            if lat.n_t > 1:
                g[1, 0] = -at / ax  # kick from the source row of E g = delta
            for n in range(1, lat.n_t - 1):
                dxx = np.roll(g[n], -1) - 2.0 * g[n] + np.roll(g[n], 1)
                g[n + 1] = 2.0 * g[n] - g[n - 1] + c2 * dxx - m2at2 * g[n]
            self._ret_table = g
        return self._ret_table

    def mode_data(self):
        lat = self.lat
        if lat.mass == 0:
            raise ZeroModeSingular("positive-frequency split needs m > 0")
        at = float(lat.a_t)
        ax = float(lat.a_x)
        j = np.arange(lat.n_x)
        k = 2.0 * np.pi * j / (lat.n_x * ax)
        omega2 = lat.mass ** 2 + (2.0 / ax * np.sin(k * ax / 2.0)) ** 2
        arg = at * np.sqrt(omega2) / 2.0
        if np.any(arg >= 1.0):
            raise UnstableStep("mode frequency outside the leapfrog band")
        omega_hat = 2.0 / at * np.arcsin(arg)
        s_hat = np.sin(omega_hat * at) / at
        return k, omega_hat, s_hat

    def wightman_table(self) -> np.ndarray:
        """wt[n + n_t - 1, dx]: positive-frequency kernel at time offset n."""
        if self._wightman_table is None:
            lat = self.lat
            k, omega_hat, s_hat = self.mode_data()
            at = float(lat.a_t)
            ax = float(lat.a_x)
            n = np.arange(-(lat.n_t - 1), lat.n_t)[:, None, None]
            dx = np.arange(lat.n_x)[None, :, None]
            phase = np.exp(-1j * omega_hat[None, None, :] * n * at
                           + 1j * k[None, None, :] * dx * ax)
            wt = (phase / (2.0 * s_hat[None, None, :])).sum(axis=2)
            self._wightman_table = wt / (lat.n_x * ax)
        return self._wightman_table

    # -- dense matrices ------------------------------------------------------

    def _offsets(self):
        lat = self.lat
        t = np.arange(lat.n_t).repeat(lat.n_x)
        x = np.tile(np.arange(lat.n_x), lat.n_t)
        dt = t[:, None] - t[None, :]
        dx = (x[:, None] - x[None, :]) % lat.n_x
        return dt, dx

    def retarded(self) -> np.ndarray:
        if "ret" not in self._cache:
            g = self.ret_table()
            dt, dx = self._offsets()
            out = np.zeros(dt.shape)
            mask = dt > 0
            out[mask] = g[dt[mask], dx[mask]]
            self._cache["ret"] = out
        return self._cache["ret"]

    def advanced(self) -> np.ndarray:
        if "adv" not in self._cache:
            self._cache["adv"] = self.retarded().T.copy()
        return self._cache["adv"]

    def causal(self) -> np.ndarray:
        if "causal" not in self._cache:
            self._cache["causal"] = self.retarded() - self.advanced()
        return self._cache["causal"]

    def dirac(self) -> np.ndarray:
        if "dirac" not in self._cache:
            self._cache["dirac"] = 0.5 * (self.retarded() + self.advanced())
        return self._cache["dirac"]

    def wightman(self) -> np.ndarray:
        if "wight" not in self._cache:
            wt = self.wightman_table()
            dt, dx = self._offsets()
            self._cache["wight"] = wt[dt + self.lat.n_t - 1, dx]
        return self._cache["wight"]

    def hadamard(self) -> np.ndarray:
        if "had" not in self._cache:
            self._cache["had"] = self.wightman().real.copy()
        return self._cache["had"]

    def feynman(self) -> np.ndarray:
        if "feyn" not in self._cache:
            self._cache["feyn"] = self.hadamard() + 1j * self.dirac()
        return self._cache["feyn"]

    # -- column views (large lattices) ---------------------------------------

    def causal_column(self, t0: int, x0: int) -> np.ndarray:
        """Delta(. , y0) over the full grid as an (n_t, n_x) array."""
        g = self.ret_table()
        lat = self.lat
        xs = np.arange(lat.n_x)
        out = np.zeros((lat.n_t, lat.n_x))
        for t in range(lat.n_t):
            n = t - t0
            if n > 0:
                out[t] = g[n][(xs - x0) % lat.n_x]
            elif n < 0:
                out[t] = -g[-n][(x0 - xs) % lat.n_x]
        return out


def _mirror_key(n: int, dx: int, n_x: int) -> tuple[int, int]:
    return (-n, (-dx) % n_x)


class ExactPropagators:
    """Lazy exact rational lifts of the float propagator tables.

    Structural identities are imposed at lift time (antisymmetric causal
    kernel, symmetric Hadamard kernel, Wightman = H + (i/2)Delta,
    Feynman = H + i*DiracD) so every algebraic relation between the kernels
    holds exactly over the rationals, entry by entry.
    """

    def __init__(self, ps):
        if isinstance(ps, Lattice1p1):
            ps = PropagatorSet(ps)
        self.ps = ps
        self.lat = ps.lat
        self._ret = {}
        self._had = {}

    def _rel(self, i: int, j: int) -> tuple[int, int]:
        ti, xi = self.lat.coords(i)
        tj, xj = self.lat.coords(j)
        return ti - tj, (xi - xj) % self.lat.n_x

    def ret_entry(self, i: int, j: int) -> Fraction:
        n, dx = self._rel(i, j)
        if n <= 0:
            return Fraction(0)
        key = (n, dx)
        if key not in self._ret:
            self._ret[key] = Fraction(float(self.ps.ret_table()[n, dx]))
        return self._ret[key]

    def adv_entry(self, i: int, j: int) -> Fraction:
        return self.ret_entry(j, i)

    def causal_entry(self, i: int, j: int) -> Fraction:
        return self.ret_entry(i, j) - self.ret_entry(j, i)

    def dirac_entry(self, i: int, j: int) -> Fraction:
        return (self.ret_entry(i, j) + self.ret_entry(j, i)) / 2

    def hadamard_entry(self, i: int, j: int) -> Fraction:
        n, dx = self._rel(i, j)
        key = min((n, dx), _mirror_key(n, dx, self.lat.n_x))
        if key not in self._had:
            table = self.ps.wightman_table()
            self._had[key] = Fraction(
                float(table[key[0] + self.lat.n_t - 1, key[1]].real))
        return self._had[key]

    def wightman_entry(self, i: int, j: int) -> ExactComplex:
        return ExactComplex(self.hadamard_entry(i, j),
                            self.causal_entry(i, j) / 2)

    def feynman_entry(self, i: int, j: int) -> ExactComplex:
        return ExactComplex(self.hadamard_entry(i, j),
                            self.dirac_entry(i, j))

    def kernel(self, kind: str):
        """Contraction kernel per product kind, as (i, j) -> ExactComplex."""
        if kind == "pointwise":
            return lambda i, j: ExactComplex(0)
        if kind == "star":
            return lambda i, j: ExactComplex(0, self.causal_entry(i, j) / 2)
        if kind == "star_H":
            return self.wightman_entry
        if kind == "timeordered_D":
            return lambda i, j: ExactComplex(0, self.dirac_entry(i, j))
        if kind == "timeordered_F":
            return self.feynman_entry
        raise ValueError(f"unknown product kind {kind!r}")
