"""Finite-dimensional *-algebras, states, GNS representations, Weyl operators.

Everything is concrete linear algebra: an algebra is a structure-constant
tensor with an involution matrix, a state is a functional on the basis, and
the GNS construction quotients the Gram matrix's null space to produce an
explicit matrix representation with a cyclic vector.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


class AlgebraError(Exception):
    pass


class StateNotPositive(AlgebraError):
    pass


class NoIntertwiner(AlgebraError):
    pass


class ShiftOffGrid(AlgebraError):
    """Weyl shift is not an integer number of grid cells."""


class FiniteStarAlgebra:
    """Unital associative *-algebra on an explicit basis.

    mul_const[i, j, k] is the coefficient of b_k in b_i b_j; star[i, a] gives
    b_i^* = sum_a star[i, a] b_a; unit is the coefficient vector of 1.
    """

    def __init__(self, mul_const, star, unit, labels=None, tol: float = 1e-12):
        self.c = np.asarray(mul_const, dtype=complex)
        self.star = np.asarray(star, dtype=complex)
        self.unit = np.asarray(unit, dtype=complex)
        self.dim = self.c.shape[0]
        self.labels = list(labels) if labels else [f"b{i}" for i in range(self.dim)]
        if self.c.shape != (self.dim,) * 3:
            raise AlgebraError("structure constants must be dim^3")
        if self.star.shape != (self.dim, self.dim):
            raise AlgebraError("involution matrix must be dim^2")
        self._validate(tol)

    # x, y are coefficient vectors on the basis
    def mul(self, x, y):
        return np.einsum("i,j,ijk->k", np.asarray(x, dtype=complex),
                         np.asarray(y, dtype=complex), self.c)

    def adjoint(self, x):
        return np.conj(np.asarray(x, dtype=complex)) @ self.star

    def left_mult_matrix(self, i: int):
        """Matrix of x -> b_i x."""
        return self.c[i].T.copy()

    def _validate(self, tol: float):
        d = self.dim
        eye = np.eye(d)
        # unit laws
        for i in range(d):
            e = eye[i]
            if np.max(np.abs(self.mul(self.unit, e) - e)) > tol \
                    or np.max(np.abs(self.mul(e, self.unit) - e)) > tol:
                raise AlgebraError("unit laws fail")
        # associativity: (b_i b_j) b_k == b_i (b_j b_k)
        lhs = np.einsum("ijm,mkl->ijkl", self.c, self.c)
        rhs = np.einsum("jkm,iml->ijkl", self.c, self.c)
        if np.max(np.abs(lhs - rhs)) > tol:
            raise AlgebraError("multiplication is not associative")
        # involution: involutive and antimultiplicative
        for i in range(d):
            e = eye[i]
            if np.max(np.abs(self.adjoint(self.adjoint(e)) - e)) > tol:
                raise AlgebraError("involution is not involutive")
        for i in range(d):
            for j in range(d):
                ab = self.mul(eye[i], eye[j])
                lhs = self.adjoint(ab)
                rhs = self.mul(self.adjoint(eye[j]), self.adjoint(eye[i]))
                if np.max(np.abs(lhs - rhs)) > tol:
                    raise AlgebraError("involution is not antimultiplicative")

    def __repr__(self):
        return f"FiniteStarAlgebra(dim={self.dim})"


def functions_on_points(n: int) -> FiniteStarAlgebra:
    """Commutative algebra of functions on n points (pointwise product)."""
    c = np.zeros((n, n, n))
    for i in range(n):
        c[i, i, i] = 1.0
    return FiniteStarAlgebra(c, np.eye(n), np.ones(n),
                             labels=[f"chi{i}" for i in range(n)])


def matrix_algebra(n: int) -> FiniteStarAlgebra:
    """Full matrix algebra M_n with the e_ij basis, row-major."""
    d = n * n
    idx = lambda i, j: i * n + j
    c = np.zeros((d, d, d))
    star = np.zeros((d, d))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if j == k:
                        c[idx(i, j), idx(k, l), idx(i, l)] = 1.0
            star[idx(i, j), idx(j, i)] = 1.0
    unit = np.zeros(d)
    for i in range(n):
        unit[idx(i, i)] = 1.0
    labels = [f"e{i}{j}" for i in range(n) for j in range(n)]
    return FiniteStarAlgebra(c, star, unit, labels=labels)


class AlgebraState:
    """Normalized positive functional, given by its values on the basis."""

    def __init__(self, alg: FiniteStarAlgebra, omega, tol: float = 1e-10):
        self.alg = alg
        self.omega = np.asarray(omega, dtype=complex)
        if self.omega.shape != (alg.dim,):
            raise AlgebraError("state vector has wrong length")
        u = self.value(alg.unit)
        if abs(u - 1.0) > tol:
            raise AlgebraError(f"state is not normalized: omega(1) = {u}")
        G = gram_matrix(alg, self.omega)
        evs = np.linalg.eigvalsh((G + G.conj().T) / 2)
        if evs.min() < -tol * max(1.0, evs.max()):
            raise StateNotPositive(f"Gram matrix has eigenvalue {evs.min()}")

    def value(self, x) -> complex:
        return complex(np.asarray(x, dtype=complex) @ self.omega)


def gram_matrix(alg: FiniteStarAlgebra, omega) -> np.ndarray:
    """G[i, j] = omega(b_i^* b_j)."""
    omega = np.asarray(omega, dtype=complex)
    return np.einsum("ia,ajk,k->ij", alg.star, alg.c, omega)


def gns_construct(alg: FiniteStarAlgebra, state: AlgebraState,
                  tol: float = 1e-10) -> dict:
    """GNS triple (H, pi, Omega) of a state, with certification residuals.

    The Hilbert space is the quotient by the Gram null space; pi acts by
    left multiplication pushed through the quotient map.
    """
    G = gram_matrix(alg, state.omega)
    G = (G + G.conj().T) / 2
    w, V = np.linalg.eigh(G)
    scale = max(1.0, float(w.max()))
    keep = w > tol * scale
    if w.min() < -tol * scale:
        raise StateNotPositive(f"Gram matrix has eigenvalue {w.min()}")
    r = int(np.count_nonzero(keep))
    Vr = V[:, keep]
    dr = np.sqrt(w[keep])
    Q = (dr[:, None] * Vr.conj().T)          # quotient map, r x dim
    Qpinv = Vr / dr[None, :]                 # right inverse, dim x r

    pis = []
    for i in range(alg.dim):
        L = alg.left_mult_matrix(i)
        pis.append(Q @ L @ Qpinv)
    Omega = Q @ alg.unit

    eye = np.eye(alg.dim)
    hom = 0.0
    for i in range(alg.dim):
        for j in range(alg.dim):
            prod_vec = alg.mul(eye[i], eye[j])
            target = sum(prod_vec[k] * pis[k] for k in range(alg.dim))
            hom = max(hom, float(np.max(np.abs(pis[i] @ pis[j] - target))))
    adj = 0.0
    for i in range(alg.dim):
        star_vec = alg.adjoint(eye[i])
        target = sum(star_vec[a] * pis[a] for a in range(alg.dim))
        adj = max(adj, float(np.max(np.abs(pis[i].conj().T - target))))
    vec = 0.0
    for i in range(alg.dim):
        got = np.vdot(Omega, pis[i] @ Omega)
        vec = max(vec, abs(got - state.value(eye[i])))
    cyc_mat = np.column_stack([p @ Omega for p in pis])
    cyc_rank = int(np.linalg.matrix_rank(cyc_mat, tol=tol * scale))

    return {
        "dim": r,
        "pi": pis,
        "Omega": Omega,
        "Q": Q,
        "residual_homomorphism": hom,
        "residual_adjoint": adj,
        "residual_state": vec,
        "cyclic_rank": cyc_rank,
        "cyclic": cyc_rank == r,
        "gram_eigenvalues": w,
    }


def gns_uniqueness_check(alg: FiniteStarAlgebra, state: AlgebraState,
                         rep1: dict, rep2: dict, tol: float = 1e-8) -> dict:
    """Unitary intertwiner between two GNS triples of the same state.

    U is defined on the dense subspace by U (pi1(a) Omega1) = pi2(a) Omega2;
    it must come out unitary and intertwine the representations.
    """
    if rep1["dim"] != rep2["dim"]:
        raise NoIntertwiner("GNS dimensions differ")
    M1 = np.column_stack([p @ rep1["Omega"] for p in rep1["pi"]])
    M2 = np.column_stack([p @ rep2["Omega"] for p in rep2["pi"]])
    U = M2 @ np.linalg.pinv(M1)
    unit_res = float(np.max(np.abs(U.conj().T @ U - np.eye(rep1["dim"]))))
    inter = 0.0
    for p1, p2 in zip(rep1["pi"], rep2["pi"]):
        inter = max(inter, float(np.max(np.abs(U @ p1 - p2 @ U))))
    om = float(np.max(np.abs(U @ rep1["Omega"] - rep2["Omega"])))
    if max(unit_res, inter, om) > tol:
        raise NoIntertwiner(
            f"no unitary intertwiner (residuals {unit_res:.2e}, "
            f"{inter:.2e}, {om:.2e})")
    return {"U": U, "residual_unitary": unit_res,
            "residual_intertwine": inter, "residual_vector": om}


def direct_sum_state_example() -> dict:
    """Mixture of the two point evaluations on functions over two points:
    the GNS space is the direct sum of the two one-dimensional pure GNS
    spaces, with Omega = (1/sqrt(2), 1/sqrt(2))."""
    alg = functions_on_points(2)
    st1 = AlgebraState(alg, [1.0, 0.0])
    st2 = AlgebraState(alg, [0.0, 1.0])
    mix = AlgebraState(alg, [0.5, 0.5])
    g1 = gns_construct(alg, st1)
    g2 = gns_construct(alg, st2)
    gm = gns_construct(alg, mix)
    # mixed rep decomposes: each pi is diagonalizable with the pure blocks
    block_res = 0.0
    for i in range(alg.dim):
        ev_mixed = sorted(np.linalg.eigvals(gm["pi"][i]).real)
        ev_blocks = sorted([complex(g1["pi"][i][0, 0]).real,
                            complex(g2["pi"][i][0, 0]).real])
        block_res = max(block_res, max(abs(a - b) for a, b
                                       in zip(ev_mixed, ev_blocks)))
    omega_weights = np.abs(gm["Omega"]) ** 2
    return {
        "dims": (g1["dim"], g2["dim"], gm["dim"]),
        "block_residual": block_res,
        "omega_weights": sorted(float(x) for x in omega_weights),
        "rep": gm,
    }


# ---------------------------------------------------------------------------
# Weyl operators on a discrete line


def weyl_phase(a1: float, b1: float, a2: float, b2: float,
               hbar: float = 1.0) -> complex:
    """Composition phase: W(a1,b1) W(a2,b2) = phase * W(a1+a2, b1+b2)."""
    return cmath.exp(0.5j * hbar * (a1 * b2 - a2 * b1))


def weyl_matrix(alpha: float, beta: float, n: int, dx: float,
                hbar: float = 1.0, x0: float = 0.0) -> np.ndarray:
    """W(alpha, beta) on samples over x_j = x0 + j dx:
    (W phi)(x) = e^{i hbar alpha beta / 2} e^{i beta x} phi(x + hbar alpha),
    with zero padding off the grid; the shift must align with the grid."""
    shift = hbar * alpha / dx
    s = round(shift)
    if abs(shift - s) > 1e-9:
        raise ShiftOffGrid(f"shift {hbar * alpha} is not a multiple of {dx}")
    xs = x0 + dx * np.arange(n)
    W = np.zeros((n, n), dtype=complex)
    ph = cmath.exp(0.5j * hbar * alpha * beta)
    for j in range(n):
        k = j + s
        if 0 <= k < n:
            W[j, k] = ph * cmath.exp(1j * beta * xs[j])
    return W


def weyl_rep_check(n: int = 64, dx: float = 0.25, hbar: float = 1.0,
                   pairs=None, x0: float = -8.0) -> dict:
    """Composition and adjoint relations for grid Weyl operators.

    Zero padding breaks the relations only in the edge columns a shift can
    reach, so they are asserted on the interior columns exactly.
    """
    if pairs is None:
        pairs = [((1.0, 0.0), (0.0, 1.0)),
                 ((2.0, 0.5), (-1.0, 1.5)),
                 ((0.0, 2.0), (3.0, 0.0))]
    comp_res = 0.0
    adj_res = 0.0
    max_cells = 0
    for (a1, b1), (a2, b2) in pairs:
        W1 = weyl_matrix(a1, b1, n, dx, hbar, x0)
        W2 = weyl_matrix(a2, b2, n, dx, hbar, x0)
        W12 = weyl_matrix(a1 + a2, b1 + b2, n, dx, hbar, x0)
        phase = weyl_phase(a1, b1, a2, b2, hbar)
        cells = int(round(abs(hbar * a1 / dx))) + int(round(abs(hbar * a2 / dx)))
        max_cells = max(max_cells, cells)
        lhs = W1 @ W2
        rhs = phase * W12
        lo, hi = cells, n - cells
        comp_res = max(comp_res, float(np.max(np.abs(
            lhs[:, lo:hi] - rhs[:, lo:hi]))))
        Wm = weyl_matrix(-a1, -b1, n, dx, hbar, x0)
        c1 = int(round(abs(hbar * a1 / dx)))
        adj_res = max(adj_res, float(np.max(np.abs(
            (W1.conj().T - Wm)[:, c1:n - c1]))))
    return {"composition_residual": comp_res, "adjoint_residual": adj_res,
            "interior_margin_cells": max_cells, "n": n, "dx": dx,
            "phase_example": weyl_phase(1.0, 0.0, 0.0, 1.0, 1.0)}
