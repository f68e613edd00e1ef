"""Variational adiabatic gauge potential for the driven Ising medium.

The control ansatz is the span of all Pauli strings acting on at most p
sites with an odd number of Y letters.  For a candidate A = sum_a alpha_a O_a
the deficiency operator

    G(alpha) = dH0/dtheta + i [A, H0(theta)]

has squared norm S(alpha) = Tr[G^2], a convex quadratic in alpha whose
stationarity condition is the linear system

    gram alpha = v,   gram_ab = Re Tr[C_a C_b],  v_a = -Re Tr[(dH0/dtheta) C_a]

with C_a = i [O_a, H0(theta)].  ``solve_agp`` solves one such system
directly; ``AgpSolver`` precomputes the theta-dependence (H0 is affine in
theta, so gram and v are polynomial in theta) and serves cached per-theta
solutions fast enough to be called once per integrator step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError
from .model import EndpointParams, dh0_dtheta, h0_at
from .paulis import OperatorSum, commutator, hs_inner, pattern_dense, to_dense


@dataclass(frozen=True)
class AnsatzBasis:
    """Ordered odd-Y Pauli-string basis of maximum weight ``p``."""

    n_sites: int
    p: int
    strings: tuple[tuple[str, ...], ...]

    @property
    def size(self) -> int:
        return len(self.strings)


def build_basis(n_sites: int, p: int) -> AnsatzBasis:
    """All Pauli strings of weight 1..p with an odd number of Y letters.

    Ordering is deterministic: by weight, then lexicographically on the
    letter pattern.  The basis size is sum_w C(N, w) * (3^w - 1) / 2.
    """
    if not 1 <= p <= n_sites:
        raise DomainError(f"ansatz order p={p} outside 1..{n_sites}")
    strings = []
    for w in range(1, p + 1):
        for sites in itertools.combinations(range(n_sites), w):
            for letters in itertools.product("XYZ", repeat=w):
                if letters.count("Y") % 2 == 0:
                    continue
                pat = ["I"] * n_sites
                for site, letter in zip(sites, letters):
                    pat[site] = letter
                strings.append(tuple(pat))
    strings.sort(key=lambda pat: (sum(1 for s in pat if s != "I"), pat))
    return AnsatzBasis(n_sites, p, tuple(strings))


@dataclass(frozen=True)
class AgpSolution:
    """Optimal ansatz coefficients at one value of theta.

    ``residual_action`` is S at the minimum (>= 0); ``gradient_norm`` is the
    Euclidean norm of the gradient of S there.  ``rank_deficient`` is True
    when the gram matrix was singular and the minimum-norm solution was
    taken, None when the solve path did not compute a rank.
    """

    coefficients: np.ndarray
    residual_action: float
    gradient_norm: float
    theta: float | None = None
    rank_deficient: bool | None = None


def _i_commutator_real(op_pattern: tuple[str, ...], h: OperatorSum) -> OperatorSum:
    """i [O, H] for a unit-coefficient string O; real for Hermitian inputs."""
    c = commutator(OperatorSum(len(op_pattern), {op_pattern: 1.0}), h)
    return 1.0j * c


def solve_agp(basis: AnsatzBasis, h0: OperatorSum, dh0: OperatorSum,
              rcond: float = 1e-12) -> AgpSolution:
    """Minimize S over the ansatz for a fixed Hamiltonian and its derivative.

    Singular gram matrices (symmetric sites make distinct strings share a
    commutator) are solved in the minimum-norm least-squares sense and
    flagged on the returned solution.
    """
    if basis.n_sites != h0.n_sites or h0.n_sites != dh0.n_sites:
        raise DimensionError("basis, h0 and dh0 must share n_sites")
    c_ops = [_i_commutator_real(pat, h0) for pat in basis.strings]
    m = basis.size
    gram = np.empty((m, m))
    for a in range(m):
        for b in range(a, m):
            val = hs_inner(c_ops[a], c_ops[b]).real
            gram[a, b] = val
            gram[b, a] = val
    v = np.array([-hs_inner(dh0, c).real for c in c_ops])
    coeffs, _, rank, _ = np.linalg.lstsq(gram, v, rcond=rcond)

    g_op = dh0
    for alpha, c in zip(coeffs, c_ops):
        g_op = g_op + alpha * c
    residual = hs_inner(g_op, g_op).real
    grad = 2.0 * (gram @ coeffs - v)
    return AgpSolution(
        coefficients=coeffs,
        residual_action=float(residual),
        gradient_norm=float(np.linalg.norm(grad)),
        rank_deficient=bool(rank < m),
    )


def exact_agp(h0: OperatorSum, dh0: OperatorSum,
              degeneracy_tol: float | None = None) -> np.ndarray:
    """Spectral gauge potential, the validation oracle for the variational solver.

    Matrix elements are i <m|dH0|n> / (E_n - E_m); elements between levels
    closer than ``degeneracy_tol`` (default 1e-10 times the spectral norm)
    are zeroed, since that gauge freedom does not move populations.
    """
    if h0.n_sites != dh0.n_sites:
        raise DimensionError("h0 and dh0 must share n_sites")
    energies, vecs = np.linalg.eigh(to_dense(h0))
    if degeneracy_tol is None:
        degeneracy_tol = 1e-10 * max(1e-300, float(np.abs(energies).max()))
    dh = vecs.conj().T @ to_dense(dh0) @ vecs
    gaps = energies[None, :] - energies[:, None]
    safe = np.abs(gaps) > degeneracy_tol
    a_eig = np.zeros_like(dh)
    a_eig[safe] = 1.0j * dh[safe] / gaps[safe]
    return vecs @ a_eig @ vecs.conj().T


def h_cd_at(solution: AgpSolution, basis: AnsatzBasis, theta_dot: float) -> OperatorSum:
    """Control Hamiltonian theta_dot * sum_a alpha_a O_a; zero when at rest."""
    if solution.coefficients.shape != (basis.size,):
        raise DimensionError("solution does not match basis size")
    return OperatorSum(
        basis.n_sites,
        {pat: theta_dot * alpha
         for pat, alpha in zip(basis.strings, solution.coefficients)},
    )


def _orbit_projector(basis: AnsatzBasis) -> np.ndarray:
    """Orthonormal basis of the site-permutation-symmetric coefficient subspace.

    Strings with the same letter multiset form one orbit; for uniform
    endpoint parameters the gram matrix and target commute with the orbit
    action, so the minimum-norm solution lives in this subspace.
    """
    orbits: dict[tuple[str, ...], list[int]] = {}
    for idx, pat in enumerate(basis.strings):
        orbits.setdefault(tuple(sorted(pat)), []).append(idx)
    q = np.zeros((basis.size, len(orbits)))
    for col, members in enumerate(orbits.values()):
        q[members, col] = 1.0 / np.sqrt(len(members))
    return q


class AgpSolver:
    """Per-theta variational solutions for a fixed model and ansatz.

    H0(theta) is affine in theta, so C_a(theta) = K0_a + theta * K1_a with
    constant string content; the gram matrix is a quadratic matrix
    polynomial P0 + theta P1 + theta^2 P2 and the target is w0 + theta w1,
    all precomputed here.  Per theta the reduced system is solved by
    Cholesky and the result verified against the full normal equations;
    any failure falls back to minimum-norm least squares (counted in
    ``fallbacks``).  Solutions are cached by exact theta value; concurrent
    cache insertion is benign (worst case a duplicate solve).
    """

    def __init__(self, params: EndpointParams, basis: AnsatzBasis,
                 rcond: float = 1e-12, residual_rtol: float = 1e-8):
        if params.n_sites != basis.n_sites:
            raise DimensionError("params and basis must share n_sites")
        self.params = params
        self.basis = basis
        self.rcond = rcond
        self.residual_rtol = residual_rtol
        self.fallbacks = 0
        self._cache: dict[float, np.ndarray] = {}
        self._stack = None

        n = params.n_sites
        scale = 2.0 ** n
        h0_base = h0_at(params, 0.0)
        dh0 = dh0_dtheta(params)
        k0 = [_i_commutator_real(pat, h0_base) for pat in basis.strings]
        k1 = [_i_commutator_real(pat, dh0) for pat in basis.strings]

        patterns = sorted(
            set().union(*(op.terms.keys() for op in k0 + k1), dh0.terms.keys())
        )
        col = {pat: i for i, pat in enumerate(patterns)}
        m = basis.size
        b0 = np.zeros((m, len(patterns)))
        b1 = np.zeros((m, len(patterns)))
        for a in range(m):
            for pat, c in k0[a].terms.items():
                b0[a, col[pat]] = c.real
            for pat, c in k1[a].terms.items():
                b1[a, col[pat]] = c.real
        d = np.zeros(len(patterns))
        for pat, c in dh0.terms.items():
            d[col[pat]] = c.real

        self._b0, self._b1, self._d = b0, b1, d
        self._p0 = scale * (b0 @ b0.T)
        self._p1 = scale * (b0 @ b1.T + b1 @ b0.T)
        self._p2 = scale * (b1 @ b1.T)
        self._w0 = -scale * (b0 @ d)
        self._w1 = -scale * (b1 @ d)
        self._scale = scale

        if params.is_uniform():
            q = _orbit_projector(basis)
            self._q = q
            self._r = tuple(q.T @ p @ q for p in (self._p0, self._p1, self._p2))
            self._u = (q.T @ self._w0, q.T @ self._w1)
        else:
            self._q = None
            self._r = (self._p0, self._p1, self._p2)
            self._u = (self._w0, self._w1)

    @property
    def imag_stack(self) -> np.ndarray:
        """Imaginary parts of the dense basis strings (odd-Y strings are i * real)."""
        if self._stack is None:
            self._stack = np.stack(
                [pattern_dense(pat).imag for pat in self.basis.strings]
            )
        return self._stack

    def _full_residual(self, theta: float, alpha: np.ndarray) -> float:
        g = self._p0 @ alpha + theta * (self._p1 @ alpha) \
            + (theta * theta) * (self._p2 @ alpha) - self._w0 - theta * self._w1
        return float(np.linalg.norm(g))

    def _target_norm(self, theta: float) -> float:
        return float(np.linalg.norm(self._w0 + theta * self._w1))

    def coefficients(self, theta: float) -> np.ndarray:
        theta = float(theta)
        cached = self._cache.get(theta)
        if cached is not None:
            return cached
        r0, r1, r2 = self._r
        u0, u1 = self._u
        r = r0 + theta * (r1 + theta * r2)
        u = u0 + theta * u1
        alpha = None
        try:
            beta = scipy.linalg.cho_solve(scipy.linalg.cho_factor(r), u)
            alpha = self._q @ beta if self._q is not None else beta
        except np.linalg.LinAlgError:
            alpha = None
        if alpha is not None:
            tol = self.residual_rtol * (1.0 + self._target_norm(theta))
            if not np.isfinite(alpha).all() or self._full_residual(theta, alpha) > tol:
                alpha = None
        if alpha is None:
            gram = self._p0 + theta * self._p1 + (theta * theta) * self._p2
            v = self._w0 + theta * self._w1
            alpha = np.linalg.lstsq(gram, v, rcond=self.rcond)[0]
            self.fallbacks += 1
        alpha = np.ascontiguousarray(alpha)
        alpha.setflags(write=False)
        self._cache[theta] = alpha
        return alpha

    def coefficients_derivative(self, theta: float, delta: float = 1e-6) -> np.ndarray:
        """Centered difference of the cached solutions, one-sided at the edges."""
        lo = max(0.0, theta - delta)
        hi = min(1.0, theta + delta)
        return (self.coefficients(hi) - self.coefficients(lo)) / (hi - lo)

    def residual_action(self, theta: float) -> float:
        alpha = self.coefficients(theta)
        g = self._b0.T @ alpha + theta * (self._b1.T @ alpha) + self._d
        return self._scale * float(g @ g)

    def solution(self, theta: float) -> AgpSolution:
        alpha = self.coefficients(theta)
        res = self._full_residual(theta, alpha)
        return AgpSolution(
            coefficients=alpha,
            residual_action=self.residual_action(theta),
            gradient_norm=2.0 * res,
            theta=theta,
            rank_deficient=None,
        )
