"""Unitary stroke propagation, thermal states and observables.

The propagator is the midpoint exponential: per step the full Hamiltonian
(medium plus control) is frozen at the interval midpoint and exponentiated
exactly, U_k = exp(-i H(t_k + dt/2) dt), which keeps every step exactly
unitary so trace and purity are conserved to roundoff.  hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agp import AgpSolver, AnsatzBasis
from .errors import DimensionError, DomainError, NumericalError
from .model import EndpointParams, SweepSpec, dh0_dtheta, h0_at
from .paulis import OperatorSum, to_dense

#: Propagation refuses grids coarser than this many steps per stroke.
MIN_STEPS = 100


def _re_trace_product(rho: np.ndarray, mat: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", rho, mat).real)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated working-medium state: Hermitian, unit trace, positive."""

    n_sites: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2 ** self.n_sites
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (dim, dim):
            raise DimensionError(f"matrix shape {m.shape} does not match {self.n_sites} sites")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise DomainError("density matrix is not Hermitian to 1e-12")
        if abs(np.trace(m).real - 1.0) > 1e-10 or abs(np.trace(m).imag) > 1e-10:
            raise DomainError("density matrix trace differs from 1 by more than 1e-10")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise DomainError("density matrix has an eigenvalue below -1e-10")
        purity = float(np.vdot(m, m).real)
        if not 0.0 < purity <= 1.0 + 1e-10:
            raise DomainError(f"purity {purity} outside (0, 1]")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)


def gibbs_state(h: OperatorSum, temperature: float) -> DensityMatrix:
    """Thermal state exp(-H/T)/Z via eigendecomposition.

    Exponents are shifted by the ground energy to avoid overflow; the result
    commutes with H by construction.
    """
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    energies, vecs = np.linalg.eigh(to_dense(h))
    weights = np.exp(-(energies - energies.min()) / temperature)
    weights /= weights.sum()
    rho = (vecs * weights) @ vecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(h.n_sites, rho)


def expectation(rho: DensityMatrix, h: OperatorSum) -> float:
    """Re Tr[rho H]; the imaginary part is roundoff for Hermitian inputs."""
    if rho.n_sites != h.n_sites:
        raise DimensionError(f"site counts differ: {rho.n_sites} vs {h.n_sites}")
    return _re_trace_product(rho.matrix, to_dense(h))


@dataclass(frozen=True)
class StrokeDiagnostics:
    steps: int
    trace_drift: float
    purity_drift: float
    #: integral of the squared Frobenius norm of the control Hamiltonian
    hcd_norm_sq_integral: float
    agp_fallbacks: int
    #: quadrature cross-checks of the work split, filled when requested
    w_sta_quad: float | None = None
    w_cd_quad: float | None = None


@dataclass(frozen=True)
class StrokeResult:
    """One isentropic stroke: final state, work split and bookkeeping.

    ``w_sta`` is the endpoint energy difference under the full driven
    Hamiltonian (the control term vanishes at both stroke ends), ``w_0``
    the trapezoid quadrature of Tr[rho dH0/dt] on the step grid, and
    ``w_cd = w_sta - w_0`` exactly by construction.
    """

    final_state: DensityMatrix
    w_sta: float
    w_0: float
    w_cd: float
    e_start: float
    e_end: float
    diagnostics: StrokeDiagnostics


def propagate_stroke(rho0: DensityMatrix, params: EndpointParams, sweep: SweepSpec,
                     cd=None, steps: int = 2000, *,
                     bookkeeping: bool = False) -> StrokeResult:
    """Drive the state through one stroke of the cycle.

    ``cd`` selects the control: None runs the bare non-adiabatic sweep, an
    ``AnsatzBasis`` builds a fresh variational solver, and an ``AgpSolver``
    (for the same parameters) is reused as-is so strokes can share its
    per-theta cache.  ``bookkeeping=True`` additionally integrates
    Tr[rho dH_CD/dt] on the step grid (centered-difference derivative of
    the cached gauge-potential coefficients) as a cross-check of the
    ``w_cd`` split; it roughly triples the number of variational solves.
    """
    if rho0.n_sites != params.n_sites:
        raise DimensionError("state and parameters differ in n_sites")
    if steps < MIN_STEPS:
        raise DomainError(f"steps={steps} below the minimum of {MIN_STEPS}")

    solver = None
    if cd is not None:
        if isinstance(cd, AgpSolver):
            solver = cd
            if solver.params != params:
                raise ValueError("solver was built for different endpoint parameters")
        elif isinstance(cd, AnsatzBasis):
            solver = AgpSolver(params, cd)
        else:
            raise TypeError("cd must be None, an AnsatzBasis or an AgpSolver")
        if solver.basis.n_sites != params.n_sites:
            raise DimensionError("control basis does not match the parameter set")

    n = params.n_sites
    tau = sweep.duration
    dt = tau / steps
    grid = sweep.grid(steps)
    scale = 2.0 ** n

    # h0 coefficients are real, so both dense generators are real symmetric
    d0 = np.ascontiguousarray(to_dense(h0_at(params, 0.0)).real)
    dd = np.ascontiguousarray(to_dense(dh0_dtheta(params)).real)
    stack = solver.imag_stack if solver is not None else None
    fallbacks_before = solver.fallbacks if solver is not None else 0

    rho = np.array(rho0.matrix, dtype=complex)
    purity_start = float(np.vdot(rho, rho).real)
    e_start = _re_trace_product(rho, d0 + grid.theta[0] * dd)

    f0 = np.empty(steps + 1)
    f0[0] = grid.theta_dot[0] * _re_trace_product(rho, dd)
    norm_sq = np.zeros(steps)

    if bookkeeping:
        f_cd = np.empty(steps + 1)
        f_cd[0] = _bookkeeping_sample(rho, solver, stack, grid.theta[0],
                                      grid.theta_dot[0], grid.theta_ddot[0])

    for k in range(steps):
        th = grid.theta_mid[k]
        td = grid.theta_dot_mid[k]
        if solver is None:
            energies, vecs = np.linalg.eigh(d0 + th * dd)
        else:
            alpha = solver.coefficients(th)
            norm_sq[k] = (td * td) * scale * float(alpha @ alpha)
            h = (d0 + th * dd).astype(complex)
            h += (1j * td) * np.tensordot(alpha, stack, axes=1)
            energies, vecs = np.linalg.eigh(h)
        u = (vecs * np.exp((-1j * dt) * energies)) @ vecs.conj().T
        rho = u @ rho @ u.conj().T
        if not np.isfinite(rho).all():
            raise NumericalError(f"non-finite state at step {k + 1} of {steps}")
        f0[k + 1] = grid.theta_dot[k + 1] * _re_trace_product(rho, dd)
        if bookkeeping:
            f_cd[k + 1] = _bookkeeping_sample(rho, solver, stack, grid.theta[k + 1],
                                              grid.theta_dot[k + 1], grid.theta_ddot[k + 1])

    w_0 = float(np.trapezoid(f0, dx=dt))
    e_end = _re_trace_product(rho, d0 + grid.theta[-1] * dd)
    w_sta = e_end - e_start
    w_cd = w_sta - w_0

    # control-cost integrand on the midpoint samples; it vanishes exactly at
    # the stroke ends because the sweep rate does
    cost_t = np.concatenate(([0.0], grid.t_mid, [tau]))
    cost_f = np.concatenate(([0.0], norm_sq, [0.0]))
    hcd_sq = float(np.trapezoid(cost_f, cost_t))

    w_cd_quad = w_sta_quad = None
    if bookkeeping:
        w_cd_quad = float(np.trapezoid(f_cd, dx=dt))
        w_sta_quad = w_0 + w_cd_quad

    final = DensityMatrix(n, rho)
    diag = StrokeDiagnostics(
        steps=steps,
        trace_drift=abs(float(np.trace(rho).real) - 1.0),
        purity_drift=abs(final.purity - purity_start),
        hcd_norm_sq_integral=hcd_sq,
        agp_fallbacks=(solver.fallbacks - fallbacks_before) if solver is not None else 0,
        w_sta_quad=w_sta_quad,
        w_cd_quad=w_cd_quad,
    )
    return StrokeResult(final_state=final, w_sta=w_sta, w_0=w_0, w_cd=w_cd,
                        e_start=e_start, e_end=e_end, diagnostics=diag)


def _bookkeeping_sample(rho, solver, stack, theta, theta_dot, theta_ddot) -> float:
    """Tr[rho dH_CD/dt] at one grid point.

    dH_CD/dt = theta_ddot * A + theta_dot^2 * dA/dtheta with A the gauge
    potential; both rates vanish at the stroke ends, so the sample is zero
    there regardless of A.
    """
    if solver is None:
        return 0.0
    if theta_dot == 0.0 and theta_ddot == 0.0:
        return 0.0
    coeff = theta_ddot * solver.coefficients(theta) \
        + (theta_dot * theta_dot) * solver.coefficients_derivative(theta)
    a_im = np.tensordot(coeff, stack, axes=1)
    # Tr[rho * (i * B)] for real antisymmetric B has real part -Im Tr[rho B]
    return -float(np.einsum("ij,ji->", rho, a_im).imag)
