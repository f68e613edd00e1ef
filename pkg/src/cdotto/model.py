"""Driven Ising working medium.

The Hamiltonian interpolates between two endpoint field/coupling sets as a
dimensionless progress variable theta runs from 0 to 1,

    H0(theta) = - sum_j h_j(theta) X_j - sum_j b_j(theta) Z_j
                - sum_{j>k} J_jk(theta) Z_j Z_k,

with every scalar linear in theta.  The time profile of theta over a stroke
is the nested-sine sweep below, which starts and ends at rest (zero rate).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError
from .paulis import OperatorSum


def pair_index(n_sites: int) -> list[tuple[int, int]]:
    """Canonical (j, k) coupling order with j > k."""
    return [(j, k) for j in range(1, n_sites) for k in range(j)]


def _as_field(values, n: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise DimensionError(f"{name} must have length {n}, got shape {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EndpointParams:
    """Per-site fields and pair couplings at the two ends of a sweep.

    The ``*_i`` values apply at theta = 0 (cold working point), the ``*_f``
    values at theta = 1 (hot working point).  Couplings follow the
    ``pair_index`` order.
    """

    h_i: np.ndarray
    b_i: np.ndarray
    j_i: np.ndarray
    h_f: np.ndarray
    b_f: np.ndarray
    j_f: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.h_i).size
        n_pairs = n * (n - 1) // 2
        object.__setattr__(self, "h_i", _as_field(self.h_i, n, "h_i"))
        object.__setattr__(self, "b_i", _as_field(self.b_i, n, "b_i"))
        object.__setattr__(self, "h_f", _as_field(self.h_f, n, "h_f"))
        object.__setattr__(self, "b_f", _as_field(self.b_f, n, "b_f"))
        object.__setattr__(self, "j_i", _as_field(self.j_i, n_pairs, "j_i"))
        object.__setattr__(self, "j_f", _as_field(self.j_f, n_pairs, "j_f"))

    @property
    def n_sites(self) -> int:
        return self.h_i.size

    @property
    def n_pairs(self) -> int:
        return self.j_i.size

    @classmethod
    def uniform(cls, n_sites: int, h_i=0.2, b_i=0.0, j_i=0.0,
                h_f=0.0, b_f=0.5, j_f=0.1) -> "EndpointParams":
        """Site-independent parameter set; defaults are the reference operating point."""
        n_pairs = n_sites * (n_sites - 1) // 2
        return cls(
            h_i=np.full(n_sites, float(h_i)),
            b_i=np.full(n_sites, float(b_i)),
            j_i=np.full(n_pairs, float(j_i)),
            h_f=np.full(n_sites, float(h_f)),
            b_f=np.full(n_sites, float(b_f)),
            j_f=np.full(n_pairs, float(j_f)),
        )

    def is_uniform(self) -> bool:
        def flat(a):
            return a.size == 0 or bool(np.all(a == a[0]))

        return all(flat(a) for a in (self.h_i, self.b_i, self.j_i,
                                     self.h_f, self.b_f, self.j_f))

    def __eq__(self, other):
        if not isinstance(other, EndpointParams):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("h_i", "b_i", "j_i", "h_f", "b_f", "j_f")
        )


def _check_time(t, tau):
    if tau <= 0:
        raise DomainError("sweep duration must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > tau):
        raise DomainError(f"time outside [0, {tau}]")
    return t


def sweep_theta(t, tau: float):
    """Nested-sine progress profile; 0 at t=0, 1 at t=tau, monotone between."""
    t = _check_time(t, tau)
    inner = np.sin(np.pi * t / (2.0 * tau)) ** 2
    out = np.sin(0.5 * np.pi * inner) ** 2
    return out if out.ndim else float(out)


def sweep_theta_dot(t, tau: float):
    """Time derivative of ``sweep_theta``; vanishes at both stroke ends."""
    t = _check_time(t, tau)
    inner = np.sin(np.pi * t / (2.0 * tau)) ** 2
    out = (np.pi ** 2 / (4.0 * tau)) * np.sin(np.pi * t / tau) * np.sin(np.pi * inner)
    return out if out.ndim else float(out)


def sweep_theta_ddot(t, tau: float):
    """Second time derivative of ``sweep_theta`` (used by work diagnostics)."""
    t = _check_time(t, tau)
    inner = np.sin(np.pi * t / (2.0 * tau)) ** 2
    u = np.pi * t / tau
    out = (np.pi ** 3 / (4.0 * tau ** 2)) * (
        np.cos(u) * np.sin(np.pi * inner)
        + 0.5 * np.pi * np.sin(u) ** 2 * np.cos(np.pi * inner)
    )
    return out if out.ndim else float(out)


def h0_at(params: EndpointParams, theta: float) -> OperatorSum:
    """Working-medium Hamiltonian at progress ``theta`` in [0, 1]."""
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta={theta} outside [0, 1]")
    n = params.n_sites
    terms = {}

    def site_pattern(j, letter):
        pat = ["I"] * n
        pat[j] = letter
        return tuple(pat)

    for j in range(n):
        terms[site_pattern(j, "X")] = -(params.h_i[j] + (params.h_f[j] - params.h_i[j]) * theta)
        terms[site_pattern(j, "Z")] = -(params.b_i[j] + (params.b_f[j] - params.b_i[j]) * theta)
    for idx, (j, k) in enumerate(pair_index(n)):
        pat = ["I"] * n
        pat[j] = "Z"
        pat[k] = "Z"
        terms[tuple(pat)] = -(params.j_i[idx] + (params.j_f[idx] - params.j_i[idx]) * theta)
    return OperatorSum(n, terms)


def dh0_dtheta(params: EndpointParams) -> OperatorSum:
    """Derivative of ``h0_at`` with respect to theta (constant, schedules are linear)."""
    n = params.n_sites
    terms = {}
    for j in range(n):
        pat = ["I"] * n
        pat[j] = "X"
        terms[tuple(pat)] = -(params.h_f[j] - params.h_i[j])
        pat = ["I"] * n
        pat[j] = "Z"
        terms[tuple(pat)] = -(params.b_f[j] - params.b_i[j])
    for idx, (j, k) in enumerate(pair_index(n)):
        pat = ["I"] * n
        pat[j] = "Z"
        pat[k] = "Z"
        terms[tuple(pat)] = -(params.j_f[idx] - params.j_i[idx])
    return OperatorSum(n, terms)


class StrokeGrid(NamedTuple):
    """Uniform time grid for one stroke plus theta values and rates.

    ``theta``/``theta_dot``/``theta_ddot`` are sampled at the ``steps + 1``
    grid points, the ``*_mid`` arrays at the ``steps`` interval midpoints.
    Rates are signed: reverse strokes carry negative ``theta_dot``.
    """

    t: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_ddot: np.ndarray
    t_mid: np.ndarray
    theta_mid: np.ndarray
    theta_dot_mid: np.ndarray


@dataclass(frozen=True)
class SweepSpec:
    """One isentropic stroke: duration and direction.

    Forward strokes run theta from 0 to 1; reverse strokes exchange the
    endpoints.  The reverse profile is the forward profile traversed
    backwards in time, theta_rev(t) = theta_fwd(tau - t).
    """

    duration: float
    reverse: bool = False

    def __post_init__(self):
        if self.duration <= 0:
            raise DomainError("stroke duration must be positive")

    def theta(self, t: float) -> float:
        if self.reverse:
            return sweep_theta(self.duration - t, self.duration)
        return sweep_theta(t, self.duration)

    def theta_dot(self, t: float) -> float:
        if self.reverse:
            return -sweep_theta_dot(self.duration - t, self.duration)
        return sweep_theta_dot(t, self.duration)

    def grid(self, steps: int) -> StrokeGrid:
        """Evaluate the profile on a uniform grid.

        Reverse strokes reuse the forward samples mirrored index-wise, so a
        forward and a reverse stroke of equal duration and step count visit
        bitwise-identical theta values (which makes per-theta caches shared).
        """
        tau = self.duration
        t = tau * np.arange(steps + 1) / steps
        t_mid = tau * (np.arange(steps) + 0.5) / steps
        th = np.asarray(sweep_theta(t, tau))
        thd = np.asarray(sweep_theta_dot(t, tau))
        thdd = np.asarray(sweep_theta_ddot(t, tau))
        thm = np.asarray(sweep_theta(t_mid, tau))
        thdm = np.asarray(sweep_theta_dot(t_mid, tau))
        if self.reverse:
            th = th[::-1].copy()
            thd = -thd[::-1]
            thdd = thdd[::-1].copy()
            thm = thm[::-1].copy()
            thdm = -thdm[::-1]
        return StrokeGrid(t, th, thd, thdd, t_mid, thm, thdm)
