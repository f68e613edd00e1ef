"""Four-stroke cycle metrics, the adiabatic reference and sweeps."""

import math

import numpy as np
import pytest

import oracles
from cdotto.cycle import (
    CycleConfig,
    RunOptions,
    adiabatic_reference,
    cd_cost,
    lz_cop,
    run_cycle,
    sweep,
)
from cdotto.errors import DomainError
from cdotto.model import EndpointParams, sweep_theta_dot

FAST = RunOptions(steps_per_unit_time=1000, min_steps=200, converge=False)


def uniform_cfg(n, p, tau=1.0, **kwargs):
    return CycleConfig(params=EndpointParams.uniform(n), p=p,
                       tau1=tau, tau3=tau, **kwargs)


class TestConfig:
    def test_temperature_ordering_enforced(self):
        with pytest.raises(DomainError):
            uniform_cfg(1, 0, Tc=0.4, Th=0.2)

    def test_durations_positive(self):
        with pytest.raises(DomainError):
            uniform_cfg(1, 0, tau=-1.0)

    def test_order_above_site_count_is_clamped(self):
        cfg = uniform_cfg(2, 4)
        assert cfg.effective_p == 2

    def test_cycle_time(self):
        cfg = uniform_cfg(1, 0, tau=40.0)
        assert cfg.tau_cycle == pytest.approx(80.2)


class TestRunCycle:
    def test_first_law_closure(self):
        for n, p in ((1, 0), (2, 1), (3, 2)):
            rep = run_cycle(uniform_cfg(n, p), FAST)
            closure = rep.W1 + rep.W3 + rep.Qc + rep.Qh
            scale = abs(rep.W1) + abs(rep.W3) + abs(rep.Qc) + abs(rep.Qh) + rep.Tc
            assert abs(closure) <= 1e-8 * scale

    def test_single_site_exact_control_hits_lz_cop(self):
        rep = run_cycle(uniform_cfg(1, 1), RunOptions(converge=False))
        assert rep.cop == pytest.approx(2.0 / 3.0, abs=1e-6)
        assert rep.cop_carnot == pytest.approx(1.0)
        assert rep.cop <= rep.cop_carnot + 1e-9

    def test_requested_order_is_reported_clamped_physics(self):
        a = run_cycle(uniform_cfg(2, 2), FAST)
        b = run_cycle(uniform_cfg(2, 4), FAST)
        assert b.p == 4
        assert (a.Qc, a.Qh, a.W1, a.W3) == (b.Qc, b.Qh, b.W1, b.W3)

    def test_cop_marker_when_no_work_consumed(self):
        # engine orientation (h/Tc > b/Th): net work is extracted, so the
        # coefficient of performance is undefined rather than negative
        cfg = uniform_cfg(1, 1, Tc=0.05, Th=0.4)
        rep = run_cycle(cfg, FAST)
        assert rep.W1 + rep.W3 < 0
        assert rep.cop is None
        assert not rep.cop_defined

    def test_no_control_means_no_cost(self):
        rep = run_cycle(uniform_cfg(2, 0), FAST)
        assert rep.cost1 == 0.0 and rep.cost3 == 0.0

    def test_cost_positive_and_symmetric_for_equal_strokes(self):
        rep = run_cycle(uniform_cfg(2, 1), FAST)
        assert rep.cost1 > 0
        assert rep.cost1 == pytest.approx(rep.cost3, rel=1e-12)

    def test_convergence_doubling(self):
        opts = RunOptions(steps_per_unit_time=500, min_steps=200,
                          converge=True, converge_tol=1e-7, max_doublings=3)
        rep = run_cycle(uniform_cfg(1, 1), opts)
        assert rep.converged is True
        assert rep.steps >= 2000  # at least one doubling from 500 + 500

    def test_convergence_flag_unchecked_when_disabled(self):
        rep = run_cycle(uniform_cfg(1, 0), FAST)
        assert rep.converged is None


class TestAdiabaticReference:
    def test_two_level_closed_form(self):
        ref = adiabatic_reference(uniform_cfg(1, 0))
        expected = 0.2 * (math.tanh(0.5 / 0.4) - math.tanh(0.2 / 0.2))
        assert ref.qc == pytest.approx(expected, abs=1e-14)
        e_a, e_b, e_c, e_d = ref.energies
        closed = oracles.two_level_energies(0.2, 0.5, 0.2, 0.4)
        np.testing.assert_allclose((e_a, e_b, e_c, e_d), closed, atol=1e-13)

    def test_degenerate_endpoints_do_no_work(self):
        # equal endpoints make the sweeps no-ops: zero work, and the pumped
        # heat reduces to the thermal-contact value <H>_Tc - <H>_Th
        params = EndpointParams.uniform(2, h_i=0.2, b_i=0.1, j_i=0.05,
                                        h_f=0.2, b_f=0.1, j_f=0.05)
        cfg = CycleConfig(params=params, p=0, tau1=1.0, tau3=1.0)
        ref = adiabatic_reference(cfg)
        assert ref.w_total == pytest.approx(0.0, abs=1e-14)
        energies = np.linalg.eigvalsh(
            oracles.dense_ising(2, [0.2, 0.2], [0.1, 0.1], {(1, 0): 0.05}))
        p_cold = oracles.gibbs_populations(energies, 0.2)
        p_hot = oracles.gibbs_populations(energies, 0.4)
        assert ref.qc == pytest.approx(float((p_cold - p_hot) @ energies), abs=1e-12)

    def test_zero_hamiltonian_pumps_nothing(self):
        params = EndpointParams.uniform(1, h_i=0.0, b_i=0.0, j_i=0.0,
                                        h_f=0.0, b_f=0.0, j_f=0.0)
        cfg = CycleConfig(params=params, p=0, tau1=1.0, tau3=1.0)
        assert adiabatic_reference(cfg).qc == pytest.approx(0.0, abs=1e-14)

    def test_matches_independent_transport_oracle(self):
        cfg = uniform_cfg(2, 0)
        ref = adiabatic_reference(cfg)
        cold = oracles.dense_ising(2, [0.2, 0.2], [0.0, 0.0], {(1, 0): 0.0})
        hot = oracles.dense_ising(2, [0.0, 0.0], [0.5, 0.5], {(1, 0): 0.1})
        e_cold = np.linalg.eigvalsh(cold)
        e_hot = np.linalg.eigvalsh(hot)
        p_a = oracles.gibbs_populations(e_cold, 0.2)
        p_c = oracles.gibbs_populations(e_hot, 0.4)
        assert ref.qc == pytest.approx(float(p_a @ e_cold - p_c @ e_cold), abs=1e-12)

    def test_exact_control_reaches_reference(self):
        cfg = uniform_cfg(3, 3)
        rep = run_cycle(cfg, RunOptions(converge=False))
        assert rep.Qc == pytest.approx(rep.Qc_adiabatic, abs=1e-5)


class TestLzCop:
    def test_reference_point(self):
        # 0.2/(0.5 - 0.2) and 2/3 differ by one ulp in binary floats
        assert abs(lz_cop(0.2, 0.5) - 2.0 / 3.0) < 5e-16

    def test_double_field_gives_unity(self):
        assert lz_cop(0.3, 0.6) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            lz_cop(0.5, 0.2)
        with pytest.raises(DomainError):
            lz_cop(-0.1, 0.5)
        with pytest.raises(DomainError):
            lz_cop(0.0, 0.5)


class TestCdCost:
    def test_trapezoid_against_quadrature(self):
        import scipy.integrate

        tau, alpha, n, nu = 2.0, 0.7, 3, 0.01
        t = np.linspace(0.0, tau, 20001)
        vals = sweep_theta_dot(t, tau) ** 2 * (2.0 ** n) * alpha ** 2
        exact, _ = scipy.integrate.quad(
            lambda s: sweep_theta_dot(s, tau) ** 2, 0.0, tau, limit=200
        )
        assert cd_cost(t, vals, nu) == pytest.approx(
            nu * (2.0 ** n) * alpha ** 2 * exact, rel=1e-8
        )

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            cd_cost(np.zeros(3), np.zeros(4), 1.0)


class TestSweep:
    def test_empty_grid(self):
        result = sweep([])
        assert result.reports == [] and result.failures == []

    def test_order_preserved_and_tagged(self):
        configs = [uniform_cfg(n, p, tau=0.5, label=f"{n}-{p}")
                   for n in (1, 2) for p in (0, 1)]
        result = sweep(configs, FAST, workers=2)
        assert not result.failures
        assert [r.label for r in result.reports] == ["1-0", "1-1", "2-0", "2-1"]
        assert [r.n_sites for r in result.reports] == [1, 1, 2, 2]

    def test_failures_recorded_and_sweep_continues(self):
        # steps below the propagation minimum make the middle point fail
        bad = RunOptions(steps_per_unit_time=10, min_steps=10, converge=False)
        configs = [uniform_cfg(1, 0, tau=1.0), uniform_cfg(1, 1, tau=1.0)]
        result = sweep(configs, bad, workers=1)
        assert len(result.failures) == 2
        assert all(r is None for r in result.reports)
        assert "DomainError" in result.failures[0][1]

    def test_parallel_matches_serial_bitwise(self):
        configs = [uniform_cfg(n, p, tau=0.5) for n in (1, 2) for p in (0, 1)]
        serial = sweep(configs, FAST, workers=1)
        parallel = sweep(configs, FAST, workers=2)
        for a, b in zip(serial.reports, parallel.reports):
            assert (a.Qc, a.Qh, a.W1, a.W3, a.J, a.cop) == (b.Qc, b.Qh, b.W1, b.W3, b.J, b.cop)


class TestCarnotBound:
    def test_single_site_grid(self):
        for tau in (1.0, 3.0):
            for p in (0, 1):
                rep = run_cycle(uniform_cfg(1, p, tau=tau), FAST)
                if rep.cop_defined and rep.Qc > 0:
                    assert rep.cop <= rep.cop_carnot + 1e-9
