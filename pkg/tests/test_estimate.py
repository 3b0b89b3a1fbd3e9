import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from spectralfe import lattice
from spectralfe.estimate import (EstimateReport, estimate_free_energy, estimate_partition,
                                 estimate_report, partition_weights, reconstruct_dos,
                                 relative_error, single_state_error_bound, write_dos_csv)
from spectralfe.lattice import IsingLongitudinal, Synthetic, build_hamiltonian
from spectralfe.plan import ErrorBudget, custom_plan, plan_deterministic
from spectralfe.sampler import Exact, SampleSet, sample_series
from spectralfe.spectrum import exact_spectrum, partition_function
from spectralfe.window import WindowSpec, side_lobe_area


def ising(n, J=1.0, h=0.0, periodic=True):
    g = lattice.ring(n) if periodic else lattice.open_chain(n)
    return exact_spectrum(build_hamiltonian(g, IsingLongitudinal(J, h)))


def synthetic(levels):
    return exact_spectrum(build_hamiltonian(None, Synthetic(tuple(levels))))


def run_exact(s, plan, beta):
    return relative_error(estimate_partition(sample_series(s, plan, Exact(), 0), beta),
                          partition_function(s, beta))


def delta_samples(plan, dimension):
    """g_0 = 1 and every other sample zero."""
    ell = np.arange(plan.N // 2 + 1)
    g = np.zeros(ell.size, complex)
    g[0] = 1.0
    return SampleSet(plan, ell, plan.times, g, Exact(), 0, dimension)


class TestClosedForm:
    def test_ising_ring8_guarantee(self):
        s = ising(8)
        budget = ErrorBudget(8, 1.0, 0.1)
        plan = plan_deterministic(budget, s.bandwidth)
        rep = estimate_report(sample_series(s, plan, Exact(), 0), s, budget)
        assert rep.passed and rep.free_energy_pass and rep.r < rep.xi

    def test_uniform_dos_integral(self):
        dE, beta, dim = 7.0, 0.8, 32
        plan = custom_plan(dE, 0.5, 1)
        Z = estimate_partition(delta_samples(plan, dim), beta)
        assert Z == pytest.approx(dim / (beta * dE) * -math.expm1(-beta * dE), rel=1e-14)

    def test_uniform_dos_curve(self):
        plan = custom_plan(7.0, 0.5, 1)
        curve = reconstruct_dos(delta_samples(plan, 16), 257)
        np.testing.assert_allclose(curve.values, 16 / 7.0, rtol=1e-14)
        assert np.all(np.diff(curve.grid) > 0)

    @pytest.mark.parametrize("ell", [1, 2, 5])
    def test_weights_rederived_by_quadrature(self, ell):
        # each sample contributes int_0^dE e^{-beta E} e^{i E t} dE, which needs e^{i t dE} = 1
        beta, dim = 0.7, 4
        plan = custom_plan(6.0, 1.5, 4)
        pre, w0, w_re, w_im = partition_weights(plan, beta, dim)
        t = plan.times[ell]
        re = integrate.quad(lambda E: math.exp(-beta * E) * math.cos(E * t), 0, 6.0, limit=200)[0]
        im = integrate.quad(lambda E: math.exp(-beta * E) * math.sin(E * t), 0, 6.0, limit=200)[0]
        scale = dim * plan.dt / (2 * math.pi) * plan.weights[ell] * 2
        # Re(g e^{iEt}) = Re g cos - Im g sin
        assert pre * w_re[ell - 1] == pytest.approx(scale * re, rel=1e-10)
        assert pre * w_im[ell - 1] == pytest.approx(-scale * im, rel=1e-10)

    def test_rejects_off_lattice_step(self):
        plan = custom_plan(6.0, 1.5, 4, dt=1.3)
        with pytest.raises(ValueError, match="integer"):
            partition_weights(plan, 1.0, 4)

    def test_incomplete(self):
        s = ising(4)
        plan = plan_deterministic(ErrorBudget(4, 1.0, 0.1), s.bandwidth)
        full = sample_series(s, plan, Exact(), 0)
        part = SampleSet(plan, full.ell[:-1], full.t[:-1], full.g[:-1], Exact(), 0, 16)
        with pytest.raises(ValueError, match="incomplete"):
            estimate_partition(part, 1.0)
        with pytest.raises(ValueError):
            reconstruct_dos(part)

    @pytest.mark.parametrize("n,h,beta", [(4, 0.3, 1.0), (6, 0.0, 0.5), (5, 0.8, 2.0)])
    def test_matches_dense_quadrature_of_dos(self, n, h, beta):
        s = ising(n, 1.0, h)
        plan = plan_deterministic(ErrorBudget(n, beta, 0.1), s.bandwidth)
        ss = sample_series(s, plan, Exact(), 0)
        curve = reconstruct_dos(ss, 2 ** 14 + 1)
        Zq = integrate.simpson(curve.values * np.exp(-beta * curve.grid), x=curve.grid)
        assert Zq == pytest.approx(estimate_partition(ss, beta), rel=1e-6)


class TestDos:
    def test_single_level_peak(self):
        # one level of unit dimension at the centre of the band
        plan = plan_deterministic(ErrorBudget(2, 1.0, 0.1), 6.0)
        centre = plan.delta_E / 2
        g = np.exp(-1j * centre * plan.times)
        curve = reconstruct_dos(SampleSet(plan, np.arange(g.size), plan.times, g, Exact(), 0, 1),
                                8193)
        peak = curve.grid[np.argmax(curve.values)] + plan.energy_offset
        assert abs(peak - centre) < plan.delta_e / 2

    @pytest.mark.parametrize("n,h", [(4, 0.3), (6, 0.5)])
    def test_normalization(self, n, h):
        s = ising(n, 1.0, h)
        plan = plan_deterministic(ErrorBudget(n, 1.0, 0.1), s.bandwidth)
        curve = reconstruct_dos(sample_series(s, plan, Exact(), 0), 2 ** 13 + 1)
        area = integrate.simpson(curve.values, x=curve.grid)
        a_side = side_lobe_area(WindowSpec(plan.theta, plan.delta_e))
        assert abs(area - s.dimension) <= a_side * s.dimension + 1e-9

    def test_csv(self, tmp_path):
        s = ising(4)
        plan = plan_deterministic(ErrorBudget(4, 1.0, 0.1), s.bandwidth)
        curve = reconstruct_dos(sample_series(s, plan, Exact(), 0), 33)
        write_dos_csv(curve, tmp_path / "d.csv", "x")
        lines = (tmp_path / "d.csv").read_text().splitlines()
        assert lines[:2] == ["# x", "energy,density"] and len(lines) == 35


class TestScalars:
    def test_free_energy(self):
        assert estimate_free_energy(2.0 ** 5, 5, 2.0) == pytest.approx(-math.log(2) / 2)
        assert estimate_free_energy(1.0, 9, 0.3) == 0.0
        Z, n, beta, gamma = 3.7, 6, 1.3, 0.05
        F = -math.log(Z) / (n * beta)
        assert estimate_free_energy(Z * math.exp(gamma * n), n, beta) == pytest.approx(F - gamma / beta)
        with pytest.raises(ValueError):
            estimate_free_energy(0.0, 3, 1.0)

    def test_relative_error(self):
        assert relative_error(2.5, 2.5) == 0
        assert relative_error(0.5, 1.0) == 0.5
        assert relative_error(2 * math.exp(0.3), 2.0) == pytest.approx(math.expm1(0.3))

    def test_report_schema(self):
        rep = EstimateReport(1.0, 0.0, 1.0, 0.0, 0.0, 0.1, 0.1, 1.0, True, True)
        assert {"Z_tilde", "F_tilde", "Z_exact", "F_exact", "r", "xi", "pass"} <= set(rep.to_dict())


class TestSingleStateBound:
    def test_limits(self):
        lo, up, r = single_state_error_bound(0.0, 10.0, 1.0, 20, 0.3, a_side=0.0)
        assert r == pytest.approx(math.expm1(0.3)) and up == r
        assert single_state_error_bound(4.0, 10.0, 1.0, 20, 1e-12, a_side=0.0)[2] < 1e-11

    def test_outside_band(self):
        with pytest.raises(ValueError):
            single_state_error_bound(11.0, 10.0, 1.0, 20, 0.3)

    @pytest.mark.parametrize("n,beta,dE", [(4, 1.0, 4.0), (8, 1.0, 32.0), (6, 2.0, 12.0),
                                           (10, 0.5, 20.0)])
    @pytest.mark.parametrize("guard", [True, False])
    def test_planner_satisfies_bound(self, n, beta, dE, guard):
        plan = plan_deterministic(ErrorBudget(n, beta, 0.1), dE, guard_band=guard, force=True)
        for E in np.linspace(0, plan.delta_E, 100):
            r = single_state_error_bound(E, plan.delta_E, beta, plan.theta, plan.delta_e)[2]
            assert r < plan.xi


@st.composite
def level_lists(draw):
    k = draw(st.integers(1, 32))
    energies = draw(st.lists(st.floats(0, 12), min_size=k, max_size=k, unique=True))
    return [(e, draw(st.integers(1, 4))) for e in energies]


class TestProperties:
    @given(levels=level_lists(), beta=st.sampled_from([0.5, 1.0, 2.0]))
    def test_domination(self, levels, beta):
        s = synthetic(levels)
        plan = plan_deterministic(ErrorBudget(4, beta, 0.1), max(s.bandwidth, 1e-3))
        r_full = run_exact(s, plan, beta)
        worst = 0.0
        for e, _ in levels:
            single = synthetic([(e - min(x for x, _ in levels), 1)])
            g = np.exp(-1j * (e - min(x for x, _ in levels) + plan.energy_offset) * plan.times)
            ss = SampleSet(plan, np.arange(g.size), plan.times, g, Exact(), 0, 1)
            zm = math.exp(-beta * (e - min(x for x, _ in levels)))
            worst = max(worst, relative_error(estimate_partition(ss, beta), zm))
            assert single.dimension == 1
        assert r_full <= worst * (1 + 1e-9) + 1e-14

    @given(n=st.integers(2, 7), J=st.floats(0.2, 2), h=st.floats(0.2, 2),
           beta=st.sampled_from([0.5, 1.0, 2.0]))
    def test_free_energy_equivalence(self, n, J, h, beta):
        s = ising(n, J, h, periodic=False)
        budget = ErrorBudget(n, beta, 0.1)
        plan = plan_deterministic(budget, s.bandwidth)
        rep = estimate_report(sample_series(s, plan, Exact(), 0), s, budget)
        assert rep.passed
        assert rep.free_energy_pass

    @pytest.mark.parametrize("n,h", [(4, 0.3), (6, 0.3), (5, 1.0)])
    def test_nyquist_violation_increases_error(self, n, h):
        s = ising(n, 1.0, h)
        plan = plan_deterministic(ErrorBudget(n, 1.0, 0.1), s.bandwidth, guard_band=False)
        coarse = custom_plan(plan.delta_E, plan.delta_e, plan.theta, spread=plan.spread,
                             dt=2 * plan.dt, N=plan.N // 2)
        assert run_exact(s, coarse, 1.0) > run_exact(s, plan, 1.0)

    def test_unguarded_schedule_wraps_around(self):
        # levels at both band edges leak across the periodic boundary
        s = ising(4, 1.0, 0.3)
        budget = ErrorBudget(4, 2.0, 0.1)
        bare = plan_deterministic(budget, s.bandwidth, guard_band=False)
        guarded = plan_deterministic(budget, s.bandwidth)
        assert run_exact(s, bare, 2.0) > budget.xi
        assert run_exact(s, guarded, 2.0) < budget.xi
