"""From samples of the trace to the free energy and density of states.

Exact samples of g(t) = Tr exp(-iHt) / dim at the planned times give Z~
through a closed-form weighted sum.  The same samples reconstruct the
broadened density of states.
"""
import numpy as np

from spectralfe import lattice
from spectralfe.estimate import estimate_report, reconstruct_dos
from spectralfe.plan import ErrorBudget, custom_plan, plan_deterministic
from spectralfe.sampler import Exact, Shots, sample_series
from spectralfe.spectrum import exact_spectrum

h = lattice.build_hamiltonian(lattice.ring(6), lattice.IsingLongitudinal(1.0, 0.5))
s = exact_spectrum(h)
budget = ErrorBudget(n=6, beta=1.0, gamma=0.1)
plan = plan_deterministic(budget, s.bandwidth)

exact = sample_series(s, plan, Exact(), seed=0)
report = estimate_report(exact, s, budget)
print(f"exact samples: r = {report.r:.2e} < xi = {report.xi:.3f}, "
      f"F~ = {report.F_tilde:.6f}, F = {report.F_exact:.6f}")

# Finite repetitions of the ancilla circuits add shot noise, and the
# weighted sum amplifies it, so many repetitions are needed.
for R in (10_000, 1_000_000):
    rep = estimate_report(sample_series(s, plan, Shots(R), seed=1), s, budget)
    print(f"R={R:>6} shots: r = {rep.r:.3g}, passes = {rep.passed}")

curve = reconstruct_dos(exact, grid_points=2001)
peak = curve.grid[np.argmax(curve.values)]
print(f"DOS peak at E = {peak:.3f}; distinct levels at {np.round(s.levels[0], 3)}")

# Doubling the step violates the Nyquist condition and aliasing raises r.
coarse = custom_plan(plan.delta_E, plan.delta_e, plan.theta, spread=plan.spread,
                     energy_offset=plan.energy_offset, dt=2 * plan.dt, N=plan.N // 2)
rep = estimate_report(sample_series(s, coarse, Exact(), seed=0), s, budget)
print(f"doubled step: r = {rep.r:.3g} (was {report.r:.2e})")
