"""How sample noise propagates into Z~ and the failure probability.

Independent noise on each sample adds a predictable variance to Z~.
Inverting the failure probability gives the sample precision needed for a
target confidence, and Monte Carlo checks the prediction.
"""
from spectralfe import lattice
from spectralfe.noise import (failure_probability, monte_carlo_study, required_sigma_g,
                              variance_prediction)
from spectralfe.plan import ErrorBudget, plan_deterministic
from spectralfe.sampler import AdditiveGaussian
from spectralfe.spectrum import exact_spectrum, partition_function

h = lattice.build_hamiltonian(lattice.ring(6), lattice.IsingLongitudinal(1.0, 0.5))
s = exact_spectrum(h)
budget = ErrorBudget(n=6, beta=1.0, gamma=0.1)
plan = plan_deterministic(budget, s.bandwidth)
Z = partition_function(s, budget.beta)

pred = variance_prediction(plan, budget.beta, 1e-3, 6, includes_l0=True)
print(f"sigma_g = 1e-3: Var Z~ from the sum {pred.sigma2_sum:.4g}, "
      f"Gaussian-window integral {pred.sigma2_integral:.4g}")
print("failure probability:", failure_probability(Z, pred.sigma2_sum ** 0.5, 0.1, 6))

req = required_sigma_g(Z, 6, budget.beta, plan.delta_E, budget.gamma, 0.1, plan,
                       includes_l0=True)
print(f"sigma_g for 10% failure: {req.sigma_g:.5g} (closed form {req.closed_form:.5g})")

res = monte_carlo_study(h, budget, AdditiveGaussian(req.sigma_g), trials=2000, seed=7,
                        plan=plan, threads=4)
print(f"Monte Carlo: failure rate {res.empirical_failure_rate:.3f} "
      f"(predicted {res.predicted_failure:.3f}), sigma/Z = {res.sigma_over_Z:.3g}")

# Precision demand grows exponentially: Z / 2^n shrinks with n.
for n in (2, 4, 6, 8, 10):
    free = exact_spectrum(lattice.build_hamiltonian(lattice.open_chain(n),
                                                    lattice.FreeSpins(2.0)))
    b = ErrorBudget(n=n, beta=1.0, gamma=0.01)
    p = plan_deterministic(b, 20.0)
    sigma = required_sigma_g(partition_function(free, 1.0), n, 1.0, 20.0, 0.01, 0.1, p).sigma_g
    print(f"  free spins n={n:2d}: required sigma_g {sigma:.3e}")
