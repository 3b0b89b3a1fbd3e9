"""Choosing the window and sample count from an error budget.

The planner turns (n, beta, gamma) and the spectral spread into a window
and a sample count N.  With exact samples the result meets
|F~ - F| < gamma / beta.
"""
from spectralfe.plan import ErrorBudget, plan_deterministic, scaling_study, side_lobe_condition

budget = ErrorBudget(n=8, beta=1.0, gamma=0.1)
plan = plan_deterministic(budget, 8.0)
print(f"xi = {budget.xi:.4f}")
for key, value in plan.to_dict().items():
    print(f"  {key:>14}: {value}")

bound, required = side_lobe_condition(plan)
print(f"side-lobe bound {bound:.3e} below the required {required:.3e}")

# The literal schedule samples exactly the spread and has no guard band.
literal = plan_deterministic(budget, 8.0, guard_band=False)
print(f"guarded N={plan.N} (band {plan.delta_E:.3f}), literal N={literal.N}")

# Sample counts grow polynomially with system size.
table = scaling_study(dict(beta=1.0, gamma=0.1), [4, 8, 16, 32, 64, 128, 256], float)
for row in table.rows():
    print(f"  n={row['n']:3d} theta={row['theta']:4d} N={row['N']}")
print(f"fitted exponent {table.exponent:.3f}")
