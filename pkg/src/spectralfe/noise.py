"""Propagation of random sample errors into Z~ and the free-energy failure rate."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize, special

from .lattice import Hamiltonian, bandwidth_bound
from .plan import ErrorBudget, SamplingPlan, plan_deterministic
from .estimate import partition_weights
from .sampler import (AdditiveGaussian, NoiseModel, Shots, add_noise, circuit_probabilities,
                      exact_series)
from .spectrum import exact_spectrum, free_energy_per_spin, partition_function

__all__ = ["VariancePrediction", "NoiseStudyResult", "FailureProbability", "SigmaRequirement",
           "ApproximationWarning", "variance_sum", "variance_integral", "variance_prediction",
           "failure_probability", "required_sigma_g", "shot_variance", "monte_carlo_study"]


class ApproximationWarning(UserWarning):
    """An analytic approximation is used outside its regime of validity."""


@dataclass(frozen=True)
class VariancePrediction:
    sigma2_sum: float
    sigma2_integral: float
    nu2: float
    includes_l0: bool


class FailureProbability(NamedTuple):
    two_sided: float
    symmetric: float


class SigmaRequirement(NamedTuple):
    sigma_g: float
    closed_form: float


def _dim(n: int, dimension: int | None) -> int:
    return 2 ** n if dimension is None else int(dimension)


def variance_sum(plan: SamplingPlan, beta: float, sigma_g: float, n: int, *,
                 includes_l0: bool = False, dimension: int | None = None) -> float:
    """Exact variance of Z~ for i.i.d. noise of variance sigma_g^2 on Re and Im.

    By default the l = 0 term is left out; ``includes_l0`` adds the noise
    carried by Re(g_0).
    """
    if sigma_g < 0:
        raise ValueError("sigma_g must be >= 0")
    pre, w0, w_re, w_im = partition_weights(plan, beta, _dim(n, dimension))
    total = math.fsum(w_re ** 2 + w_im ** 2)
    if includes_l0:
        total += w0 ** 2
    return pre ** 2 * sigma_g ** 2 * total


def variance_integral(plan: SamplingPlan, beta: float, sigma_g: float, n: int, *,
                      boltzmann_factor: bool = False, dimension: int | None = None) -> float:
    """Gaussian-window, continuous-time approximation of :func:`variance_sum`.

    Valid for ``beta * delta_E / 2pi >> 1`` and large window order.  The
    product ``exp(b^2/nu^2) erfc(b/nu)`` is evaluated as ``erfcx``.
    ``boltzmann_factor`` restores the ``(1 - exp(-beta dE))^2`` factor.
    """
    if sigma_g < 0:
        raise ValueError("sigma_g must be >= 0")
    if beta * plan.delta_E / (2 * math.pi) < 2:
        warnings.warn(f"beta*dE/2pi = {beta * plan.delta_E / (2 * math.pi):.3g} is not >> 1",
                      ApproximationWarning, stacklevel=2)
    nu = math.sqrt(plan.theta * plan.T0 ** 2 / 12)
    dim = _dim(n, dimension)
    value = (dim ** 2 * sigma_g ** 2 / (beta * plan.delta_E) * special.erfcx(beta / nu)
             * math.exp(2 * beta * plan.energy_offset))
    if boltzmann_factor:
        value *= math.expm1(-beta * plan.delta_E) ** 2
    return value


def variance_prediction(plan: SamplingPlan, beta: float, sigma_g: float, n: int, *,
                        includes_l0: bool = False) -> VariancePrediction:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ApproximationWarning)
        integral = variance_integral(plan, beta, sigma_g, n)
    return VariancePrediction(variance_sum(plan, beta, sigma_g, n, includes_l0=includes_l0),
                              integral, plan.theta * plan.T0 ** 2 / 12, includes_l0)


def failure_probability(Z: float, sigma_Z: float, gamma: float, n: int) -> FailureProbability:
    """Probability that a Gaussian Z~ centred on Z leaves (Z e^-gn, Z e^gn).

    Returns the exact two-sided value and the symmetric small-``gamma n``
    form ``erfc(Z gamma n / sqrt(2) sigma)``.
    """
    if not Z > 0:
        raise ValueError("Z must be positive")
    if sigma_Z < 0:
        raise ValueError("sigma_Z must be >= 0")
    if sigma_Z == 0:
        return FailureProbability(0.0, 0.0)
    gn = gamma * n
    s = Z / (math.sqrt(2) * sigma_Z)
    two = 0.5 * (special.erfc(s * math.expm1(gn)) + special.erfc(-s * math.expm1(-gn)))
    return FailureProbability(float(two), float(special.erfc(s * gn)))


def required_sigma_g(Z: float, n: int, beta: float, delta_E: float, gamma: float,
                     epsilon: float, plan: SamplingPlan, *, includes_l0: bool = False,
                     dimension: int | None = None) -> SigmaRequirement:
    """Largest sample noise keeping the failure probability at ``epsilon``.

    The exact value inverts the two-sided failure probability through
    :func:`variance_sum`; ``closed_form`` is the small-``gamma n``
    integral-approximation value sqrt(beta dE / 2) Z gamma n / (2^n erfcinv(eps)).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    gn = gamma * n

    def excess(log_s):
        s = math.exp(log_s)
        return 0.5 * (special.erfc(s * math.expm1(gn)) + special.erfc(-s * math.expm1(-gn))) - epsilon

    lo, hi = math.log(1e-12), math.log(1e12)
    if excess(lo) * excess(hi) > 0:
        raise ValueError(f"failure probability {epsilon} unreachable for gamma*n = {gn}")
    log_s = optimize.brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    sigma_Z = Z / (math.sqrt(2) * math.exp(log_s))
    unit = math.sqrt(variance_sum(plan, beta, 1.0, n, includes_l0=includes_l0,
                                  dimension=dimension))
    dim = _dim(n, dimension)
    closed = math.sqrt(beta * delta_E / 2) * Z * gn / (dim * special.erfcinv(epsilon))
    return SigmaRequirement(sigma_Z / unit, closed)


def shot_variance(g: np.ndarray, R: int) -> np.ndarray:
    """Per-component variances (Re, Im) of the trinomial estimators, shape (2, L)."""
    pX0, pX1, pY0, pY1 = circuit_probabilities(g)
    var_re = (pY0 + pY1 - (pY0 - pY1) ** 2) / R
    var_im = (pX0 + pX1 - (pX1 - pX0) ** 2) / R
    return np.stack([var_re, var_im])


@dataclass(frozen=True, eq=False)
class NoiseStudyResult:
    trials: int
    empirical_var: float
    empirical_failure_rate: float
    predicted_failure: float
    seed: int
    predicted_var: float
    sigma_g_effective: float
    Z_exact: float
    F_exact: float
    Z_tilde_mean: float
    catastrophic: int
    plan: SamplingPlan = field(repr=False)
    Z_tilde: np.ndarray = field(repr=False)
    F_tilde: np.ndarray = field(repr=False)
    passed: np.ndarray = field(repr=False)

    @property
    def sigma_over_Z(self) -> float:
        return math.sqrt(self.predicted_var) / self.Z_exact

    def to_dict(self) -> dict:
        return {"trials": self.trials, "seed": self.seed,
                "empirical_var": self.empirical_var, "predicted_var": self.predicted_var,
                "empirical_failure_rate": self.empirical_failure_rate,
                "predicted_failure": self.predicted_failure,
                "sigma_g_effective": self.sigma_g_effective, "Z_exact": self.Z_exact,
                "F_exact": self.F_exact, "Z_tilde_mean": self.Z_tilde_mean,
                "sigma_over_Z": self.sigma_over_Z, "catastrophic": self.catastrophic}


def monte_carlo_study(h: Hamiltonian, budget: ErrorBudget, noise: NoiseModel, trials: int,
                      seed: int, *, threads: int = 1, use_bandwidth_bound: bool = False,
                      includes_l0: bool = True, plan: SamplingPlan | None = None) -> NoiseStudyResult:
    """Repeat sampling and estimation ``trials`` times with independent streams.

    Trial ``k`` draws from the ``k``-th child of ``SeedSequence(seed)``, so
    results do not depend on ``threads``.  A trial fails when
    |F~ - F| >= gamma / beta, which includes every Z~ <= 0.  The prediction
    uses :func:`variance_sum` with ``includes_l0`` (on by default because
    the sampler perturbs g_0 as well) and the two-sided failure probability.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    spectrum = exact_spectrum(h)
    if plan is None:
        spread = bandwidth_bound(h) if use_bandwidth_bound else spectrum.bandwidth
        plan = plan_deterministic(budget, spread)
    beta, n = budget.beta, spectrum.n
    Z = partition_function(spectrum, beta)
    F = free_energy_per_spin(spectrum, beta)
    g = exact_series(spectrum, plan)
    pre, w0, w_re, w_im = partition_weights(plan, beta, spectrum.dimension)
    children = np.random.SeedSequence(int(seed)).spawn(trials)

    def run(k):
        g_t = add_noise(g, noise, np.random.default_rng(children[k]))
        return pre * (w0 * g_t[0].real + w_re @ g_t[1:].real + w_im @ g_t[1:].imag)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            Z_t = np.fromiter(pool.map(run, range(trials)), float, trials)
    else:
        Z_t = np.fromiter(map(run, range(trials)), float, trials)

    lo, hi = Z * math.exp(-budget.gamma * n), Z * math.exp(budget.gamma * n)
    passed = (Z_t > lo) & (Z_t < hi)
    with np.errstate(invalid="ignore", divide="ignore"):
        F_t = np.where(Z_t > 0, -np.log(np.where(Z_t > 0, Z_t, 1.0)) / (n * beta), np.nan)

    if isinstance(noise, AdditiveGaussian):
        sigma2 = noise.sigma_g ** 2
    elif isinstance(noise, Shots):
        sigma2 = float(np.mean(shot_variance(g, noise.R)))
    else:
        sigma2 = 0.0
    pred_var = variance_sum(plan, beta, math.sqrt(sigma2), n, includes_l0=includes_l0,
                            dimension=spectrum.dimension)
    pred_fail = failure_probability(Z, math.sqrt(pred_var), budget.gamma, n).two_sided
    return NoiseStudyResult(
        trials=trials, empirical_var=float(np.var(Z_t - Z_t[0], ddof=1)),
        empirical_failure_rate=float(1 - passed.mean()), predicted_failure=pred_fail,
        seed=int(seed), predicted_var=pred_var, sigma_g_effective=math.sqrt(sigma2),
        Z_exact=Z, F_exact=F, Z_tilde_mean=float(Z_t.mean()),
        catastrophic=int(np.sum(Z_t <= 0)), plan=plan, Z_tilde=Z_t, F_tilde=F_t,
        passed=passed)
