"""Partition-function and free-energy estimates from sampled Fourier components."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .plan import ErrorBudget, SamplingPlan
from .sampler import SampleSet
from .spectrum import Spectrum, free_energy_per_spin, partition_function
from .window import WindowSpec, lemma_bounds, side_lobe_area

__all__ = ["EstimateReport", "DosCurve", "partition_weights", "reconstruct_dos",
           "estimate_partition", "estimate_free_energy", "single_state_error_bound",
           "relative_error", "estimate_report", "write_dos_csv"]

# order up to which the side-lobe area comes from quadrature, not its bound
QUADRATURE_MAX_THETA = 60


@dataclass(frozen=True)
class EstimateReport:
    Z_tilde: float
    F_tilde: float
    Z_exact: float
    F_exact: float
    r: float
    xi: float
    gamma: float
    beta: float
    passed: bool
    free_energy_pass: bool

    def to_dict(self) -> dict:
        return {"Z_tilde": self.Z_tilde, "F_tilde": self.F_tilde, "Z_exact": self.Z_exact,
                "F_exact": self.F_exact, "r": self.r, "xi": self.xi, "gamma": self.gamma,
                "beta": self.beta, "pass": self.passed,
                "free_energy_pass": self.free_energy_pass}


@dataclass(frozen=True, eq=False)
class DosCurve:
    grid: np.ndarray
    values: np.ndarray


def _ordered(samples: SampleSet) -> np.ndarray:
    if not samples.complete:
        raise ValueError("sample set is incomplete: every l in 0 .. N/2 is required")
    order = np.argsort(samples.ell)
    return samples.g[order]


def _check_commensurate(plan: SamplingPlan) -> None:
    # the closed form relies on exp(i t_l dE) = 1
    k = plan.dt * plan.delta_E / (2 * math.pi)
    if abs(k - round(k)) > 1e-9 * max(1.0, k) or round(k) < 1:
        raise ValueError(f"dt * delta_E / 2pi = {k} is not a positive integer")


def partition_weights(plan: SamplingPlan, beta: float, dimension: int):
    """Coefficients of the linear map from samples to Z~.

    Returns ``(prefactor, w0, w_re, w_im)`` with
    ``Z~ = prefactor * (w0 Re g_0 + sum_l w_re Re g_l + w_im Im g_l)``
    over ``l >= 1``.  The prefactor includes ``exp(beta * offset)``, which
    moves the estimate back from the band frame to the spectrum frame.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    _check_commensurate(plan)
    b = plan.weights
    x = plan.times[1:] / beta
    denom = 1.0 + x * x
    prefactor = (dimension * plan.dt / (2 * math.pi * beta) * -math.expm1(-beta * plan.delta_E)
                 * math.exp(beta * plan.energy_offset))
    return prefactor, b[0], 2 * b[1:] / denom, -2 * b[1:] * x / denom


def estimate_partition(samples: SampleSet, beta: float) -> float:
    """Boltzmann integral of the reconstructed density of states over the band."""
    g = _ordered(samples)
    pre, w0, w_re, w_im = partition_weights(samples.plan, beta, samples.dimension)
    terms = np.concatenate([[w0 * g[0].real], w_re * g[1:].real, w_im * g[1:].imag])
    return pre * math.fsum(terms)


def reconstruct_dos(samples: SampleSet, grid_points: int = 2048) -> DosCurve:
    """Broadened, periodically replicated density of states on a uniform grid.

    The grid spans the sampled band in the spectrum's own energy frame,
    i.e. ``[-offset, delta_E - offset]``.
    """
    g = _ordered(samples)
    plan = samples.plan
    grid = np.linspace(0.0, plan.delta_E, int(grid_points))
    t = plan.times
    b = plan.weights
    values = np.empty(grid.size)
    step = max(1, 2 ** 22 // t.size)
    for start in range(0, grid.size, step):
        phase = np.exp(1j * np.multiply.outer(grid[start:start + step], t[1:]))
        values[start:start + step] = b[0] * g[0].real + 2 * (phase @ (b[1:] * g[1:])).real
    values *= samples.dimension * plan.dt / (2 * math.pi)
    return DosCurve(grid - plan.energy_offset, values)


def estimate_free_energy(Z_tilde: float, n: int, beta: float) -> float:
    """F~ = -ln Z~ / (n beta); a non-positive Z~ means the estimate is noise-dominated."""
    if not Z_tilde > 0:
        raise ValueError(f"Z~ = {Z_tilde} is not positive; free energy undefined")
    return -math.log(Z_tilde) / (n * beta)


def relative_error(Z_tilde: float, Z: float) -> float:
    if not Z > 0:
        raise ValueError("Z must be positive")
    return abs(Z_tilde - Z) / Z


def single_state_error_bound(E_m: float, delta_E: float, beta: float, theta: int,
                             delta_e: float, a_side: float | None = None):
    """Bounds on the relative error contributed by one level at ``E_m``.

    Returns ``(lower, upper, r_bound)`` where ``lower = 1 - Zmin/Z_m`` and
    ``upper = Zmax/Z_m - 1`` use the extreme Boltzmann factors inside and
    outside the main lobe, and ``r_bound`` is the larger magnitude.  The
    side-lobe area is taken from quadrature up to order 60 and from its
    closed-form bound above that, unless ``a_side`` is given.
    """
    if not 0 <= E_m <= delta_E:
        raise ValueError(f"E_m={E_m} outside [0, {delta_E}]")
    if a_side is None:
        if theta <= QUADRATURE_MAX_THETA:
            a_side = side_lobe_area(WindowSpec(theta, delta_e))
        else:
            a_side = lemma_bounds(theta, delta_e)[1]
    # ratios to Z_m = exp(-beta E_m), written to avoid overflow
    z_min = (1 - a_side) * math.exp(-beta * delta_e) + a_side * math.exp(-beta * (delta_E - E_m))
    z_max = (1 - a_side) * math.exp(beta * delta_e) + a_side * math.exp(beta * E_m)
    lower = 1 - z_min
    upper = z_max - 1
    return lower, upper, max(abs(lower), abs(upper))


def estimate_report(samples: SampleSet, spectrum: Spectrum, budget: ErrorBudget) -> EstimateReport:
    """Compare the estimate with the exact oracle under ``budget``."""
    beta = budget.beta
    Z_t = estimate_partition(samples, beta)
    Z = partition_function(spectrum, beta)
    F = free_energy_per_spin(spectrum, beta) if spectrum.n >= 1 else float("nan")
    n = spectrum.n if spectrum.n >= 1 else budget.n
    F_t = estimate_free_energy(Z_t, n, beta) if Z_t > 0 else float("nan")
    r = relative_error(Z_t, Z)
    f_pass = bool(Z_t > 0 and abs(F_t - F) < budget.gamma / beta) if spectrum.n >= 1 else False
    return EstimateReport(Z_t, F_t, Z, F, r, budget.xi, budget.gamma, beta, bool(r < budget.xi),
                          f_pass)


def write_dos_csv(curve: DosCurve, path, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write("# " + comment + "\n")
        w = csv.writer(fh)
        w.writerow(["energy", "density"])
        for e, v in zip(curve.grid, curve.values):
            w.writerow([repr(float(e)), repr(float(v))])
