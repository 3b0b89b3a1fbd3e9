"""Deterministic error-budget planner for the broadening error.

Given spins ``n``, inverse temperature ``beta``, tolerance ``gamma`` and the
spectral spread, choose the energy resolution, window order and sample
count so that exact Fourier components give |F~ - F| < gamma / beta.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .window import LEMMA_C, WindowSamples, WindowSpec, lemma_bounds, window_time_samples

__all__ = ["MU", "KAPPA", "KAPPA_PRIME", "MAX_SAMPLES", "ErrorBudget", "SamplingPlan",
           "plan_deterministic", "custom_plan", "side_lobe_condition", "ScalingTable",
           "scaling_study"]

MU = 1.0 / (2.0 * math.log(math.pi) - 1.0)
KAPPA = 2.5 + math.log(2.0 * LEMMA_C / math.sqrt(6.0)) / math.log(math.pi)
KAPPA_PRIME = MU * KAPPA * math.log(math.pi)
MAX_SAMPLES = 10 ** 8


@dataclass(frozen=True)
class ErrorBudget:
    n: int
    beta: float
    gamma: float
    epsilon: float = 0.1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not sys.float_info.min <= self.xi < 1:
            raise ValueError(f"xi = 1 - exp(-gamma n) = {self.xi} is not in (0, 1)")

    @property
    def xi(self) -> float:
        """Relative partition-function tolerance 1 - exp(-gamma n)."""
        return -math.expm1(-self.gamma * self.n)


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """Sampling schedule and window for one (budget, bandwidth) pair.

    ``delta_E`` is the band sampled at Nyquist rate.  The spectrum, spread
    over ``[0, spread]``, is placed at ``energy_offset`` inside the band.
    Samples are ``l = 0 .. N/2`` at ``t_l = l dt``.
    """

    delta_E: float
    dt: float
    delta_e: float
    theta: int
    N: int
    spread: float
    energy_offset: float = 0.0
    xi: float | None = None
    beta: float | None = None

    @cached_property
    def window(self) -> WindowSamples:
        """Window weights at the plan's step, built on first use."""
        return window_time_samples(WindowSpec(self.theta, self.delta_e), self.dt)

    @property
    def T0(self) -> float:
        return 2 * math.pi / self.delta_e

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.N // 2 + 1)

    @property
    def weights(self) -> np.ndarray:
        """Window weights padded with zeros out to l = N/2."""
        w = np.zeros(self.N // 2 + 1)
        m = min(w.size, self.window.weights.size)
        w[:m] = self.window.weights[:m]
        return w

    @property
    def nyquist(self) -> bool:
        return math.isclose(self.dt * self.delta_E, 2 * math.pi, rel_tol=1e-12)

    def to_dict(self) -> dict:
        return dict(xi=self.xi, beta=self.beta, delta_e=self.delta_e, theta=self.theta,
                    T0=self.T0, dt=self.dt, N=self.N, delta_E=self.delta_E, spread=self.spread,
                    energy_offset=self.energy_offset, mu=MU, kappa=KAPPA, kappa_prime=KAPPA_PRIME)

    @classmethod
    def from_dict(cls, d: dict) -> "SamplingPlan":
        return custom_plan(d["delta_E"], d["delta_e"], d["theta"], spread=d["spread"],
                           energy_offset=d["energy_offset"], dt=d["dt"], N=d["N"],
                           xi=d.get("xi"), beta=d.get("beta"))


def _even_ceil(x: float) -> int:
    k = math.ceil(x * (1 - 1e-14))
    return k + (k % 2)


def custom_plan(delta_E: float, delta_e: float, theta: int, *, spread: float | None = None,
                energy_offset: float = 0.0, dt: float | None = None, N: int | None = None,
                xi: float | None = None, beta: float | None = None) -> SamplingPlan:
    """Plan with explicitly chosen parameters (no sufficiency guarantee).

    ``dt`` defaults to the Nyquist interval ``2 pi / delta_E`` and ``N`` to
    the even count covering the window support.
    """
    if not delta_E > 0:
        raise ValueError(f"bandwidth must be positive, got {delta_E}")
    if dt is None:
        dt = 2 * math.pi / delta_E
    spec = WindowSpec(theta, delta_e)
    if N is None:
        N = _even_ceil(theta * spec.T0 / dt)
    return SamplingPlan(delta_E=float(delta_E), dt=float(dt), delta_e=float(delta_e),
                        theta=int(theta), N=int(N),
                        spread=float(delta_E if spread is None else spread),
                        energy_offset=float(energy_offset), xi=xi, beta=beta)


def plan_deterministic(budget: ErrorBudget, delta_E: float, *, guard_band: bool = True,
                       max_samples: int = MAX_SAMPLES, force: bool = False) -> SamplingPlan:
    """Smallest plan meeting the sufficient conditions for r < xi.

    The resolution satisfies ``beta * delta_e = ln(1 + xi/2)`` and the
    order ``theta`` keeps the side-lobe bound below ``(xi/2) exp(-beta dE)``.

    With ``guard_band`` the sampled band is ``spread + 2 delta_e`` rounded
    up to a whole multiple of ``delta_e`` and the spectrum is centred in it.
    Without the margin, kernels of levels at the band edges wrap around
    under the periodic replication and the single-level bounds no longer
    hold; ``guard_band=False`` reproduces that unguarded schedule.
    """
    if not delta_E > 0:
        raise ValueError(f"bandwidth must be positive, got {delta_E}")
    xi = budget.xi
    beta = budget.beta
    delta_e = math.log1p(xi / 2) / beta
    if guard_band:
        p = math.ceil((delta_E + 2 * delta_e) / delta_e * (1 - 1e-13))
        band = p * delta_e
        offset = (band - delta_E) / 2
    else:
        band, offset = float(delta_E), 0.0
    half = math.ceil(MU * beta * band + MU * math.log(1 / xi) + KAPPA_PRIME)
    theta = 2 * half
    N = _even_ceil(theta * band / delta_e)
    if N > max_samples and not force:
        raise ValueError(f"plan needs N={N} samples (> {max_samples}); pass force=True")
    return custom_plan(band, delta_e, theta, spread=delta_E, energy_offset=offset, N=N,
                       xi=xi, beta=beta)


def side_lobe_condition(plan: SamplingPlan) -> tuple[float, float]:
    """(side-lobe bound, required maximum (xi/2) exp(-beta dE))."""
    bound = lemma_bounds(plan.theta, plan.delta_e)[1]
    return bound, plan.xi / 2 * math.exp(-plan.beta * plan.delta_E)


@dataclass(frozen=True)
class ScalingTable:
    n: np.ndarray
    theta: np.ndarray
    delta_e: np.ndarray
    delta_E: np.ndarray
    N: np.ndarray
    exponent: float

    def rows(self) -> list[dict]:
        return [dict(n=int(a), theta=int(b), delta_e=float(c), delta_E=float(d), N=int(e))
                for a, b, c, d, e in zip(self.n, self.theta, self.delta_e, self.delta_E, self.N)]


def scaling_study(budget_template: dict, n_range, delta_E_rule, *,
                  guard_band: bool = True) -> ScalingTable:
    """Planner outputs over ``n_range`` with the log-log slope of N against n.

    ``budget_template`` holds ``beta``, ``gamma`` and optionally ``epsilon``;
    ``delta_E_rule`` maps n to the spectral spread.
    """
    ns, thetas, des, dEs, Ns = [], [], [], [], []
    for n in n_range:
        budget = ErrorBudget(n=int(n), **budget_template)
        plan = plan_deterministic(budget, float(delta_E_rule(n)), guard_band=guard_band,
                                  force=True)
        ns.append(n)
        thetas.append(plan.theta)
        des.append(plan.delta_e)
        dEs.append(plan.delta_E)
        Ns.append(plan.N)
    ns = np.asarray(ns, dtype=float)
    Ns = np.asarray(Ns, dtype=float)
    exponent = float(np.polyfit(np.log(ns), np.log(Ns), 1)[0]) if ns.size > 1 else float("nan")
    return ScalingTable(ns.astype(int), np.asarray(thetas), np.asarray(des), np.asarray(dEs),
                        Ns.astype(np.int64), exponent)
