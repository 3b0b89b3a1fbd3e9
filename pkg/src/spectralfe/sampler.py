"""Exact and noisy samples of the normalized trace g(t) = Tr exp(-iHt) / dim.

Two measurement schemes are simulated at the level of their observables:
the ancilla circuits for diagonal Hamiltonians (trinomial shot counts on
the four outcome probabilities) and the ensemble readout (exact expectation
plus additive Gaussian noise).
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .plan import SamplingPlan
from .spectrum import Spectrum

__all__ = ["Exact", "Shots", "AdditiveGaussian", "NoiseModel", "SampleSet", "exact_g",
           "circuit_probabilities", "exact_series", "add_noise", "sample_series",
           "noise_to_dict", "noise_from_dict", "write_samples_csv", "read_samples_csv"]

_CHUNK = 2 ** 22


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class Shots:
    """R repetitions for each of the X and Y ancilla circuits."""

    R: int

    def __post_init__(self):
        if int(self.R) != self.R or self.R < 1:
            raise ValueError(f"shot count R must be a positive integer, got {self.R!r}")


@dataclass(frozen=True)
class AdditiveGaussian:
    """Independent N(0, sigma_g^2) noise on Re and Im of every sample."""

    sigma_g: float

    def __post_init__(self):
        if not self.sigma_g >= 0:
            raise ValueError(f"sigma_g must be >= 0, got {self.sigma_g}")


NoiseModel = Union[Exact, Shots, AdditiveGaussian]


def noise_to_dict(noise: NoiseModel) -> dict:
    if isinstance(noise, Shots):
        return {"kind": "shots", "R": noise.R}
    if isinstance(noise, AdditiveGaussian):
        return {"kind": "gaussian", "sigma_g": noise.sigma_g}
    return {"kind": "exact"}


def noise_from_dict(d: dict) -> NoiseModel:
    kind = d.get("kind", "exact")
    if kind == "exact":
        return Exact()
    if kind == "shots":
        return Shots(int(d["R"]))
    if kind == "gaussian":
        return AdditiveGaussian(float(d["sigma_g"]))
    raise ValueError(f"unknown noise kind {kind!r}")


def exact_g(s: Spectrum, t):
    """g(t) = dim^-1 sum_m exp(-i E_m t); scalar in, scalar out."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    values, counts = s.levels
    counts = counts.astype(float)
    out = np.empty(t.shape, dtype=complex)
    step = max(1, _CHUNK // values.size)
    for start in range(0, t.size, step):
        phase = np.multiply.outer(t[start:start + step], values)
        out[start:start + step] = (np.cos(phase) @ counts) - 1j * (np.sin(phase) @ counts)
    out /= s.dimension
    return out[0] if scalar else out


def circuit_probabilities(g):
    """Outcome probabilities (p_X0, p_X1, p_Y0, p_Y1) of the ancilla circuits.

    The remaining mass of each circuit falls on outcomes orthogonal to both
    phi_0 and phi_1.
    """
    g = np.asarray(g, dtype=complex)
    if np.any(np.abs(g) > 1 + 1e-12):
        raise ValueError("|g| must not exceed 1")
    return (np.abs(1 + 1j * g) ** 2 / 4, np.abs(1 - 1j * g) ** 2 / 4,
            np.abs(1 + g) ** 2 / 4, np.abs(1 - g) ** 2 / 4)


@dataclass(frozen=True, eq=False)
class SampleSet:
    plan: SamplingPlan
    ell: np.ndarray
    t: np.ndarray
    g: np.ndarray
    noise: NoiseModel
    seed: int
    dimension: int

    def __post_init__(self):
        ell = np.asarray(self.ell)
        if ell.size != np.unique(ell).size:
            raise ValueError("sample indices must be unique")
        if ell.size and (ell.min() < 0 or ell.max() > self.plan.N // 2):
            raise ValueError("sample indices must lie in 0 .. N/2")

    @property
    def complete(self) -> bool:
        return np.array_equal(np.sort(self.ell), np.arange(self.plan.N // 2 + 1))


def exact_series(s: Spectrum, plan: SamplingPlan) -> np.ndarray:
    """g at every plan time for the spectrum placed at ``plan.energy_offset``."""
    if s.bandwidth > plan.spread * (1 + 1e-12) + 1e-12:
        raise ValueError(f"spectrum bandwidth {s.bandwidth} exceeds the planned spread "
                         f"{plan.spread}")
    t = plan.times
    return exact_g(s, t) * np.exp(-1j * plan.energy_offset * t)


def _trinomial_difference(p_plus, p_minus, R, rng):
    rest = np.clip(1.0 - p_plus - p_minus, 0.0, 1.0)
    pvals = np.stack([p_plus, p_minus, rest], axis=-1)
    pvals /= pvals.sum(axis=-1, keepdims=True)
    counts = rng.multinomial(R, pvals)
    return (counts[..., 0] - counts[..., 1]) / R


def add_noise(g: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Noisy estimates of the exact values ``g`` drawn from ``rng``."""
    if isinstance(noise, Exact):
        return g.copy()
    if isinstance(noise, AdditiveGaussian):
        eta = rng.normal(0.0, noise.sigma_g, size=(2,) + g.shape)
        return g + eta[0] + 1j * eta[1]
    pX0, pX1, pY0, pY1 = circuit_probabilities(g)
    re = _trinomial_difference(pY0, pY1, noise.R, rng)
    im = _trinomial_difference(pX1, pX0, noise.R, rng)
    return re + 1j * im


def sample_series(s: Spectrum, plan: SamplingPlan, noise: NoiseModel, seed: int) -> SampleSet:
    """Estimates of g_l for l = 0 .. N/2, reproducible from ``seed``.

    Noise is drawn from one PCG64 stream seeded by ``SeedSequence(seed)``
    in ascending l order.
    """
    g = exact_series(s, plan)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    ell = np.arange(plan.N // 2 + 1)
    return SampleSet(plan, ell, plan.times, add_noise(g, noise, rng), noise, int(seed),
                     s.dimension)


def write_samples_csv(samples: SampleSet, path, provenance: dict | None = None) -> None:
    header = {**(provenance or {}), "plan": samples.plan.to_dict(),
              "noise": noise_to_dict(samples.noise), "seed": samples.seed,
              "dimension": samples.dimension}
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(header) + "\n")
        w = csv.writer(fh)
        w.writerow(["ell", "t", "re", "im"])
        for l, t, g in zip(samples.ell, samples.t, samples.g):
            w.writerow([int(l), repr(float(t)), repr(float(g.real)), repr(float(g.imag))])


def read_samples_csv(path, plan: SamplingPlan | None = None) -> SampleSet:
    """Load a sample CSV; ``plan`` overrides the plan stored in its header."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing JSON header line")
        header = json.loads(first[1:])
        rows = list(csv.DictReader(fh))
    if plan is None:
        plan = SamplingPlan.from_dict(header["plan"])
    ell = np.array([int(r["ell"]) for r in rows])
    t = np.array([float(r["t"]) for r in rows])
    g = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return SampleSet(plan, ell, t, g, noise_from_dict(header["noise"]), int(header["seed"]),
                     int(header["dimension"]))
