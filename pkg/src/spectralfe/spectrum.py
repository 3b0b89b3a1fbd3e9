"""Exact-diagonalization oracle: shifted spectra, Z and F per spin."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .lattice import (DENSE_LIMIT, DIAGONAL_LIMIT, Hamiltonian, Synthetic,
                      diagonal_energies)

__all__ = ["Spectrum", "exact_spectrum", "spectrum_from_energies", "partition_function",
           "free_energy_per_spin", "xxz_matrix", "write_spectrum_csv"]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted eigenenergies shifted so the ground state sits at zero.

    Attributes
    ----------
    energies : ndarray
        Ascending, degenerate values repeated; ``energies[0] == 0``.
    dimension : int
        Hilbert-space dimension, equal to ``len(energies)``.
    e_min_original : float
        The ground-state energy that was subtracted.
    n : int
        Spin count, or 0 for a synthetic level list that is not a lattice.
    """

    energies: np.ndarray
    dimension: int
    e_min_original: float
    n: int

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1 or e.size != self.dimension:
            raise ValueError("dimension must equal the number of energies")
        if e[0] != 0.0 or np.any(np.diff(e) < 0):
            raise ValueError("energies must be sorted ascending with energies[0] == 0")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @property
    def bandwidth(self) -> float:
        return float(self.energies[-1])

    @cached_property
    def levels(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct energies and their degeneracies."""
        values, counts = np.unique(self.energies, return_counts=True)
        return values, counts


def spectrum_from_energies(energies, n: int = 0) -> Spectrum:
    """Shift an arbitrary eigenvalue list to start at zero."""
    e = np.sort(np.asarray(energies, dtype=float).ravel())
    e_min = float(e[0])
    shifted = e - e_min
    shifted[0] = 0.0
    return Spectrum(shifted, int(e.size), e_min, int(n))


def xxz_matrix(h: Hamiltonian) -> np.ndarray:
    """Dense real XXZ Hamiltonian in the computational basis.

    ``sx sx + sy sy`` exchanges an anti-aligned pair with amplitude 2;
    ``sz sz`` is +1 on aligned and -1 on anti-aligned pairs.
    """
    m = h.model
    n = h.graph.n
    dim = 2 ** n
    states = np.arange(dim, dtype=np.int64)
    mat = np.zeros((dim, dim))
    diag = np.zeros(dim)
    for i, j in h.graph.edges:
        anti = ((states >> i) ^ (states >> j)) & 1
        diag += m.J_z * (1 - 2 * anti)
        flipped = states ^ ((1 << i) | (1 << j))
        rows = states[anti == 1]
        mat[rows, flipped[anti == 1]] += 2.0 * m.J_x
    mat[states, states] += diag
    return mat


def exact_spectrum(h: Hamiltonian) -> Spectrum:
    """All eigenenergies of ``h``, shifted so the minimum is zero.

    Diagonal models are enumerated over bit configurations; XXZ goes
    through a dense symmetric eigensolve.
    """
    if isinstance(h.model, Synthetic):
        return spectrum_from_energies(diagonal_energies(h), n=h.n)
    if h.diagonal:
        if h.n > DIAGONAL_LIMIT:
            raise ValueError(f"n={h.n} exceeds the enumeration limit {DIAGONAL_LIMIT}")
        return spectrum_from_energies(diagonal_energies(h), n=h.n)
    if h.n > DENSE_LIMIT:
        raise ValueError(f"n={h.n} exceeds the dense-solver limit {DENSE_LIMIT}")
    mat = xxz_matrix(h)
    if not np.allclose(mat, mat.T, rtol=0, atol=1e-12):
        raise RuntimeError("XXZ matrix construction is not symmetric")
    return spectrum_from_energies(np.linalg.eigvalsh(mat), n=h.n)


def partition_function(s: Spectrum, beta: float) -> float:
    """Z = sum_m exp(-beta E_m) with exactly rounded (fsum) accumulation."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    values, counts = s.levels
    return math.fsum(counts * np.exp(-beta * values))


def free_energy_per_spin(s: Spectrum, beta: float) -> float:
    """F = -ln Z / (n beta) on the shifted energy scale.

    Add ``s.e_min_original / s.n`` for the unshifted value.
    """
    if s.n < 1:
        raise ValueError("free energy per spin needs a spin count n >= 1")
    return -math.log(partition_function(s, beta)) / (s.n * beta)


def write_spectrum_csv(s: Spectrum, path) -> None:
    values, counts = s.levels
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["energy", "degeneracy"])
        for e, d in zip(values, counts):
            w.writerow([repr(float(e)), int(d)])
