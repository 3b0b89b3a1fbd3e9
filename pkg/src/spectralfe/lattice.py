"""Spin-1/2 lattice graphs, model specifications and energy-bandwidth bounds.

Units: k_B = hbar = 1.  Energies and 1/beta share one dimensionless unit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "LatticeGraph", "IsingLongitudinal", "XXZ", "FreeSpins", "Synthetic",
    "Hamiltonian", "open_chain", "ring", "grid", "build_hamiltonian",
    "bandwidth_bound", "diagonal_energies", "DENSE_LIMIT", "DIAGONAL_LIMIT",
]

# dimension 4096 for the dense XXZ eigensolve
DENSE_LIMIT = 12
DIAGONAL_LIMIT = 24


@dataclass(frozen=True)
class LatticeGraph:
    """Undirected graph of ``n`` spin sites with nearest-neighbour ``edges``."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    periodic: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        normalized = []
        seen = set()
        for edge in self.edges:
            i, j = (int(v) for v in edge)
            if i == j:
                raise ValueError(f"self-loop at site {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {(i, j)} has a site index outside [0, {self.n})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append(key)
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)


def open_chain(n: int) -> LatticeGraph:
    return LatticeGraph(n, tuple((i, i + 1) for i in range(n - 1)), periodic=False)


def ring(n: int) -> LatticeGraph:
    """Periodic chain.  For ``n == 2`` the single bond is not doubled."""
    edges = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        edges.append((0, n - 1))
    return LatticeGraph(n, tuple(edges), periodic=True)


def grid(lx: int, ly: int, periodic: bool = False) -> LatticeGraph:
    """Rectangular ``lx`` by ``ly`` lattice, site index ``x + lx * y``."""
    edges = set()
    for y in range(ly):
        for x in range(lx):
            s = x + lx * y
            for dx, dy in ((1, 0), (0, 1)):
                xx, yy = x + dx, y + dy
                if periodic:
                    xx, yy = xx % lx, yy % ly
                elif xx >= lx or yy >= ly:
                    continue
                t = xx + lx * yy
                if t != s:
                    edges.add((min(s, t), max(s, t)))
    return LatticeGraph(lx * ly, tuple(sorted(edges)), periodic=periodic)


@dataclass(frozen=True)
class IsingLongitudinal:
    """H = J_z sum_edges (1 - sz sz) + h sum_i (1 - sz)."""

    J_z: float
    h: float


@dataclass(frozen=True)
class XXZ:
    """H = sum_edges [J_x (sx sx + sy sy) + J_z sz sz]."""

    J_x: float
    J_z: float


@dataclass(frozen=True)
class FreeSpins:
    """H = h sum_i (1 - sz); each spin contributes level 0 or 2h."""

    h: float


@dataclass(frozen=True)
class Synthetic:
    """Explicit level list of ``(energy, degeneracy)`` pairs.

    ``dimension`` defaults to the total degeneracy and must match it when
    given; a single level with ``dimension=1`` is the isolated-eigenstate
    system used by the broadening analysis.
    """

    levels: tuple[tuple[float, int], ...]
    dimension: int | None = None

    def __post_init__(self):
        levels = tuple((float(e), int(d)) for e, d in self.levels)
        if not levels:
            raise ValueError("Synthetic spectrum needs at least one level")
        for e, d in levels:
            if d < 1:
                raise ValueError(f"degeneracy must be >= 1, got {d} at energy {e}")
            if not np.isfinite(e):
                raise ValueError("Synthetic level energies must be finite")
        total = sum(d for _, d in levels)
        dim = total if self.dimension is None else int(self.dimension)
        if dim != total:
            raise ValueError(f"dimension {dim} does not match total degeneracy {total}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "dimension", dim)


ModelSpec = Union[IsingLongitudinal, XXZ, FreeSpins, Synthetic]


@dataclass(frozen=True)
class Hamiltonian:
    graph: LatticeGraph | None
    model: ModelSpec
    diagonal: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "diagonal", not isinstance(self.model, XXZ))

    @property
    def n(self) -> int:
        """Spin count; 0 for a Synthetic spectrum without a lattice."""
        return 0 if self.graph is None else self.graph.n


def build_hamiltonian(graph: LatticeGraph | None, model: ModelSpec) -> Hamiltonian:
    """Validate ``graph`` against ``model`` and bundle them.

    Synthetic spectra may omit the graph; if one is given its dimension
    ``2**n`` has to equal the level count.
    """
    if isinstance(model, Synthetic):
        if graph is not None and 2 ** graph.n != model.dimension:
            raise ValueError(
                f"Synthetic dimension {model.dimension} != 2**{graph.n} for the given graph")
        return Hamiltonian(graph, model)
    if graph is None:
        raise ValueError(f"{type(model).__name__} needs a lattice graph")
    params = [v for v in vars(model).values()]
    if not all(np.isfinite(params)):
        raise ValueError(f"non-finite model parameters: {model}")
    if isinstance(model, XXZ) and graph.n > DENSE_LIMIT:
        raise ValueError(f"XXZ needs dense diagonalization; n={graph.n} > {DENSE_LIMIT}")
    if graph.n > DIAGONAL_LIMIT:
        raise ValueError(f"n={graph.n} exceeds the enumeration limit {DIAGONAL_LIMIT}")
    return Hamiltonian(graph, model)


def bandwidth_bound(h: Hamiltonian) -> float:
    """Rigorous upper bound on E_max - E_min."""
    m = h.model
    if isinstance(m, Synthetic):
        energies = [e for e, _ in m.levels]
        return max(energies) - min(energies)
    n_edges = len(h.graph.edges)
    if isinstance(m, IsingLongitudinal):
        return 2 * abs(m.J_z) * n_edges + 2 * abs(m.h) * h.graph.n
    if isinstance(m, FreeSpins):
        return 2 * abs(m.h) * h.graph.n
    # each XXZ summand has expectation in [-(2|Jx|+|Jz|), 2|Jx|+|Jz|]
    return 2 * (2 * abs(m.J_x) + abs(m.J_z)) * n_edges


def diagonal_energies(h: Hamiltonian) -> np.ndarray:
    """Energy of every computational basis state, indexed by bit pattern.

    Bit ``i`` of the index is 1 when spin ``i`` points down (sz = -1).
    """
    if not h.diagonal:
        raise ValueError("diagonal_energies requires a diagonal Hamiltonian")
    m = h.model
    if isinstance(m, Synthetic):
        return np.repeat([e for e, _ in m.levels], [d for _, d in m.levels]).astype(float)
    n = h.graph.n
    states = np.arange(2 ** n, dtype=np.int64)
    down = np.zeros(states.shape, dtype=np.int64)
    for i in range(n):
        down += (states >> i) & 1
    energy = 2.0 * m.h * down
    if isinstance(m, IsingLongitudinal):
        walls = np.zeros(states.shape, dtype=np.int64)
        for i, j in h.graph.edges:
            walls += ((states >> i) ^ (states >> j)) & 1
        energy = energy + 2.0 * m.J_z * walls
    return energy
