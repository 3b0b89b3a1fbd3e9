import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectralfe import lattice
from spectralfe.lattice import (XXZ, FreeSpins, IsingLongitudinal, LatticeGraph, Synthetic,
                                bandwidth_bound, build_hamiltonian, diagonal_energies)
from spectralfe.spectrum import exact_spectrum


def brute_force_ising(graph, J, h):
    """Energies from explicit sigma_z values, basis state k has spin i down if bit i is set."""
    out = []
    for k in range(2 ** graph.n):
        sz = [1 - 2 * ((k >> i) & 1) for i in range(graph.n)]
        e = sum(J * (1 - sz[a] * sz[b]) for a, b in graph.edges)
        e += sum(h * (1 - s) for s in sz)
        out.append(e)
    return np.array(out, dtype=float)


class TestGraphs:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            LatticeGraph(3, ((1, 1),))

    def test_rejects_duplicate(self):
        with pytest.raises(ValueError):
            LatticeGraph(3, ((0, 1), (1, 0)))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            LatticeGraph(3, ((0, 3),))

    def test_chain_and_ring_edge_counts(self):
        assert len(lattice.open_chain(5).edges) == 4
        assert len(lattice.ring(5).edges) == 5

    def test_grid_edge_counts(self):
        assert len(lattice.grid(3, 4).edges) == 3 * 3 + 2 * 4
        assert len(lattice.grid(3, 4, periodic=True).edges) == 2 * 12


class TestBuild:
    def test_two_site_open_chain(self):
        h = build_hamiltonian(lattice.open_chain(2), IsingLongitudinal(1.0, 0.0))
        assert h.diagonal
        np.testing.assert_array_equal(diagonal_energies(h), [0, 2, 2, 0])

    def test_single_free_spin(self):
        h = build_hamiltonian(lattice.open_chain(1), FreeSpins(0.5))
        np.testing.assert_allclose(np.sort(diagonal_energies(h)), [0, 1])

    def test_zero_xxz_is_zero(self):
        h = build_hamiltonian(lattice.ring(4), XXZ(0.0, 0.0))
        assert not h.diagonal
        np.testing.assert_array_equal(exact_spectrum(h).energies, np.zeros(16))

    def test_xxz_size_limit(self):
        with pytest.raises(ValueError):
            build_hamiltonian(lattice.ring(lattice.DENSE_LIMIT + 1), XXZ(1.0, 1.0))

    def test_synthetic_dimension_must_match(self):
        with pytest.raises(ValueError):
            Synthetic(((0.0, 2), (1.0, 1)), dimension=4)
        with pytest.raises(ValueError):
            Synthetic(((0.0, 0),))

    def test_enumeration_matches_brute_force(self):
        g = lattice.grid(2, 3, periodic=True)
        h = build_hamiltonian(g, IsingLongitudinal(0.7, 0.3))
        np.testing.assert_allclose(diagonal_energies(h), brute_force_ising(g, 0.7, 0.3),
                                   atol=1e-12)


class TestBandwidthBound:
    def test_xxz_single_edge(self):
        h = build_hamiltonian(lattice.open_chain(2), XXZ(1.0, 1.0))
        assert bandwidth_bound(h) == 6.0

    def test_ising_ring4(self):
        h = build_hamiltonian(lattice.ring(4), IsingLongitudinal(1.0, 0.0))
        assert bandwidth_bound(h) == 8.0
        assert exact_spectrum(h).bandwidth == 8.0

    def test_synthetic(self):
        h = build_hamiltonian(None, Synthetic(((0.0, 1), (5.0, 3))))
        assert bandwidth_bound(h) == 5.0

    def test_complete_graph_is_linear_in_edges(self):
        n = 6
        edges = tuple(itertools.combinations(range(n), 2))
        h = build_hamiltonian(LatticeGraph(n, edges), IsingLongitudinal(1.5, 0.0))
        assert bandwidth_bound(h) == pytest.approx(2 * 1.5 * len(edges))

    @given(n=st.integers(2, 9), periodic=st.booleans(),
           J=st.floats(-2, 2), h=st.floats(-2, 2))
    def test_bound_dominates_ising(self, n, periodic, J, h):
        g = lattice.ring(n) if periodic else lattice.open_chain(n)
        ham = build_hamiltonian(g, IsingLongitudinal(J, h))
        assert bandwidth_bound(ham) >= exact_spectrum(ham).bandwidth - 1e-12

    @given(n=st.integers(2, 7), Jx=st.floats(-2, 2), Jz=st.floats(-2, 2))
    def test_bound_dominates_xxz(self, n, Jx, Jz):
        ham = build_hamiltonian(lattice.ring(n), XXZ(Jx, Jz))
        assert bandwidth_bound(ham) >= exact_spectrum(ham).bandwidth - 1e-9

    @given(n=st.integers(1, 10), J=st.floats(0, 2), h=st.floats(0, 2))
    def test_all_up_is_ground_state(self, n, J, h):
        ham = build_hamiltonian(lattice.open_chain(n), IsingLongitudinal(J, h))
        e = diagonal_energies(ham)
        assert e[0] == 0.0 and e.min() == 0.0
