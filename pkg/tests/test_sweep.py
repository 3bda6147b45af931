import itertools
import math

import numpy as np
import pytest

from gkpsim.decoders.sweep import contract_planar


def brute_force_network(tensors, legs):
    """Contract a closed network by summing over all edge assignments."""
    edges = sorted({e for ll in legs for e in ll})
    dims = {}
    for t, ll in zip(tensors, legs):
        for ax, e in enumerate(ll):
            dims[e] = t.shape[ax]
    total = 0.0
    for assignment in itertools.product(*(range(dims[e]) for e in edges)):
        val = dict(zip(edges, assignment))
        term = 1.0
        for t, ll in zip(tensors, legs):
            term *= t[tuple(val[e] for e in ll)]
        total += term
    return total


def random_grid_network(rows, cols, dim, rng, positive=True):
    """A rows x cols nearest-neighbour closed network with random tensors."""
    edge = 0
    h_edges = {}
    v_edges = {}
    for r in range(rows):
        for c in range(cols - 1):
            h_edges[(r, c)] = edge
            edge += 1
    for r in range(rows - 1):
        for c in range(cols):
            v_edges[(r, c)] = edge
            edge += 1
    tensors, legs, positions = [], [], []
    for r in range(rows):
        for c in range(cols):
            eids = []
            if c > 0:
                eids.append(h_edges[(r, c - 1)])
            if c < cols - 1:
                eids.append(h_edges[(r, c)])
            if r > 0:
                eids.append(v_edges[(r - 1, c)])
            if r < rows - 1:
                eids.append(v_edges[(r, c)])
            shape = (dim,) * len(eids)
            t = rng.uniform(0.05, 1.0, size=shape) if positive \
                else rng.normal(size=shape)
            tensors.append(t)
            legs.append(eids)
            positions.append((float(c), float(r)))
    return tensors, legs, positions


@pytest.mark.parametrize("rows,cols,dim", [(2, 2, 2), (2, 3, 2), (3, 3, 2), (2, 3, 3)])
def test_unbounded_contraction_matches_brute_force(rows, cols, dim):
    rng = np.random.default_rng(rows * 10 + cols + dim)
    tensors, legs, positions = random_grid_network(rows, cols, dim, rng)
    logz, sign = contract_planar(tensors, legs, positions, max_bond=0)
    expected = brute_force_network(tensors, legs)
    assert sign == 1.0
    assert logz == pytest.approx(math.log(expected), abs=1e-10)


def test_contraction_handles_signed_tensors():
    rng = np.random.default_rng(99)
    for trial in range(5):
        tensors, legs, positions = random_grid_network(2, 3, 2, rng, positive=False)
        expected = brute_force_network(tensors, legs)
        if abs(expected) < 1e-6:
            continue
        logz, sign = contract_planar(tensors, legs, positions, max_bond=0)
        assert sign * math.exp(logz) == pytest.approx(expected, rel=1e-9)


def test_contraction_is_deterministic():
    rng = np.random.default_rng(5)
    tensors, legs, positions = random_grid_network(3, 4, 2, rng)
    a = contract_planar(tensors, legs, positions, max_bond=0)
    b = contract_planar(tensors, legs, positions, max_bond=0)
    assert a == b


def test_bond_cap_degrades_gracefully():
    rng = np.random.default_rng(10)
    tensors, legs, positions = random_grid_network(4, 4, 2, rng)
    exact, _ = contract_planar(tensors, legs, positions, max_bond=0)
    capped, _ = contract_planar(tensors, legs, positions, max_bond=2)
    # truncated result is close but need not be exact
    assert capped == pytest.approx(exact, rel=0.2)


def test_insertion_through_a_nontrivial_bond():
    """A disconnected tensor inserted mid-MPS must thread the host bond through."""
    rng = np.random.default_rng(3)
    d = 3
    a = rng.uniform(0.1, 1.0, size=(d, d))      # legs to B, C
    b = rng.uniform(0.1, 1.0, size=(d, d))      # legs to A, E
    c = rng.uniform(0.1, 1.0, size=(d, d))      # legs to A, E
    dd = rng.uniform(0.1, 1.0, size=(d,))       # leg to E
    e = rng.uniform(0.1, 1.0, size=(d, d, d))   # legs to B, C, D
    tensors = [a, b, c, dd, e]
    legs = [[0, 1], [0, 2], [1, 3], [4], [2, 3, 4]]
    positions = [(0.0, 0.0), (1.0, 2.0), (1.0, -2.0), (1.1, 0.0), (2.0, 0.0)]
    logz, sign = contract_planar(tensors, legs, positions, max_bond=0)
    expected = brute_force_network(tensors, legs)
    assert sign * math.exp(logz) == pytest.approx(expected, rel=1e-10)


def test_zero_network_reports_minus_infinity():
    tensors = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    legs = [[0], [0]]
    positions = [(0.0, 0.0), (1.0, 0.0)]
    logz, sign = contract_planar(tensors, legs, positions, max_bond=0)
    assert logz == -math.inf


def test_rejects_dangling_edges():
    with pytest.raises(ValueError):
        contract_planar([np.ones(2)], [[0]], [(0.0, 0.0)])
