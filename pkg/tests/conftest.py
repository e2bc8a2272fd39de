"""Shared deterministic state generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from squash.core import DensityOperator, PureState, SystemLayout


def random_density(rng: np.random.Generator, d: int, rank: int) -> np.ndarray:
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_pure_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_separable_two_qubit(seed: int, max_terms: int = 4):
    """Separable two-qubit state from <= max_terms product terms, with the terms."""
    rng = np.random.default_rng([101, seed])
    k = int(rng.integers(2, max_terms + 1))
    w = rng.dirichlet(np.ones(k))
    layout = SystemLayout([("A", 2), ("B", 2)])
    m = np.zeros((4, 4), dtype=complex)
    terms = []
    for i in range(k):
        va = random_pure_vector(rng, 2)
        vb = random_pure_vector(rng, 2)
        v = np.kron(va, vb)
        terms.append((float(w[i]), PureState(layout, v)))
        m += w[i] * np.outer(v, v.conj())
    return DensityOperator(layout, m), terms, k


@pytest.fixture
def qubit_pair_layout():
    return SystemLayout([("A", 2), ("B", 2)])
