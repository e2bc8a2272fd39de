"""Built-in example states with their known values and provenance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DensityOperator, PureState, SystemLayout, random_state
from .errors import DomainError

LOG2_3 = float(np.log2(3.0))
RAINS_ANTISYM = float(np.log2(5.0 / 3.0))


def bell_state() -> DensityOperator:
    layout = SystemLayout([("A", 2), ("B", 2)])
    v = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)
    return PureState(layout, v).to_density()


def cc_mixed_state() -> DensityOperator:
    layout = SystemLayout([("A", 2), ("B", 2)])
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = 0.5
    m[3, 3] = 0.5
    return DensityOperator(layout, m)


def ghz_state() -> DensityOperator:
    layout = SystemLayout([("A", 2), ("B", 2), ("E", 2)])
    v = np.zeros(8, dtype=np.complex128)
    v[0] = v[7] = 1.0 / np.sqrt(2.0)
    return PureState(layout, v).to_density()


def ghz_marginal_state() -> DensityOperator:
    from .core import partial_trace

    return partial_trace(ghz_state(), ("A", "B"))


def antisym_qutrit_state() -> DensityOperator:
    """Uniform mixture of the three two-qutrit singlet vectors."""
    layout = SystemLayout([("A", 3), ("B", 3)])
    pairs = [(1, 2), (2, 0), (0, 1)]
    m = np.zeros((9, 9), dtype=np.complex128)
    for i, j in pairs:
        v = np.zeros(9, dtype=np.complex128)
        v[3 * i + j] = 1.0 / np.sqrt(2.0)
        v[3 * j + i] = -1.0 / np.sqrt(2.0)
        m += np.outer(v, v.conj()) / 3.0
    return DensityOperator(layout, m)


def antisym_singlet_vectors() -> list[np.ndarray]:
    vecs = []
    for i, j in [(1, 2), (2, 0), (0, 1)]:
        v = np.zeros(9, dtype=np.complex128)
        v[3 * i + j] = 1.0 / np.sqrt(2.0)
        v[3 * j + i] = -1.0 / np.sqrt(2.0)
        vecs.append(v)
    return vecs


def werner_state(p: float = 0.5) -> DensityOperator:
    """Two-qubit Werner family: p * singlet + (1-p) * I/4; separable iff p <= 1/3."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"werner parameter p={p} outside [0, 1]")
    layout = SystemLayout([("A", 2), ("B", 2)])
    singlet = np.array([0.0, 1.0, -1.0, 0.0], dtype=np.complex128) / np.sqrt(2.0)
    m = p * np.outer(singlet, singlet.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityOperator(layout, m)


def random_catalog_state(seed: int = 0, dims: str = "2,2", rank: int | None = None) -> DensityOperator:
    dim_list = [int(x) for x in str(dims).split(",") if x]
    if len(dim_list) < 2:
        raise DomainError("random state needs at least two subsystems")
    tail = [
        (f"B{i}" if len(dim_list) > 2 else "B", d)
        for i, d in enumerate(dim_list[1:])
    ]
    layout = SystemLayout([("A", dim_list[0])] + tail)
    total = layout.total_dim
    r = rank if rank is not None else total
    return random_state(layout, r, seed)


@dataclass(frozen=True)
class ExampleCatalogEntry:
    name: str
    description: str
    build: Callable[..., DensityOperator]
    params: dict = field(default_factory=dict)
    known_values: dict[str, tuple[float, str]] = field(default_factory=dict)


CATALOG: dict[str, ExampleCatalogEntry] = {
    "bell": ExampleCatalogEntry(
        "bell",
        "maximally entangled two-qubit state",
        bell_state,
        {},
        {
            "squashed_upper": (1.0, "pure state: every extension gives the marginal entropy"),
            "eof_upper": (1.0, "pure state"),
            "hashing_lower": (1.0, "I(A;B)=2, S(AB)=0"),
            "mutual_info_half": (1.0, "half mutual information"),
        },
    ),
    "ghz_marginal": ExampleCatalogEntry(
        "ghz_marginal",
        "two-qubit marginal of the GHZ state: an even classical mixture of |00> and |11>",
        ghz_marginal_state,
        {},
        {
            "squashed_entanglement": (0.0, "separable mixture: flag extension has zero CMI"),
            "mutual_info_half": (0.5, "half mutual information of the mixture"),
        },
    ),
    "cc_mixed": ExampleCatalogEntry(
        "cc_mixed",
        "classically correlated mixture (|00><00| + |11><11|)/2",
        cc_mixed_state,
        {},
        {
            "squashed_entanglement": (0.0, "separable mixture: flag extension has zero CMI"),
            "mutual_info_half": (0.5, "half mutual information of the mixture"),
        },
    ),
    "antisym_qutrit": ExampleCatalogEntry(
        "antisym_qutrit",
        "uniform mixture of the three two-qutrit singlets (antisymmetric subspace)",
        antisym_qutrit_state,
        {},
        {
            "mutual_info_half": (LOG2_3 / 2.0, "half mutual information of the state"),
            "eof": (1.0, "exact formation/cost value for this state"),
            "rains_bound": (RAINS_ANTISYM, "reference, not computed"),
        },
    ),
    "werner": ExampleCatalogEntry(
        "werner",
        "two-qubit Werner family p*singlet + (1-p)*I/4",
        werner_state,
        {"p": 0.5},
        {
            "separability_threshold_p": (1.0 / 3.0, "separable iff p <= 1/3"),
        },
    ),
    "random": ExampleCatalogEntry(
        "random",
        "seeded random state (PCG64 Gaussian construction) of given dims and rank",
        random_catalog_state,
        {"seed": 0, "dims": "2,2", "rank": None},
        {},
    ),
}


def build_example(name: str, **params) -> DensityOperator:
    entry = CATALOG[name]
    merged = dict(entry.params)
    merged.update({k: v for k, v in params.items() if v is not None})
    return entry.build(**merged)
