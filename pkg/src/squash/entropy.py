"""Entropic functionals: von Neumann quantities and both entropy-continuity bounds.

All logarithms are base 2; entropies are reported in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import DensityOperator, as_labels, partial_trace
from .errors import DomainError, LabelClash

ENTROPY_EIG_FLOOR = 1e-12


def _spectrum_entropy(evals: np.ndarray) -> float:
    lam = evals[evals > ENTROPY_EIG_FLOOR]
    if lam.size == 0:
        return 0.0
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """-sum lambda_i log2 lambda_i over eigenvalues above the 1e-12 floor."""
    return _spectrum_entropy(np.linalg.eigvalsh(rho.matrix))


@dataclass(frozen=True)
class EntropyReport:
    value: float
    eigenvalue_floor: float


def entropy_report(rho: DensityOperator) -> EntropyReport:
    return EntropyReport(von_neumann_entropy(rho), ENTROPY_EIG_FLOOR)


def _marginal_entropy(rho: DensityOperator, labels: tuple[str, ...]) -> float:
    return von_neumann_entropy(partial_trace(rho, labels))


def conditional_entropy(
    rho: DensityOperator, a_labels: str | Iterable[str], b_labels: str | Iterable[str]
) -> float:
    """Conditional von Neumann entropy S(A|B) = S(AB) - S(B)."""
    a, b = as_labels(a_labels), as_labels(b_labels)
    if set(a) & set(b):
        raise LabelClash(f"groups overlap: {set(a) & set(b)}")
    return _marginal_entropy(rho, a + b) - _marginal_entropy(rho, b)


def mutual_information(
    rho: DensityOperator, a_labels: str | Iterable[str], b_labels: str | Iterable[str]
) -> float:
    """I(A;B) = S(A) + S(B) - S(AB)."""
    a, b = as_labels(a_labels), as_labels(b_labels)
    if set(a) & set(b):
        raise LabelClash(f"groups overlap: {set(a) & set(b)}")
    return (
        _marginal_entropy(rho, a)
        + _marginal_entropy(rho, b)
        - _marginal_entropy(rho, a + b)
    )


def conditional_mutual_information(
    rho: DensityOperator,
    a_labels: str | Iterable[str],
    b_labels: str | Iterable[str],
    e_labels: str | Iterable[str] = (),
) -> float:
    """I(A;B|E) = S(AE) + S(BE) - S(ABE) - S(E); empty E gives I(A;B)."""
    a, b, e = as_labels(a_labels), as_labels(b_labels), as_labels(e_labels)
    seen: set[str] = set()
    for grp in (a, b, e):
        for lbl in grp:
            if lbl in seen:
                raise LabelClash(f"label {lbl!r} appears in more than one group")
            seen.add(lbl)
    if not e:
        return mutual_information(rho, a, b)
    return (
        _marginal_entropy(rho, a + e)
        + _marginal_entropy(rho, b + e)
        - _marginal_entropy(rho, a + b + e)
        - _marginal_entropy(rho, e)
    )


def eta(eps: float) -> float:
    """Continuity function: -eps log2 eps for eps <= 1/4, else 1/2 (continuous at 1/4)."""
    if eps < 0:
        raise DomainError(f"eta undefined for negative argument {eps}")
    if eps == 0.0:
        return 0.0
    if eps <= 0.25:
        return float(-eps * np.log2(eps))
    return 0.5


def fannes_bound(eps: float, d: int) -> float:
    """Entropy continuity bound eta(eps) + eps * log2(d) for trace distance eps."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return eta(eps) + eps * float(np.log2(d))


def conditional_fannes_bound(eps: float, d_a: int) -> float:
    """Candidate continuity bound eta(2 eps) + 3 eps * log2(d_A) for S(A|B).

    Proven when both states are classical on the B system; for fully quantum
    pairs it is an open conjecture and must never be asserted, only probed
    (see ``conditional_fannes_check``).
    """
    if d_a < 1:
        raise DomainError(f"dimension must be >= 1, got {d_a}")
    return eta(2.0 * eps) + 3.0 * eps * float(np.log2(d_a))


@dataclass(frozen=True)
class CondFannesProbe:
    """Empirical probe of the conditional continuity bound; never asserted."""

    trace_dist: float
    lhs: float
    rhs: float
    holds: bool


def conditional_fannes_check(
    rho: DensityOperator,
    sigma: DensityOperator,
    a_labels: str | Iterable[str],
    b_labels: str | Iterable[str],
) -> CondFannesProbe:
    """Evaluate |S(A|B)_rho - S(A|B)_sigma| against the candidate bound.

    Returns the comparison without asserting it: on general quantum pairs the
    bound is an open question and a failure is data, not an error.
    """
    from .core import trace_distance

    a = as_labels(a_labels)
    eps = trace_distance(rho, sigma)
    lhs = abs(conditional_entropy(rho, a, b_labels) - conditional_entropy(sigma, a, b_labels))
    d_a = int(np.prod([rho.layout.dim_of(lbl) for lbl in a], dtype=np.int64))
    rhs = conditional_fannes_bound(eps, d_a)
    return CondFannesProbe(eps, lhs, rhs, bool(lhs <= rhs + 1e-9))
