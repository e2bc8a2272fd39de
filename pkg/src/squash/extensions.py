"""Constructions of tripartite extensions: the objects the conditional mutual
information is minimized over.

Every constructor returns an ``Extension`` whose marginal over the extending
system reproduces the parent state; all of them rely on the canonical
eigen-purification from ``core.purify`` so that channel parameters are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DensityOperator,
    PureState,
    QuantumChannel,
    SystemLayout,
    apply_channel,
    as_labels,
    partial_trace,
    purify,
    state_rank,
    tensor,
)
from .entropy import conditional_mutual_information
from .errors import DomainError, InvariantViolation, LabelClash, ShapeError

MARGINAL_TOL = 1e-9
WEIGHT_TOL = 1e-10


def default_split(layout: SystemLayout) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Default bipartition: first subsystem versus the rest."""
    labels = layout.labels
    if len(labels) < 2:
        raise ShapeError("bipartite operations need at least two subsystems")
    return (labels[0],), labels[1:]


def _resolve_split(
    layout: SystemLayout,
    a_labels: str | Iterable[str] | None,
    b_labels: str | Iterable[str] | None,
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if a_labels is None and b_labels is None:
        return default_split(layout)
    if a_labels is None or b_labels is None:
        raise ShapeError("give both a_labels and b_labels, or neither")
    a, b = as_labels(a_labels), as_labels(b_labels)
    if sorted(a + b) != sorted(layout.labels):
        raise ShapeError(f"groups {a} | {b} do not partition layout {layout.labels}")
    return a, b


@dataclass(frozen=True, eq=False)
class Extension:
    """A state over (A, B, E) groups whose E-marginal reproduces the parent."""

    state: DensityOperator
    a_labels: tuple[str, ...]
    b_labels: tuple[str, ...]
    e_labels: tuple[str, ...]
    parent: DensityOperator

    def __post_init__(self):
        groups = self.a_labels + self.b_labels + self.e_labels
        if sorted(groups) != sorted(self.state.layout.labels):
            raise ShapeError(
                f"groups {groups} do not partition layout {self.state.layout.labels}"
            )
        marg = partial_trace(self.state, self.a_labels + self.b_labels)
        if marg.layout != self.parent.layout:
            raise ShapeError("parent layout does not match the AB marginal layout")
        dev = float(np.max(np.abs(marg.matrix - self.parent.matrix)))
        if dev > MARGINAL_TOL:
            raise InvariantViolation(
                f"extension marginal deviates from parent by {dev:.3e}"
            )

    def cmi(self) -> float:
        return conditional_mutual_information(
            self.state, self.a_labels, self.b_labels, self.e_labels
        )

    def half_cmi(self) -> float:
        return 0.5 * self.cmi()


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted pure-state decomposition of a bipartite target state."""

    entries: tuple[tuple[float, PureState], ...]
    target: DensityOperator

    def __init__(self, entries: Iterable[tuple[float, PureState]], target: DensityOperator):
        ent = tuple((float(w), ps) for w, ps in entries)
        if not ent:
            raise InvariantViolation("ensemble must be nonempty")
        for w, ps in ent:
            if not 0.0 < w <= 1.0 + WEIGHT_TOL:
                raise InvariantViolation(f"ensemble weight {w} outside (0, 1]")
            if ps.layout != target.layout:
                raise ShapeError("ensemble member layout differs from target layout")
        wsum = sum(w for w, _ in ent)
        if abs(wsum - 1.0) > WEIGHT_TOL:
            raise InvariantViolation(f"ensemble weights sum to {wsum}, not 1")
        avg = sum(w * np.outer(ps.vector, ps.vector.conj()) for w, ps in ent)
        dev = float(np.max(np.abs(avg - target.matrix)))
        if dev > MARGINAL_TOL:
            raise InvariantViolation(f"ensemble average deviates from target by {dev:.3e}")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "target", target)

    @property
    def size(self) -> int:
        return len(self.entries)


def eigen_ensemble(rho: DensityOperator) -> Ensemble:
    """Spectral decomposition of rho as a pure-state ensemble (canonical order)."""
    from .core import canonical_eigh, RANK_FLOOR

    evals, vecs = canonical_eigh(rho.matrix)
    entries = []
    for i in range(evals.shape[0]):
        if evals[i] > RANK_FLOOR:
            v = vecs[:, i]
            entries.append((float(evals[i]), PureState(rho.layout, v / np.linalg.norm(v))))
    return Ensemble(entries, rho)


def extend_via_channel(
    rho: DensityOperator,
    chan: QuantumChannel,
    env_label: str = "E",
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
    purifier_label: str = "__purifier",
) -> Extension:
    """Purify, then send the purifying system through a channel.

    Every extension of rho arises this way from some channel on the canonical
    purifier, so minimizing conditional mutual information over channels is the
    same infimum as minimizing over extensions.
    """
    a, b = _resolve_split(rho.layout, a_labels, b_labels)
    r = state_rank(rho)
    if chan.d_in != r:
        raise ShapeError(f"channel input dimension {chan.d_in} != state rank {r}")
    psi = purify(rho, purifier_label)
    ext_state = apply_channel(chan, psi.to_density(), purifier_label, env_label)
    return Extension(ext_state, a, b, (env_label,), rho)


def flag_extension(
    ens: Ensemble,
    flag_label: str = "E",
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> Extension:
    """Extension recording ensemble membership in orthogonal flag states.

    Half its conditional mutual information equals the ensemble's average
    marginal entropy, which is how ensemble optimization upper-bounds the
    squashed entanglement.
    """
    target = ens.target
    a, b = _resolve_split(target.layout, a_labels, b_labels)
    if flag_label in target.layout.labels:
        raise LabelClash(f"flag label {flag_label!r} already in layout")
    m = ens.size
    d = target.layout.total_dim
    out = np.zeros((d * m, d * m), dtype=np.complex128)
    for k, (w, ps) in enumerate(ens.entries):
        proj = np.outer(ps.vector, ps.vector.conj())
        flag = np.zeros((m, m))
        flag[k, k] = 1.0
        out += w * np.kron(proj, flag)
    layout = target.layout.concat(SystemLayout([(flag_label, m)]))
    return Extension(DensityOperator(layout, out), a, b, (flag_label,), target)


def separable_flag_extension(
    decomposition: Sequence[tuple[float, PureState]],
    flag_label: str = "E",
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> Extension:
    """Zero-witness extension for a separable decomposition into product terms.

    Each member must be a product pure state across the (A, B) split; the
    resulting extension has vanishing conditional mutual information.
    """
    if not decomposition:
        raise InvariantViolation("decomposition must be nonempty")
    layout = decomposition[0][1].layout
    a, b = _resolve_split(layout, a_labels, b_labels)
    d_a = int(np.prod([layout.dim_of(x) for x in a], dtype=np.int64))
    d_b = int(np.prod([layout.dim_of(x) for x in b], dtype=np.int64))
    perm_needed = layout.labels != a + b
    for _, ps in decomposition:
        vec = ps.vector
        if perm_needed:
            vec = _permute_vector(ps, a + b)
        s = np.linalg.svd(vec.reshape(d_a, d_b), compute_uv=False)
        if s.size > 1 and s[1] > 1e-10:
            raise InvariantViolation(
                f"decomposition member is not a product state (second Schmidt "
                f"coefficient {s[1]:.3e})"
            )
    avg = sum(w * np.outer(ps.vector, ps.vector.conj()) for w, ps in decomposition)
    target = DensityOperator(layout, avg)
    ens = Ensemble(decomposition, target)
    return flag_extension(ens, flag_label, a, b)


def _permute_vector(ps: PureState, order: tuple[str, ...]) -> np.ndarray:
    dims = ps.layout.dims
    perm = [ps.layout.position(lbl) for lbl in order]
    return ps.vector.reshape(dims).transpose(perm).reshape(-1)


def mix_extensions(
    e1: Extension, e2: Extension, lam: float, new_flag: str
) -> Extension:
    """Convex combination with the mixing branch recorded on a fresh flag qubit.

    Satisfies I(A;B|EE') of the mixture = lam * I_1 + (1 - lam) * I_2 exactly.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"mixing weight {lam} outside [0, 1]")
    if (
        e1.state.layout != e2.state.layout
        or e1.a_labels != e2.a_labels
        or e1.b_labels != e2.b_labels
        or e1.e_labels != e2.e_labels
    ):
        raise ShapeError("extensions must share layout and groups to be mixed")
    if new_flag in e1.state.layout.labels:
        raise LabelClash(f"flag label {new_flag!r} already in layout")
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    m = lam * np.kron(e1.state.matrix, p0) + (1.0 - lam) * np.kron(e2.state.matrix, p1)
    layout = e1.state.layout.concat(SystemLayout([(new_flag, 2)]))
    parent_m = lam * e1.parent.matrix + (1.0 - lam) * e2.parent.matrix
    parent = DensityOperator(e1.parent.layout, parent_m)
    return Extension(
        DensityOperator(layout, m),
        e1.a_labels,
        e1.b_labels,
        e1.e_labels + (new_flag,),
        parent,
    )


def product_extension(e1: Extension, e2: Extension) -> Extension:
    """Tensor product of two extensions; conditional mutual information adds."""
    state = tensor(e1.state, e2.state)
    parent = tensor(e1.parent, e2.parent)
    return Extension(
        state,
        e1.a_labels + e2.a_labels,
        e1.b_labels + e2.b_labels,
        e1.e_labels + e2.e_labels,
        parent,
    )
