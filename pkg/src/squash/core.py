"""Finite-dimensional multipartite states and the linear algebra everything else uses.

Tensor factors are ordered exactly as listed in the ``SystemLayout`` and
flattened row-major.  Subsystem reorderings are always explicit operations
(``permute_systems``), never implicit bookkeeping.  All values are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvariantViolation,
    LabelClash,
    ShapeError,
    UnknownSystem,
)

HERMITICITY_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
ISOMETRY_TOL = 1e-10
RANK_FLOOR = 1e-12


def as_labels(labels: str | Iterable[str]) -> tuple[str, ...]:
    """Normalize a label argument (single label or iterable) to a tuple."""
    if isinstance(labels, str):
        return (labels,)
    return tuple(labels)


@dataclass(frozen=True)
class SystemLayout:
    """Ordered list of labeled subsystems; the order fixes the tensor factorization."""

    systems: tuple[tuple[str, int], ...]

    def __init__(self, systems: Iterable[tuple[str, int]]):
        sys_t = tuple((str(lbl), int(dim)) for lbl, dim in systems)
        if not sys_t:
            raise ShapeError("layout needs at least one subsystem")
        labels = [lbl for lbl, _ in sys_t]
        if len(set(labels)) != len(labels):
            raise LabelClash(f"duplicate subsystem labels in {labels}")
        for lbl, dim in sys_t:
            if dim < 1:
                raise ShapeError(f"subsystem {lbl!r} has non-positive dimension {dim}")
        object.__setattr__(self, "systems", sys_t)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.systems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def position(self, label: str) -> int:
        for i, (lbl, _) in enumerate(self.systems):
            if lbl == label:
                return i
        raise UnknownSystem(f"no subsystem labeled {label!r} in layout {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.systems[self.position(label)][1]

    def positions(self, labels: str | Iterable[str]) -> tuple[int, ...]:
        return tuple(self.position(lbl) for lbl in as_labels(labels))

    def concat(self, other: "SystemLayout") -> "SystemLayout":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LabelClash(f"labels {sorted(clash)} appear on both sides")
        return SystemLayout(self.systems + other.systems)

    def restrict(self, labels: str | Iterable[str]) -> "SystemLayout":
        """Sub-layout of the given labels, kept in this layout's order."""
        keep = set(as_labels(labels))
        for lbl in keep:
            self.position(lbl)
        return SystemLayout(s for s in self.systems if s[0] in keep)

    def replace(self, label: str, new_systems: Iterable[tuple[str, int]]) -> "SystemLayout":
        """Layout with one subsystem substituted in place by a list of subsystems."""
        i = self.position(label)
        return SystemLayout(self.systems[:i] + tuple(new_systems) + self.systems[i + 1 :])


def _validate_disjoint(*groups: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for g in groups:
        for lbl in g:
            if lbl in seen:
                raise LabelClash(f"label {lbl!r} appears in more than one group")
            seen.add(lbl)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive-semidefinite, unit-trace matrix over a SystemLayout."""

    layout: SystemLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        d = self.layout.total_dim
        if m.shape != (d, d):
            raise ShapeError(f"matrix shape {m.shape} does not match layout dimension {d}")
        herm_dev = float(np.max(np.abs(m - m.conj().T)))
        if herm_dev > HERMITICITY_TOL:
            raise InvariantViolation(f"hermiticity violated: max|M - M^dag| = {herm_dev:.3e}")
        tr_dev = abs(complex(np.trace(m)) - 1.0)
        if tr_dev > TRACE_TOL:
            raise InvariantViolation(f"unit trace violated: |tr(M) - 1| = {tr_dev:.3e}")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lo < -EIGENVALUE_TOL:
            raise InvariantViolation(f"positivity violated: min eigenvalue = {lo:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @classmethod
    def maximally_mixed(cls, layout: SystemLayout) -> "DensityOperator":
        d = layout.total_dim
        return cls(layout, np.eye(d, dtype=np.complex128) / d)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over a SystemLayout."""

    layout: SystemLayout
    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=np.complex128).reshape(-1)
        if v.shape != (self.layout.total_dim,):
            raise ShapeError(
                f"vector length {v.shape[0]} does not match layout dimension {self.layout.total_dim}"
            )
        dev = abs(float(np.linalg.norm(v)) - 1.0)
        if dev > NORM_TOL:
            raise InvariantViolation(f"unit norm violated: |norm - 1| = {dev:.3e}")
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    def to_density(self) -> DensityOperator:
        return DensityOperator(self.layout, np.outer(self.vector, self.vector.conj()))


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map given by a Stinespring isometry of shape (d_out*d_env, d_in).

    The composite row index is (out, env) in row-major order.
    """

    d_in: int
    d_out: int
    d_env: int
    isometry: np.ndarray

    def __post_init__(self):
        for name in ("d_in", "d_out", "d_env"):
            if getattr(self, name) < 1:
                raise ShapeError(f"{name} must be positive")
        v = np.array(self.isometry, dtype=np.complex128)
        if v.shape != (self.d_out * self.d_env, self.d_in):
            raise ShapeError(
                f"isometry shape {v.shape} must be ({self.d_out * self.d_env}, {self.d_in})"
            )
        dev = float(np.max(np.abs(v.conj().T @ v - np.eye(self.d_in))))
        if dev > ISOMETRY_TOL:
            raise InvariantViolation(f"isometry condition violated: max|V^dag V - I| = {dev:.3e}")
        v.flags.writeable = False
        object.__setattr__(self, "isometry", v)

    @classmethod
    def identity(cls, d: int) -> "QuantumChannel":
        return cls(d, d, 1, np.eye(d, dtype=np.complex128))

    @classmethod
    def constant(cls, d_in: int, d_out: int) -> "QuantumChannel":
        """Full-trace channel: discards the input and outputs |0><0| on d_out."""
        v = np.zeros((d_out * d_in, d_in), dtype=np.complex128)
        v[:d_in, :] = np.eye(d_in)
        return cls(d_in, d_out, d_in, v)

    @classmethod
    def dephasing(cls, d: int) -> "QuantumChannel":
        """Computational-basis dephasing on a d-dimensional system."""
        v = np.zeros((d * d, d), dtype=np.complex128)
        for k in range(d):
            v[k * d + k, k] = 1.0
        return cls(d, d, d, v)


@dataclass(frozen=True, eq=False)
class Instrument:
    """Collection of CP maps (lists of square Kraus operators) summing to a CPTP map."""

    kraus_sets: tuple[tuple[np.ndarray, ...], ...]

    def __init__(self, kraus_sets: Iterable[Iterable[np.ndarray]]):
        sets = tuple(
            tuple(np.array(k, dtype=np.complex128) for k in ks) for ks in kraus_sets
        )
        if not sets or not any(sets):
            raise ShapeError("instrument needs at least one Kraus operator")
        d = sets[0][0].shape[0]
        for ks in sets:
            for k in ks:
                if k.shape != (d, d):
                    raise ShapeError(f"Kraus operator shape {k.shape} != ({d}, {d})")
        total = sum(k.conj().T @ k for ks in sets for k in ks)
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > ISOMETRY_TOL:
            raise InvariantViolation(
                f"trace preservation violated: max|sum K^dag K - I| = {dev:.3e}"
            )
        for ks in sets:
            for k in ks:
                k.flags.writeable = False
        object.__setattr__(self, "kraus_sets", sets)

    @property
    def dim(self) -> int:
        return self.kraus_sets[0][0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.kraus_sets)


# ---------------------------------------------------------------------------
# eigensystem canonicalization
# ---------------------------------------------------------------------------

def canonical_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition in a reproducible canonical order.

    Eigenvalues descend; each eigenvector is phase-normalized so its first
    component of magnitude > 1e-12 is real positive; degenerate eigenvalues are
    ordered by the first differing component (real part, then imaginary part).
    """
    m = np.asarray(matrix, dtype=np.complex128)
    evals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    n = evals.shape[0]
    vecs = vecs.copy()
    for i in range(n):
        col = vecs[:, i]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size:
            a = col[nz[0]]
            vecs[:, i] = col * (a.conjugate() / abs(a))

    def cmp(i: int, j: int) -> int:
        if evals[i] > evals[j] + 1e-12:
            return -1
        if evals[j] > evals[i] + 1e-12:
            return 1
        vi, vj = vecs[:, i], vecs[:, j]
        for a, b in zip(vi, vj):
            if abs(a - b) > 1e-9:
                if abs(a.real - b.real) > 1e-12:
                    return -1 if a.real > b.real else 1
                return -1 if a.imag > b.imag else 1
        return 0

    order = sorted(range(n), key=functools.cmp_to_key(cmp))
    return evals[order], vecs[:, order]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Tensor product; the layout is the concatenation, matrix the Kronecker product."""
    layout = a.layout.concat(b.layout)
    return DensityOperator(layout, np.kron(a.matrix, b.matrix))


def partial_trace(rho: DensityOperator, keep: str | Iterable[str]) -> DensityOperator:
    """Reduced state on the kept subsystems, in their original relative order."""
    keep_set = set(as_labels(keep))
    if not keep_set:
        raise UnknownSystem("keep set must be nonempty")
    for lbl in keep_set:
        rho.layout.position(lbl)
    k = len(rho.layout.systems)
    dims = rho.layout.dims
    kept_idx = [i for i, (lbl, _) in enumerate(rho.layout.systems) if lbl in keep_set]
    t = rho.matrix.reshape(dims + dims)
    row_sub = list(range(k))
    col_sub = [k + i if i in kept_idx else i for i in range(k)]
    out_sub = [i for i in kept_idx] + [k + i for i in kept_idx]
    red = np.einsum(t, row_sub + col_sub, out_sub)
    d_keep = int(np.prod([dims[i] for i in kept_idx], dtype=np.int64))
    new_layout = SystemLayout(rho.layout.systems[i] for i in kept_idx)
    return DensityOperator(new_layout, red.reshape(d_keep, d_keep))


def permute_systems(rho: DensityOperator, order: Sequence[str]) -> DensityOperator:
    """Explicitly reorder the tensor factors to the given label order."""
    order_t = as_labels(order)
    if sorted(order_t) != sorted(rho.layout.labels):
        raise UnknownSystem(f"order {order_t} is not a permutation of {rho.layout.labels}")
    k = len(rho.layout.systems)
    perm = [rho.layout.position(lbl) for lbl in order_t]
    dims = rho.layout.dims
    t = rho.matrix.reshape(dims + dims)
    t = t.transpose(perm + [k + p for p in perm])
    d = rho.layout.total_dim
    new_layout = SystemLayout(rho.layout.systems[p] for p in perm)
    return DensityOperator(new_layout, t.reshape(d, d))


def purify(rho: DensityOperator, new_label: str) -> PureState:
    """Canonical eigen-purification; the purifying system has dimension rank(rho).

    The eigenvectors are taken in the canonical order of ``canonical_eigh`` so
    that the purification is a reproducible function of the input matrix.
    """
    if new_label in rho.layout.labels:
        raise LabelClash(f"purifier label {new_label!r} already in layout")
    evals, vecs = canonical_eigh(rho.matrix)
    keep = evals > RANK_FLOOR
    r = int(np.count_nonzero(keep))
    lam = evals[:r]
    m = vecs[:, :r] * np.sqrt(lam)[None, :]
    psi = m.reshape(-1)
    psi = psi / np.linalg.norm(psi)
    layout = rho.layout.concat(SystemLayout([(new_label, r)]))
    return PureState(layout, psi)


def state_rank(rho: DensityOperator, floor: float = RANK_FLOOR) -> int:
    """Number of eigenvalues above the rank floor."""
    return int(np.count_nonzero(np.linalg.eigvalsh(rho.matrix) > floor))


def _check_same_layout(rho: DensityOperator, sigma: DensityOperator) -> None:
    if rho.layout != sigma.layout:
        raise ShapeError(
            f"layout mismatch: {rho.layout.systems} vs {sigma.layout.systems}"
        )


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Trace norm ||rho - sigma||_1 (sum of absolute eigenvalues of the difference)."""
    _check_same_layout(rho, sigma)
    diff = rho.matrix - sigma.matrix
    evals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(np.sum(np.abs(evals)))


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    evals, vecs = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    evals = np.clip(evals, 0.0, None)
    return (vecs * np.sqrt(evals)[None, :]) @ vecs.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].

    Computed as the trace norm of sqrt(sigma) sqrt(rho), which avoids taking
    square roots of eigenvalue-level noise.
    """
    _check_same_layout(rho, sigma)
    s = np.linalg.svd(_psd_sqrt(sigma.matrix) @ _psd_sqrt(rho.matrix), compute_uv=False)
    return min(max(float(np.sum(s)), 0.0), 1.0)


def apply_channel(
    chan: QuantumChannel, rho: DensityOperator, target: str, new_label: str
) -> DensityOperator:
    """Apply a channel to one subsystem; the target is replaced by ``new_label``.

    Implemented as Stinespring isometry conjugation followed by a partial trace
    over the channel environment.
    """
    pos = rho.layout.position(target)
    if rho.layout.dim_of(target) != chan.d_in:
        raise ShapeError(
            f"channel input dimension {chan.d_in} != dimension "
            f"{rho.layout.dim_of(target)} of subsystem {target!r}"
        )
    if new_label != target and new_label in rho.layout.labels:
        raise LabelClash(f"label {new_label!r} already in layout")
    env_label = f"__env_{new_label}"
    dims = rho.layout.dims
    left = int(np.prod(dims[:pos], dtype=np.int64))
    right = int(np.prod(dims[pos + 1 :], dtype=np.int64))
    lift = np.kron(np.kron(np.eye(left), chan.isometry), np.eye(right))
    out = lift @ rho.matrix @ lift.conj().T
    mid_layout = rho.layout.replace(
        target, [(new_label, chan.d_out), (env_label, chan.d_env)]
    )
    mid = DensityOperator(mid_layout, out)
    keep = [lbl for lbl in mid_layout.labels if lbl != env_label]
    return partial_trace(mid, keep)


def apply_instrument(
    ins: Instrument, rho: DensityOperator, target: str
) -> list[tuple[float, DensityOperator]]:
    """Outcome probabilities and normalized post-measurement states."""
    pos = rho.layout.position(target)
    if rho.layout.dim_of(target) != ins.dim:
        raise ShapeError(
            f"instrument dimension {ins.dim} != dimension "
            f"{rho.layout.dim_of(target)} of subsystem {target!r}"
        )
    dims = rho.layout.dims
    left = int(np.prod(dims[:pos], dtype=np.int64))
    right = int(np.prod(dims[pos + 1 :], dtype=np.int64))
    results: list[tuple[float, DensityOperator]] = []
    for ks in ins.kraus_sets:
        acc = np.zeros_like(rho.matrix)
        for k in ks:
            lift = np.kron(np.kron(np.eye(left), k), np.eye(right))
            acc = acc + lift @ rho.matrix @ lift.conj().T
        p = float(np.real(np.trace(acc)))
        if p > 1e-12:
            results.append((p, DensityOperator(rho.layout, acc / p)))
        else:
            results.append((0.0, DensityOperator.maximally_mixed(rho.layout)))
    return results


def random_state(layout: SystemLayout, rank: int, seed: int) -> DensityOperator:
    """Seeded random state of exact rank.

    Uses numpy's PCG64 generator (``np.random.default_rng(seed)``): a D x rank
    matrix G of standard complex Gaussians is drawn and the state is the
    partial trace of the induced pure state over the rank-dimensional ancilla,
    i.e. G G^dag normalized.  Deterministic given the seed.
    """
    d = layout.total_dim
    if not 1 <= rank <= d:
        raise ShapeError(f"rank {rank} out of range [1, {d}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOperator(layout, m / np.trace(m).real)


# ---------------------------------------------------------------------------
# state file format
# ---------------------------------------------------------------------------

def state_to_json(rho: DensityOperator) -> str:
    """Serialize to the JSON state format (row-major matrix, [re, im] pairs)."""
    obj = {
        "layout": [{"label": lbl, "dim": dim} for lbl, dim in rho.layout.systems],
        "matrix": [
            [[float(x.real), float(x.imag)] for x in row] for row in rho.matrix
        ],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def state_from_json(text: str) -> DensityOperator:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "layout" not in obj or "matrix" not in obj:
        raise ValueError("state file must be an object with 'layout' and 'matrix'")
    layout = SystemLayout((entry["label"], int(entry["dim"])) for entry in obj["layout"])
    raw = obj["matrix"]
    d = layout.total_dim
    if len(raw) != d or any(len(row) != d for row in raw):
        raise ValueError(f"matrix must be {d} x {d} for this layout")
    m = np.array(
        [[complex(cell[0], cell[1]) for cell in row] for row in raw],
        dtype=np.complex128,
    )
    return DensityOperator(layout, m)


def save_state(rho: DensityOperator, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(state_to_json(rho))
        fh.write("\n")


def load_state(path: str) -> DensityOperator:
    with open(path, "r", encoding="utf-8") as fh:
        return state_from_json(fh.read())
