"""Intrinsic information of classical triples, classical-on-B embeddings, and
the proven classical case of the conditional continuity bound."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import DensityOperator, SystemLayout
from .entropy import conditional_entropy, conditional_fannes_bound
from .errors import InvariantViolation, ShapeError
from .optimizer import (
    IterationRecord,
    OptimizerConfig,
    _multistart,
)

SUM_TOL = 1e-12
BLOCK_TOL = 1e-10
_PROB_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class ClassicalJoint:
    """Joint distribution P(x, y, z) as a nonnegative tensor summing to 1."""

    p: np.ndarray

    def __post_init__(self):
        t = np.array(self.p, dtype=np.float64)
        if t.ndim != 3:
            raise ShapeError(f"joint must have three axes, got shape {t.shape}")
        if float(t.min()) < -SUM_TOL:
            raise InvariantViolation(f"negative probability entry {float(t.min()):.3e}")
        t = np.clip(t, 0.0, None)
        total = float(t.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise InvariantViolation(f"joint sums to {total}, not 1")
        t.flags.writeable = False
        object.__setattr__(self, "p", t)

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.p.shape)


@dataclass(frozen=True, eq=False)
class StochasticChannel:
    """Row-stochastic matrix: row z is the distribution of the output given z."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.ndim != 2:
            raise ShapeError(f"channel must be a matrix, got shape {m.shape}")
        if float(m.min()) < -SUM_TOL:
            raise InvariantViolation(f"negative channel entry {float(m.min()):.3e}")
        m = np.clip(m, 0.0, None)
        rows = m.sum(axis=1)
        if float(np.max(np.abs(rows - 1.0))) > SUM_TOL:
            raise InvariantViolation("channel rows must each sum to 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "StochasticChannel":
        return cls(np.eye(n))

    @classmethod
    def constant(cls, n: int) -> "StochasticChannel":
        return cls(np.full((n, n), 1.0 / n))


def _batch_h(t: np.ndarray) -> np.ndarray:
    """Shannon entropies (bits) of a batch of prob tensors flattened past axis 0."""
    flat = t.reshape(t.shape[0], -1)
    mask = flat > _PROB_FLOOR
    safe = np.where(mask, flat, 1.0)
    return -np.sum(np.where(mask, flat * np.log2(safe), 0.0), axis=1)


def _cmi_batch(pp: np.ndarray) -> np.ndarray:
    """I(X;Y|W) for a batch of joints with axes (batch, x, y, w)."""
    h_xw = _batch_h(pp.sum(axis=2))
    h_yw = _batch_h(pp.sum(axis=1))
    h_xyw = _batch_h(pp)
    h_w = _batch_h(pp.sum(axis=(1, 2)))
    return h_xw + h_yw - h_xyw - h_w


def shannon_cmi(joint: ClassicalJoint) -> float:
    """Shannon conditional mutual information I(X;Y|Z) in bits."""
    return float(_cmi_batch(joint.p[None, ...])[0])


def shannon_mi(joint: ClassicalJoint) -> float:
    """Shannon mutual information I(X;Y) of the XY marginal, in bits."""
    pxy = joint.p.sum(axis=2)
    return float(_cmi_batch(pxy[None, :, :, None])[0])


def apply_z_channel(joint: ClassicalJoint, ch: StochasticChannel) -> ClassicalJoint:
    """Markov-chain postprocessing of Z: P'(x,y,w) = sum_z P(x,y,z) ch(w|z)."""
    if ch.matrix.shape[0] != joint.shape[2]:
        raise ShapeError(
            f"channel has {ch.matrix.shape[0]} input symbols, joint has {joint.shape[2]}"
        )
    return ClassicalJoint(np.einsum("xyz,zw->xyw", joint.p, ch.matrix))


class _ChannelObjective:
    """CMI after a softmax-parameterized channel on Z (square, per the domain
    restriction of the minimization)."""

    def __init__(self, joint: ClassicalJoint):
        self.joint = joint
        self.nz = joint.shape[2]
        self.dim = self.nz * self.nz

    def values(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
        logits = thetas.reshape(thetas.shape[0], self.nz, self.nz)
        logits = logits - logits.max(axis=2, keepdims=True)
        ch = np.exp(logits)
        ch = ch / ch.sum(axis=2, keepdims=True)
        pp = np.einsum("xyz,kzw->kxyw", self.joint.p, ch)
        return _cmi_batch(pp)

    def value(self, theta: np.ndarray) -> float:
        return float(self.values(np.asarray(theta)[None, :])[0])

    def channel(self, theta: np.ndarray) -> StochasticChannel:
        logits = np.asarray(theta, dtype=np.float64).reshape(self.nz, self.nz)
        logits = logits - logits.max(axis=1, keepdims=True)
        ch = np.exp(logits)
        return StochasticChannel(ch / ch.sum(axis=1, keepdims=True))


@dataclass(frozen=True, eq=False)
class IntrinsicResult:
    value: float
    channel: StochasticChannel
    trace: tuple[IterationRecord, ...]
    reason: str


def intrinsic_information(
    joint: ClassicalJoint, cfg: OptimizerConfig = OptimizerConfig()
) -> IntrinsicResult:
    """Minimize I(X;Y|Z') over square channels Z -> Z'.

    The exact identity and constant channels are always candidates, so the
    value never exceeds min(I(X;Y|Z), I(X;Y)).
    """
    obj = _ChannelObjective(joint)
    ident = StochasticChannel.identity(obj.nz)
    const = StochasticChannel.constant(obj.nz)
    candidates: list[tuple[float, StochasticChannel, str]] = [
        (shannon_cmi(joint), ident, "identity"),
        (shannon_mi(joint), const, "constant"),
    ]
    out, records = _multistart(obj, cfg, stream=3)
    ch = obj.channel(out.theta)
    certified = shannon_cmi(apply_z_channel(joint, ch))
    candidates.append((certified, ch, out.reason))
    best = min(range(len(candidates)), key=lambda i: candidates[i][0])
    value, channel, reason = candidates[best]
    return IntrinsicResult(float(value), channel, tuple(records), reason)


def _simplex_grid(k: int, denominator: int) -> np.ndarray:
    pts = []
    for comp in itertools.product(range(denominator + 1), repeat=k - 1):
        rest = denominator - sum(comp)
        if rest >= 0:
            pts.append(comp + (rest,))
    return np.array(pts, dtype=np.float64) / denominator


def intrinsic_information_grid(
    joint: ClassicalJoint, denominator: int = 16, chunk: int = 65536
) -> tuple[float, StochasticChannel]:
    """Brute-force oracle: exhaustive search over the channel polytope grid.

    Each channel row ranges over the simplex discretized at 1/denominator.
    Only meant for alphabets up to 3; anything larger is refused.
    """
    nz = joint.shape[2]
    if nz > 3:
        raise ShapeError(f"grid oracle supports alphabets up to 3, got {nz}")
    rows = _simplex_grid(nz, denominator)
    n_rows = rows.shape[0]
    total = n_rows**nz
    best_val = np.inf
    best_idx = 0
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        flat = np.arange(start, stop)
        row_idx = np.unravel_index(flat, (n_rows,) * nz)
        ch = np.stack([rows[ri] for ri in row_idx], axis=1)
        vals = _cmi_batch(np.einsum("xyz,bzw->bxyw", joint.p, ch))
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_idx = start + j
    row_idx = np.unravel_index(best_idx, (n_rows,) * nz)
    best_ch = np.stack([rows[int(ri)] for ri in row_idx], axis=0)
    return best_val, StochasticChannel(best_ch)


# ---------------------------------------------------------------------------
# classical-on-B quantum embeddings
# ---------------------------------------------------------------------------

def classical_embed(
    weights: Sequence[float],
    states: Sequence[DensityOperator | np.ndarray],
    a_label: str = "A",
    b_label: str = "B",
) -> DensityOperator:
    """Block state sum_k p_k rho_k (x) |k><k| on (A, B); S(A|B) is the average
    block entropy."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ShapeError("weights must be a nonempty vector")
    if float(w.min()) < -SUM_TOL:
        raise InvariantViolation("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > 1e-10:
        raise InvariantViolation(f"weights sum to {float(w.sum())}, not 1")
    if len(states) != w.size:
        raise ShapeError("one block state per weight required")
    mats = [s.matrix if isinstance(s, DensityOperator) else np.asarray(s) for s in states]
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise ShapeError("all block states must share one dimension")
    k = w.size
    out = np.zeros((d * k, d * k), dtype=np.complex128)
    for i, (wi, m) in enumerate(zip(w, mats)):
        flag = np.zeros((k, k))
        flag[i, i] = 1.0
        out += wi * np.kron(m, flag)
    layout = SystemLayout([(a_label, d), (b_label, k)])
    return DensityOperator(layout, out)


def is_classical_on_b(rho: DensityOperator, tol: float = BLOCK_TOL) -> bool:
    """True when the state is block-diagonal in the computational basis of the
    second subsystem (two-system layouts only)."""
    if len(rho.layout.systems) != 2:
        return False
    d_a, d_b = rho.layout.dims
    t = rho.matrix.reshape(d_a, d_b, d_a, d_b)
    off = t.copy()
    for b in range(d_b):
        off[:, b, :, b] = 0.0
    return float(np.max(np.abs(off))) <= tol


@dataclass(frozen=True)
class CondFannesReport:
    trace_dist: float
    lhs: float
    rhs: float
    holds: bool


def classical_cond_fannes_check(
    rho: DensityOperator, sigma: DensityOperator
) -> CondFannesReport:
    """Proven case of the conditional continuity bound: classical-on-B pairs.

    Raises when either input is not block-diagonal in the shared B basis; for
    valid inputs the inequality holds for every pair.
    """
    if rho.layout != sigma.layout:
        raise ShapeError("states must share a layout")
    for st in (rho, sigma):
        if not is_classical_on_b(st):
            raise InvariantViolation(
                "state is not classical on the B system (off-block mass above 1e-10)"
            )
    from .core import trace_distance

    a_label, b_label = rho.layout.labels
    eps = trace_distance(rho, sigma)
    lhs = abs(
        conditional_entropy(rho, a_label, b_label)
        - conditional_entropy(sigma, a_label, b_label)
    )
    rhs = conditional_fannes_bound(eps, rho.layout.dim_of(a_label))
    return CondFannesReport(eps, lhs, rhs, bool(lhs <= rhs + 1e-9))


# ---------------------------------------------------------------------------
# joint file format
# ---------------------------------------------------------------------------

def joint_to_json(joint: ClassicalJoint) -> str:
    obj = {
        "shape": list(joint.shape),
        "p": [float(x) for x in joint.p.reshape(-1)],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def joint_from_json(text: str) -> ClassicalJoint:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "shape" not in obj or "p" not in obj:
        raise ValueError("joint file must be an object with 'shape' and 'p'")
    shape = tuple(int(x) for x in obj["shape"])
    if len(shape) != 3:
        raise ValueError("shape must have three entries")
    flat = np.asarray(obj["p"], dtype=np.float64)
    if flat.size != int(np.prod(shape)):
        raise ValueError("flattened probabilities do not match shape")
    return ClassicalJoint(flat.reshape(shape))


def save_joint(joint: ClassicalJoint, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(joint_to_json(joint))
        fh.write("\n")


def load_joint(path: str) -> ClassicalJoint:
    with open(path, "r", encoding="utf-8") as fh:
        return joint_from_json(fh.read())
