"""Variational minimization producing certified upper bounds.

The squashed-entanglement objective is half the conditional mutual information
of the extension obtained by sending the canonical purifier through a
parameterized channel; any parameter point therefore certifies an upper bound.
The infimum over extensions may be unattained at any finite extension
dimension, so every value reported here is an upper bound, never the measure
itself.

Channel parameterization: the Stinespring isometry V : C -> E (x) F with
d_F = d_C * d_env is the first d_C columns of exp(X) for an antihermitian X
assembled from an unconstrained real parameter vector (upper-left block
arbitrary antihermitian, lower-left block arbitrary complex, lower-right block
zero).  These exponentials sweep out every isometry of the given shape, and
exp(X) restricted to the leading columns is computed exactly through a
2 d_C x 2 d_C invariant subspace, which keeps finite-difference gradients
affordable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (
    DensityOperator,
    QuantumChannel,
    partial_trace,
    purify,
    state_rank,
    trace_distance,
)
from .entropy import mutual_information, von_neumann_entropy
from .errors import InvariantViolation, ShapeError
from .extensions import Ensemble, _resolve_split, extend_via_channel
from .core import PureState

log = logging.getLogger("squash.optimizer")

FD_STEP = 1e-5
ARMIJO_C = 1e-4
MIN_STEP = 1e-12
BOUND_TOL = 1e-6
# cap on finite-difference evaluations per restart when sweeping the
# exploratory d_env schedule, so large parameterizations stay responsive
EXPLORATORY_EVAL_BUDGET = 40_000


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the multi-restart descent.

    ``d_env`` is the extension dimension; ``None`` selects the exploratory
    schedule 1, 2, 4, rank(rho)^2 and reports the best stage.
    """

    d_env: int | None = None
    restarts: int = 4
    max_iters: int = 100
    step_init: float = 0.5
    grad_tol: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.d_env is not None and self.d_env < 1:
            raise InvariantViolation("d_env must be positive")
        if self.restarts < 1 or self.max_iters < 1:
            raise InvariantViolation("restarts and max_iters must be positive")
        if not self.step_init > 0:
            raise InvariantViolation("step_init must be positive")
        if not 0 < self.grad_tol <= 1e-2:
            raise InvariantViolation("grad_tol must lie in (0, 1e-2]")
        if self.seed < 0:
            raise InvariantViolation("seed must be nonnegative")


@dataclass(frozen=True)
class IterationRecord:
    restart: int
    iteration: int
    objective: float
    grad_norm: float
    step: float


def trace_to_csv(records: Iterable[IterationRecord]) -> str:
    lines = ["restart,iter,objective,grad_norm,step"]
    for r in records:
        lines.append(
            f"{r.restart},{r.iteration},{r.objective:.12g},{r.grad_norm:.12g},{r.step:.12g}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# isometry parameterization
# ---------------------------------------------------------------------------

def stiefel_param_dim(n: int, p: int) -> int:
    """Real parameter count for an n x p isometry: p^2 + 2 p (n - p)."""
    return 2 * n * p - p * p


def _expm_antiherm(x: np.ndarray) -> np.ndarray:
    """exp of (stacked) antihermitian matrices via the hermitian eigendecomposition."""
    h = -1j * x
    h = (h + h.conj().swapaxes(-1, -2)) / 2
    w, u = np.linalg.eigh(h)
    phases = np.exp(1j * w)
    return (u * phases[..., None, :]) @ u.conj().swapaxes(-1, -2)


def stiefel_exp_many(thetas: np.ndarray, n: int, p: int) -> np.ndarray:
    """Batch of n x p isometries exp(X(theta))[:, :p] for bordered antihermitian X."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    dim = stiefel_param_dim(n, p)
    if thetas.shape[1] != dim:
        raise ShapeError(f"parameter vector length {thetas.shape[1]} != {dim}")
    kk = thetas.shape[0]
    m = p * (p - 1) // 2
    a = np.zeros((kk, p, p), dtype=np.complex128)
    a[:, np.arange(p), np.arange(p)] = 1j * thetas[:, :p]
    if m:
        iu = np.triu_indices(p, 1)
        re = thetas[:, p : p + m]
        im = thetas[:, p + m : p + 2 * m]
        a[:, iu[0], iu[1]] = re + 1j * im
        a[:, iu[1], iu[0]] = -re + 1j * im
    if n == p:
        return _expm_antiherm(a)
    q = (n - p) * p
    rest = thetas[:, p + 2 * m :]
    b = (rest[:, :q] + 1j * rest[:, q:]).reshape(kk, n - p, p)
    if n <= 2 * p:
        x = np.zeros((kk, n, n), dtype=np.complex128)
        x[:, :p, :p] = a
        x[:, p:, :p] = b
        x[:, :p, p:] = -b.conj().swapaxes(1, 2)
        return _expm_antiherm(x)[:, :, :p]
    # QR reduction: the span of the leading p coordinates and of the columns of
    # Q is invariant under X, so exp(X)[:, :p] follows from a 2p x 2p exponential.
    qmat, rmat = np.linalg.qr(b)
    g = np.zeros((kk, 2 * p, 2 * p), dtype=np.complex128)
    g[:, :p, :p] = a
    g[:, p:, :p] = rmat
    g[:, :p, p:] = -rmat.conj().swapaxes(1, 2)
    e = _expm_antiherm(g)[:, :, :p]
    return np.concatenate([e[:, :p, :], qmat @ e[:, p:, :]], axis=1)


def stiefel_exp(theta: np.ndarray, n: int, p: int) -> np.ndarray:
    return stiefel_exp_many(np.asarray(theta)[None, :], n, p)[0]


# ---------------------------------------------------------------------------
# batched entropies of pure-state marginals
# ---------------------------------------------------------------------------

def _batch_gram(t: np.ndarray, row_axes: tuple[int, ...]) -> np.ndarray:
    """Gram matrix of the (rows | cols) reshaping of a batch of pure tensors.

    The Gram spectrum equals the marginal spectrum on the row systems; the
    smaller side is used.
    """
    k = t.ndim - 1
    cols = tuple(i for i in range(k) if i not in row_axes)
    perm = (0,) + tuple(i + 1 for i in row_axes) + tuple(i + 1 for i in cols)
    tt = t.transpose(perm)
    r = int(np.prod([t.shape[i + 1] for i in row_axes], dtype=np.int64))
    c = int(np.prod([t.shape[i + 1] for i in cols], dtype=np.int64))
    mat = tt.reshape(t.shape[0], r, c)
    if r <= c:
        return mat @ mat.conj().swapaxes(1, 2)
    return mat.conj().swapaxes(1, 2) @ mat


def _batch_entropy(grams: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    w = np.linalg.eigvalsh((grams + grams.conj().swapaxes(1, 2)) / 2)
    mask = w > floor
    safe = np.where(mask, w, 1.0)
    return -np.sum(np.where(mask, w * np.log2(safe), 0.0), axis=1)


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------

class SquashedObjective:
    """Half CMI of the channel-built extension as a function of channel parameters."""

    def __init__(
        self,
        rho: DensityOperator,
        d_env: int,
        a_labels: str | Iterable[str] | None = None,
        b_labels: str | Iterable[str] | None = None,
    ):
        if d_env < 1:
            raise ShapeError("d_env must be positive")
        self.rho = rho
        a, b = _resolve_split(rho.layout, a_labels, b_labels)
        self.a_labels, self.b_labels = a, b
        psi = purify(rho, "__purifier")
        self.rank = psi.layout.dim_of("__purifier")
        self.d_env = d_env
        self.d_flag = self.rank * d_env
        self.n = d_env * self.d_flag
        self.p = self.rank
        self.dim = stiefel_param_dim(self.n, self.p)
        d_total = rho.layout.total_dim
        self._m0 = psi.vector.reshape(d_total, self.rank)
        self._dims = rho.layout.dims
        k = len(self._dims)
        self._a_axes = tuple(rho.layout.position(lbl) for lbl in a)
        self._b_axes = tuple(rho.layout.position(lbl) for lbl in b)
        self._e_axis = k

    def values(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
        v = stiefel_exp_many(thetas, self.n, self.p)
        phi = np.einsum("xc,knc->kxn", self._m0, v)
        kk = thetas.shape[0]
        t = phi.reshape((kk,) + self._dims + (self.d_env, self.d_flag))
        e_ax = self._e_axis
        s_ae = _batch_entropy(_batch_gram(t, self._a_axes + (e_ax,)))
        s_be = _batch_entropy(_batch_gram(t, self._b_axes + (e_ax,)))
        s_abe = _batch_entropy(_batch_gram(t, tuple(range(e_ax)) + (e_ax,)))
        s_e = _batch_entropy(_batch_gram(t, (e_ax,)))
        return 0.5 * (s_ae + s_be - s_abe - s_e)

    def value(self, theta: np.ndarray) -> float:
        return float(self.values(np.asarray(theta)[None, :])[0])

    def channel(self, theta: np.ndarray) -> QuantumChannel:
        return QuantumChannel(
            self.p, self.d_env, self.d_flag, stiefel_exp(theta, self.n, self.p)
        )


def squashed_cmi_objective(
    rho: DensityOperator,
    d_env: int,
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> SquashedObjective:
    """Public handle on the raw objective (used by flatness/soundness tests)."""
    return SquashedObjective(rho, d_env, a_labels, b_labels)


class EnsembleObjective:
    """Average marginal entropy of the ensemble induced by measuring the purifier."""

    def __init__(
        self,
        rho: DensityOperator,
        size: int,
        a_labels: str | Iterable[str] | None = None,
        b_labels: str | Iterable[str] | None = None,
    ):
        a, b = _resolve_split(rho.layout, a_labels, b_labels)
        self.rho = rho
        self.a_labels, self.b_labels = a, b
        psi = purify(rho, "__purifier")
        self.rank = psi.layout.dim_of("__purifier")
        if size < self.rank:
            raise ShapeError(f"ensemble size {size} below state rank {self.rank}")
        self.size = size
        self.n = size
        self.p = self.rank
        self.dim = stiefel_param_dim(self.n, self.p)
        d_total = rho.layout.total_dim
        self._m0 = psi.vector.reshape(d_total, self.rank)
        self._dims = rho.layout.dims
        a_axes = tuple(rho.layout.position(lbl) for lbl in a)
        b_axes = tuple(rho.layout.position(lbl) for lbl in b)
        d_a = int(np.prod([self._dims[i] for i in a_axes], dtype=np.int64))
        d_b = int(np.prod([self._dims[i] for i in b_axes], dtype=np.int64))
        # members are pure, so both marginal entropies agree; use the smaller side
        self._row_axes = a_axes if d_a <= d_b else b_axes

    def values(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
        w_iso = stiefel_exp_many(thetas, self.n, self.p)
        members = np.einsum("xc,kmc->kxm", self._m0, w_iso)
        kk = thetas.shape[0]
        t = members.reshape((kk,) + self._dims + (self.size,))
        k_sys = len(self._dims)
        cols = tuple(i for i in range(k_sys) if i not in self._row_axes)
        perm = (0, k_sys + 1) + tuple(i + 1 for i in self._row_axes) + tuple(
            i + 1 for i in cols
        )
        tt = t.transpose(perm)
        r = int(np.prod([self._dims[i] for i in self._row_axes], dtype=np.int64))
        c = int(np.prod([self._dims[i] for i in cols], dtype=np.int64))
        mat = tt.reshape(kk, self.size, r, c)
        grams = mat @ mat.conj().swapaxes(2, 3)
        weights = np.einsum("kmrr->km", grams).real
        w = np.linalg.eigvalsh((grams + grams.conj().swapaxes(2, 3)) / 2)
        valid = weights > 1e-13
        wsafe = np.where(valid, weights, 1.0)
        lam = w / wsafe[..., None]
        ok = (w > 1e-15) & (lam > 1e-12) & valid[..., None]
        contrib = np.where(ok, -w * np.log2(np.where(ok, lam, 1.0)), 0.0)
        return np.sum(contrib, axis=(1, 2))

    def value(self, theta: np.ndarray) -> float:
        return float(self.values(np.asarray(theta)[None, :])[0])

    def isometry(self, theta: np.ndarray) -> np.ndarray:
        return stiefel_exp(theta, self.n, self.p)

    def ensemble(self, theta: np.ndarray) -> Ensemble:
        w_iso = self.isometry(theta)
        members = self._m0 @ w_iso.T
        entries = []
        for k in range(self.size):
            u = members[:, k]
            p = float(np.real(np.vdot(u, u)))
            if p > 1e-12:
                entries.append((p, PureState(self.rho.layout, u / np.sqrt(p))))
        total = sum(w for w, _ in entries)
        entries = [(w / total, ps) for w, ps in entries]
        return Ensemble(entries, self.rho)


def measurement_flag_channel(w_iso: np.ndarray) -> QuantumChannel:
    """Channel that measures after the isometry W and stores the outcome twice.

    Applied to the purifier this produces exactly the flag extension of the
    measured ensemble, so its half CMI equals the ensemble's average marginal
    entropy.
    """
    m, r = w_iso.shape
    v = np.zeros((m * m, r), dtype=np.complex128)
    for k in range(m):
        v[k * m + k, :] = w_iso[k, :]
    return QuantumChannel(r, m, m, v)


# ---------------------------------------------------------------------------
# descent engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RestartOutcome:
    restart: int
    theta: np.ndarray
    value: float
    reason: str


def _fd_gradient(obj, theta: np.ndarray) -> tuple[np.ndarray, float]:
    dim = theta.size
    pts = np.repeat(theta[None, :], 2 * dim, axis=0)
    idx = np.arange(dim)
    pts[2 * idx, idx] += FD_STEP
    pts[2 * idx + 1, idx] -= FD_STEP
    vals = obj.values(pts)
    g = (vals[0::2] - vals[1::2]) / (2 * FD_STEP)
    return g, float(np.max(np.abs(g)))


def _line_search(obj, theta: np.ndarray, f0: float, g: np.ndarray, step_init: float):
    gg = float(g @ g)
    if gg <= 0.0:
        return None
    n_steps = max(1, int(np.ceil(np.log2(step_init / MIN_STEP))) + 1)
    steps = step_init * 0.5 ** np.arange(n_steps)
    cands = theta[None, :] - steps[:, None] * g[None, :]
    vals = obj.values(cands)
    ok = vals <= f0 - ARMIJO_C * steps * gg
    hits = np.nonzero(ok)[0]
    if hits.size == 0:
        return None
    j = int(hits[0])
    return cands[j], float(vals[j]), float(steps[j])


def _descend(
    obj, theta: np.ndarray, cfg: OptimizerConfig, restart: int, max_iters: int,
    records: list[IterationRecord],
) -> RestartOutcome:
    f = obj.value(theta)
    g, gn = _fd_gradient(obj, theta)
    records.append(IterationRecord(restart, 0, f, gn, 0.0))
    reason = "max_iters"
    step_start = cfg.step_init
    for it in range(1, max_iters + 1):
        if gn < cfg.grad_tol:
            reason = "grad_tol"
            break
        hit = _line_search(obj, theta, f, g, step_start)
        if hit is None:
            reason = "stalled"
            records.append(IterationRecord(restart, it, f, gn, 0.0))
            break
        theta, f, step = hit
        # let the bracket grow again after a full step so flat valleys keep moving
        step_start = max(cfg.step_init, 2.0 * step)
        g, gn = _fd_gradient(obj, theta)
        records.append(IterationRecord(restart, it, f, gn, step))
    return RestartOutcome(restart, theta, f, reason)


def _multistart(
    obj,
    cfg: OptimizerConfig,
    stream: int,
    max_iters: int | None = None,
    restart_offset: int = 0,
    init_scale: float = 1.0,
) -> tuple[RestartOutcome, list[IterationRecord]]:
    """Run seeded restarts (restart 0 starts at theta = 0) and keep the minimum.

    Restarts are independent; ties are broken toward the lower restart index,
    so any parallel execution order reproduces this sequential merge.
    """
    iters = cfg.max_iters if max_iters is None else max_iters
    records: list[IterationRecord] = []
    best: RestartOutcome | None = None
    for r in range(cfg.restarts):
        if r == 0:
            theta0 = np.zeros(obj.dim)
        else:
            rng = np.random.default_rng([cfg.seed, stream, r])
            theta0 = rng.standard_normal(obj.dim) * init_scale
        out = _descend(obj, theta0, cfg, restart_offset + r, iters, records)
        log.info(
            "restart %d: value=%.9g reason=%s", restart_offset + r, out.value, out.reason
        )
        if best is None or out.value < best.value:
            best = out
    assert best is not None
    return best, records


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SquashedBound:
    """Certified upper bound with the achieving channel and iteration log."""

    value: float
    channel: QuantumChannel
    trace: tuple[IterationRecord, ...]
    reason: str
    d_env: int


def _d_env_schedule(rho: DensityOperator) -> list[int]:
    r = state_rank(rho)
    return sorted(set([1, 2, 4, r * r]))


def squashed_upper_bound(
    rho: DensityOperator,
    cfg: OptimizerConfig,
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> SquashedBound:
    """Minimize half CMI over channel-built extensions; always an upper bound.

    Restart 0 is the full-trace channel, so the result never exceeds half the
    mutual information.  Besides the generic channel restarts, each stage also
    descends over dephasing-after-isometry channels (the flag-extension
    subfamily of the same search space), which dominate near separable states.
    The reported value is recomputed from the returned channel through
    ``extend_via_channel``, independently of the optimizer.
    """
    stages = [cfg.d_env] if cfg.d_env is not None else _d_env_schedule(rho)
    exploratory = cfg.d_env is None
    a, b = _resolve_split(rho.layout, a_labels, b_labels)
    best_val = None
    best_chan = None
    best_reason = ""
    best_d = stages[0]
    all_records: list[IterationRecord] = []
    offset = 0
    for d_env in stages:
        obj = SquashedObjective(rho, d_env, a, b)
        iters = cfg.max_iters
        if exploratory:
            per_restart = max(1, EXPLORATORY_EVAL_BUDGET // max(1, 2 * obj.dim))
            iters = max(3, min(cfg.max_iters, per_restart))
        out, records = _multistart(obj, cfg, stream=1, max_iters=iters, restart_offset=offset)
        all_records.extend(records)
        offset += cfg.restarts
        candidates: list[tuple[QuantumChannel, str]] = [(obj.channel(out.theta), out.reason)]
        if d_env >= obj.rank:
            flag_obj = EnsembleObjective(rho, d_env, a, b)
            out2, records2 = _multistart(
                flag_obj, cfg, stream=4, restart_offset=offset
            )
            all_records.extend(records2)
            offset += cfg.restarts
            candidates.append(
                (measurement_flag_channel(flag_obj.isometry(out2.theta)), out2.reason)
            )
        for chan, reason in candidates:
            ext = extend_via_channel(rho, chan, a_labels=a, b_labels=b)
            val = ext.half_cmi()
            if best_val is None or val < best_val:
                best_val, best_chan, best_reason, best_d = val, chan, reason, d_env
    return SquashedBound(best_val, best_chan, tuple(all_records), best_reason, best_d)


@dataclass(frozen=True, eq=False)
class EofBound:
    """Upper bound on entanglement of formation with the achieving ensemble."""

    value: float
    ensemble: Ensemble
    isometry: np.ndarray
    trace: tuple[IterationRecord, ...]
    reason: str


def eof_upper_bound(
    rho: DensityOperator,
    ensemble_size: int | None = None,
    cfg: OptimizerConfig = OptimizerConfig(),
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> EofBound:
    """Minimize the average marginal entropy over purifier-measurement ensembles.

    Restart 0 is the canonical embedding, i.e. the eigen-ensemble.
    """
    r = state_rank(rho)
    size = ensemble_size if ensemble_size is not None else r * r
    obj = EnsembleObjective(rho, size, a_labels, b_labels)
    out, records = _multistart(obj, cfg, stream=2)
    ens = obj.ensemble(out.theta)
    value = float(obj.value(out.theta))
    return EofBound(value, ens, obj.isometry(out.theta), tuple(records), out.reason)


def hashing_lower_bound(
    rho: DensityOperator,
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> float:
    """Lower bound (I(A;B) - S(AB)) / 2; may be negative."""
    a, b = _resolve_split(rho.layout, a_labels, b_labels)
    return 0.5 * (mutual_information(rho, a, b) - von_neumann_entropy(rho))


@dataclass(frozen=True, eq=False)
class BoundReport:
    """Bound chain for one state: hashing lower, squashed upper, formation upper."""

    hashing_lower: float
    hashing_lower_clamped: float
    squashed_upper: float
    eof_upper: float
    mutual_info_half: float
    channel: QuantumChannel
    ensemble: Ensemble
    d_env: int
    ensemble_size: int
    marginal_trace_distance: float
    reason: str
    trace: tuple[IterationRecord, ...]

    def __post_init__(self):
        if self.hashing_lower > self.squashed_upper + BOUND_TOL:
            raise InvariantViolation(
                f"bound chain violated: hashing {self.hashing_lower} > "
                f"squashed {self.squashed_upper}"
            )
        if self.squashed_upper > self.eof_upper + BOUND_TOL:
            raise InvariantViolation(
                f"bound chain violated: squashed {self.squashed_upper} > "
                f"formation {self.eof_upper}"
            )
        if self.squashed_upper > self.mutual_info_half + BOUND_TOL:
            raise InvariantViolation(
                f"bound chain violated: squashed {self.squashed_upper} > "
                f"half mutual information {self.mutual_info_half}"
            )

    def to_dict(self) -> dict:
        return {
            "hashing_lower": self.hashing_lower,
            "hashing_lower_clamped": self.hashing_lower_clamped,
            "squashed_upper": self.squashed_upper,
            "eof_upper": self.eof_upper,
            "mutual_info_half": self.mutual_info_half,
            "d_env": self.d_env,
            "ensemble_size": self.ensemble_size,
            "marginal_trace_distance": self.marginal_trace_distance,
            "reason": self.reason,
            "channel": {
                "d_in": self.channel.d_in,
                "d_out": self.channel.d_out,
                "d_env": self.channel.d_env,
                "isometry": [
                    [[float(x.real), float(x.imag)] for x in row]
                    for row in self.channel.isometry
                ],
            },
            "ensemble": [
                {
                    "weight": w,
                    "vector": [[float(x.real), float(x.imag)] for x in ps.vector],
                }
                for w, ps in self.ensemble.entries
            ],
        }


def bounds_report(
    rho: DensityOperator,
    cfg: OptimizerConfig = OptimizerConfig(),
    ensemble_size: int | None = None,
    a_labels: str | Iterable[str] | None = None,
    b_labels: str | Iterable[str] | None = None,
) -> BoundReport:
    """Aggregate the bound chain for one state.

    The flag extension of the best ensemble is itself a candidate extension, so
    the squashed upper bound never exceeds the formation upper bound.
    """
    a, b = _resolve_split(rho.layout, a_labels, b_labels)
    sq = squashed_upper_bound(rho, cfg, a, b)
    ef = eof_upper_bound(rho, ensemble_size, cfg, a, b)
    flag_chan = measurement_flag_channel(ef.isometry)
    flag_ext = extend_via_channel(rho, flag_chan, a_labels=a, b_labels=b)
    flag_val = flag_ext.half_cmi()
    if flag_val < sq.value:
        squashed_val, chan = flag_val, flag_chan
    else:
        squashed_val, chan = sq.value, sq.channel
    best_ext = extend_via_channel(rho, chan, a_labels=a, b_labels=b)
    marg_dev = trace_distance(
        partial_trace(best_ext.state, best_ext.a_labels + best_ext.b_labels), rho
    )
    hashing = hashing_lower_bound(rho, a, b)
    return BoundReport(
        hashing_lower=hashing,
        hashing_lower_clamped=max(0.0, hashing),
        squashed_upper=squashed_val,
        eof_upper=ef.value,
        mutual_info_half=0.5 * mutual_information(rho, a, b),
        channel=chan,
        ensemble=ef.ensemble,
        d_env=sq.d_env,
        ensemble_size=ef.ensemble.size,
        marginal_trace_distance=marg_dev,
        reason=sq.reason,
        trace=sq.trace,
    )
