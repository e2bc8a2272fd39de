"""Executable verification of the exact identities and inequalities behind the
bound machinery; the mathematical regression suite of the repository.

Two tolerance tiers separate linear-algebra error from optimization slack:
exact identities at 1e-9, optimizer-mediated inequalities at 1e-6.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (
    DensityOperator,
    Instrument,
    PureState,
    SystemLayout,
    apply_instrument,
    partial_trace,
    trace_distance,
)
from .entropy import conditional_mutual_information, eta
from .errors import InvariantViolation, ShapeError
from .extensions import Extension, MARGINAL_TOL, mix_extensions, product_extension
from .optimizer import (
    OptimizerConfig,
    SquashedObjective,
    bounds_report,
    extend_via_channel,
)

TOL_EXACT = 1e-9
TOL_OPT = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    inputs: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "inputs": self.inputs,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "margin": self.margin,
                "passed": self.passed,
            },
            sort_keys=True,
        )


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def check_ssa(
    rho: DensityOperator,
    a_labels: str | Iterable[str] = "A",
    b_labels: str | Iterable[str] = "B",
    e_labels: str | Iterable[str] = "E",
    inputs: str = "",
) -> CheckResult:
    """Strong subadditivity: I(A;B|E) >= 0."""
    cmi = conditional_mutual_information(rho, a_labels, b_labels, e_labels)
    return CheckResult("ssa", inputs, cmi, 0.0, cmi, bool(cmi >= -TOL_EXACT))


def check_monotonicity(
    ext: Extension, ins: Instrument, target: str, inputs: str = ""
) -> CheckResult:
    """CMI of an extension dominates the outcome average after a unilocal
    instrument, with each post-measurement state still a valid extension."""
    if target not in ext.a_labels and target not in ext.b_labels:
        raise ShapeError(f"instrument target {target!r} must lie on the A or B side")
    lhs = ext.cmi()
    outcomes_ext = apply_instrument(ins, ext.state, target)
    outcomes_par = apply_instrument(ins, ext.parent, target)
    rhs = 0.0
    valid = True
    for (p, st), (q, par) in zip(outcomes_ext, outcomes_par):
        if p <= 1e-12:
            continue
        rhs += p * conditional_mutual_information(
            st, ext.a_labels, ext.b_labels, ext.e_labels
        )
        marg = partial_trace(st, ext.a_labels + ext.b_labels)
        if abs(p - q) > 1e-9 or float(np.max(np.abs(marg.matrix - par.matrix))) > MARGINAL_TOL:
            valid = False
    margin = lhs - rhs
    return CheckResult(
        "monotonicity",
        inputs,
        lhs,
        rhs,
        margin,
        bool(valid and margin >= -TOL_EXACT),
    )


def check_convexity_identity(
    e1: Extension, e2: Extension, lam: float, inputs: str = ""
) -> CheckResult:
    """Mixing with a flag is exactly convex in the CMI."""
    lhs = lam * e1.cmi() + (1.0 - lam) * e2.cmi()
    rhs = mix_extensions(e1, e2, lam, "__mixflag").cmi()
    dev = abs(lhs - rhs)
    return CheckResult("convexity_identity", inputs, lhs, rhs, -dev, bool(dev <= TOL_EXACT))


def check_additivity(e1: Extension, e2: Extension, inputs: str = "") -> CheckResult:
    """CMI is additive on product extensions, with vanishing cross terms."""
    prod = product_extension(e1, e2)
    lhs = prod.cmi()
    rhs = e1.cmi() + e2.cmi()
    cross1 = conditional_mutual_information(
        prod.state, e1.a_labels, e2.b_labels, prod.e_labels + e1.b_labels
    )
    cross2 = conditional_mutual_information(
        prod.state,
        e2.a_labels,
        e1.b_labels,
        prod.e_labels + e1.a_labels + e2.b_labels,
    )
    dev = max(abs(lhs - rhs), abs(cross1), abs(cross2))
    return CheckResult(
        "additivity",
        inputs + f" cross=({cross1:.2e},{cross2:.2e})",
        lhs,
        rhs,
        -dev,
        bool(dev <= TOL_EXACT),
    )


def check_superadditivity(
    rho: DensityOperator,
    a: str | Iterable[str] = "A",
    a2: str | Iterable[str] = "A2",
    b: str | Iterable[str] = "B",
    b2: str | Iterable[str] = "B2",
    e: str | Iterable[str] = "E",
    inputs: str = "",
) -> CheckResult:
    """I(AA';BB'|E) >= I(A;B|E) + I(A';B'|EA) on any five-party state."""
    from .core import as_labels

    a_t, a2_t = as_labels(a), as_labels(a2)
    b_t, b2_t = as_labels(b), as_labels(b2)
    e_t = as_labels(e)
    lhs = conditional_mutual_information(rho, a_t + a2_t, b_t + b2_t, e_t)
    rhs = conditional_mutual_information(rho, a_t, b_t, e_t) + (
        conditional_mutual_information(rho, a2_t, b2_t, e_t + a_t)
    )
    margin = lhs - rhs
    return CheckResult(
        "superadditivity", inputs, lhs, rhs, margin, bool(margin >= -TOL_EXACT)
    )


def check_bound_chain(
    rho: DensityOperator, cfg: OptimizerConfig, inputs: str = ""
) -> CheckResult:
    """hashing <= squashed upper <= formation upper, at optimizer tolerance."""
    try:
        rep = bounds_report(rho, cfg)
    except InvariantViolation as exc:
        return CheckResult("bound_chain", inputs + f" error={exc}", 0.0, 0.0, -1.0, False)
    m1 = rep.squashed_upper - rep.hashing_lower
    m2 = rep.eof_upper - rep.squashed_upper
    margin = min(m1, m2)
    return CheckResult(
        "bound_chain",
        inputs + f" squashed={rep.squashed_upper:.6f}",
        rep.hashing_lower,
        rep.eof_upper,
        margin,
        bool(margin >= -TOL_OPT),
    )


def _max_entangled(layout: SystemLayout, s: int) -> PureState:
    d_a, d_b = layout.dims
    v = np.zeros(d_a * d_b, dtype=np.complex128)
    for i in range(s):
        v[i * d_b + i] = 1.0
    return PureState(layout, v / np.sqrt(s))


def check_distillation_estimate(
    sigma: DensityOperator,
    s: int,
    n_channels: int = 6,
    seed: int = 0,
    max_d_env: int = 4,
    inputs: str = "",
) -> CheckResult:
    """Near a rank-s maximally entangled state, every extension keeps half CMI
    above log2(s) minus the continuity penalty assembled from two entropy
    continuity estimates (marginals on dimension s, joint on dimension s^2):
    penalty = 3 eta(delta) + 4 delta log2(s)."""
    if len(sigma.layout.systems) != 2:
        raise ShapeError("distillation estimate needs a two-system state")
    d_a, d_b = sigma.layout.dims
    if s < 2 or s > min(d_a, d_b):
        raise ShapeError(f"Schmidt rank {s} out of range for dims ({d_a}, {d_b})")
    target = _max_entangled(sigma.layout, s)
    # marginal supports must sit inside the rank-s supports of the target
    marg_a = partial_trace(sigma, sigma.layout.labels[0]).matrix
    marg_b = partial_trace(sigma, sigma.layout.labels[1]).matrix
    out_a = float(np.real(np.trace(marg_a)) - np.real(np.trace(marg_a[:s, :s])))
    out_b = float(np.real(np.trace(marg_b)) - np.real(np.trace(marg_b[:s, :s])))
    if max(out_a, out_b) > 1e-10:
        raise InvariantViolation(
            f"marginal support leaks outside the rank-{s} target support "
            f"({max(out_a, out_b):.3e})"
        )
    delta = trace_distance(sigma, target.to_density())
    if delta > 0.5 + 1e-12:
        raise InvariantViolation(f"trace distance {delta:.3f} exceeds 1/2")
    log_s = float(np.log2(s))
    rhs = log_s - (3.0 * eta(delta) + 4.0 * delta * log_s)
    rng = np.random.default_rng(seed)
    obj_cache: dict[int, SquashedObjective] = {}
    lhs = np.inf
    for d_env in range(1, max_d_env + 1):
        obj = obj_cache.setdefault(d_env, SquashedObjective(sigma, d_env))
        for _ in range(n_channels):
            theta = rng.standard_normal(obj.dim)
            val = obj.value(theta)
            lhs = min(lhs, val)
        ext = extend_via_channel(sigma, obj.channel(np.zeros(obj.dim)))
        lhs = min(lhs, ext.half_cmi())
    margin = lhs - rhs
    return CheckResult(
        "distillation_estimate",
        inputs + f" s={s} delta={delta:.4f}",
        float(lhs),
        rhs,
        margin,
        bool(margin >= -TOL_EXACT),
    )


# ---------------------------------------------------------------------------
# deterministic random inputs for the sweeps
# ---------------------------------------------------------------------------

def _random_density(rng: np.random.Generator, d: int, rank: int) -> np.ndarray:
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_tripartite(dims: tuple[int, int, int], seed: int) -> DensityOperator:
    rng = np.random.default_rng([7, seed])
    d = int(np.prod(dims))
    rank = int(rng.integers(1, d + 1))
    layout = SystemLayout([("A", dims[0]), ("B", dims[1]), ("E", dims[2])])
    return DensityOperator(layout, _random_density(rng, d, rank))


def random_extension(dims: tuple[int, int, int], seed: int) -> Extension:
    state = random_tripartite(dims, seed)
    parent = partial_trace(state, ("A", "B"))
    return Extension(state, ("A",), ("B",), ("E",), parent)


def random_instrument(d: int, outcomes: int, seed: int) -> Instrument:
    """Random trace-preserving instrument: Gaussian blocks whitened jointly."""
    rng = np.random.default_rng([11, seed])
    blocks = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for _ in range(outcomes)
    ]
    total = sum(g.conj().T @ g for g in blocks)
    w, u = np.linalg.eigh((total + total.conj().T) / 2)
    inv_sqrt = (u / np.sqrt(w)[None, :]) @ u.conj().T
    return Instrument([[g @ inv_sqrt] for g in blocks])


def random_classical_pair(
    d_a: int, blocks: int, seed: int
) -> tuple[DensityOperator, DensityOperator]:
    """Pair of classical-on-B states; odd seeds perturb, even seeds redraw."""
    from .classical import classical_embed

    rng = np.random.default_rng([13, seed])
    w1 = rng.dirichlet(np.ones(blocks))
    mats1 = [_random_density(rng, d_a, int(rng.integers(1, d_a + 1))) for _ in range(blocks)]
    rho = classical_embed(w1, mats1)
    if seed % 2 == 1:
        t = float(rng.uniform(0.0, 0.3))
        w2 = (1 - t) * w1 + t * rng.dirichlet(np.ones(blocks))
        mats2 = [
            (1 - t) * m + t * _random_density(rng, d_a, d_a) for m in mats1
        ]
    else:
        w2 = rng.dirichlet(np.ones(blocks))
        mats2 = [_random_density(rng, d_a, int(rng.integers(1, d_a + 1))) for _ in range(blocks)]
    sigma = classical_embed(w2, mats2)
    return rho, sigma


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

SUITE_NAMES = ("entropy", "extensions", "monotone", "additivity", "classical")

_DEFAULT_N = {
    "entropy": 500,
    "extensions": 100,
    "monotone": 100,
    "additivity": 50,
    "classical": 500,
}


def _suite_entropy(seed: int, n: int) -> list[CheckResult]:
    results = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        dims = tuple(int(x) for x in rng.integers(2, 4, size=3))
        rho = random_tripartite(dims, seed * 1_000_003 + i)
        results.append(check_ssa(rho, inputs=f"seed={seed} i={i} dims={dims}"))
    return results


def _suite_extensions(seed: int, n: int) -> list[CheckResult]:
    results = []
    for i in range(n):
        rng = np.random.default_rng([seed, 17, i])
        lam = float(rng.uniform())
        e1 = random_extension((2, 2, 2), seed * 2_000_003 + 2 * i)
        e2 = random_extension((2, 2, 2), seed * 2_000_003 + 2 * i + 1)
        results.append(
            check_convexity_identity(e1, e2, lam, inputs=f"seed={seed} i={i} lam={lam:.4f}")
        )
    return results


def _suite_monotone(seed: int, n: int) -> list[CheckResult]:
    results = []
    for i in range(n):
        ext = random_extension((2, 2, 2), seed * 3_000_017 + i)
        ins = random_instrument(2, 2, seed * 3_000_017 + i)
        results.append(check_monotonicity(ext, ins, "A", inputs=f"seed={seed} i={i}"))
    return results


def _suite_additivity(seed: int, n: int) -> list[CheckResult]:
    results = []
    for i in range(n):
        e1 = random_extension((2, 2, 2), seed * 4_000_037 + 2 * i)
        state2 = random_tripartite((2, 2, 2), seed * 4_000_037 + 2 * i + 1)
        relabeled = DensityOperator(
            SystemLayout([("A2", 2), ("B2", 2), ("E2", 2)]), state2.matrix
        )
        e2 = Extension(
            relabeled,
            ("A2",),
            ("B2",),
            ("E2",),
            partial_trace(relabeled, ("A2", "B2")),
        )
        results.append(check_additivity(e1, e2, inputs=f"seed={seed} i={i}"))
    for i in range(2 * n):
        rng = np.random.default_rng([seed, 23, i])
        layout = SystemLayout([("A", 2), ("A2", 2), ("B", 2), ("B2", 2), ("E", 2)])
        rank = int(rng.integers(1, 33))
        rho = DensityOperator(layout, _random_density(rng, 32, rank))
        results.append(check_superadditivity(rho, inputs=f"seed={seed} i={i} rank={rank}"))
    return results


def _suite_classical(seed: int, n: int) -> list[CheckResult]:
    from .classical import classical_cond_fannes_check

    results = []
    for i in range(n):
        rng = np.random.default_rng([seed, 29, i])
        d_a = int(rng.integers(2, 5))
        blocks = int(rng.integers(1, 5))
        rho, sig = random_classical_pair(d_a, blocks, seed * 5_000_011 + i)
        rep = classical_cond_fannes_check(rho, sig)
        results.append(
            CheckResult(
                "classical_cond_fannes",
                f"seed={seed} i={i} d_a={d_a} blocks={blocks} eps={rep.trace_dist:.4f}",
                rep.lhs,
                rep.rhs,
                rep.rhs - rep.lhs,
                rep.holds,
            )
        )
    return results


_SUITES = {
    "entropy": _suite_entropy,
    "extensions": _suite_extensions,
    "monotone": _suite_monotone,
    "additivity": _suite_additivity,
    "classical": _suite_classical,
}


def run_suite(
    name: str, seed: int = 0, n: int | None = None
) -> tuple[dict, list[CheckResult]]:
    """Run one named suite (or 'all'); returns (manifest, results)."""
    if name == "all":
        manifest = {
            "suite": "all",
            "seed": seed,
            "n": n,
            "tol_exact": TOL_EXACT,
            "tol_opt": TOL_OPT,
        }
        results: list[CheckResult] = []
        for sub in SUITE_NAMES:
            results.extend(_SUITES[sub](seed, n or _DEFAULT_N[sub]))
        return manifest, results
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES + ('all',)}")
    n_used = n or _DEFAULT_N[name]
    manifest = {
        "suite": name,
        "seed": seed,
        "n": n_used,
        "tol_exact": TOL_EXACT,
        "tol_opt": TOL_OPT,
    }
    return manifest, _SUITES[name](seed, n_used)
