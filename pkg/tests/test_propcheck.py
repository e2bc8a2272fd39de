import json

import numpy as np
import pytest

from squash.catalog import antisym_qutrit_state, bell_state, cc_mixed_state, ghz_state
from squash.core import (
    DensityOperator,
    Instrument,
    PureState,
    QuantumChannel,
    SystemLayout,
    partial_trace,
    tensor,
)
from squash.errors import InvariantViolation, ShapeError
from squash.extensions import Extension, extend_via_channel, separable_flag_extension
from squash.optimizer import OptimizerConfig
from squash.propcheck import (
    CheckResult,
    check_additivity,
    check_bound_chain,
    check_convexity_identity,
    check_distillation_estimate,
    check_monotonicity,
    check_ssa,
    check_superadditivity,
    random_extension,
    random_instrument,
    run_suite,
)

from conftest import random_density

LOG2_3 = float(np.log2(3.0))


def bell_trivial():
    return extend_via_channel(bell_state(), QuantumChannel.constant(1, 2))


def test_check_ssa_ghz():
    res = check_ssa(ghz_state())
    assert res.passed and abs(res.margin - 1.0) < 1e-9


def test_check_ssa_product():
    rng = np.random.default_rng(0)
    parts = [
        DensityOperator(SystemLayout([(lbl, 2)]), random_density(rng, 2, 2))
        for lbl in ("A", "B", "E")
    ]
    rho = tensor(tensor(parts[0], parts[1]), parts[2])
    res = check_ssa(rho)
    assert res.passed and abs(res.margin) < 1e-9


def test_check_monotonicity_identity_instrument():
    ext = bell_trivial()
    ins = Instrument([[np.eye(2)]])
    res = check_monotonicity(ext, ins, "A")
    assert res.passed and abs(res.margin) < 1e-9


def test_check_monotonicity_projective_bell():
    ext = bell_trivial()
    ins = Instrument([[np.diag([1.0, 0.0])], [np.diag([0.0, 1.0])]])
    res = check_monotonicity(ext, ins, "A")
    assert res.passed
    assert abs(res.lhs - 2.0) < 1e-9
    assert abs(res.rhs) < 1e-9


def test_check_monotonicity_random_sweep():
    for i in range(20):
        ext = random_extension((2, 2, 2), 900 + i)
        ins = random_instrument(2, 2, 900 + i)
        res = check_monotonicity(ext, ins, "A")
        assert res.passed, res


def test_check_monotonicity_rejects_off_side_target():
    ext = bell_trivial()
    ins = Instrument([[np.eye(2)]])
    with pytest.raises(ShapeError):
        check_monotonicity(ext, ins, "E")


def test_check_convexity_endpoints():
    e1 = random_extension((2, 2, 2), 1)
    e2 = random_extension((2, 2, 2), 2)
    assert check_convexity_identity(e1, e2, 0.0).passed
    assert check_convexity_identity(e1, e1, 0.5).passed


def test_check_additivity_bells():
    e1 = bell_trivial()
    b2 = DensityOperator(SystemLayout([("A2", 2), ("B2", 2)]), bell_state().matrix)
    e2 = extend_via_channel(b2, QuantumChannel.constant(1, 2), env_label="E2")
    res = check_additivity(e1, e2)
    assert res.passed and abs(res.lhs - 4.0) < 1e-9


def test_check_additivity_zero_witnesses():
    layout1 = SystemLayout([("A", 2), ("B", 2)])
    layout2 = SystemLayout([("A2", 2), ("B2", 2)])
    e00 = np.zeros(4)
    e00[0] = 1.0
    w1 = separable_flag_extension([(1.0, PureState(layout1, e00))], "E")
    w2 = separable_flag_extension([(1.0, PureState(layout2, e00))], "E2")
    res = check_additivity(w1, w2)
    assert res.passed and abs(res.lhs) < 1e-9


def test_check_superadditivity_product_case():
    rng = np.random.default_rng(3)
    l1 = SystemLayout([("A", 2), ("B", 2), ("E", 2)])
    s1 = DensityOperator(l1, random_density(rng, 8, 4))
    l2 = SystemLayout([("A2", 2), ("B2", 2)])
    s2 = DensityOperator(l2, random_density(rng, 4, 2))
    rho = tensor(s1, s2)
    res = check_superadditivity(rho)
    assert res.passed


def test_check_superadditivity_ghz_variant():
    # GHZ on (A, B, E) extended by product qubits on (A2, B2)
    rng = np.random.default_rng(4)
    stretch = tensor(
        ghz_state(),
        tensor(
            DensityOperator(SystemLayout([("A2", 2)]), random_density(rng, 2, 1)),
            DensityOperator(SystemLayout([("B2", 2)]), random_density(rng, 2, 2)),
        ),
    )
    assert check_superadditivity(stretch).passed


def test_check_superadditivity_random_sweep():
    layout = SystemLayout([("A", 2), ("A2", 2), ("B", 2), ("B2", 2), ("E", 2)])
    rng = np.random.default_rng(5)
    for i in range(20):
        rho = DensityOperator(layout, random_density(rng, 32, int(rng.integers(1, 33))))
        assert check_superadditivity(rho).passed


def test_check_bound_chain_bell():
    res = check_bound_chain(bell_state(), OptimizerConfig(d_env=1, restarts=1, max_iters=5, seed=0))
    assert res.passed
    assert abs(res.lhs - 1.0) < 1e-6 and abs(res.rhs - 1.0) < 1e-6


def test_check_bound_chain_antisym():
    res = check_bound_chain(
        antisym_qutrit_state(),
        OptimizerConfig(d_env=1, restarts=2, max_iters=10, seed=0),
    )
    assert res.passed
    assert abs(res.lhs) < 1e-6          # hashing bound vanishes here
    assert abs(res.rhs - 1.0) < 5e-3    # formation bound


def test_check_distillation_exact_target():
    layout = SystemLayout([("A", 2), ("B", 2)])
    res = check_distillation_estimate(bell_state(), 2, n_channels=4, seed=0)
    assert res.passed
    assert abs(res.lhs - 1.0) < 1e-9 and abs(res.rhs - 1.0) < 1e-9


def test_check_distillation_depolarized_bell():
    q = 0.05 / 1.5  # trace distance of this mixture to the target is 1.5 q
    layout = SystemLayout([("A", 2), ("B", 2)])
    m = (1 - q) * bell_state().matrix + q * np.eye(4) / 4
    sigma = DensityOperator(layout, m)
    res = check_distillation_estimate(sigma, 2, n_channels=4, seed=1)
    assert res.passed
    assert "delta=0.05" in res.inputs


def test_check_distillation_support_violation():
    layout = SystemLayout([("A", 3), ("B", 3)])
    rho = DensityOperator.maximally_mixed(layout)
    with pytest.raises(InvariantViolation):
        check_distillation_estimate(rho, 2)


def test_check_distillation_delta_too_large():
    layout = SystemLayout([("A", 2), ("B", 2)])
    m = 0.3 * bell_state().matrix + 0.7 * np.eye(4) / 4
    with pytest.raises(InvariantViolation):
        check_distillation_estimate(DensityOperator(layout, m), 2)


def test_run_suite_manifest_and_results():
    manifest, results = run_suite("entropy", seed=0, n=10)
    assert manifest["suite"] == "entropy" and manifest["n"] == 10
    assert len(results) == 10 and all(r.passed for r in results)
    with pytest.raises(ValueError):
        run_suite("nonsense")


def test_checkresult_json_line():
    res = check_ssa(ghz_state(), inputs="ghz")
    obj = json.loads(res.to_json())
    assert obj["name"] == "ssa" and obj["passed"] is True
    assert set(obj) == {"name", "inputs", "lhs", "rhs", "margin", "passed"}
