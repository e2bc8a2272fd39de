import json

import numpy as np
import pytest

from squash.catalog import antisym_qutrit_state, antisym_singlet_vectors, bell_state
from squash.core import (
    DensityOperator,
    Instrument,
    PureState,
    QuantumChannel,
    SystemLayout,
    apply_channel,
    apply_instrument,
    fidelity,
    partial_trace,
    permute_systems,
    purify,
    random_state,
    state_from_json,
    state_to_json,
    tensor,
    trace_distance,
)
from squash.errors import InvariantViolation, LabelClash, ShapeError, UnknownSystem

from conftest import random_density


def qubit(label):
    return SystemLayout([(label, 2)])


def ket_density(label, index, dim=2):
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1.0
    return DensityOperator(qubit(label) if dim == 2 else SystemLayout([(label, dim)]), m)


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

def test_layout_invariants():
    with pytest.raises(LabelClash):
        SystemLayout([("A", 2), ("A", 3)])
    with pytest.raises(ShapeError):
        SystemLayout([("A", 0)])
    layout = SystemLayout([("A", 2), ("B", 3)])
    assert layout.total_dim == 6
    assert layout.position("B") == 1
    with pytest.raises(UnknownSystem):
        layout.position("C")


def test_density_operator_invariants():
    layout = qubit("A")
    with pytest.raises(InvariantViolation):
        DensityOperator(layout, np.array([[0.5, 0.5], [0.1, 0.5]]))  # not hermitian
    with pytest.raises(InvariantViolation):
        DensityOperator(layout, np.array([[0.9, 0.0], [0.0, 0.0]]))  # trace != 1
    with pytest.raises(InvariantViolation):
        DensityOperator(layout, np.array([[1.1, 0.0], [0.0, -0.1]]))  # negative eig
    with pytest.raises(ShapeError):
        DensityOperator(layout, np.eye(3) / 3)


def test_pure_state_norm():
    with pytest.raises(InvariantViolation):
        PureState(qubit("A"), np.array([1.0, 1.0]))


def test_channel_isometry_invariant():
    with pytest.raises(InvariantViolation):
        QuantumChannel(2, 2, 1, np.eye(2) * 0.5)
    ch = QuantumChannel.identity(3)
    assert ch.d_in == ch.d_out == 3 and ch.d_env == 1


def test_instrument_completeness():
    k0 = np.diag([1.0, 0.5])
    with pytest.raises(InvariantViolation):
        Instrument([[k0]])


# ---------------------------------------------------------------------------
# tensor
# ---------------------------------------------------------------------------

def test_tensor_maximally_mixed():
    a = DensityOperator.maximally_mixed(qubit("A"))
    b = DensityOperator.maximally_mixed(qubit("B"))
    ab = tensor(a, b)
    assert np.allclose(ab.matrix, np.eye(4) / 4)
    assert ab.layout.labels == ("A", "B")


def test_tensor_basis_projectors():
    ab = tensor(ket_density("A", 0), ket_density("B", 1))
    expect = np.zeros((4, 4))
    expect[1, 1] = 1.0
    assert np.allclose(ab.matrix, expect)


def test_tensor_bell_pair_rank_one():
    # oracle: eigenvalues of the explicit Kronecker product
    b1 = bell_state()
    b2 = DensityOperator(SystemLayout([("A2", 2), ("B2", 2)]), b1.matrix)
    prod = tensor(b1, b2)
    kron = np.kron(b1.matrix, b1.matrix)
    assert np.allclose(prod.matrix, kron)
    evals = np.linalg.eigvalsh(kron)
    assert np.sum(evals > 1e-12) == 1
    lam = evals[evals > 1e-12]
    assert abs(float(-(lam * np.log2(lam)).sum())) < 1e-12


def test_tensor_label_clash():
    with pytest.raises(LabelClash):
        tensor(bell_state(), bell_state())


# ---------------------------------------------------------------------------
# partial trace
# ---------------------------------------------------------------------------

def test_partial_trace_bell_marginal():
    red = partial_trace(bell_state(), "A")
    assert np.allclose(red.matrix, np.eye(2) / 2)


def test_partial_trace_product_extension():
    rng = np.random.default_rng(3)
    ab = DensityOperator(SystemLayout([("A", 2), ("B", 2)]), random_density(rng, 4, 3))
    e = DensityOperator(SystemLayout([("E", 3)]), random_density(rng, 3, 2))
    full = tensor(ab, e)
    red = partial_trace(full, ("A", "B"))
    assert np.max(np.abs(red.matrix - ab.matrix)) < 1e-12


def test_partial_trace_antisym_marginal():
    # oracle: direct matrix computation from the three singlet vectors
    vecs = antisym_singlet_vectors()
    sigma = sum(np.outer(v, v.conj()) for v in vecs) / 3.0
    red_manual = np.zeros((3, 3), dtype=complex)
    t = sigma.reshape(3, 3, 3, 3)
    for b in range(3):
        red_manual += t[:, b, :, b]
    assert np.allclose(red_manual, np.eye(3) / 3)
    red = partial_trace(antisym_qutrit_state(), "A")
    assert np.allclose(red.matrix, np.eye(3) / 3, atol=1e-12)


def test_partial_trace_unknown_label():
    with pytest.raises(UnknownSystem):
        partial_trace(bell_state(), "Q")


def test_partial_trace_of_tensor_is_identity():
    rng = np.random.default_rng(11)
    for i in range(10):
        a = DensityOperator(SystemLayout([("A", 2), ("X", 2)]), random_density(rng, 4, 4))
        b = DensityOperator(SystemLayout([("B", 3)]), random_density(rng, 3, 3))
        back = partial_trace(tensor(a, b), ("A", "X"))
        assert np.max(np.abs(back.matrix - a.matrix)) < 1e-12


# ---------------------------------------------------------------------------
# purification
# ---------------------------------------------------------------------------

def test_purify_maximally_mixed():
    rho = DensityOperator.maximally_mixed(qubit("A"))
    psi = purify(rho, "C")
    assert psi.layout.dim_of("C") == 2
    red = partial_trace(psi.to_density(), "A")
    assert np.max(np.abs(red.matrix - rho.matrix)) < 1e-9


def test_purify_pure_state_rank_one():
    psi = purify(bell_state(), "C")
    assert psi.layout.dim_of("C") == 1


def test_purify_antisym_rank_three():
    sigma = antisym_qutrit_state()
    psi = purify(sigma, "C")
    assert psi.layout.dim_of("C") == 3
    red = partial_trace(psi.to_density(), ("A", "B"))
    assert np.max(np.abs(red.matrix - sigma.matrix)) < 1e-9


def test_purify_then_trace_random():
    rng = np.random.default_rng(5)
    for i in range(10):
        layout = SystemLayout([("A", 2), ("B", 3)])
        rho = DensityOperator(layout, random_density(rng, 6, int(rng.integers(1, 7))))
        psi = purify(rho, "C")
        red = partial_trace(psi.to_density(), ("A", "B"))
        assert np.max(np.abs(red.matrix - rho.matrix)) < 1e-9


def test_purify_label_clash():
    with pytest.raises(LabelClash):
        purify(bell_state(), "A")


# ---------------------------------------------------------------------------
# distance and fidelity
# ---------------------------------------------------------------------------

def test_trace_distance_examples():
    b = bell_state()
    assert trace_distance(b, b) == 0.0
    assert abs(trace_distance(ket_density("A", 0), ket_density("A", 1)) - 2.0) < 1e-12
    # eigenvalues of I/2 - |0><0| are +-1/2, so the trace norm is 1
    mixed = DensityOperator.maximally_mixed(qubit("A"))
    assert abs(trace_distance(mixed, ket_density("A", 0)) - 1.0) < 1e-12
    with pytest.raises(ShapeError):
        trace_distance(mixed, bell_state())


def test_fidelity_examples():
    b = bell_state()
    assert abs(fidelity(b, b) - 1.0) < 1e-12
    assert fidelity(ket_density("A", 0), ket_density("A", 1)) < 1e-12
    mixed = DensityOperator.maximally_mixed(qubit("A"))
    assert abs(fidelity(mixed, ket_density("A", 0)) - 1 / np.sqrt(2)) < 1e-12


def test_fidelity_pure_overlap():
    rng = np.random.default_rng(17)
    layout = qubit("A")
    for _ in range(20):
        u = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        f = fidelity(PureState(layout, u).to_density(), PureState(layout, v).to_density())
        assert abs(f - abs(np.vdot(u, v))) < 1e-9


def test_fuchs_van_de_graaf():
    rng = np.random.default_rng(23)
    layout = SystemLayout([("A", 2), ("B", 2)])
    for i in range(200):
        r1 = DensityOperator(layout, random_density(rng, 4, int(rng.integers(1, 5))))
        r2 = DensityOperator(layout, random_density(rng, 4, int(rng.integers(1, 5))))
        f = fidelity(r1, r2)
        t = trace_distance(r1, r2)
        assert 1 - f <= t / 2 + 1e-9
        assert t / 2 <= np.sqrt(max(0.0, 1 - f * f)) + 1e-9


# ---------------------------------------------------------------------------
# channels and instruments
# ---------------------------------------------------------------------------

def test_apply_channel_identity():
    b = bell_state()
    out = apply_channel(QuantumChannel.identity(2), b, "B", "B")
    assert np.max(np.abs(out.matrix - b.matrix)) < 1e-12


def test_apply_channel_constant():
    rng = np.random.default_rng(29)
    rho = DensityOperator(SystemLayout([("A", 2), ("B", 2)]), random_density(rng, 4, 4))
    out = apply_channel(QuantumChannel.constant(2, 3), rho, "B", "F")
    marg = partial_trace(rho, "A")
    expect = np.kron(marg.matrix, np.diag([1.0, 0.0, 0.0]))
    assert out.layout.labels == ("A", "F")
    assert np.max(np.abs(out.matrix - expect)) < 1e-12


def test_apply_channel_dephasing_bell():
    # oracle: Kraus arithmetic with projectors P0, P1 on the second qubit
    b = DensityOperator(SystemLayout([("A", 2), ("C", 2)]), bell_state().matrix)
    out = apply_channel(QuantumChannel.dephasing(2), b, "C", "C")
    expect = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        p = np.zeros((2, 2))
        p[k, k] = 1.0
        lift = np.kron(np.eye(2), p)
        expect += lift @ b.matrix @ lift
    assert np.allclose(out.matrix, expect, atol=1e-12)
    assert np.allclose(partial_trace(out, "A").matrix, np.eye(2) / 2)


def test_apply_channel_dimension_mismatch():
    with pytest.raises(ShapeError):
        apply_channel(QuantumChannel.identity(3), bell_state(), "B", "B2")


def test_apply_instrument_projective_bell():
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    ins = Instrument([[p0], [p1]])
    outcomes = apply_instrument(ins, bell_state(), "A")
    probs = [p for p, _ in outcomes]
    assert np.allclose(probs, [0.5, 0.5])
    expect0 = np.zeros((4, 4))
    expect0[0, 0] = 1.0
    assert np.allclose(outcomes[0][1].matrix, expect0, atol=1e-12)


def test_apply_instrument_unitary():
    theta = 0.3
    u = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    ins = Instrument([[u]])
    rho = ket_density("A", 0)
    outcomes = apply_instrument(ins, rho, "A")
    assert len(outcomes) == 1
    p, st = outcomes[0]
    assert abs(p - 1.0) < 1e-12
    assert np.allclose(st.matrix, u @ rho.matrix @ u.conj().T)


def test_apply_instrument_amplitude_damping_split():
    # oracle: Kraus norms on I/2 with gamma = 0.36 give probabilities (0.82, 0.18)
    gamma = 0.36
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    ins = Instrument([[k0], [k1]])
    rho = DensityOperator.maximally_mixed(qubit("A"))
    outcomes = apply_instrument(ins, rho, "A")
    assert abs(outcomes[0][0] - 0.82) < 1e-12
    assert abs(outcomes[1][0] - 0.18) < 1e-12


def test_apply_instrument_mixture_property():
    rng = np.random.default_rng(31)
    layout = SystemLayout([("A", 2), ("B", 2)])
    for i in range(10):
        rho = DensityOperator(layout, random_density(rng, 4, 4))
        g1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        g2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        total = g1.conj().T @ g1 + g2.conj().T @ g2
        w, u = np.linalg.eigh(total)
        inv_sqrt = (u / np.sqrt(w)) @ u.conj().T
        ins = Instrument([[g1 @ inv_sqrt], [g2 @ inv_sqrt]])
        outcomes = apply_instrument(ins, rho, "A")
        assert abs(sum(p for p, _ in outcomes) - 1.0) < 1e-10
        mix = sum(p * st.matrix for p, st in outcomes)
        direct = np.zeros((4, 4), dtype=complex)
        for ks in ins.kraus_sets:
            for k in ks:
                lift = np.kron(k, np.eye(2))
                direct += lift @ rho.matrix @ lift.conj().T
        assert np.max(np.abs(mix - direct)) < 1e-10


# ---------------------------------------------------------------------------
# random states, permutation, serialization
# ---------------------------------------------------------------------------

def test_random_state_rank_one_is_pure():
    layout = SystemLayout([("A", 2), ("B", 2)])
    rho = random_state(layout, 1, seed=4)
    evals = np.linalg.eigvalsh(rho.matrix)
    assert np.sum(evals > 1e-12) == 1


def test_random_state_deterministic():
    layout = SystemLayout([("A", 2), ("B", 3)])
    r1 = random_state(layout, 4, seed=12)
    r2 = random_state(layout, 4, seed=12)
    assert np.array_equal(r1.matrix, r2.matrix)


def test_random_state_full_rank():
    layout = SystemLayout([("A", 2), ("B", 2)])
    rho = random_state(layout, 4, seed=8)
    assert float(np.linalg.eigvalsh(rho.matrix)[0]) > 0


def test_random_state_rank_out_of_range():
    with pytest.raises(ShapeError):
        random_state(qubit("A"), 3, seed=0)


def test_permute_systems_round_trip():
    rng = np.random.default_rng(37)
    layout = SystemLayout([("A", 2), ("B", 3), ("C", 2)])
    rho = DensityOperator(layout, random_density(rng, 12, 5))
    perm = permute_systems(rho, ("C", "A", "B"))
    assert perm.layout.labels == ("C", "A", "B")
    back = permute_systems(perm, ("A", "B", "C"))
    assert np.max(np.abs(back.matrix - rho.matrix)) < 1e-12
    assert abs(
        np.linalg.eigvalsh(perm.matrix)[0] - np.linalg.eigvalsh(rho.matrix)[0]
    ) < 1e-12


def test_state_json_round_trip():
    rng = np.random.default_rng(41)
    layout = SystemLayout([("A", 2), ("B", 3)])
    rho = DensityOperator(layout, random_density(rng, 6, 6))
    text = state_to_json(rho)
    back = state_from_json(text)
    assert back.layout == rho.layout
    assert np.array_equal(back.matrix, rho.matrix)
    assert state_to_json(back) == text


def test_state_json_rejects_malformed():
    with pytest.raises(ValueError):
        state_from_json(json.dumps({"layout": [{"label": "A", "dim": 2}]}))
    with pytest.raises(ValueError):
        state_from_json(json.dumps({"layout": [{"label": "A", "dim": 2}], "matrix": [[[1, 0]]]}))
