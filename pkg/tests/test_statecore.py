import numpy as np
import pytest

from distillcert.errors import DimensionMismatch, InvariantViolation, NullOutcome
from distillcert.statecore import (
    BipartiteState,
    HermitizationWarning,
    LocalOperator,
    PureVector,
    apply_local,
    partial_trace,
    partial_transpose,
    pure_state,
    rank_of,
    schmidt_decompose,
    spectral_decompose,
    state_from_matrix,
)

from conftest import kron_vec, random_ilo, random_state


def test_state_invariants_reject_bad_trace():
    with pytest.raises(InvariantViolation, match="trace"):
        BipartiteState(2, 2, 0.9 * np.eye(4) / 4)


def test_state_invariants_reject_non_psd():
    m = np.diag([0.6, 0.6, -0.1, -0.1]).astype(complex)
    with pytest.raises(InvariantViolation, match="psd"):
        BipartiteState(2, 2, m)


def test_state_symmetrizes_with_warning():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 1e-6  # non-Hermitian perturbation
    with pytest.warns(HermitizationWarning):
        s = BipartiteState(2, 2, m)
    assert np.max(np.abs(s.matrix - s.matrix.conj().T)) < 1e-15


def test_pure_vector_norm_check():
    with pytest.raises(InvariantViolation, match="norm"):
        PureVector(2, 2, np.array([1.0, 1.0, 0, 0]))
    v = PureVector.from_array([1.0, 1.0, 0, 0], (2, 2))
    assert abs(np.linalg.norm(v.amplitudes) - 1) < 1e-14


def test_apply_local_identity(bell_phi_plus):
    out, p = apply_local(bell_phi_plus, None, None)
    assert p == pytest.approx(1.0)
    assert np.allclose(out.matrix, bell_phi_plus.matrix)


def test_apply_local_projector_on_phi_plus(bell_phi_plus):
    # square rank-1 projector on A keeps dims, probability from Schmidt symmetry
    proj = LocalOperator("A", np.diag([1.0, 0.0]).astype(complex), "general")
    out, p = apply_local(bell_phi_plus, proj, None)
    assert p == pytest.approx(0.5, abs=1e-12)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = 1.0
    assert np.allclose(out.matrix, expected, atol=1e-12)


def test_apply_local_flat_fixture_projection(flat_product_range_state):
    # projecting B onto span{|1>,|2>} keeps the two entangled vectors
    from conftest import FLAT_FIXTURE_ANGLE

    rows = np.array([[0, 1, 0], [0, 0, 1]], dtype=complex)
    out, p = apply_local(flat_product_range_state, None, LocalOperator("B", rows, "projector"))
    assert p == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert out.dims == (3, 2)
    e = np.eye(3)
    c, s = np.cos(FLAT_FIXTURE_ANGLE), np.sin(FLAT_FIXTURE_ANGLE)
    v1 = c * kron_vec(e[0], [1, 0]) + s * kron_vec(e[1], [0, 1])
    v2 = s * kron_vec(e[2], [1, 0]) + c * kron_vec(e[0], [0, 1])
    expected = 0.5 * np.outer(v1, v1.conj()) + 0.5 * np.outer(v2, v2.conj())
    assert np.max(np.abs(out.matrix - expected)) < 1e-12


def test_apply_local_rescales_large_operators(bell_phi_plus):
    big = LocalOperator("A", 3.0 * np.eye(2, dtype=complex), "ilo")
    out, p = apply_local(bell_phi_plus, big, None)
    assert p == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(out.matrix, bell_phi_plus.matrix)


def test_apply_local_null_outcome():
    kill = LocalOperator("A", np.array([[0.0, 1.0]]), "projector")
    s = pure_state(np.array([1, 0, 0, 0]), (2, 2))
    with pytest.raises(NullOutcome):
        apply_local(s, kill, None)


def test_apply_local_dimension_checks(bell_phi_plus):
    wide = LocalOperator("B", np.eye(3, dtype=complex), "ilo")
    with pytest.raises(DimensionMismatch):
        apply_local(bell_phi_plus, None, wide)
    with pytest.raises(DimensionMismatch):
        apply_local(bell_phi_plus, wide, None)  # side B operator in slot A


def test_partial_trace_examples(bell_phi_plus):
    s = pure_state(np.array([1, 0, 0, 0]), (2, 2))  # |00>
    assert np.allclose(partial_trace(s, "A"), np.diag([1.0, 0.0]))
    assert np.allclose(partial_trace(bell_phi_plus, "B"), np.eye(2) / 2)


def test_partial_trace_against_loop_oracle():
    rng = np.random.default_rng(7)
    for _ in range(10):
        s = random_state(rng, (3, 4), 5)
        # independent entry-wise oracle: sum_i (<i| x I) rho (|i> x I)
        got_b = partial_trace(s, "B")
        oracle = np.zeros((4, 4), dtype=complex)
        for i in range(3):
            bra = np.zeros((1, 3), dtype=complex)
            bra[0, i] = 1.0
            k = np.kron(bra, np.eye(4))
            oracle += k @ s.matrix @ k.conj().T
        assert np.max(np.abs(got_b - oracle)) < 1e-12


def test_partial_transpose_product_state():
    s = pure_state(np.array([1, 0, 0, 0]), (2, 2))
    assert np.array_equal(partial_transpose(s, "A"), s.matrix)


def test_partial_transpose_phi_plus_spectrum(bell_phi_plus):
    # direct 4x4 eigensolve oracle
    eigs = np.sort(np.linalg.eigvalsh(partial_transpose(bell_phi_plus, "A")))
    assert np.allclose(eigs, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_involution_exact():
    rng = np.random.default_rng(11)
    for _ in range(20):
        s = random_state(rng, (3, 3), 4)
        for side in ("A", "B"):
            pt = partial_transpose(s, side)
            twice = pt.reshape(3, 3, 3, 3)
            twice = (
                twice.transpose(2, 1, 0, 3) if side == "A" else twice.transpose(0, 3, 2, 1)
            ).reshape(9, 9)
            assert np.array_equal(twice, s.matrix)


def test_partial_transpose_preserves_trace_and_hermiticity():
    rng = np.random.default_rng(13)
    s = random_state(rng, (2, 4), 3)
    pt = partial_transpose(s, "B")
    assert abs(np.trace(pt) - 1) < 1e-14
    assert np.max(np.abs(pt - pt.conj().T)) < 1e-14


def test_schmidt_examples():
    v = PureVector.from_array(kron_vec([1, 0], [1, 0]), (2, 2))
    c, _, _ = schmidt_decompose(v)
    assert np.allclose(c, [1.0, 0.0], atol=1e-14)
    v = PureVector.from_array([1, 0, 0, 1], (2, 2))
    c, _, _ = schmidt_decompose(v)
    assert np.allclose(c, [1 / np.sqrt(2)] * 2, atol=1e-14)


def test_schmidt_matches_svd_oracle_and_rebuilds():
    rng = np.random.default_rng(17)
    for _ in range(25):
        raw = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        v = PureVector.from_array(raw, (3, 4))
        coeffs, a_basis, b_basis = schmidt_decompose(v)
        oracle = np.linalg.svd(v.amplitudes.reshape(3, 4), compute_uv=False)
        assert np.max(np.abs(coeffs - oracle)) < 1e-12
        rebuilt = sum(
            c * kron_vec(a, b) for c, a, b in zip(coeffs, a_basis, b_basis)
        )
        assert np.linalg.norm(rebuilt - v.amplitudes) < 1e-10
        assert abs(np.sum(coeffs**2) - 1) < 1e-12


def test_rank_of_examples(bell_phi_plus, flat_product_range_state):
    assert rank_of(bell_phi_plus) == 1
    assert rank_of(flat_product_range_state) == 3


def test_rank_of_random_mixtures():
    rng = np.random.default_rng(19)
    for r in (2, 3, 4):
        for _ in range(10):
            s = random_state(rng, (3, 3), r)
            assert rank_of(s) == r


def test_spectral_decompose_maximally_mixed():
    s = BipartiteState(2, 2, np.eye(4, dtype=complex) / 4)
    dec = spectral_decompose(s)
    assert np.allclose(dec.eigenvalues, 0.25)


def test_spectral_decompose_flat_fixture(flat_product_range_state):
    dec = spectral_decompose(flat_product_range_state)
    assert np.allclose(dec.eigenvalues[:3], 1 / 3, atol=1e-12)
    assert np.allclose(dec.eigenvalues[3:], 0.0, atol=1e-12)


def test_spectral_decompose_reconstructs():
    rng = np.random.default_rng(23)
    for _ in range(10):
        s = random_state(rng, (2, 3), 4)
        dec = spectral_decompose(s)
        rebuilt = sum(
            lam * np.outer(v.amplitudes, v.amplitudes.conj())
            for lam, v in zip(dec.eigenvalues, dec.eigenvectors)
        )
        assert np.max(np.abs(rebuilt - s.matrix)) < 1e-10
        # orthonormality
        for i, vi in enumerate(dec.eigenvectors):
            for j, vj in enumerate(dec.eigenvectors):
                want = 1.0 if i == j else 0.0
                assert abs(np.vdot(vi.amplitudes, vj.amplitudes) - want) < 1e-10


def test_two_ilos_preserve_rank():
    rng = np.random.default_rng(29)
    for trial in range(1000):
        r = 1 + trial % 4
        s = random_state(rng, (3, 3), r)
        op_a = LocalOperator("A", random_ilo(rng, 3), "ilo")
        op_b = LocalOperator("B", random_ilo(rng, 3), "ilo")
        out, _ = apply_local(s, op_a, op_b)
        assert rank_of(out) == r


def test_marginal_transforms_covariantly():
    rng = np.random.default_rng(31)
    for _ in range(20):
        s = random_state(rng, (3, 3), 3)
        f = random_ilo(rng, 3)
        op = LocalOperator("B", f, "ilo")
        out, _ = apply_local(s, None, op)
        rho_b = partial_trace(s, "B")
        f_scaled = f / np.linalg.norm(f, 2)
        expected = f_scaled @ rho_b @ f_scaled.conj().T
        expected /= np.real(np.trace(expected))
        assert np.max(np.abs(partial_trace(out, "B") - expected)) < 1e-10


def test_state_from_matrix_normalize():
    s = state_from_matrix(np.eye(4) * 2.0, (2, 2), normalize=True)
    assert abs(np.trace(s.matrix) - 1) < 1e-14


def test_local_operator_kind_validation():
    with pytest.raises(InvariantViolation):
        LocalOperator("A", np.zeros((2, 2)), "general")
    with pytest.raises(InvariantViolation):
        LocalOperator("A", np.diag([1.0, 1e-14]).astype(complex), "ilo")
    with pytest.raises(InvariantViolation):
        LocalOperator("B", np.array([[1, 0], [0, 0.5]]).astype(complex), "unitary")
    with pytest.raises(InvariantViolation):
        LocalOperator("B", np.array([[1.0, 1.0]]) / 1.0, "projector")
    LocalOperator("B", np.array([[1.0, 1.0]]) / np.sqrt(2), "projector")
