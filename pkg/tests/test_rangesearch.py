import numpy as np
import pytest

from distillcert.errors import AllRootsRankOne, BadDims
from distillcert.rangesearch import (
    AmbiguousResidualWarning,
    enumerate_rank1_in_span,
    find_product_vector,
    find_schmidt_rank2_combo,
    range_basis,
)
from distillcert.statecore import LocalOperator, PureVector, apply_local

from conftest import kron_vec, random_ilo, random_state


def pv(arr, dims):
    return PureVector.from_array(np.asarray(arr, dtype=complex), dims)


def test_range_basis_pure(bell_phi_plus):
    rb = range_basis(bell_phi_plus)
    assert len(rb) == 1
    overlap = abs(np.vdot(rb[0].amplitudes, [1, 0, 0, 1] / np.sqrt(2)))
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_range_basis_reconstructs_support():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = random_state(rng, (3, 3), 3)
        rb = range_basis(s)
        assert len(rb) == 3
        proj = sum(np.outer(b.amplitudes, b.amplitudes.conj()) for b in rb)
        assert np.max(np.abs(proj @ s.matrix @ proj - s.matrix)) < 1e-9


def test_find_product_sum_difference_basis():
    b0 = pv([1, 0, 0, 1], (2, 2))
    b1 = pv([1, 0, 0, -1], (2, 2))
    out = find_product_vector([b0, b1])
    assert out.found
    assert out.residual <= 1e-12
    # the found vector is |00> or |11> up to phase
    amps = np.abs(out.vector.amplitudes)
    assert amps[0] == pytest.approx(1.0, abs=1e-6) or amps[3] == pytest.approx(1.0, abs=1e-6)


def test_find_product_single_antisymmetric_vector():
    v = pv([0, 1, -1, 0], (2, 2))
    out = find_product_vector([v])
    assert not out.found
    assert out.residual == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_find_product_tiles_range_not_found():
    from distillcert.ensembles import tiles_upb_state

    rb = range_basis(tiles_upb_state())
    assert len(rb) == 4
    out = find_product_vector(rb)
    assert not out.found
    assert out.residual > 1e-3


@pytest.mark.slow
def test_tiles_residual_against_dense_random_oracle():
    from distillcert.ensembles import tiles_upb_state

    rb = range_basis(tiles_upb_state())
    mats = np.stack([b.amplitudes for b in rb]).reshape(4, 3, 3)
    rng = np.random.default_rng(99)
    best = np.inf
    for _ in range(10):
        c = rng.standard_normal((100_000, 4)) + 1j * rng.standard_normal((100_000, 4))
        c /= np.linalg.norm(c, axis=1, keepdims=True)
        combos = np.tensordot(c, mats, axes=(1, 0))
        sv = np.linalg.svd(combos, compute_uv=False)
        best = min(best, float(sv[:, 1].min()))
    # a million random points agree there is no product vector
    assert best > 1e-3
    out = find_product_vector(rb)
    assert out.residual <= best + 1e-9


def test_found_vector_lies_in_span():
    rng = np.random.default_rng(5)
    for seed in range(5):
        from distillcert.ensembles import rank3_with_product_in_range

        s = rank3_with_product_in_range(seed + 1)
        rb = range_basis(s)
        out = find_product_vector(rb)
        assert out.found
        flat = np.stack([b.amplitudes for b in rb])
        coeffs = np.conj(flat) @ out.vector.amplitudes
        proj = coeffs @ flat
        assert np.linalg.norm(proj - out.vector.amplitudes) < 1e-8
        # reported combination reproduces the vector
        rebuilt = out.combination @ flat
        rebuilt /= np.linalg.norm(rebuilt)
        assert abs(abs(np.vdot(rebuilt, out.vector.amplitudes)) - 1) < 1e-8


def _dressing_trial(rng, trial):
    from distillcert.ensembles import rank3_with_product_in_range, random_rank3_npt

    if trial % 2 == 0:
        s = rank3_with_product_in_range(trial + 1)
    else:
        s = random_rank3_npt(trial + 1)
    rb = range_basis(s)
    base = find_product_vector(rb)
    op_a = LocalOperator("A", random_ilo(rng, 3), "ilo")
    op_b = LocalOperator("B", random_ilo(rng, 3), "ilo")
    dressed, _ = apply_local(s, op_a, op_b)
    out = find_product_vector(range_basis(dressed))
    assert out.found == base.found


def test_find_product_invariant_under_local_dressing():
    rng = np.random.default_rng(7)
    for trial in range(12):
        _dressing_trial(rng, trial)


@pytest.mark.slow
def test_find_product_invariant_under_local_dressing_full():
    rng = np.random.default_rng(7)
    for trial in range(100):
        _dressing_trial(rng, trial)


def test_find_product_rejects_bad_dims():
    with pytest.raises(BadDims):
        find_product_vector([np.ones(6) / np.sqrt(6)])
    with pytest.raises(BadDims):
        find_product_vector([np.ones(10) / np.sqrt(10)], dims=(2, 5))


def test_schmidt_rank2_combo_diagonal_basis():
    basis = [
        pv(kron_vec(np.eye(3)[i], np.eye(3)[i]), (3, 3)) for i in range(3)
    ]
    vec, coeffs = find_schmidt_rank2_combo(basis)
    m = vec.reshaped()
    assert abs(np.linalg.det(m)) <= 1e-9
    sv = np.linalg.svd(m, compute_uv=False)
    assert sv[1] > 1e-7


def test_schmidt_rank2_member_passthrough():
    e = np.eye(3)
    member = pv(kron_vec(e[0], e[0]) + kron_vec(e[1], e[1]), (3, 3))
    others = [pv(kron_vec(e[2], e[2]), (3, 3)), pv(kron_vec(e[0], e[1]), (3, 3))]
    vec, _ = find_schmidt_rank2_combo([member] + others)
    sv = np.linalg.svd(vec.reshaped(), compute_uv=False)
    assert sv[1] > 1e-7
    assert sv[2] <= 1e-9


def test_schmidt_rank2_random_frames_svd_oracle():
    rng = np.random.default_rng(11)
    for _ in range(15):
        g = rng.standard_normal((9, 3)) + 1j * rng.standard_normal((9, 3))
        q, _ = np.linalg.qr(g)
        basis = [pv(q[:, i], (3, 3)) for i in range(3)]
        vec, coeffs = find_schmidt_rank2_combo(basis)
        sv = np.linalg.svd(vec.reshaped(), compute_uv=False)
        assert abs(np.linalg.det(vec.reshaped())) <= 1e-9
        assert sv[1] >= 1e-7
        # the combination reproduces the returned vector
        flat = np.stack([b.amplitudes for b in basis])
        rebuilt = coeffs @ flat
        rebuilt /= np.linalg.norm(rebuilt)
        assert abs(abs(np.vdot(rebuilt, vec.amplitudes)) - 1) < 1e-10


def test_schmidt_rank2_all_products_raises():
    e = np.eye(3)
    basis = [pv(kron_vec(e[0], e[j]), (3, 3)) for j in range(3)]
    with pytest.raises(AllRootsRankOne):
        find_schmidt_rank2_combo(basis)


def test_enumerate_rank1_pencil_2x3():
    # three products mixed into a rank-3 separable operator on C2 x C3
    rng = np.random.default_rng(13)
    prods = []
    for _ in range(3):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        prods.append(np.outer(a / np.linalg.norm(a), b / np.linalg.norm(b)))
    sigma = sum(np.outer(p.reshape(-1), p.reshape(-1).conj()) for p in prods)
    w, v = np.linalg.eigh(sigma)
    basis = np.stack([v[:, -1 - i].reshape(2, 3) for i in range(3)])
    coeffs = enumerate_rank1_in_span(basis)
    assert len(coeffs) == 3
    # each recovered direction matches one of the planted products
    for c in coeffs:
        m = np.tensordot(c, basis, axes=(0, 0))
        m /= np.linalg.norm(m)
        overlaps = [abs(np.vdot(m.reshape(-1), p.reshape(-1))) for p in prods]
        assert max(overlaps) > 1 - 1e-8


def test_enumerate_rank1_quadratic_k2():
    rng = np.random.default_rng(17)
    a1 = np.outer([1, 0], rng.standard_normal(3)).astype(complex)
    a2 = np.outer([0, 1], rng.standard_normal(3)).astype(complex)
    # span{a1, a2} has exactly the two coordinate products
    coeffs = enumerate_rank1_in_span(np.stack([a1 + a2, a1 - a2]))
    assert len(coeffs) == 2


def test_ambiguous_band_warns():
    # plant a *near* product vector so the best residual lands between
    # the found and not-found thresholds
    rng = np.random.default_rng(19)
    eps = 3e-6
    a = np.array([1.0, 0, 0], dtype=complex)
    b = np.array([1.0, 0, 0], dtype=complex)
    near = kron_vec(a, b) + eps * kron_vec([0, 1, 0], [0, 1, 0])
    near /= np.linalg.norm(near)
    g = rng.standard_normal((9, 2)) + 1j * rng.standard_normal((9, 2))
    g -= np.outer(near, np.conj(near) @ g)
    q, _ = np.linalg.qr(g)
    basis = [pv(near, (3, 3)), pv(q[:, 0], (3, 3)), pv(q[:, 1], (3, 3))]
    with pytest.warns(AmbiguousResidualWarning):
        out = find_product_vector(basis)
    assert not out.found
    assert out.ambiguous
    assert 1e-7 < out.residual < 1e-4
