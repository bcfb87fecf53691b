import numpy as np
import pytest

from distillcert.canonical import (
    Sigma3Params,
    canonicalize_sigma3,
    sigma3_matrix,
    sigma3_vectors,
)
from distillcert.ensembles import random_sigma3_params, sigma3_state
from distillcert.errors import PreconditionViolated, ProductInRange
from distillcert.statecore import BipartiteState, partial_trace

from conftest import kron_vec


def test_sigma3_vectors_shape_and_pattern():
    p = Sigma3Params(x=[0.1, 0.2, 0.3], y=[0.4, 0.5, 0.6], alpha=0.7, beta=0.8j)
    vecs = sigma3_vectors(p)
    assert vecs.shape == (3, 9)
    v0 = vecs[0].reshape(3, 3)
    assert v0[0, 0] == 1.0
    assert np.allclose(v0[0, 1:], 0) and np.allclose(v0[1, :], 0)
    assert np.allclose(v0[2, :], p.x)
    v2 = vecs[2].reshape(3, 3)
    assert v2[0, 2] == 1.0 and v2[1, 2] == 1.0
    assert np.allclose(v2[2, :], 0.7 * p.x + 0.8j * p.y)


@pytest.mark.parametrize("seed", [1, 2, 3, 5, 8, 13, 21, 34])
def test_round_trip_reproduces_state(seed):
    p = random_sigma3_params(seed)
    state = sigma3_state(p)
    params = canonicalize_sigma3(state)
    # the returned operators map the input onto the rebuilt canonical form
    ops = {op.side: op.matrix for op in params.ilos}
    k = np.kron(ops["A"], ops["B"])
    transformed = k @ state.matrix @ k.conj().T
    transformed /= np.trace(transformed)
    rebuilt = sigma3_matrix(params)
    rebuilt /= np.trace(rebuilt)
    assert np.max(np.abs(rebuilt - transformed)) < 1e-8


def test_canonical_ilos_invertible():
    p = random_sigma3_params(4)
    params = canonicalize_sigma3(sigma3_state(p))
    for op in params.ilos:
        smin = np.linalg.svd(op.matrix, compute_uv=False)[-1]
        assert smin > 1e-8


def test_canonical_output_support_pattern():
    p = random_sigma3_params(6)
    state = sigma3_state(p)
    params = canonicalize_sigma3(state)
    vecs = sigma3_vectors(params)
    # forced zero positions in the canonical vectors
    v0, v1, v2 = (v.reshape(3, 3) for v in vecs)
    assert abs(v0[0, 0] - 1) < 1e-12 and np.allclose(v0[1], 0)
    assert abs(v1[1, 1] - 1) < 1e-12 and np.allclose(v1[0], 0)
    assert abs(v2[0, 2] - 1) < 1e-12 and abs(v2[1, 2] - 1) < 1e-12
    assert np.allclose(v2[0, :2], 0) and np.allclose(v2[1, :2], 0)


def test_planted_product_raises_product_in_range():
    # x1 = x2 = 0 puts the product (|0> + x0|2>) (x) |0> into the range
    p = Sigma3Params(x=[0.4, 0.0, 0.0], y=[0.3, -0.2, 0.5], alpha=0.2, beta=0.1)
    state = sigma3_state(p)
    with pytest.raises((ProductInRange, PreconditionViolated)):
        canonicalize_sigma3(state)


def test_precondition_checks():
    mixed = BipartiteState(3, 3, np.eye(9, dtype=complex) / 9)
    with pytest.raises(PreconditionViolated):
        canonicalize_sigma3(mixed)  # rank 9, not 3

    # B marginal far from I/3
    e = np.eye(3)
    vecs = [kron_vec(e[i], e[0]) for i in range(3)]
    mat = sum(np.outer(v, v.conj()) for v in vecs) / 3
    skewed = BipartiteState(3, 3, mat)
    with pytest.raises(PreconditionViolated):
        canonicalize_sigma3(skewed)


def test_generator_b_marginal_is_uniform():
    for seed in (1, 9):
        state = sigma3_state(random_sigma3_params(seed))
        rho_b = partial_trace(state, "B")
        assert np.max(np.abs(rho_b - np.eye(3) / 3)) < 1e-9
