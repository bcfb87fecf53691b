import numpy as np
import pytest

from distillcert.statecore import BipartiteState


def kron_vec(a, b):
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dm(*weighted_vectors):
    """Density matrix from (weight, vector) pairs, normalized."""
    d = len(weighted_vectors[0][1])
    mat = np.zeros((d, d), dtype=complex)
    for w, v in weighted_vectors:
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        mat += w * np.outer(v, np.conj(v))
    return mat / np.real(np.trace(mat))


@pytest.fixture
def bell_phi_plus():
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return BipartiteState(2, 2, np.outer(v, v.conj()))


FLAT_FIXTURE_ANGLE = 0.6


def flat_fixture_vectors(t=FLAT_FIXTURE_ANGLE):
    """|00>, c|01> + s|12>, s|21> + c|02>: orthonormal, B marginal I/3,
    product vector |00> in the range, NPT for generic t.

    The second pair deliberately uses three A directions; pairs related
    by a B swap sit exactly on the positivity boundary."""
    e = np.eye(3)
    c, s = np.cos(t), np.sin(t)
    v0 = kron_vec(e[0], e[0])
    v1 = c * kron_vec(e[0], e[1]) + s * kron_vec(e[1], e[2])
    v2 = s * kron_vec(e[2], e[1]) + c * kron_vec(e[0], e[2])
    return v0, v1, v2


@pytest.fixture
def flat_product_range_state():
    v0, v1, v2 = flat_fixture_vectors()
    return BipartiteState(3, 3, dm((1, v0), (1, v1), (1, v2)))


def random_state(rng, dims, rank):
    da, db = dims
    d = da * db
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    q, _ = np.linalg.qr(g)
    w = rng.dirichlet(np.ones(rank))
    w = np.maximum(w, 0.05)
    w /= w.sum()
    return BipartiteState(da, db, (q * w) @ q.conj().T)


def random_ilo(rng, d, spread=2.0):
    """Invertible matrix with singular values in [1/spread, spread]."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u, _, vh = np.linalg.svd(g)
    s = np.exp(rng.uniform(-np.log(spread), np.log(spread), size=d))
    return (u * s) @ vh
