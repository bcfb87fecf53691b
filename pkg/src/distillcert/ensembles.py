"""Deterministic generators for test fixtures and experiment inputs.

Everything is a pure function of (parameters, seed); reruns are
bit-identical. Structured families (sigma3, planted-product states) are
emitted as uniform mixtures over a subspace whose marginals have been
scaled to the identity, which is the normal form the certification
pipeline reduces to; without that scaling such states terminate early at
the reduction-criterion branch instead of exercising their intended
structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg
from .canonical import Sigma3Params, sigma3_vectors
from .errors import BadParams, BadRank, DegenerateParams
from .statecore import state_from_matrix


@dataclass(frozen=True)
class WernerParams:
    """Two-parameter isotropic-swap family on N x N."""

    n: int
    a: float
    b: float


@dataclass(frozen=True)
class Eq15Params:
    """Rank-four 3x3 family: two product eigenvectors sharing the first
    A factor plus two arbitrary orthonormal completions."""

    lambdas: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lambdas", np.asarray(self.lambdas, dtype=float).reshape(4))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=complex).reshape(3, 3))
        object.__setattr__(self, "d", np.asarray(self.d, dtype=complex).reshape(3, 3))


def werner(params):
    """Werner state on N x N, built from the antisymmetric projector.

    Unnormalized form: (a+b) I - 2b P_anti; spectrum a+b on the symmetric
    subspace and a-b on the antisymmetric one.
    """
    n, a, b = params.n, params.a, params.b
    if n < 2:
        raise BadParams("n must be at least 2")
    if not (a > 0 and b < 0 and a + b >= 0):
        raise BadParams("requires a > 0, b < 0, a + b >= 0")
    d = n * n
    mat = (a + b) * np.eye(d, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            v = np.zeros(d, dtype=complex)
            v[i * n + j] = 1.0 / np.sqrt(2.0)
            v[j * n + i] = -1.0 / np.sqrt(2.0)
            mat -= 2.0 * b * np.outer(v, np.conj(v))
    return state_from_matrix(mat, (n, n), normalize=True)


def tiles_upb_state():
    """Rank-4 PPT entangled 3x3 state from the five-tile unextendible
    product basis: (I - sum_k |u_k><u_k|) / 4."""
    e = np.eye(3, dtype=complex)
    s2 = 1.0 / np.sqrt(2.0)
    ones = (e[0] + e[1] + e[2]) / np.sqrt(3.0)
    tiles = [
        np.kron(e[0], (e[0] - e[1]) * s2),
        np.kron(e[2], (e[1] - e[2]) * s2),
        np.kron((e[0] - e[1]) * s2, e[2]),
        np.kron((e[1] - e[2]) * s2, e[0]),
        np.kron(ones, ones),
    ]
    mat = np.eye(9, dtype=complex)
    for u in tiles:
        mat -= np.outer(u, np.conj(u))
    return state_from_matrix(mat / 4.0, (3, 3))


def _rank_r_from_rng(rng, dims, r, weight_floor=0.02):
    da, db = dims
    d = da * db
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    q, _ = np.linalg.qr(g)
    w = rng.dirichlet(np.ones(r))
    w = np.maximum(w, weight_floor)
    w = w / w.sum()
    mat = (q * w) @ np.conj(q.T)
    return state_from_matrix(mat, dims)


def random_rank_r(dims, r, seed):
    """Mixture of r random orthonormal pure vectors with floored
    Dirichlet weights; deterministic in (dims, r, seed)."""
    da, db = dims
    if not 1 <= r <= da * db:
        raise BadRank(f"rank {r} outside 1..{da * db}")
    rng = np.random.default_rng([17, da, db, r, int(seed)])
    return _rank_r_from_rng(rng, dims, r)


def rank3_npt_with_stats(seed, threshold=-1e-6):
    """Rejection-sample a rank-3 NPT 3x3 state; returns (state, rejections)."""
    rng = np.random.default_rng([23, int(seed)])
    rejections = 0
    while True:
        state = _rank_r_from_rng(rng, (3, 3), 3)
        val, _ = _linalg.min_pt_eig_raw(state.matrix, 3, 3, "A")
        if val < threshold:
            return state, rejections
        rejections += 1


def random_rank3_npt(seed):
    """Random rank-3 NPT 3x3 state (rejection-sampled, deterministic in seed)."""
    state, _ = rank3_npt_with_stats(seed)
    return state


def uniform_marginal_span(vectors, dims, *, sides=("A", "B"), max_iter=2000, tol=1e-11):
    """Scale a spanned subspace with one-sided invertible operators until
    the uniform mixture over it has identity marginals on the given sides.

    Returns the resulting BipartiteState (projector / rank). Raises
    DegenerateParams when the alternating scaling does not converge.
    """
    da, db = dims
    basis = _linalg.orthonormalize(np.asarray(vectors, dtype=complex))
    r = basis.shape[1]
    if r != len(vectors):
        raise DegenerateParams("spanning vectors are linearly dependent")
    for _ in range(max_iter):
        proj = basis @ _linalg.dag(basis)
        worst = 0.0
        for side in sides:
            dim = da if side == "A" else db
            marg = _linalg.trace_out_raw(proj / r, da, db, side)
            err = float(np.max(np.abs(marg - np.eye(dim) / dim)))
            worst = max(worst, err)
        if worst < tol:
            state = state_from_matrix(proj / r, dims, normalize=True)
            return state
        for side in sides:
            dim = da if side == "A" else db
            proj = basis @ _linalg.dag(basis)
            marg = _linalg.trace_out_raw(proj / r, da, db, side)
            f = _linalg.inv_sqrt_psd(dim * marg)
            if f is None:
                raise DegenerateParams("marginal became singular during scaling")
            op = np.kron(f, np.eye(db)) if side == "A" else np.kron(np.eye(da), f)
            basis = _linalg.orthonormalize((op @ basis).T)
    raise DegenerateParams("marginal scaling did not converge")


def sigma3_state(params, *, normal_form=False):
    """State of the canonical rank-3 family.

    Default: the equal-weight mixture of the three canonical vectors,
    B-filtered so the B marginal is I/3 (a faithful family member, the
    input the canonicalizer expects for round trips).

    normal_form=True instead returns the uniform mixture over the span
    with both marginals scaled to the identity; that variant never fires
    the reduction shortcut, so it routes the certifier into the structural
    branches (product projection, compression terminals).
    """
    vecs = sigma3_vectors(params)
    sv = np.linalg.svd(vecs, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise DegenerateParams("canonical vectors are linearly dependent")
    if normal_form:
        return uniform_marginal_span(vecs, (3, 3))
    mat = vecs.T @ np.conj(vecs)
    mat /= np.real(np.trace(mat))
    rho_b = _linalg.trace_out_raw(mat, 3, 3, "B")
    f = _linalg.inv_sqrt_psd(3.0 * rho_b)
    if f is None:
        raise DegenerateParams("B marginal is rank deficient")
    op = np.kron(np.eye(3), f)
    mat = op @ mat @ _linalg.dag(op)
    mat /= np.real(np.trace(mat))
    return state_from_matrix(mat, (3, 3))


def random_sigma3_params(seed, scale=0.7):
    """Random canonical-family coefficients, deterministic in seed."""
    rng = np.random.default_rng([29, int(seed)])

    def cplx(shape=None):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    return Sigma3Params(
        x=scale * cplx(3), y=scale * cplx(3),
        alpha=complex(scale * cplx()), beta=complex(scale * cplx()),
    )


def eq15_state(params):
    """Rank-four 3x3 family state: lam0 |00><00| + lam1 |01><01| +
    lam2 |psi2><psi2| + lam3 |psi3><psi3|."""
    lam = params.lambdas
    if np.any(lam <= 0) or abs(lam.sum() - 1.0) > 1e-10:
        raise BadParams("lambdas must be positive and sum to 1")
    e = np.eye(3, dtype=complex)
    vecs = [
        np.kron(e[0], e[0]),
        np.kron(e[0], e[1]),
        params.c.reshape(-1),
        params.d.reshape(-1),
    ]
    gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    if np.max(np.abs(gram - np.eye(4))) > 1e-10:
        raise BadParams("the four eigenvectors are not orthonormal")
    mat = sum(l * np.outer(v, np.conj(v)) for l, v in zip(lam, vecs))
    return state_from_matrix(mat, (3, 3))


def random_eq15_params(seed):
    """Random orthonormal completion of {|00>, |01>} plus floored
    Dirichlet weights; deterministic in seed."""
    rng = np.random.default_rng([31, int(seed)])
    e = np.eye(3, dtype=complex)
    fixed = np.stack([np.kron(e[0], e[0]), np.kron(e[0], e[1])], axis=1)
    g = rng.standard_normal((9, 2)) + 1j * rng.standard_normal((9, 2))
    g -= fixed @ (_linalg.dag(fixed) @ g)
    q, _ = np.linalg.qr(g)
    lam = rng.dirichlet(np.ones(4))
    lam = np.maximum(lam, 0.05)
    lam = lam / lam.sum()
    return Eq15Params(lambdas=lam, c=q[:, 0].reshape(3, 3), d=q[:, 1].reshape(3, 3))


def _planted_product_state(dims, rank, rng):
    """Uniform mixture over |00> plus (rank-1) block vectors supported on
    B in {1, ..}, scaled so the B marginal is exactly I/d_b, then dressed
    with random local unitaries. The planted vector stays a product and
    the block structure survives the B-complement projection."""
    da, db = dims
    block = rng.standard_normal((rank - 1, da * (db - 1))) + 1j * rng.standard_normal(
        (rank - 1, da * (db - 1))
    )
    block_state = uniform_marginal_span(
        block, (da, db - 1), sides=("B",)
    )
    wb, vb = np.linalg.eigh(block_state.matrix)
    order = np.argsort(wb)[::-1][: rank - 1]
    vecs = [np.zeros(da * db, dtype=complex) for _ in range(rank)]
    vecs[0][0] = 1.0  # |00>
    for i, col in enumerate(order):
        embedded = vb[:, col].reshape(da, db - 1)
        vecs[i + 1] = np.concatenate(
            [np.zeros((da, 1)), embedded], axis=1
        ).reshape(-1)
    ua = _haar_unitary(rng, da)
    ub = _haar_unitary(rng, db)
    op = np.kron(ua, ub)
    mat = sum(np.outer(op @ v, np.conj(op @ v)) for v in vecs) / rank
    return state_from_matrix(mat, dims)


def _haar_unitary(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _routes_to_product_branch(state):
    """The planted fixtures must be NPT; the filtered-side marginal is
    exactly uniform by construction, so the structural pipeline reaches
    the product branch for every NPT draw."""
    val, _ = _linalg.min_pt_eig_raw(state.matrix, state.dim_a, state.dim_b, "A")
    return val < -1e-6


def rank3_with_product_in_range(seed):
    """Rank-3 NPT 3x3 state with B marginal I/3, flat spectrum, and a
    planted product vector in its range; routes to the product branch."""
    rng = np.random.default_rng([37, int(seed)])
    while True:
        try:
            state = _planted_product_state((3, 3), 3, rng)
        except DegenerateParams:
            continue
        if _routes_to_product_branch(state):
            return state


def rank4_with_product_in_range(dims, seed):
    """Rank-4 NPT state (3x4, 4x3, or 4x4) with the larger-side marginal
    uniform and a planted product vector in its range."""
    da, db = dims
    if (da, db) not in ((3, 4), (4, 4), (4, 3)):
        raise BadParams(f"unsupported dims {dims}")
    rng = np.random.default_rng([41, da, db, int(seed)])
    transpose = db < da
    work = (db, da) if transpose else (da, db)
    while True:
        try:
            state = _planted_product_state(work, 4, rng)
        except DegenerateParams:
            continue
        if transpose:
            mat = state.matrix.reshape(work[0], work[1], work[0], work[1])
            mat = mat.transpose(1, 0, 3, 2).reshape(da * db, da * db)
            state = state_from_matrix(mat, dims)
        if _routes_to_product_branch(state):
            return state
