"""Subspace analysis: product vectors and Schmidt-rank-two combinations.

The product search is a hybrid: exact determinant roots along pencil
slices (square local dimensions), alternating least squares on the
bilinear membership conditions, and a 256-start simplex minimization of
the second singular value. Search-tier objectives run on the fast kernel;
every surviving candidate is re-scored with a full SVD before any verdict
is made, and the best few are polished against the accurate objective.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._neldermead import nelder_mead_batch
from .errors import AllRootsRankOne, BadDims
from .statecore import PureVector

FOUND_TOL = 1e-7
NOT_FOUND_TOL = 1e-4
DET_TOL = 1e-9
_NM_SEED = 707
_ALS_SEED = 1009
_LATTICE_SEED = 20240113
_N_STARTS = 256
_NM_MAX_ITER = 500


class AmbiguousResidualWarning(UserWarning):
    """Best residual fell between the found and not-found thresholds."""


@dataclass(frozen=True)
class ProductFinding:
    """Outcome of a product-vector search over a spanned subspace."""

    found: bool
    vector: PureVector | None
    factor_a: np.ndarray | None
    factor_b: np.ndarray | None
    residual: float
    combination: np.ndarray
    ambiguous: bool = False


def range_basis(state, tol=1e-9):
    """Orthonormal eigenvectors spanning the support of the state."""
    w, v = np.linalg.eigh(state.matrix)
    top = max(float(w[-1]), 0.0)
    keep = np.flatnonzero(w > tol * top)[::-1]
    return [PureVector.from_array(v[:, i], state.dims) for i in keep]


def _as_mats(basis, dims):
    if len(basis) == 0:
        raise BadDims("empty basis")
    if isinstance(basis[0], PureVector):
        dims = basis[0].dims
        for b in basis:
            if b.dims != dims:
                raise BadDims("mixed dimensions in basis")
        flat = np.stack([b.amplitudes for b in basis])
    else:
        if dims is None:
            raise BadDims("dims are required for raw array bases")
        flat = np.stack([np.asarray(b, dtype=complex).reshape(-1) for b in basis])
    da, db = dims
    if flat.shape[1] != da * db:
        raise BadDims(f"vector length {flat.shape[1]} != {da}*{db}")
    if max(da, db) > 4 or min(da, db) < 2:
        raise BadDims(f"local dimensions {da}x{db} outside the supported 2..4 range")
    return flat.reshape(-1, da, db), flat, (da, db)


def _normalize_rows(c):
    nrm = np.linalg.norm(c, axis=1, keepdims=True)
    nrm[nrm == 0.0] = 1.0
    return c / nrm


def _direction_lattice(dim, count):
    """Deterministic unit directions in C^dim."""
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    if dim == 2:
        amps = np.pi * (np.arange(8) + 0.5) / 16.0
        phases = 2.0 * np.pi * np.arange(8) / 8.0
        out = np.empty((64, 2), dtype=complex)
        idx = 0
        for a in amps:
            for ph in phases:
                out[idx] = (np.cos(a), np.sin(a) * np.exp(1j * ph))
                idx += 1
        return out
    rng = np.random.default_rng(_LATTICE_SEED)
    d = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return _normalize_rows(d)


def _poly_roots_from_samples(values, nodes):
    """Roots of the polynomial interpolating (nodes, values); nodes are
    roots of unity so a DFT gives exact coefficients."""
    coeffs = np.fft.fft(values) / len(values)  # a_0 .. a_n
    coeffs = coeffs[::-1]  # highest power first
    mags = np.abs(coeffs)
    top = mags.max()
    if top < 1e-13:
        return None  # identically zero on this slice
    lead = 0
    while lead < len(coeffs) - 1 and mags[lead] < 1e-12 * top:
        lead += 1
    trimmed = coeffs[lead:]
    if len(trimmed) <= 1:
        return np.array([], dtype=complex)
    return np.roots(trimmed)


def det_zero_candidates(mats):
    """Determinant-zero combinations along coefficient slices (square dims).

    Returns (candidates, degenerate_slices); candidates are unit coefficient
    vectors, degenerate_slices mark directions where the determinant
    vanishes identically.
    """
    k, n, _ = mats.shape
    nodes = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    cands = []
    degenerate_dirs = []
    for m in range(k):
        others = [j for j in range(k) if j != m]
        dirs = _direction_lattice(k - 1, 64)
        base = np.tensordot(dirs, mats[others], axes=(1, 0))  # (ndir, n, n)
        for d_idx in range(len(dirs)):
            stack = nodes[:, None, None] * mats[m][None] + base[d_idx][None]
            vals = np.linalg.det(stack)
            roots = _poly_roots_from_samples(vals, nodes)
            full_dir = np.zeros(k, dtype=complex)
            full_dir[others] = dirs[d_idx]
            if roots is None:
                degenerate_dirs.append((m, full_dir))
                continue
            for t in roots:
                if not np.isfinite(t) or abs(t) > 1e8:
                    continue
                c = full_dir.copy()
                c[m] += t
                nrm = np.linalg.norm(c)
                if nrm > 1e-12:
                    cands.append(c / nrm)
        # the slice family misses the pure e_m direction; test it directly
        if abs(np.linalg.det(mats[m])) < 1e-10 * max(np.abs(mats[m]).max(), 1e-300) ** n:
            e = np.zeros(k, dtype=complex)
            e[m] = 1.0
            cands.append(e)
    return cands, degenerate_dirs


def _als_candidates(flat, dims, n_starts=24, iters=50, seed=_ALS_SEED):
    """Alternating least squares on a^T (conj(N_j) b) = 0 over the
    orthocomplement matrices N_j of the spanned subspace."""
    k = flat.shape[0]
    da, db = dims
    d = da * db
    if k >= d:
        return []
    _, _, vh = np.linalg.svd(flat)
    comp = np.conj(vh[k:]).reshape(d - k, da, db)  # conj(N_j)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_starts):
        b = rng.standard_normal(db) + 1j * rng.standard_normal(db)
        b /= np.linalg.norm(b)
        a = None
        for _ in range(iters):
            w = np.einsum("jst,t->js", comp, b)
            _, _, vw = np.linalg.svd(w)
            a = np.conj(vw[-1])
            v2 = np.einsum("jst,s->jt", comp, a)
            _, _, vb = np.linalg.svd(v2)
            b = np.conj(vb[-1])
        vec = np.outer(a, b).reshape(-1)
        c = np.conj(flat) @ vec
        nrm = np.linalg.norm(c)
        if nrm > 1e-12:
            out.append(c / nrm)
    return out


def _nm_multistart(mats, n_starts, max_iter, seed=_NM_SEED):
    k = mats.shape[0]
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((n_starts, 2 * k))
    x0 /= np.linalg.norm(x0, axis=1, keepdims=True)

    def objective(x):
        c = x[:, :k] + 1j * x[:, k:]
        return _kernels.combo_sigma2(mats, c)

    # locate basins only; the accurate polish stage does the refinement
    xb, _ = nelder_mead_batch(
        objective, x0, max_iter=max_iter, ftol=1e-7, xtol=1e-4
    )
    return list(_normalize_rows(xb[:, :k] + 1j * xb[:, k:]))


def _accurate_sigma2(mats, coeffs):
    """Second singular value of unit combinations via full SVD."""
    combos = np.tensordot(coeffs, mats, axes=(1, 0))
    fro = np.sqrt(np.sum(np.abs(combos) ** 2, axis=(1, 2)))
    fro[fro == 0.0] = 1.0
    sv = np.linalg.svd(combos / fro[:, None, None], compute_uv=False)
    if sv.shape[1] < 2:
        return np.zeros(len(coeffs))
    return sv[:, 1]


def _polish_accurate(mats, coeffs, max_iter=300):
    k = mats.shape[0]

    def objective(x):
        c = x[:, :k] + 1j * x[:, k:]
        nrm = np.linalg.norm(c, axis=1)
        bad = nrm < 1e-12
        c[bad] = 1.0
        return np.where(bad, 1.0, _accurate_sigma2(mats, _normalize_rows(c)))

    x0 = np.concatenate([coeffs.real, coeffs.imag], axis=1)
    xb, fb = nelder_mead_batch(
        objective, x0, max_iter=max_iter, ftol=1e-16, xtol=1e-13, step=0.05
    )
    return _normalize_rows(xb[:, :k] + 1j * xb[:, k:]), fb


def find_product_vector(basis, dims=None):
    """Search the spanned subspace for a product vector.

    Returns a ProductFinding; `found` means the best residual (second
    singular value of the reshaped unit vector) is at most 1e-7. Residuals
    between 1e-7 and 1e-4 are reported as ambiguous, treated as not found,
    and flagged with a warning.
    """
    mats, flat, dims = _as_mats(basis, dims)
    k, da, db = mats.shape
    if k > 4:
        raise BadDims(f"basis size {k} above the supported maximum of 4")

    if k == 1:
        coeffs = np.array([[1.0 + 0.0j]])
        residual = float(_accurate_sigma2(mats, coeffs)[0])
        best_c = coeffs[0]
    else:
        cands = []
        if da == db:
            slice_cands, _ = det_zero_candidates(mats)
            cands.extend(slice_cands)
        cands.extend(_als_candidates(flat, dims))
        cands.extend(_nm_multistart(mats, _N_STARTS, _NM_MAX_ITER))
        call = np.stack(cands)
        scores = _accurate_sigma2(mats, call)
        order = np.argsort(scores)
        n_polish = min(6, len(order))
        polished, pf = _polish_accurate(mats, call[order[:n_polish]])
        idx = int(np.argmin(pf))
        if pf[idx] <= scores[order[0]]:
            best_c, residual = polished[idx], float(pf[idx])
        else:
            best_c, residual = call[order[0]], float(scores[order[0]])

    found = residual <= FOUND_TOL
    ambiguous = (not found) and residual < NOT_FOUND_TOL
    if ambiguous:
        warnings.warn(
            f"product-vector residual {residual:.3e} in the ambiguous band",
            AmbiguousResidualWarning,
        )
    vector = factor_a = factor_b = None
    if found:
        combo = best_c @ flat
        vector = PureVector.from_array(combo, dims)
        u, _, vh = np.linalg.svd(vector.reshaped())
        factor_a = u[:, 0]
        factor_b = vh[0, :]
    return ProductFinding(
        found=found,
        vector=vector,
        factor_a=factor_a,
        factor_b=factor_b,
        residual=residual,
        combination=best_c,
        ambiguous=ambiguous,
    )


def enumerate_rank1_in_span(mats, verify_tol=1e-6):
    """Isolated rank-one points in a small matrix span, found exactly.

    Supports two basis matrices of any supported shape (common quadratic
    minor roots) and three basis matrices with a local dimension of 2
    (generalized eigenvalue pencil on the two rows). Candidates are
    verified by SVD; returns unit coefficient vectors.
    """
    import scipy.linalg

    mats = np.asarray(mats, dtype=complex)
    k, m, n = mats.shape
    if m > n:
        return enumerate_rank1_in_span(np.transpose(mats, (0, 2, 1)), verify_tol)
    cands = []
    if k == 2:
        # 2x2 minors of c0 N0 + c1 N1 are quadratics in (c0, c1).
        quads = []
        for r in range(m - 1):
            for s in range(r + 1, m):
                for u in range(n - 1):
                    for v in range(u + 1, n):
                        n0, n1 = mats[0], mats[1]
                        a = n0[r, u] * n0[s, v] - n0[r, v] * n0[s, u]
                        g = n1[r, u] * n1[s, v] - n1[r, v] * n1[s, u]
                        b = (
                            n0[r, u] * n1[s, v]
                            + n1[r, u] * n0[s, v]
                            - n0[r, v] * n1[s, u]
                            - n1[r, v] * n0[s, u]
                        )
                        quads.append((a, b, g))
        quads.sort(key=lambda q: -max(abs(q[0]), abs(q[1]), abs(q[2])))
        a, b, g = quads[0]
        scale = max(abs(a), abs(b), abs(g))
        if scale < 1e-14:
            # the whole pencil is rank <= 1
            cands = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        else:
            for t in np.roots([a, b, g]) if abs(a) > 1e-14 * scale else np.roots([b, g]):
                cands.append(np.array([t, 1.0]))
            if abs(a) <= 1e-14 * scale:
                cands.append(np.array([1.0, 0.0]))
    elif k == 3 and m == 2:
        # rows of M(c) are A_s c; proportional rows solve A1 c = mu A0 c.
        a0 = np.stack([mats[j][0, :] for j in range(3)], axis=1)
        a1 = np.stack([mats[j][1, :] for j in range(3)], axis=1)
        if a0.shape[0] != 3:
            raise BadDims("pencil method expects three columns on the long side")
        vals, vecs = scipy.linalg.eig(a1, a0)
        for i in range(vecs.shape[1]):
            c = vecs[:, i]
            if np.all(np.isfinite(c)) and np.linalg.norm(c) > 1e-12:
                cands.append(c)
        # mu = infinity branch: A0 c = 0
        _, sv, vh = np.linalg.svd(a0)
        if sv[-1] < 1e-10 * max(sv[0], 1e-300):
            cands.append(np.conj(vh[-1]))
    else:
        raise BadDims(f"no exact rank-one enumeration for k={k}, dims {m}x{n}")

    out = []
    for c in cands:
        c = np.asarray(c, dtype=complex)
        c = c / np.linalg.norm(c)
        combo = np.tensordot(c, mats, axes=(0, 0))
        sv = np.linalg.svd(combo, compute_uv=False)
        if sv[0] > 1e-12 and sv[1] <= verify_tol * sv[0]:
            if not any(abs(np.vdot(c, prev)) > 1.0 - 1e-7 for prev in out):
                out.append(c)
    return out


def find_schmidt_rank2_combo(basis, dims=None):
    """Combination of three 3x3 range vectors with Schmidt rank exactly 2.

    Solves det = 0 along slices and keeps the root with the largest second
    singular value. Raises AllRootsRankOne when every determinant root is
    a product vector (the caller should branch to the product path).
    """
    mats, flat, dims = _as_mats(basis, dims)
    k, da, db = mats.shape
    if k != 3 or dims != (3, 3):
        raise BadDims("expects exactly three basis vectors in 3x3")

    cands, degenerate = det_zero_candidates(mats)
    if degenerate:
        # det vanishes identically along some slices; sample those slices
        # directly since every point on them is a valid det-zero candidate.
        ts = np.array([0.35, 1.0, 2.7])
        for m, full_dir in degenerate:
            for t in ts:
                c = full_dir.astype(complex).copy()
                c[m] += t
                cands.append(c / np.linalg.norm(c))
    if not cands:
        raise AllRootsRankOne("no determinant roots found")
    call = np.stack(cands)
    combos = np.tensordot(call, mats, axes=(1, 0))
    fro = np.sqrt(np.sum(np.abs(combos) ** 2, axis=(1, 2)))
    fro[fro == 0.0] = 1.0
    combos = combos / fro[:, None, None]
    sv = np.linalg.svd(combos, compute_uv=False)
    dets = np.abs(np.linalg.det(combos))
    valid = dets <= DET_TOL
    rank2 = valid & (sv[:, 1] > FOUND_TOL)
    if not np.any(rank2):
        if np.any(valid):
            raise AllRootsRankOne("every determinant root has Schmidt rank one")
        raise AllRootsRankOne("no candidate satisfied the determinant tolerance")
    pick = np.flatnonzero(rank2)[np.argmax(sv[rank2, 1])]
    coeffs = call[pick] / np.linalg.norm(call[pick])
    vec = PureVector.from_array(coeffs @ flat, dims)
    return vec, coeffs
