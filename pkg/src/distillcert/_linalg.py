"""Raw-matrix helpers shared by the typed modules.

These operate on plain ndarrays so synthesis code can chain transformations
without paying the validation cost of the public types at every step.
Composite index convention everywhere: |i>_A |j>_B sits at i * dim_b + j.
"""

import numpy as np


def dag(m):
    return np.conj(m.T)


def pt_raw(matrix, dim_a, dim_b, side):
    """Partial transpose of a (da*db) x (da*db) matrix."""
    t = matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    if side == "A":
        t = t.transpose(2, 1, 0, 3)
    elif side == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return np.ascontiguousarray(t.reshape(dim_a * dim_b, dim_a * dim_b))


def trace_out_raw(matrix, dim_a, dim_b, keep):
    t = matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def apply_product_raw(matrix, op_a, op_b):
    """Unnormalized (A (x) B) rho (A (x) B)^dag."""
    k = np.kron(op_a, op_b)
    return k @ matrix @ dag(k)


def min_eig_vec(matrix):
    """Smallest eigenvalue and eigenvector of a Hermitian matrix."""
    w, v = np.linalg.eigh(matrix)
    return float(w[0]), v[:, 0]


def min_pt_eig_raw(matrix, dim_a, dim_b, side="A"):
    return min_eig_vec(pt_raw(matrix, dim_a, dim_b, side))


def hermitize(matrix):
    return 0.5 * (matrix + dag(matrix))


def inv_sqrt_psd(matrix, rel_tol=1e-12):
    """Inverse square root of a full-rank PSD matrix.

    Returns None when the matrix is rank deficient at the given relative
    tolerance.
    """
    w, v = np.linalg.eigh(hermitize(matrix))
    if w[0] <= rel_tol * max(w[-1], 0.0) or w[-1] <= 0.0:
        return None
    return (v * (1.0 / np.sqrt(w))) @ dag(v)


def orthonormalize(vectors, rel_tol=1e-12):
    """Orthonormal basis of the span of the given vectors (as rows in, columns out)."""
    a = np.asarray(vectors, dtype=complex).T
    q, r = np.linalg.qr(a)
    keep = np.abs(np.diag(r)) > rel_tol * max(np.abs(np.diag(r)).max(), 1e-300)
    return q[:, keep]


def complete_unitary(columns):
    """Unitary whose first columns are the given orthonormal columns."""
    cols = np.asarray(columns, dtype=complex)
    if cols.ndim == 1:
        cols = cols[:, None]
    d, k = cols.shape
    basis = cols
    # Project the canonical basis onto the orthocomplement and orthonormalize.
    proj = np.eye(d, dtype=complex) - basis @ dag(basis)
    extra = []
    for i in range(d):
        cand = proj @ np.eye(d, dtype=complex)[:, i]
        for e in extra:
            cand = cand - e * np.vdot(e, cand)
        nrm = np.linalg.norm(cand)
        if nrm > 1e-7:
            extra.append(cand / nrm)
        if len(extra) == d - k:
            break
    if len(extra) != d - k:
        raise np.linalg.LinAlgError("could not complete unitary basis")
    return np.concatenate([basis] + [e[:, None] for e in extra], axis=1)


def operator_norm(matrix):
    return float(np.linalg.norm(matrix, 2))


def normalized_operator(matrix):
    """Rescale to spectral norm 1 (no-op for the zero matrix)."""
    nrm = operator_norm(matrix)
    if nrm <= 0.0:
        return matrix
    return matrix / nrm


def projector_rows(vectors):
    """Stack unit vectors as the rows of a dimension-reducing projector."""
    return np.conj(np.asarray(vectors, dtype=complex))
