"""Bipartite states, local operators, and the dense linear-algebra substrate.

Composite basis convention: |i>_A |j>_B occupies index i * dim_b + j
(row-major pairing). All public types are immutable values; every
operation is a pure function, so everything here is safe to share across
threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .errors import DimensionMismatch, InvariantViolation, NullOutcome

HERMITICITY_TOL = 1e-12
HERMITIZE_WARN = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-12
NORM_TOL = 1e-12

OP_KINDS = ("ilo", "projector", "unitary", "general")


class HermitizationWarning(UserWarning):
    """Raised when ingestion had to symmetrize by more than 1e-10."""


def _frozen_array(values, dtype=complex):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureVector:
    """Unit vector on a dim_a x dim_b product space."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise InvariantViolation("dims", "dimensions must be positive")
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != self.dim_a * self.dim_b:
            raise InvariantViolation(
                "length", f"expected {self.dim_a * self.dim_b} amplitudes, got {amp.size}"
            )
        nrm = np.linalg.norm(amp)
        if abs(nrm - 1.0) > NORM_TOL:
            raise InvariantViolation("norm", f"|v| = {nrm!r} is not 1")
        object.__setattr__(self, "amplitudes", _frozen_array(amp))

    @classmethod
    def from_array(cls, amplitudes, dims):
        """Build a PureVector, normalizing the input."""
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(amp)
        if nrm <= 0.0:
            raise InvariantViolation("norm", "cannot normalize the zero vector")
        return cls(dims[0], dims[1], amp / nrm)

    @property
    def dims(self):
        return (self.dim_a, self.dim_b)

    def reshaped(self):
        """dim_a x dim_b coefficient matrix of the vector."""
        return self.amplitudes.reshape(self.dim_a, self.dim_b)


@dataclass(frozen=True)
class BipartiteState:
    """Normalized density matrix with an explicit tensor factorization."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise InvariantViolation("dims", "dimensions must be positive")
        d = self.dim_a * self.dim_b
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (d, d):
            raise InvariantViolation("shape", f"expected {(d, d)}, got {m.shape}")
        herm_err = float(np.max(np.abs(m - np.conj(m.T)))) if d else 0.0
        if herm_err > HERMITICITY_TOL:
            if herm_err > HERMITIZE_WARN:
                warnings.warn(
                    f"symmetrized input by {herm_err:.3e}", HermitizationWarning
                )
            m = _linalg.hermitize(m)
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantViolation("trace", f"trace {tr!r} is not 1")
        w = np.linalg.eigvalsh(m)
        if w[0] < -PSD_TOL:
            raise InvariantViolation("psd", f"minimum eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", _frozen_array(m))

    @property
    def dims(self):
        return (self.dim_a, self.dim_b)


def state_from_matrix(matrix, dims, *, normalize=False):
    """Wrap a raw matrix as a BipartiteState, optionally renormalizing the trace."""
    m = np.asarray(matrix, dtype=complex)
    if normalize:
        tr = np.real(np.trace(m))
        if tr <= 0.0:
            raise InvariantViolation("trace", "cannot normalize non-positive trace")
        m = m / tr
    return BipartiteState(dims[0], dims[1], m)


def pure_state(vector, dims=None):
    """Density matrix of a pure vector (PureVector or array + dims)."""
    if isinstance(vector, PureVector):
        v = vector.amplitudes
        dims = vector.dims
    else:
        if dims is None:
            raise DimensionMismatch("dims are required for raw amplitude input")
        v = np.asarray(vector, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
    return BipartiteState(dims[0], dims[1], np.outer(v, np.conj(v)))


@dataclass(frozen=True)
class LocalOperator:
    """One-sided operator; rectangular matrices change the local dimension."""

    side: str
    matrix: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise InvariantViolation("side", f"side must be 'A' or 'B', got {self.side!r}")
        if self.kind not in OP_KINDS:
            raise InvariantViolation("kind", f"kind must be one of {OP_KINDS}")
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.size == 0:
            raise InvariantViolation("shape", "operator must be a 2-d matrix")
        if not np.any(np.abs(m) > 0):
            raise InvariantViolation("zero", "operator matrix is zero")
        d_out, d_in = m.shape
        if self.kind == "ilo":
            if d_out != d_in:
                raise InvariantViolation("ilo", "ILOs must be square")
            smin = np.linalg.svd(m, compute_uv=False)[-1]
            if smin <= 1e-10:
                raise InvariantViolation("ilo", f"smallest singular value {smin:.3e}")
        elif self.kind == "unitary":
            if d_out != d_in or np.max(np.abs(np.conj(m.T) @ m - np.eye(d_in))) > 1e-10:
                raise InvariantViolation("unitary", "M^dag M deviates from identity")
        elif self.kind == "projector":
            if np.max(np.abs(m @ np.conj(m.T) - np.eye(d_out))) > 1e-10:
                raise InvariantViolation("projector", "rows are not orthonormal")
        object.__setattr__(self, "matrix", _frozen_array(m))

    @property
    def d_out(self):
        return self.matrix.shape[0]

    @property
    def d_in(self):
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition with descending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: list = field(default_factory=list)


def apply_local(state, op_a=None, op_b=None):
    """Apply one-sided operators and renormalize.

    Returns (new_state, probability). Operators with spectral norm above 1
    are rescaled to norm 1 first so the reported probability is physical;
    `None` stands for the identity on that side.
    """
    da, db = state.dim_a, state.dim_b
    if op_a is None:
        a = np.eye(da, dtype=complex)
    else:
        if op_a.side != "A":
            raise DimensionMismatch("op_a must act on side A")
        a = np.asarray(op_a.matrix)
    if op_b is None:
        b = np.eye(db, dtype=complex)
    else:
        if op_b.side != "B":
            raise DimensionMismatch("op_b must act on side B")
        b = np.asarray(op_b.matrix)
    if a.shape[1] != da:
        raise DimensionMismatch(f"op_a expects input dimension {a.shape[1]}, state has {da}")
    if b.shape[1] != db:
        raise DimensionMismatch(f"op_b expects input dimension {b.shape[1]}, state has {db}")
    na = _linalg.operator_norm(a)
    nb = _linalg.operator_norm(b)
    if na > 1.0:
        a = a / na
    if nb > 1.0:
        b = b / nb
    out = _linalg.apply_product_raw(state.matrix, a, b)
    p = float(np.real(np.trace(out)))
    if p <= 1e-14:
        raise NullOutcome(f"outcome probability {p:.3e}")
    new_state = BipartiteState(a.shape[0], b.shape[0], _linalg.hermitize(out / p))
    return new_state, min(p, 1.0)


def partial_trace(state, keep):
    """Reduced density matrix of side `keep` ('A' or 'B')."""
    return _linalg.trace_out_raw(state.matrix, state.dim_a, state.dim_b, keep)


def partial_transpose(state, side):
    """Partial transpose with respect to `side`; returns a Hermitian matrix."""
    return _linalg.pt_raw(state.matrix, state.dim_a, state.dim_b, side)


def schmidt_decompose(v):
    """Schmidt coefficients (descending) and local bases of a pure vector.

    Returns (coefficients, a_basis, b_basis) with
    v = sum_i c_i a_i (x) b_i.
    """
    m = v.reshaped()
    u, s, vh = np.linalg.svd(m)
    k = min(v.dim_a, v.dim_b)
    a_basis = [u[:, i] for i in range(k)]
    b_basis = [vh[i, :] for i in range(k)]
    return s[:k], a_basis, b_basis


def rank_of(state, tol=1e-9):
    """Numerical rank: eigenvalues above tol times the largest."""
    if tol <= 0:
        raise InvariantViolation("tol", "tolerance must be positive")
    w = np.linalg.eigvalsh(state.matrix)
    top = max(float(w[-1]), 0.0)
    if top == 0.0:
        return 0
    return int(np.sum(w > tol * top))


def matrix_rank_hermitian(matrix, tol=1e-9):
    """Same relative-rank rule for raw Hermitian matrices (marginals)."""
    w = np.linalg.eigvalsh(matrix)
    top = max(float(w[-1]), 0.0)
    if top == 0.0:
        return 0
    return int(np.sum(w > tol * top))


def spectral_decompose(state):
    """Full eigen-decomposition, eigenvalues descending."""
    w, v = np.linalg.eigh(state.matrix)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    vectors = [
        PureVector.from_array(v[:, i], state.dims) for i in range(v.shape[1])
    ]
    return SpectralDecomposition(np.real(w), vectors)
