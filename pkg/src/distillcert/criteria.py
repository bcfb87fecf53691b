"""Entanglement and distillability criteria.

Covers the partial-transpose test with witness extraction, the reduction
criterion, the rank-deficit test (rank below a marginal rank implies
distillability), and the 2xN / low-dimension verdicts where the
partial-transpose test is decisive.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _linalg
from .errors import UnsupportedDims
from .statecore import (
    PureVector,
    matrix_rank_hermitian,
    partial_trace,
    rank_of,
)

DEFAULT_NPT_TOL = 1e-10

SEPARABLE_CERTIFIED = "SeparableCertified"
ENTANGLED_CERTIFIED = "EntangledCertified"
NPT_ENTANGLED = "NptEntangled"
INCONCLUSIVE = "Inconclusive"


def npt_threshold():
    """Negative-eigenvalue decision threshold; DISTILLCERT_TOL overrides."""
    raw = os.environ.get("DISTILLCERT_TOL")
    if raw is None:
        return DEFAULT_NPT_TOL
    return float(raw)


@dataclass(frozen=True)
class NptWitness:
    """Eigenvector of the partial transpose with a negative eigenvalue."""

    side: str
    eigenvalue: float
    eigenvector: PureVector


@dataclass(frozen=True)
class ReductionWitness:
    """Vector with a negative expectation of the reduction operator.

    value = <v| (I (x) rho_B - rho) |v> for side B, and
    <v| (rho_A (x) I - rho) |v> for side A.
    """

    side: str
    vector: PureVector
    value: float


def min_pt_eig(state, side="A"):
    """Minimum eigenvalue of the partial transpose, with witness when negative."""
    val, vec = _linalg.min_pt_eig_raw(state.matrix, state.dim_a, state.dim_b, side)
    witness = None
    if val < -npt_threshold():
        witness = NptWitness(side, val, PureVector.from_array(vec, state.dims))
    return val, witness


def is_npt(state):
    val, _ = min_pt_eig(state, "A")
    return val < -npt_threshold()


def _reduction_operator(state, side):
    da, db = state.dims
    if side == "B":
        return np.kron(np.eye(da, dtype=complex), partial_trace(state, "B")) - state.matrix
    return np.kron(partial_trace(state, "A"), np.eye(db, dtype=complex)) - state.matrix


def reduction_witness_side(state, side, tol=None):
    """Reduction-criterion witness on one side, or None."""
    if tol is None:
        tol = npt_threshold()
    val, vec = _linalg.min_eig_vec(_reduction_operator(state, side))
    if val < -tol:
        return ReductionWitness(side, PureVector.from_array(vec, state.dims), val)
    return None


def reduction_witness(state, tol=None):
    """Most negative reduction-criterion witness over both sides, or None.

    A returned witness certifies distillability.
    """
    best = None
    for side in ("A", "B"):
        w = reduction_witness_side(state, side, tol)
        if w is not None and (best is None or w.value < best.value):
            best = w
    return best


def evaluate_reduction(state, vector, side):
    """Expectation of the reduction operator in the given vector."""
    v = vector.amplitudes if isinstance(vector, PureVector) else np.asarray(vector)
    op = _reduction_operator(state, side)
    return float(np.real(np.vdot(v, op @ v)))


def lemma1_check(state, tol=1e-9):
    """True when the state rank is below a marginal rank (distillable)."""
    r = rank_of(state, tol)
    ra = matrix_rank_hermitian(partial_trace(state, "A"), tol)
    rb = matrix_rank_hermitian(partial_trace(state, "B"), tol)
    return r < max(ra, rb)


def peres_2xn_verdict(state):
    """Decide what the partial-transpose sign certifies at these dimensions.

    2x2 and 2x3: the test is necessary and sufficient, so PPT certifies
    separability and NPT certifies entanglement. Elsewhere with a local
    dimension of at most 3, NPT still certifies entanglement (and
    distillability in 2xN) but PPT is inconclusive.
    """
    da, db = state.dims
    lo, hi = min(da, db), max(da, db)
    if lo > 3:
        raise UnsupportedDims(f"no verdict available for {da}x{db}")
    npt = is_npt(state)
    if lo <= 2 and hi <= 3:
        return ENTANGLED_CERTIFIED if npt else SEPARABLE_CERTIFIED
    return NPT_ENTANGLED if npt else INCONCLUSIVE
