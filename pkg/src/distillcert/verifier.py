"""Independent certificate verification.

Re-executes the claimed operation sequence and re-derives the terminal
claim from scratch. This module deliberately imports only the state
substrate and the criteria: none of the synthesis or search code can
influence a verdict, so a search bug cannot mask itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .criteria import NptWitness, ReductionWitness, evaluate_reduction, min_pt_eig
from .errors import DimensionMismatch, NullOutcome
from .statecore import apply_local

CLAIM_2XN = "TwoByN_NPT"
CLAIM_REDUCTION = "ReductionViolated"

_CLAIM_TOL = 1e-8
_WITNESS_MATCH_TOL = 1e-8
_NORM_SLACK = 1e-9


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    terminal_dims: tuple
    terminal_min_pt_eig: float
    cumulative_probability: float
    failures: list = field(default_factory=list)


def verify(original, cert):
    """Re-apply a certificate's steps and re-check its terminal claim.

    All checks are recomputed: step operators must have spectral norm at
    most one, the accumulated outcome probability must stay positive, and
    the stored witness must reproduce its value on the terminal state.
    """
    failures = []
    state = original
    prob = 1.0
    for i, step in enumerate(cert.steps):
        for op in (step.op_a, step.op_b):
            if op is None:
                continue
            nrm = np.linalg.norm(op.matrix, 2)
            if nrm > 1.0 + _NORM_SLACK:
                failures.append(
                    f"step {i} ({step.label}): operator norm {nrm:.6f} exceeds 1"
                )
        try:
            state, p = apply_local(state, step.op_a, step.op_b)
        except (DimensionMismatch, NullOutcome) as exc:
            failures.append(f"step {i} ({step.label}): {exc}")
            return VerificationReport(False, original.dims, 0.0, 0.0, failures)
        prob *= p

    val, _ = min_pt_eig(state, "A")
    if cert.claim == CLAIM_2XN:
        if min(state.dims) != 2:
            failures.append(f"terminal dims {state.dims} are not 2xN")
        if val >= -_CLAIM_TOL:
            failures.append(f"terminal min PT eigenvalue {val:.3e} not below -1e-8")
        failures.extend(_check_witness(state, cert.claim_data))
    elif cert.claim == CLAIM_REDUCTION:
        failures.extend(_check_witness(state, cert.claim_data))
    elif cert.claim is None:
        failures.append("certificate makes no claim")
    else:
        failures.append(f"unknown claim {cert.claim!r}")

    if not 0.0 < prob <= 1.0 + _NORM_SLACK:
        failures.append(f"cumulative probability {prob!r} outside (0, 1]")

    return VerificationReport(
        passed=not failures,
        terminal_dims=state.dims,
        terminal_min_pt_eig=float(val),
        cumulative_probability=float(min(prob, 1.0)),
        failures=failures,
    )


def _check_witness(state, witness):
    if isinstance(witness, NptWitness):
        if witness.eigenvector.dims != state.dims:
            return [f"witness dims {witness.eigenvector.dims} != {state.dims}"]
        v = witness.eigenvector.amplitudes
        from . import _linalg

        pt = _linalg.pt_raw(state.matrix, state.dim_a, state.dim_b, witness.side)
        value = float(np.real(np.vdot(v, pt @ v)))
        out = []
        if value >= -_CLAIM_TOL:
            out.append(f"witness expectation {value:.3e} not below -1e-8")
        if abs(value - witness.eigenvalue) > _WITNESS_MATCH_TOL:
            out.append(
                f"witness expectation {value:.6e} disagrees with stored "
                f"{witness.eigenvalue:.6e}"
            )
        return out
    if isinstance(witness, ReductionWitness):
        if witness.vector.dims != state.dims:
            return [f"witness dims {witness.vector.dims} != {state.dims}"]
        value = evaluate_reduction(state, witness.vector, witness.side)
        out = []
        if value >= -_CLAIM_TOL:
            out.append(f"reduction expectation {value:.3e} not below -1e-8")
        if abs(value - witness.value) > _WITNESS_MATCH_TOL:
            out.append(
                f"reduction expectation {value:.6e} disagrees with stored "
                f"{witness.value:.6e}"
            )
        return out
    return ["claim data is missing or has the wrong type"]
