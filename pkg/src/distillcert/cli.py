"""Command-line front end and JSON serialization.

Subcommands: analyze, certify, verify, gen, batch. Exit codes are a
stable contract: 0 success, 1 usage error, 2 invariant/parse failure,
3 synthesis failure / claim None / failed verification. The environment
variable DISTILLCERT_TOL overrides the negativity threshold.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import __version__
from .criteria import NptWitness, ReductionWitness
from .distill import CertStep, Certificate, certify
from .ensembles import (
    WernerParams,
    eq15_state,
    random_eq15_params,
    random_rank3_npt,
    random_sigma3_params,
    sigma3_state,
    tiles_upb_state,
    werner,
)
from .errors import DistillcertError, InvariantViolation, ParseError
from .report import analyze_state
from .rangesearch import ProductFinding  # noqa: F401  (re-exported for scripts)
from .statecore import BipartiteState, LocalOperator, PureVector
from .verifier import verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_UNPROVED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _matrix_to_json(matrix):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def _matrix_from_json(rows):
    try:
        return np.array(
            [[complex(re, im) for re, im in row] for row in rows], dtype=complex
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix entries: {exc}") from exc


def _vector_to_json(vec):
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec)]


def _vector_from_json(entries):
    try:
        return np.array([complex(re, im) for re, im in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed vector entries: {exc}") from exc


def save_state(state, path, metadata=None):
    doc = {
        "dim_a": state.dim_a,
        "dim_b": state.dim_b,
        "matrix": _matrix_to_json(state.matrix),
    }
    if metadata:
        doc["metadata"] = metadata
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_state(path):
    """Load a state file; raises ParseError or InvariantViolation."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read state file {path}: {exc}") from exc
    try:
        dim_a = int(doc["dim_a"])
        dim_b = int(doc["dim_b"])
        rows = doc["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"state file {path} is missing fields: {exc}") from exc
    matrix = _matrix_from_json(rows)
    d = dim_a * dim_b
    if matrix.shape != (d, d):
        raise InvariantViolation(
            "shape", f"matrix is {matrix.shape}, dims declare {(d, d)}"
        )
    return BipartiteState(dim_a, dim_b, matrix)


def _witness_to_json(witness):
    if witness is None:
        return None
    if isinstance(witness, NptWitness):
        return {
            "type": "npt",
            "side": witness.side,
            "value": float(witness.eigenvalue),
            "dims": list(witness.eigenvector.dims),
            "vector": _vector_to_json(witness.eigenvector.amplitudes),
        }
    if isinstance(witness, ReductionWitness):
        return {
            "type": "reduction",
            "side": witness.side,
            "value": float(witness.value),
            "dims": list(witness.vector.dims),
            "vector": _vector_to_json(witness.vector.amplitudes),
        }
    raise ParseError(f"unknown witness type {type(witness)!r}")


def _witness_from_json(doc):
    if doc is None:
        return None
    vec = _vector_from_json(doc["vector"])
    dims = tuple(doc["dims"])
    pv = PureVector.from_array(vec, dims)
    if doc["type"] == "npt":
        return NptWitness(doc["side"], float(doc["value"]), pv)
    if doc["type"] == "reduction":
        return ReductionWitness(doc["side"], pv, float(doc["value"]))
    raise ParseError(f"unknown witness type {doc['type']!r}")


def save_certificate(cert, path):
    steps = []
    for step in cert.steps:
        for op in (step.op_a, step.op_b):
            if op is None:
                continue
            steps.append(
                {
                    "side": op.side,
                    "kind": op.kind,
                    "matrix": _matrix_to_json(op.matrix),
                    "label": step.label,
                }
            )
    doc = {
        "steps": steps,
        "claim": cert.claim,
        "claim_data": _witness_to_json(cert.claim_data),
        "branch_trace": list(cert.branch_trace),
        "tool_version": __version__,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_certificate(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read certificate file {path}: {exc}") from exc
    try:
        steps = []
        for entry in doc["steps"]:
            op = LocalOperator(
                entry["side"], _matrix_from_json(entry["matrix"]), entry["kind"]
            )
            if op.side == "A":
                steps.append(CertStep(op, None, entry.get("label", "")))
            else:
                steps.append(CertStep(None, op, entry.get("label", "")))
        claim = doc.get("claim")
        witness = _witness_from_json(doc.get("claim_data"))
        trace = list(doc.get("branch_trace", []))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"certificate file {path} is malformed: {exc}") from exc
    return Certificate(steps, claim, witness, trace)


def _cmd_analyze(args):
    state = load_state(args.state)
    report = analyze_state(state)
    if args.json:
        print(json.dumps(report.as_dict()))
    else:
        for line in report.lines():
            print(line)
    return EXIT_OK


def _cmd_certify(args):
    state = load_state(args.state)
    cert = certify(state)
    if args.output:
        save_certificate(cert, args.output)
    print(f"claim={cert.claim}")
    print("branch=" + " | ".join(cert.branch_trace))
    if cert.claim is None:
        return EXIT_UNPROVED
    report = verify(state, cert)
    print(f"verified={'true' if report.passed else 'false'}")
    return EXIT_OK if report.passed else EXIT_UNPROVED


def _cmd_verify(args):
    state = load_state(args.state)
    cert = load_certificate(args.certificate)
    report = verify(state, cert)
    print(f"pass={'true' if report.passed else 'false'}")
    print(f"terminal_dims={report.terminal_dims[0]}x{report.terminal_dims[1]}")
    print(f"terminal_min_pt_eig={report.terminal_min_pt_eig!r}")
    print(f"cumulative_probability={report.cumulative_probability!r}")
    for failure in report.failures:
        print(f"failure={failure}")
    return EXIT_OK if report.passed else EXIT_UNPROVED


def _generate(kind, args):
    if kind == "werner":
        return werner(WernerParams(n=args.n, a=args.a, b=args.b)), {
            "generator": "werner",
            "n": args.n,
            "a": args.a,
            "b": args.b,
        }
    if kind == "tiles":
        return tiles_upb_state(), {"generator": "tiles"}
    if kind == "rank3-npt":
        return random_rank3_npt(args.seed), {"generator": "rank3-npt", "seed": args.seed}
    if kind == "eq15":
        return eq15_state(random_eq15_params(args.seed)), {
            "generator": "eq15",
            "seed": args.seed,
        }
    if kind == "sigma3":
        return sigma3_state(random_sigma3_params(args.seed)), {
            "generator": "sigma3",
            "seed": args.seed,
        }
    raise UsageError(f"unknown generator kind {kind!r}")


def _cmd_gen(args):
    state, meta = _generate(args.kind, args)
    save_state(state, args.output, metadata=meta)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_batch(args):
    rows = []
    for i in range(args.count):
        seed = args.seed_base + i
        state, _ = _generate(args.kind, argparse.Namespace(seed=seed, n=3, a=1.0, b=-1.0))
        t0 = time.perf_counter()
        cert = certify(state)
        report = verify(state, cert) if cert.claim is not None else None
        wall = time.perf_counter() - t0
        from .criteria import min_pt_eig
        from .statecore import rank_of

        val, _ = min_pt_eig(state, "A")
        rows.append(
            {
                "seed": seed,
                "rank": rank_of(state),
                "min_pt_eig": repr(float(val)),
                "claim": cert.claim if cert.claim is not None else "None",
                "branch": " | ".join(cert.branch_trace),
                "verified": "true" if (report and report.passed) else "false",
                "probability": repr(report.cumulative_probability) if report else "",
                "wall_time_s": f"{wall:.6f}",
            }
        )
    fieldnames = [
        "seed", "rank", "min_pt_eig", "claim", "branch",
        "verified", "probability", "wall_time_s",
    ]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    verified = sum(1 for r in rows if r["verified"] == "true")
    print(f"wrote {args.out}: {verified}/{len(rows)} verified")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="distillcert", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="report ranks, negativity, witnesses")
    p.add_argument("state")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("certify", help="synthesize a certificate")
    p.add_argument("state")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("verify", help="independently re-check a certificate")
    p.add_argument("state")
    p.add_argument("certificate")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("gen", help="write a generator state to a file")
    p.add_argument("--kind", required=True,
                   choices=["rank3-npt", "werner", "tiles", "eq15", "sigma3"])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=-1.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("batch", help="certify a seeded batch, write a CSV report")
    p.add_argument("--kind", default="rank3-npt",
                   choices=["rank3-npt", "eq15", "sigma3"])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed-base", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_batch)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except (InvariantViolation, ParseError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DistillcertError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_UNPROVED


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
