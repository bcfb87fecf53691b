import numpy as np
import pytest

from distillcert.criteria import NptWitness
from distillcert.distill import CLAIM_2XN, CertStep, Certificate, certify
from distillcert.ensembles import random_rank3_npt, rank3_with_product_in_range, tiles_upb_state
from distillcert.statecore import LocalOperator, PureVector
from distillcert.verifier import verify


def test_round_trip_passes(bell_phi_plus):
    cert = certify(bell_phi_plus)
    assert verify(bell_phi_plus, cert).passed


def test_verifier_is_independent_of_synthesis_code():
    # the verifier must not import the search or synthesis modules, so a
    # search bug cannot mask itself
    import ast
    import inspect

    import distillcert.verifier as v

    tree = ast.parse(inspect.getsource(v))
    banned = {"rangesearch", "distill", "canonical", "ensembles", "_neldermead", "_kernels"}
    for node in ast.walk(tree):
        mods = []
        if isinstance(node, ast.Import):
            mods = [a.name for a in node.names]
        elif isinstance(node, ast.ImportFrom):
            mods = [node.module or ""]
        for m in mods:
            assert not (set(m.split(".")) & banned), f"verifier imports {m}"


def test_state_matrices_are_immutable(bell_phi_plus):
    with pytest.raises((ValueError, RuntimeError)):
        bell_phi_plus.matrix[0, 0] = 9.0


def test_recursion_depth_bound():
    from distillcert.distill import certify as c

    s = random_rank3_npt(2)
    cert = c(s, _depth=99)
    assert cert.claim is None
    assert any("recursion" in t for t in cert.branch_trace)


def test_claimless_certificate_fails(bell_phi_plus):
    cert = Certificate([], None, None, ["PPT"])
    rep = verify(bell_phi_plus, cert)
    assert not rep.passed
    assert any("no claim" in f for f in rep.failures)


def test_wrong_dims_claim_fails():
    s = random_rank3_npt(1)
    val = np.linalg.eigvalsh(s.matrix)[0]
    wit = NptWitness("A", -0.1, PureVector.from_array(np.ones(9), (3, 3)))
    cert = Certificate([], CLAIM_2XN, wit, [])
    rep = verify(s, cert)
    assert not rep.passed
    assert any("not 2xN" in f for f in rep.failures)


def test_tampered_certificates_fail():
    rng = np.random.default_rng(3)
    rejected = 0
    trials = 0
    for seed in range(1, 26):
        s = rank3_with_product_in_range(seed)
        cert = certify(s)
        assert verify(s, cert).passed
        for _ in range(4):
            trials += 1
            idx = int(rng.integers(len(cert.steps)))
            step = cert.steps[idx]
            op = step.op_a if step.op_a is not None else step.op_b
            noise = rng.standard_normal(op.matrix.shape) + 1j * rng.standard_normal(
                op.matrix.shape
            )
            scale = 0.1 * np.linalg.norm(op.matrix, 2) / np.linalg.norm(noise, 2)
            bad = op.matrix + scale * noise
            bad = bad / max(np.linalg.norm(bad, 2), 1.0)
            bad_op = LocalOperator(op.side, bad, "general")
            new_step = (
                CertStep(bad_op, None, step.label)
                if step.op_a is not None
                else CertStep(None, bad_op, step.label)
            )
            steps = list(cert.steps)
            steps[idx] = new_step
            tampered = Certificate(steps, cert.claim, cert.claim_data, cert.branch_trace)
            if not verify(s, tampered).passed:
                rejected += 1
    assert rejected / trials >= 0.95


def test_operator_norm_above_one_fails(bell_phi_plus):
    cert = certify(bell_phi_plus)
    step = CertStep(LocalOperator("A", 1.5 * np.eye(2, dtype=complex), "ilo"), None, "boost")
    doctored = Certificate([step], cert.claim, cert.claim_data, cert.branch_trace)
    rep = verify(bell_phi_plus, doctored)
    assert not rep.passed
    assert any("norm" in f for f in rep.failures)


def test_fake_certificates_on_ppt_state_fail():
    s = tiles_upb_state()
    rng = np.random.default_rng(5)
    for trial in range(30):
        steps = []
        dims = [3, 3]
        for _ in range(int(rng.integers(1, 4))):
            side = "A" if rng.uniform() < 0.5 else "B"
            i = 0 if side == "A" else 1
            d_in = dims[i]
            d_out = int(rng.integers(2, d_in + 1))
            g = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
            g /= np.linalg.norm(g, 2)
            op = LocalOperator(side, g, "general")
            steps.append(CertStep(op, None, "fake") if side == "A" else CertStep(None, op, "fake"))
            dims[i] = d_out
        # strongest adversary: store the true minimum eigenvector of the
        # terminal partial transpose as the claimed witness
        from distillcert.statecore import apply_local
        from distillcert import _linalg

        state = s
        ok = True
        for st in steps:
            try:
                state, _ = apply_local(state, st.op_a, st.op_b)
            except Exception:
                ok = False
                break
        if not ok:
            continue
        val, vec = _linalg.min_pt_eig_raw(state.matrix, state.dim_a, state.dim_b, "A")
        wit = NptWitness("A", float(val), PureVector.from_array(vec, state.dims))
        fake = Certificate(steps, CLAIM_2XN, wit, ["forged"])
        assert not verify(s, fake).passed
