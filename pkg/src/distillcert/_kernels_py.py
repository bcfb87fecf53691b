"""Pure-numpy fallback for the batched singular-value kernel.

Everything here is vectorized over the batch axis; closed forms are used
for 2x2 and 3x3 Gram matrices, LAPACK for 4x4. Accuracy near zero is
limited by the Gram squaring (~1e-8 relative to the largest singular
value), which is fine for the search tier; callers re-evaluate final
candidates with a full SVD.
"""

import numpy as np

BACKEND = "python"


def _eigs2_desc(g):
    a = g[:, 0, 0].real
    d = g[:, 1, 1].real
    m = 0.5 * (a + d)
    r = np.sqrt(np.maximum(0.25 * (a - d) ** 2 + np.abs(g[:, 0, 1]) ** 2, 0.0))
    return np.stack([m + r, m - r], axis=-1)


def _eigs3_desc(g):
    # Trigonometric closed form for Hermitian 3x3 eigenvalues.
    a = g[:, 0, 0].real
    b = g[:, 1, 1].real
    c = g[:, 2, 2].real
    q = (a + b + c) / 3.0
    p1 = (
        np.abs(g[:, 0, 1]) ** 2
        + np.abs(g[:, 0, 2]) ** 2
        + np.abs(g[:, 1, 2]) ** 2
    )
    p2 = (a - q) ** 2 + (b - q) ** 2 + (c - q) ** 2 + 2.0 * p1
    p = np.sqrt(np.maximum(p2 / 6.0, 0.0))
    safe = p > 1e-300
    pinv = np.where(safe, 1.0 / np.where(safe, p, 1.0), 0.0)
    b00 = (a - q) * pinv
    b11 = (b - q) * pinv
    b22 = (c - q) * pinv
    b01 = g[:, 0, 1] * pinv
    b02 = g[:, 0, 2] * pinv
    b12 = g[:, 1, 2] * pinv
    det = (
        b00 * (b11 * b22 - np.abs(b12) ** 2)
        - b11 * np.abs(b02) ** 2
        - b22 * np.abs(b01) ** 2
        + 2.0 * np.real(b01 * b12 * np.conj(b02))
    )
    phi = np.arccos(np.clip(det / 2.0, -1.0, 1.0)) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.stack([e1, e2, e3], axis=-1)


def combo_sigma2(mats, coeffs):
    """Relative second singular value of coefficient combinations.

    mats: (k, m, n) complex basis matrices; coeffs: (B, k) complex.
    Returns (B,) float: sigma_2(M(c)) / ||M(c)||_F for M(c) = sum_k c_k mats[k],
    i.e. the second singular value of the unit-normalized combination.
    Zero combinations report 1.0 (worst case).
    """
    mats = np.asarray(mats, dtype=complex)
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    m, n = mats.shape[-2:]
    combos = np.tensordot(coeffs, mats, axes=(1, 0))
    fro2 = np.sum(np.abs(combos) ** 2, axis=(1, 2))
    if m <= n:
        gram = combos @ np.conj(np.swapaxes(combos, 1, 2))
    else:
        gram = np.conj(np.swapaxes(combos, 1, 2)) @ combos
    p = gram.shape[-1]
    if p == 1:
        second = np.zeros(len(gram))
    elif p == 2:
        second = _eigs2_desc(gram)[:, 1]
    elif p == 3:
        second = _eigs3_desc(gram)[:, 1]
    else:
        second = np.linalg.eigvalsh(gram)[:, -2]
    good = fro2 > 1e-280
    out = np.ones(len(gram))
    ratio = np.maximum(second[good], 0.0) / fro2[good]
    out[good] = np.sqrt(np.maximum(ratio, 0.0))
    # Gram squaring floors near-zero values around 3e-5; rescue those few
    # points with a full SVD so both backends stay accurate near minima.
    if p >= 2:
        near = np.flatnonzero(good)[out[good] < 3.2e-4]
        if near.size:
            fro = np.sqrt(fro2[near])
            sv = np.linalg.svd(combos[near] / fro[:, None, None], compute_uv=False)
            out[near] = sv[:, 1]
    return out
