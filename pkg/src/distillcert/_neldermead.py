"""Batched lockstep Nelder-Mead used by the multistart searches.

All simplexes advance together so a vectorized objective is called a
constant number of times per iteration; converged simplexes freeze. The
schedule is deterministic, so results do not depend on execution order.
"""

import numpy as np


def nelder_mead_batch(fun, x0, *, max_iter=500, ftol=1e-13, xtol=1e-10, step=0.25):
    """Minimize `fun` from a batch of start points.

    fun: maps an (N, n) float array to (N,) values.
    x0: (B, n) start points.
    Returns (xbest (B, n), fbest (B,)).
    """
    x0 = np.asarray(x0, dtype=float)
    nb, n = x0.shape
    sim = np.repeat(x0[:, None, :], n + 1, axis=1)
    for i in range(n):
        sim[:, i + 1, i] += step
    fsim = np.asarray(fun(sim.reshape(-1, n)), dtype=float).reshape(nb, n + 1)

    active = np.ones(nb, dtype=bool)
    for _ in range(max_iter):
        order = np.argsort(fsim, axis=1, kind="stable")
        fsim = np.take_along_axis(fsim, order, axis=1)
        sim = np.take_along_axis(sim, order[:, :, None], axis=1)

        fspread = fsim[:, -1] - fsim[:, 0]
        xspread = np.max(np.abs(sim - sim[:, :1, :]), axis=(1, 2))
        active &= ~((fspread <= ftol) & (xspread <= xtol))
        ia = np.flatnonzero(active)
        if ia.size == 0:
            break

        s = sim[ia]
        f = fsim[ia]
        centroid = s[:, :-1, :].mean(axis=1)
        worst = s[:, -1, :]
        xr = centroid + (centroid - worst)
        fr = np.asarray(fun(xr), dtype=float)

        fbest = f[:, 0]
        fsecond = f[:, -2]
        fworst = f[:, -1]
        m_refl = (fr >= fbest) & (fr < fsecond)
        m_exp = fr < fbest
        m_oc = (fr >= fsecond) & (fr < fworst)
        m_ic = fr >= fworst

        # one second-stage candidate per simplex that needs it
        xs = np.empty_like(xr)
        xs[m_exp] = centroid[m_exp] + 2.0 * (centroid[m_exp] - worst[m_exp])
        xs[m_oc] = centroid[m_oc] + 0.5 * (centroid[m_oc] - worst[m_oc])
        xs[m_ic] = centroid[m_ic] - 0.5 * (centroid[m_ic] - worst[m_ic])
        need = ~m_refl
        fs = np.full(ia.size, np.inf)
        if need.any():
            fs[need] = np.asarray(fun(xs[need]), dtype=float)

        new_x = worst.copy()
        new_f = fworst.copy()
        use_e = m_exp & (fs < fr)
        use_r = (m_exp & ~(fs < fr)) | m_refl
        ok_oc = m_oc & (fs <= fr)
        ok_ic = m_ic & (fs < fworst)
        shrink = (m_oc & ~ok_oc) | (m_ic & ~ok_ic)

        for mask, xx, ff in (
            (use_r, xr, fr),
            (use_e, xs, fs),
            (ok_oc, xs, fs),
            (ok_ic, xs, fs),
        ):
            new_x[mask] = xx[mask]
            new_f[mask] = ff[mask]
        s[:, -1, :] = new_x
        f[:, -1] = new_f

        if shrink.any():
            js = np.flatnonzero(shrink)
            shr = s[js, :1, :] + 0.5 * (s[js, 1:, :] - s[js, :1, :])
            fshr = np.asarray(fun(shr.reshape(-1, n)), dtype=float).reshape(js.size, n)
            s[js, 1:, :] = shr
            f[js, 1:] = fshr

        sim[ia] = s
        fsim[ia] = f

    order = np.argsort(fsim, axis=1, kind="stable")
    fsim = np.take_along_axis(fsim, order, axis=1)
    sim = np.take_along_axis(sim, order[:, :, None], axis=1)
    return sim[:, 0, :], fsim[:, 0]
