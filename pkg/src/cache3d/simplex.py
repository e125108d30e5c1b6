"""Lock-step Nelder-Mead over a batch of independent problems.

Each row of the batch is its own minimisation; all rows advance together so
that the objective is evaluated on whole arrays at a time.  Rows never
interact, which keeps the result of a row independent of what else is in the
batch.
"""
from __future__ import annotations

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


def nelder_mead_batch(func, x0, step=0.5, max_iter=400, xtol=1e-7, ftol=1e-11):
    """Minimise ``func`` independently from each row of ``x0``.

    ``func`` maps an ``(m, d)`` array of points to ``m`` objective values and
    is told which rows are being evaluated through a second argument (an index
    array into the batch).  Returns ``(x_best, f_best, iterations)`` with
    per-row iteration counts.
    """
    x0 = np.asarray(x0, dtype=float)
    b, d = x0.shape
    rows = np.arange(b)
    sim = np.repeat(x0[:, None, :], d + 1, axis=1)
    for k in range(d):
        sim[:, k + 1, k] += step
    fs = func(sim.reshape(-1, d), np.repeat(rows, d + 1)).reshape(b, d + 1)
    iters = np.zeros(b, dtype=int)
    active = np.ones(b, dtype=bool)

    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        s, f = sim[idx], fs[idx]
        order = np.argsort(f, axis=1, kind="stable")
        s = np.take_along_axis(s, order[:, :, None], axis=1)
        f = np.take_along_axis(f, order, axis=1)
        sim[idx], fs[idx] = s, f

        spread_f = f[:, -1] - f[:, 0]
        spread_x = np.max(np.abs(s[:, 1:, :] - s[:, :1, :]), axis=(1, 2))
        done = (spread_f <= ftol * (np.abs(f[:, 0]) + 1e-300)) & (spread_x <= xtol)
        if done.any():
            active[idx[done]] = False
            keep = ~done
            idx, s, f = idx[keep], s[keep], f[keep]
            if idx.size == 0:
                break
        iters[idx] += 1

        worst = s[:, -1]
        f_best, f_second, f_worst = f[:, 0], f[:, -2], f[:, -1]
        centroid = s[:, :-1, :].mean(axis=1)

        xr = centroid + REFLECT * (centroid - worst)
        fr = func(xr, idx)
        new_x = worst.copy()
        new_f = f_worst.copy()
        shrink = np.zeros(idx.size, dtype=bool)

        accept_r = (fr >= f_best) & (fr < f_second)
        new_x[accept_r], new_f[accept_r] = xr[accept_r], fr[accept_r]

        exp_mask = fr < f_best
        if exp_mask.any():
            c = centroid[exp_mask]
            xe = c + EXPAND * (xr[exp_mask] - c)
            fe = func(xe, idx[exp_mask])
            use_e = fe < fr[exp_mask]
            new_x[exp_mask] = np.where(use_e[:, None], xe, xr[exp_mask])
            new_f[exp_mask] = np.where(use_e, fe, fr[exp_mask])

        con_mask = fr >= f_second
        if con_mask.any():
            c = centroid[con_mask]
            outside = fr[con_mask] < f_worst[con_mask]
            target = np.where(outside[:, None], xr[con_mask], worst[con_mask])
            xc = c + CONTRACT * (target - c)
            fc = func(xc, idx[con_mask])
            ok = np.where(outside, fc <= fr[con_mask], fc < f_worst[con_mask])
            sub = np.flatnonzero(con_mask)
            new_x[sub[ok]], new_f[sub[ok]] = xc[ok], fc[ok]
            shrink[sub[~ok]] = True

        s[:, -1, :] = new_x
        f[:, -1] = new_f
        if shrink.any():
            sr = s[shrink]
            sr[:, 1:, :] = sr[:, :1, :] + SHRINK * (sr[:, 1:, :] - sr[:, :1, :])
            fr_s = func(sr[:, 1:, :].reshape(-1, d), np.repeat(idx[shrink], d)).reshape(-1, d)
            s[shrink] = sr
            f[shrink, 1:] = fr_s
        sim[idx] = s
        fs[idx] = f

    i_best = np.argmin(fs, axis=1)
    return sim[rows, i_best], fs[rows, i_best], iters
