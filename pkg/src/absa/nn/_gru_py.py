"""Pure-numpy GRU recurrence kernels.

Gate rows are stacked as ``[update; reset; candidate]``. ``xp`` holds the
input projections ``x_t @ W.T + b`` for every step, so only the recurrent
part of the cell runs inside the time loop:

    z_t = sigmoid(xp_z + U_z h_{t-1})
    r_t = sigmoid(xp_r + U_r h_{t-1})
    c_t = tanh(xp_c + U_c (r_t * h_{t-1}))
    h_t = (1 - z_t) * h_{t-1} + z_t * c_t
"""

import numpy as np


def _sigmoid(a):
    return 0.5 * (np.tanh(0.5 * a) + 1.0)


def gru_forward(xp, U, h0):
    n, three_h = xp.shape
    hd = three_h // 3
    hs = np.empty((n, hd))
    zs = np.empty((n, hd))
    rs = np.empty((n, hd))
    cs = np.empty((n, hd))
    Uz, Ur, Uc = U[:hd], U[hd:2 * hd], U[2 * hd:]
    h = h0
    for t in range(n):
        z = _sigmoid(xp[t, :hd] + Uz @ h)
        r = _sigmoid(xp[t, hd:2 * hd] + Ur @ h)
        c = np.tanh(xp[t, 2 * hd:] + Uc @ (r * h))
        h = (1.0 - z) * h + z * c
        hs[t], zs[t], rs[t], cs[t] = h, z, r, c
    return hs, zs, rs, cs


def gru_backward(dhs, U, h0, hs, zs, rs, cs):
    """Return ``(dxp, dU, dh0)`` given the loss gradient w.r.t. every state."""
    n, hd = hs.shape
    dxp = np.zeros((n, 3 * hd))
    dU = np.zeros_like(U)
    Uz, Ur, Uc = U[:hd], U[hd:2 * hd], U[2 * hd:]
    dh_next = np.zeros(hd)
    for t in range(n - 1, -1, -1):
        h_prev = hs[t - 1] if t > 0 else h0
        z, r, c = zs[t], rs[t], cs[t]
        dh = dhs[t] + dh_next
        dc = dh * z * (1.0 - c * c)
        dz = dh * (c - h_prev) * z * (1.0 - z)
        rh = r * h_prev
        drh = Uc.T @ dc
        dr = drh * h_prev * r * (1.0 - r)
        dU[:hd] += np.outer(dz, h_prev)
        dU[hd:2 * hd] += np.outer(dr, h_prev)
        dU[2 * hd:] += np.outer(dc, rh)
        dh_next = dh * (1.0 - z) + drh * r + Uz.T @ dz + Ur.T @ dr
        dxp[t, :hd] = dz
        dxp[t, hd:2 * hd] = dr
        dxp[t, 2 * hd:] = dc
    return dxp, dU, dh_next
