"""Pure-numpy reference implementations of the hot kernels.

Each function fixes its floating-point operation order; the compiled
twin in ``_ckernels.pyx`` follows the same order so both backends agree
bit for bit. All inputs are float64 arrays of shape (P, H, W).
"""
import numpy as np


def pad_reflect(x, ph, pw):
    """Mirror-pad the two spatial axes without repeating the edge sample."""
    return np.pad(x, ((0, 0), (ph, ph), (pw, pw)), mode="reflect")


def pad_reflect_adjoint(g, ph, pw):
    """Adjoint of :func:`pad_reflect`: fold border gradients back inside."""
    P, Hp, Wp = g.shape
    H, W = Hp - 2 * ph, Wp - 2 * pw
    # rows first
    t = g[:, ph:ph + H, :].copy()
    for q in range(ph):
        t[:, ph - q, :] += g[:, q, :]
    for s in range(ph):
        t[:, H - 2 - s, :] += g[:, H + ph + s, :]
    out = t[:, :, pw:pw + W].copy()
    for q in range(pw):
        out[:, :, pw - q] += t[:, :, q]
    for s in range(pw):
        out[:, :, W - 2 - s] += t[:, :, W + pw + s]
    return out


def filter_reflect(x, taps, axis):
    """Correlate along ``axis`` (1 = rows, 2 = columns) with reflect padding."""
    T = taps.shape[0]
    p = T // 2
    n = x.shape[axis]
    if axis == 1:
        xp = pad_reflect(x, p, 0)
        acc = taps[0] * xp[:, 0:n, :]
        for t in range(1, T):
            acc = acc + taps[t] * xp[:, t:t + n, :]
    else:
        xp = pad_reflect(x, 0, p)
        acc = taps[0] * xp[:, :, 0:n]
        for t in range(1, T):
            acc = acc + taps[t] * xp[:, :, t:t + n]
    return acc


def filter_reflect_adjoint(g, taps, axis):
    T = taps.shape[0]
    p = T // 2
    P, H, W = g.shape
    if axis == 1:
        z = np.zeros((P, H + 2 * p, W))
        for t in range(T):
            z[:, t:t + H, :] += taps[t] * g
        return pad_reflect_adjoint(z, p, 0)
    z = np.zeros((P, H, W + 2 * p))
    for t in range(T):
        z[:, :, t:t + W] += taps[t] * g
    return pad_reflect_adjoint(z, 0, p)


def im2col3(xp, r0, r1):
    """3x3 patches of output rows [r0, r1) of a 1-px padded input.

    Row ``(ky * 3 + kx) * C + c`` holds channel ``c`` shifted by ``(ky, kx)``.
    """
    C, Hp, Wp = xp.shape
    W = Wp - 2
    n = r1 - r0
    cols = np.empty((9, C, n, W))
    for ky in range(3):
        for kx in range(3):
            cols[ky * 3 + kx] = xp[:, r0 + ky:r0 + ky + n, kx:kx + W]
    return cols.reshape(9 * C, n * W)


def col2im3_add(gxp, cols, r0, r1):
    """Scatter-add patch gradients back into the padded gradient, in place."""
    C, Hp, Wp = gxp.shape
    W = Wp - 2
    n = r1 - r0
    blocks = cols.reshape(9, C, n, W)
    for ky in range(3):
        for kx in range(3):
            gxp[:, r0 + ky:r0 + ky + n, kx:kx + W] += blocks[ky * 3 + kx]
