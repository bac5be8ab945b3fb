"""Pure-numpy implementations of the hot kernels.

Same call signatures as the compiled extension ``boxlab._core``.  Boxes are
float64 arrays of shape (2, 2, 2, 2) indexed [a, b, x, y]; wirings are flat
float64 arrays of length 32 laid out as

    [f1(0,0) f1(0,1) f1(1,0) f1(1,1)   g1(...)   f2(...)   g2(...)
     f3(0,0,0) ... f3(1,1,1)           g3(0,0,0) ... g3(1,1,1)]

with argument conventions f1(x, a2), f2(x, a1), g1(y, b2), g2(y, b1),
f3(x, a1, a2), g3(y, b1, b2).

Batch functions take an (m, 32) wiring matrix and vectorize over rows, which
is what keeps the optimizer usable without the compiled extension.
"""

import numpy as np

# Winning mask of the CHSH game: T[a,b,x,y] = 1 iff a xor b == x*y.
CHSH_MASK = np.zeros((2, 2, 2, 2))
for _a in range(2):
    for _b in range(2):
        for _x in range(2):
            for _y in range(2):
                if _a ^ _b == _x & _y:
                    CHSH_MASK[_a, _b, _x, _y] = 1.0
del _a, _b, _x, _y


def chsh(p):
    """Winning probability of the box at the CHSH game."""
    return 0.25 * float(np.sum(p * CHSH_MASK))


def _split(w):
    f1 = w[0:4].reshape(2, 2)
    g1 = w[4:8].reshape(2, 2)
    f2 = w[8:12].reshape(2, 2)
    g2 = w[12:16].reshape(2, 2)
    f3 = w[16:24].reshape(2, 2, 2)
    g3 = w[24:32].reshape(2, 2, 2)
    return f1, g1, f2, g2, f3, g3


def _bilinear(box, a, b, s, t):
    """Box entry at real-valued inputs (s, t): the Bernoulli average over
    input bits, evaluated entrywise."""
    return (
        box[a, b, 0, 0] * (1.0 - s) * (1.0 - t)
        + box[a, b, 0, 1] * (1.0 - s) * t
        + box[a, b, 1, 0] * s * (1.0 - t)
        + box[a, b, 1, 1] * s * t
    )


def box_product(p, q, w):
    """The wired product of two boxes: p is the first (upper) box, q the
    second; returns a (2,2,2,2) box."""
    f1, g1, f2, g2, f3, g3 = _split(np.asarray(w, dtype=float))
    out = np.zeros((2, 2, 2, 2))
    for x in (0, 1):
        for y in (0, 1):
            for a1 in (0, 1):
                for b1 in (0, 1):
                    for a2 in (0, 1):
                        for b2 in (0, 1):
                            pm = _bilinear(p, a1, b1, f1[x, a2], g1[y, b2])
                            qm = _bilinear(q, a2, b2, f2[x, a1], g2[y, b1])
                            t = pm * qm
                            fa = f3[x, a1, a2]
                            gb = g3[y, b1, b2]
                            out[0, 0, x, y] += t * (1.0 - fa) * (1.0 - gb)
                            out[0, 1, x, y] += t * (1.0 - fa) * gb
                            out[1, 0, x, y] += t * fa * (1.0 - gb)
                            out[1, 1, x, y] += t * fa * gb
    return out


def box_product_batch(p, q, wb):
    """Products p (x)_{w_i} q for every row w_i of wb; returns (m,2,2,2,2)."""
    wb = np.asarray(wb, dtype=float)
    m = wb.shape[0]
    f1 = wb[:, 0:4].reshape(m, 2, 2)
    g1 = wb[:, 4:8].reshape(m, 2, 2)
    f2 = wb[:, 8:12].reshape(m, 2, 2)
    g2 = wb[:, 12:16].reshape(m, 2, 2)
    f3 = wb[:, 16:24].reshape(m, 2, 2, 2)
    g3 = wb[:, 24:32].reshape(m, 2, 2, 2)
    out = np.zeros((m, 2, 2, 2, 2))
    for x in (0, 1):
        for y in (0, 1):
            for a1 in (0, 1):
                for b1 in (0, 1):
                    for a2 in (0, 1):
                        for b2 in (0, 1):
                            al = f1[:, x, a2]
                            be = g1[:, y, b2]
                            pm = (
                                p[a1, b1, 0, 0] * (1 - al) * (1 - be)
                                + p[a1, b1, 0, 1] * (1 - al) * be
                                + p[a1, b1, 1, 0] * al * (1 - be)
                                + p[a1, b1, 1, 1] * al * be
                            )
                            ga = f2[:, x, a1]
                            de = g2[:, y, b1]
                            qm = (
                                q[a2, b2, 0, 0] * (1 - ga) * (1 - de)
                                + q[a2, b2, 0, 1] * (1 - ga) * de
                                + q[a2, b2, 1, 0] * ga * (1 - de)
                                + q[a2, b2, 1, 1] * ga * de
                            )
                            t = pm * qm
                            fa = f3[:, x, a1, a2]
                            gb = g3[:, y, b1, b2]
                            out[:, 0, 0, x, y] += t * (1 - fa) * (1 - gb)
                            out[:, 0, 1, x, y] += t * (1 - fa) * gb
                            out[:, 1, 0, x, y] += t * fa * (1 - gb)
                            out[:, 1, 1, x, y] += t * fa * gb
    return out


def objective_batch(left, right, wb):
    """CHSH(left (x)_w right) for every wiring row; returns (m,)."""
    prods = box_product_batch(left, right, wb)
    return 0.25 * np.tensordot(prods, CHSH_MASK, axes=4)


def objective_power_batch(p, wb, power):
    """CHSH of the right-associated power with ``power`` copies of p."""
    wb = np.asarray(wb, dtype=float)
    m = wb.shape[0]
    if power == 1:
        return np.full(m, chsh(p))
    acc = np.broadcast_to(p, (m, 2, 2, 2, 2)).copy()
    for _ in range(power - 1):
        acc = _box_product_batch_left(acc, p, wb)
    return 0.25 * np.tensordot(acc, CHSH_MASK, axes=4)


def _box_product_batch_left(pb, q, wb):
    """Like box_product_batch but the left factor varies per row: pb is
    (m,2,2,2,2)."""
    m = wb.shape[0]
    f1 = wb[:, 0:4].reshape(m, 2, 2)
    g1 = wb[:, 4:8].reshape(m, 2, 2)
    f2 = wb[:, 8:12].reshape(m, 2, 2)
    g2 = wb[:, 12:16].reshape(m, 2, 2)
    f3 = wb[:, 16:24].reshape(m, 2, 2, 2)
    g3 = wb[:, 24:32].reshape(m, 2, 2, 2)
    out = np.zeros((m, 2, 2, 2, 2))
    for x in (0, 1):
        for y in (0, 1):
            for a1 in (0, 1):
                for b1 in (0, 1):
                    for a2 in (0, 1):
                        for b2 in (0, 1):
                            al = f1[:, x, a2]
                            be = g1[:, y, b2]
                            pm = (
                                pb[:, a1, b1, 0, 0] * (1 - al) * (1 - be)
                                + pb[:, a1, b1, 0, 1] * (1 - al) * be
                                + pb[:, a1, b1, 1, 0] * al * (1 - be)
                                + pb[:, a1, b1, 1, 1] * al * be
                            )
                            ga = f2[:, x, a1]
                            de = g2[:, y, b1]
                            qm = (
                                q[a2, b2, 0, 0] * (1 - ga) * (1 - de)
                                + q[a2, b2, 0, 1] * (1 - ga) * de
                                + q[a2, b2, 1, 0] * ga * (1 - de)
                                + q[a2, b2, 1, 1] * ga * de
                            )
                            t = pm * qm
                            fa = f3[:, x, a1, a2]
                            gb = g3[:, y, b1, b2]
                            out[:, 0, 0, x, y] += t * (1 - fa) * (1 - gb)
                            out[:, 0, 1, x, y] += t * (1 - fa) * gb
                            out[:, 1, 0, x, y] += t * fa * (1 - gb)
                            out[:, 1, 1, x, y] += t * fa * gb
    return out


def gradient_batch(left, right, wb, h=1e-6):
    """Central finite-difference gradients of the CHSH objective, one row per
    wiring.  Perturbed points are evaluated without projection."""
    wb = np.asarray(wb, dtype=float)
    m = wb.shape[0]
    grad = np.empty((m, 32))
    for i in range(32):
        wp = wb.copy()
        wp[:, i] += h
        wm = wb.copy()
        wm[:, i] -= h
        grad[:, i] = (objective_batch(left, right, wp) - objective_batch(left, right, wm)) / (2 * h)
    return grad


def gradient_power_batch(p, wb, power, h=1e-6):
    wb = np.asarray(wb, dtype=float)
    m = wb.shape[0]
    grad = np.empty((m, 32))
    for i in range(32):
        wp = wb.copy()
        wp[:, i] += h
        wm = wb.copy()
        wm[:, i] -= h
        grad[:, i] = (
            objective_power_batch(p, wp, power) - objective_power_batch(p, wm, power)
        ) / (2 * h)
    return grad


def project_batch(wb):
    """Feasible-set projection, vectorized over wiring rows: clamp to [0,1],
    then for each x (resp. y) average whichever of the (f1,f2) (resp. (g1,g2))
    pairs has the smaller gap, averaging f1 (resp. g1) on ties."""
    wb = np.clip(np.asarray(wb, dtype=float), 0.0, 1.0).copy()
    for x in (0, 1):
        i1 = 0 + 2 * x
        i2 = 8 + 2 * x
        d1 = np.abs(wb[:, i1] - wb[:, i1 + 1])
        d2 = np.abs(wb[:, i2] - wb[:, i2 + 1])
        pick1 = d1 <= d2
        avg1 = 0.5 * (wb[:, i1] + wb[:, i1 + 1])
        avg2 = 0.5 * (wb[:, i2] + wb[:, i2 + 1])
        wb[pick1, i1] = avg1[pick1]
        wb[pick1, i1 + 1] = avg1[pick1]
        wb[~pick1, i2] = avg2[~pick1]
        wb[~pick1, i2 + 1] = avg2[~pick1]
    for y in (0, 1):
        i1 = 4 + 2 * y
        i2 = 12 + 2 * y
        d1 = np.abs(wb[:, i1] - wb[:, i1 + 1])
        d2 = np.abs(wb[:, i2] - wb[:, i2 + 1])
        pick1 = d1 <= d2
        avg1 = 0.5 * (wb[:, i1] + wb[:, i1 + 1])
        avg2 = 0.5 * (wb[:, i2] + wb[:, i2 + 1])
        wb[pick1, i1] = avg1[pick1]
        wb[pick1, i1 + 1] = avg1[pick1]
        wb[~pick1, i2] = avg2[~pick1]
        wb[~pick1, i2 + 1] = avg2[~pick1]
    return wb
