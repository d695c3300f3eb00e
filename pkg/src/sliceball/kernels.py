"""Hot loops over quaternion arrays.

Quaternions are rows ``[w, x, y, z]`` of float64 arrays.  Every kernel exists
twice: a loop version compiled with numba (``*_nb``) and a vectorised numpy
version (``*_np``).  The unsuffixed names point at whichever one
``SLICEBALL_PURE_NUMPY`` selects; both stay importable so tests and the
benchmark can compare them.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# -- numpy ------------------------------------------------------------------

def qmul_np(a, b):
    """Hamilton product of broadcastable ``(..., 4)`` arrays."""
    a0, a1, a2, a3 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    b0, b1, b2, b3 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def horner_np(coeffs, points):
    # a0 + q(a1 + q(a2 + ...)), q acting on the left
    coeffs = np.asarray(coeffs, dtype=float)
    points = np.asarray(points, dtype=float)
    out = np.broadcast_to(coeffs[-1], points.shape).copy()
    for n in range(coeffs.shape[0] - 2, -1, -1):
        out = qmul_np(points, out)
        out += coeffs[n]
    return out


def star_np(a, b, order):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros((order + 1, 4))
    for n in range(order + 1):
        lo = max(0, n - b.shape[0] + 1)
        hi = min(n, a.shape[0] - 1)
        if lo > hi:
            continue
        k = np.arange(lo, hi + 1)
        out[n] = qmul_np(a[k], b[n - k]).sum(axis=0)
    return out


def invert_real_np(c, order):
    c = np.asarray(c, dtype=float)
    out = np.zeros(order + 1)
    out[0] = 1.0 / c[0]
    for n in range(1, order + 1):
        m = min(n, c.shape[0] - 1)
        out[n] = -np.dot(c[1:m + 1], out[n - 1::-1][:m]) / c[0]
    return out


# -- numba ------------------------------------------------------------------

@njit
def _qmul_into(a0, a1, a2, a3, b0, b1, b2, b3, out, i):
    out[i, 0] = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    out[i, 1] = a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2
    out[i, 2] = a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1
    out[i, 3] = a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0


@njit
def qmul_nb(a, b):
    n = a.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        _qmul_into(a[i, 0], a[i, 1], a[i, 2], a[i, 3],
                   b[i, 0], b[i, 1], b[i, 2], b[i, 3], out, i)
    return out


@njit
def horner_nb(coeffs, points):
    m = points.shape[0]
    top = coeffs.shape[0] - 1
    out = np.empty((m, 4))
    for i in range(m):
        q0, q1, q2, q3 = points[i, 0], points[i, 1], points[i, 2], points[i, 3]
        r0, r1, r2, r3 = coeffs[top, 0], coeffs[top, 1], coeffs[top, 2], coeffs[top, 3]
        for n in range(top - 1, -1, -1):
            t0 = q0 * r0 - q1 * r1 - q2 * r2 - q3 * r3
            t1 = q0 * r1 + q1 * r0 + q2 * r3 - q3 * r2
            t2 = q0 * r2 - q1 * r3 + q2 * r0 + q3 * r1
            t3 = q0 * r3 + q1 * r2 - q2 * r1 + q3 * r0
            r0 = t0 + coeffs[n, 0]
            r1 = t1 + coeffs[n, 1]
            r2 = t2 + coeffs[n, 2]
            r3 = t3 + coeffs[n, 3]
        out[i, 0] = r0
        out[i, 1] = r1
        out[i, 2] = r2
        out[i, 3] = r3
    return out


@njit
def star_nb(a, b, order):
    out = np.zeros((order + 1, 4))
    na = a.shape[0]
    nb_ = b.shape[0]
    for n in range(order + 1):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        lo = max(0, n - nb_ + 1)
        hi = min(n, na - 1)
        for k in range(lo, hi + 1):
            x0, x1, x2, x3 = a[k, 0], a[k, 1], a[k, 2], a[k, 3]
            y0, y1, y2, y3 = b[n - k, 0], b[n - k, 1], b[n - k, 2], b[n - k, 3]
            s0 += x0 * y0 - x1 * y1 - x2 * y2 - x3 * y3
            s1 += x0 * y1 + x1 * y0 + x2 * y3 - x3 * y2
            s2 += x0 * y2 - x1 * y3 + x2 * y0 + x3 * y1
            s3 += x0 * y3 + x1 * y2 - x2 * y1 + x3 * y0
        out[n, 0] = s0
        out[n, 1] = s1
        out[n, 2] = s2
        out[n, 3] = s3
    return out


@njit
def invert_real_nb(c, order):
    out = np.zeros(order + 1)
    out[0] = 1.0 / c[0]
    nc = c.shape[0]
    for n in range(1, order + 1):
        s = 0.0
        for k in range(1, min(n, nc - 1) + 1):
            s += c[k] * out[n - k]
        out[n] = -s / c[0]
    return out


if USE_NUMBA:
    def qmul(a, b):
        a = np.ascontiguousarray(a, dtype=np.float64)
        b = np.ascontiguousarray(b, dtype=np.float64)
        if a.ndim == 2 and b.ndim == 2 and a.shape == b.shape:
            return qmul_nb(a, b)
        return qmul_np(a, b)

    def horner(coeffs, points):
        c = np.ascontiguousarray(coeffs, dtype=np.float64)
        p = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 4)
        return horner_nb(c, p).reshape(np.shape(points))

    def star(a, b, order):
        return star_nb(np.ascontiguousarray(a, dtype=np.float64),
                       np.ascontiguousarray(b, dtype=np.float64), int(order))

    def invert_real(c, order):
        return invert_real_nb(np.ascontiguousarray(c, dtype=np.float64), int(order))
else:
    qmul = qmul_np
    horner = horner_np
    star = star_np
    invert_real = invert_real_np
