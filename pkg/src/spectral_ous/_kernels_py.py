"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same two functions with identical semantics; the
results agree to rounding (Jacobi) or bit-for-bit (xorshift).
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def jacobi_sweeps(a_in, rel_tol, max_sweeps):
    A = np.array(a_in, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    fro = math.sqrt(float(np.sum(A * A)))

    def off_norm():
        off = A - np.diag(np.diag(A))
        return math.sqrt(float(np.sum(off * off)))

    off = off_norm()
    sweep = 0
    while off > rel_tol * fro and sweep < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = float((A[q, q] - A[p, p]) / (2.0 * apq))
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta >= 0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                v_p = V[:, p].copy()
                v_q = V[:, q].copy()
                V[:, p] = c * v_p - s * v_q
                V[:, q] = s * v_p + c * v_q
        sweep += 1
        off = off_norm()
    return np.diag(A).copy(), V, sweep, off


def xorshift_fill(state, out):
    x = int(state)
    for i in range(out.shape[0]):
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        out[i] = (((x * _MULT) & _MASK) >> 11) * (1.0 / 9007199254740992.0)
    return x
