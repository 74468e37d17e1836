# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops; semantics mirror bekktail._kernels_py exactly."""
import numpy as np

from libc.math cimport fabs, isfinite, log, sqrt
cimport numpy as cnp

cnp.import_array()


def sre_chunk(const double[:, :, ::1] A, const cnp.int64_t[::1] lags, const double[:, ::1] chol,
              const double[:, :, ::1] normals, double[:, ::1] state, double[:, :, ::1] out,
              const cnp.int64_t[::1] record, double limit):
    """Advance each replica's stacked state through the chunk of pre-drawn normals.

    normals[r, t] holds the K slot weights followed by d noise draws.  After step t the
    state is copied to out[r, record[t]] unless record[t] < 0.  Returns (replica, step)
    of the first overflow or (-1, -1).
    """
    cdef Py_ssize_t R = normals.shape[0], T = normals.shape[1]
    cdef Py_ssize_t K = A.shape[0], d = A.shape[1], dq = state.shape[1]
    cdef Py_ssize_t r, t, k, a, b, i, off, slot
    cdef double acc, s, z, v
    cdef double[::1] top = np.empty(d)
    cdef Py_ssize_t bad_r = -1, bad_t = -1
    with nogil:
        for r in range(R):
            for t in range(T):
                for a in range(d):
                    acc = 0.0
                    for k in range(K):
                        off = lags[k] * d
                        s = 0.0
                        for b in range(d):
                            s = s + A[k, a, b] * state[r, off + b]
                        acc = acc + normals[r, t, k] * s
                    z = 0.0
                    for b in range(d):
                        z = z + chol[a, b] * normals[r, t, K + b]
                    top[a] = acc + z
                for i in range(dq - 1, d - 1, -1):
                    state[r, i] = state[r, i - d]
                for a in range(d):
                    v = top[a]
                    state[r, a] = v
                    if not isfinite(v) or fabs(v) > limit:
                        bad_r = r
                        bad_t = t
                if bad_r >= 0:
                    break
                slot = record[t]
                if slot >= 0:
                    for i in range(dq):
                        out[r, slot, i] = state[r, i]
            if bad_r >= 0:
                break
    return bad_r, bad_t


def lyap_chunk(const double[:, :, ::1] A, const cnp.int64_t[::1] lags, const double[:, :, ::1] normals,
               double[:, :, ::1] prod, double[::1] logscale, Py_ssize_t renorm_every, Py_ssize_t step0):
    """Left-multiply prod[r] by the random companion matrices of the chunk.

    Every ``renorm_every`` global steps prod[r] is divided by its Frobenius norm and the
    log of that norm is added to logscale[r].
    """
    cdef Py_ssize_t R = normals.shape[0], T = normals.shape[1]
    cdef Py_ssize_t K = A.shape[0], d = A.shape[1], dq = prod.shape[1]
    cdef Py_ssize_t r, t, k, a, b, c, i, off
    cdef double s, m, fro
    cdef double[:, ::1] top = np.empty((d, dq))
    with nogil:
        for r in range(R):
            for t in range(T):
                for a in range(d):
                    for c in range(dq):
                        top[a, c] = 0.0
                for k in range(K):
                    m = normals[r, t, k]
                    off = lags[k] * d
                    for a in range(d):
                        for c in range(dq):
                            s = 0.0
                            for b in range(d):
                                s = s + A[k, a, b] * prod[r, off + b, c]
                            top[a, c] = top[a, c] + m * s
                for i in range(dq - 1, d - 1, -1):
                    for c in range(dq):
                        prod[r, i, c] = prod[r, i - d, c]
                for a in range(d):
                    for c in range(dq):
                        prod[r, a, c] = top[a, c]
                if (step0 + t + 1) % renorm_every == 0:
                    fro = 0.0
                    for i in range(dq):
                        for c in range(dq):
                            fro = fro + prod[r, i, c] * prod[r, i, c]
                    fro = sqrt(fro)
                    if fro > 0.0:
                        for i in range(dq):
                            for c in range(dq):
                                prod[r, i, c] = prod[r, i, c] / fro
                    logscale[r] = logscale[r] + log(fro)
    return None
