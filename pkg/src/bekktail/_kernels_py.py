"""Numpy implementations of the inner loops, vectorized over replicas.

Used when the compiled extension is unavailable or BEKKTAIL_BACKEND=python.
"""
import numpy as np


def sre_chunk(A, lags, chol, normals, state, out, record, limit):
    with np.errstate(over="ignore", invalid="ignore"):
        return _sre_chunk(A, lags, chol, normals, state, out, record, limit)


def _sre_chunk(A, lags, chol, normals, state, out, record, limit):
    R, T, _ = normals.shape
    K, d, _ = A.shape
    dq = state.shape[1]
    bad_t = np.full(R, -1, dtype=np.int64)
    alive = np.ones(R, dtype=bool)
    for t in range(T):
        m = normals[:, t, :K]
        z = normals[:, t, K:]
        top = np.zeros((R, d))
        for k in range(K):
            off = lags[k] * d
            top += m[:, k, None] * (state[:, off:off + d] @ A[k].T)
        top += z @ chol.T
        shifted = state[:, :dq - d].copy()
        state[alive, d:] = shifted[alive]
        state[alive, :d] = top[alive]
        bad = alive & (~np.isfinite(top).all(axis=1) | (np.abs(top) > limit).any(axis=1))
        if bad.any():
            bad_t[bad] = t
            alive &= ~bad
        slot = record[t]
        if slot >= 0:
            out[alive, slot] = state[alive]
    hit = np.flatnonzero(bad_t >= 0)
    if hit.size:
        return int(hit[0]), int(bad_t[hit[0]])
    return -1, -1


def lyap_chunk(A, lags, normals, prod, logscale, renorm_every, step0):
    R, T, K = normals.shape
    d = A.shape[1]
    dq = prod.shape[1]
    for t in range(T):
        top = np.zeros((R, d, dq))
        for k in range(K):
            off = lags[k] * d
            top += normals[:, t, k, None, None] * np.matmul(A[k], prod[:, off:off + d, :])
        prod[:, d:, :] = prod[:, :dq - d, :].copy()
        prod[:, :d, :] = top
        if (step0 + t + 1) % renorm_every == 0:
            fro = np.sqrt(np.einsum("rij,rij->r", prod, prod))
            with np.errstate(divide="ignore"):
                logscale += np.log(fro)
            nz = fro > 0
            prod[nz] /= fro[nz, None, None]
    return None
