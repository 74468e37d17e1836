import numpy as np
import pytest

from bekktail import _kernels_py
from bekktail.kernels import backend_name, compiled_available, get_backend

pytestmark = pytest.mark.skipif(not compiled_available(), reason="compiled kernels not built")


def _problem(seed, R=5, T=40, d=2, q=2, l=3):
    g = np.random.default_rng(seed)
    A = np.ascontiguousarray(g.normal(scale=0.4, size=(q * l, d, d)))
    lags = np.repeat(np.arange(q), l).astype(np.int64)
    chol = np.linalg.cholesky(np.eye(d) + 0.1)
    return g, A, lags, chol, R, T, d, q


@pytest.mark.parametrize("seed", range(5))
def test_sre_chunk_parity(seed):
    g, A, lags, chol, R, T, d, q = _problem(seed)
    normals = g.normal(size=(R, T, len(lags) + d))
    record = np.where(np.arange(T) % 2 == 1, np.arange(T) // 2, -1).astype(np.int64)
    outs = []
    for kern in (_kernels_py, get_backend("cython")):
        state = np.zeros((R, d * q))
        out = np.zeros((R, T // 2, d * q))
        res = kern.sre_chunk(A, lags, chol, normals, state, out, record, 1e300)
        outs.append((res, state, out))
    assert outs[0][0] == outs[1][0] == (-1, -1)
    assert np.allclose(outs[0][1], outs[1][1], rtol=1e-12, atol=0)
    assert np.allclose(outs[0][2], outs[1][2], rtol=1e-12, atol=0)


@pytest.mark.parametrize("seed", range(5))
def test_lyap_chunk_parity(seed):
    g, A, lags, chol, R, T, d, q = _problem(seed)
    normals = g.normal(size=(R, T, len(lags)))
    res = []
    for kern in (_kernels_py, get_backend("cython")):
        prod = np.broadcast_to(np.eye(d * q), (R, d * q, d * q)).copy()
        logscale = np.zeros(R)
        kern.lyap_chunk(A, lags, normals, prod, logscale, 10, 3)
        res.append((prod, logscale))
    assert np.allclose(res[0][0], res[1][0], rtol=1e-10, atol=1e-300)
    assert np.allclose(res[0][1], res[1][1], rtol=1e-12)


def test_overflow_reported_by_both():
    A = np.array([[[1e200]]])
    lags = np.zeros(1, dtype=np.int64)
    chol = np.eye(1)
    normals = np.ones((2, 5, 2))
    for kern in (_kernels_py, get_backend("cython")):
        out = np.zeros((2, 5, 1))
        r, t = kern.sre_chunk(A, lags, chol, normals, np.zeros((2, 1)), out, np.arange(5, dtype=np.int64), 1e300)
        assert (r, t) == (0, 2)


def test_backend_selection(monkeypatch):
    assert get_backend("python") is _kernels_py
    with pytest.raises(ValueError):
        get_backend("fortran")
    monkeypatch.setenv("BEKKTAIL_BACKEND", "python")
    assert get_backend() is _kernels_py
    assert backend_name() == "python"
