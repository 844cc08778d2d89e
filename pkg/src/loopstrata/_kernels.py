"""Hot inner loops: numba-compiled when available, pure numpy otherwise.

Set ``LOOPSTRATA_NUMBA=0`` to force the numpy path.  Both paths are kept
bit-identical; ``tests/test_kernels.py`` compares them on random inputs and
``benchmarks/bench_kernels.py`` times them.
"""

import os

import numpy as np

_want_numba = os.environ.get("LOOPSTRATA_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _want_numba:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy reference implementations


def _np_affine_length(c, R, lam):
    v = c - R @ lam
    return int(v[v > 0].sum())


def _np_affine_lengths_batch(C, R, lams):
    v = C - lams @ R.T
    return np.where(v > 0, v, 0).sum(axis=1).astype(np.int64)


def _np_fold_add(terms, add):
    # terms: (k, ...) field elements, summed along axis 0
    if add[1, 1] == 0 and terms.shape[0] > 0:
        return np.bitwise_xor.reduce(terms, axis=0)
    out = np.zeros(terms.shape[1:], dtype=np.int64)
    for t in terms:
        out = add[out, t]
    return out


def _np_series_scale_rows(m, rows, mul, add):
    L = rows.shape[0]
    out = np.zeros_like(rows)
    prods = mul[m[:L, None, None], rows[None, :, :]]  # (a, b, j)
    for k in range(L):
        a = np.arange(min(k + 1, m.shape[0]))
        out[k] = _np_fold_add(prods[a, k - a], add)
    return out


def _np_gf_matmul(A, B, mul, add):
    prods = mul[A[:, :, None], B[None, :, :]]  # (i, k, j)
    return _np_fold_add(np.moveaxis(prods, 1, 0), add)


def _np_series_matmul(A, B, L, mul, add):
    n = A.shape[1]
    out = np.zeros((L, n, B.shape[2]), dtype=np.int64)
    for k in range(L):
        acc = None
        for a in range(min(k + 1, A.shape[0])):
            b = k - a
            if b >= B.shape[0]:
                continue
            term = _np_gf_matmul(A[a], B[b], mul, add)
            acc = term if acc is None else add[acc, term]
        if acc is not None:
            out[k] = acc
    return out


def _np_gf_batch_sandwich(G, X, H, mul, add):
    # out[k] = G @ X[k] @ H
    left = _np_fold_add(np.moveaxis(mul[G[None, :, :, None], X[:, None, :, :]], 2, 0), add)
    return _np_fold_add(np.moveaxis(mul[left[:, :, :, None], H[None, None, :, :]], 2, 0), add)


# ---------------------------------------------------------------------------
# numba versions

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_affine_length(c, R, lam):
        total = 0
        for a in range(R.shape[0]):
            v = c[a]
            for j in range(R.shape[1]):
                v -= R[a, j] * lam[j]
            if v > 0:
                total += v
        return total

    @njit(cache=True)
    def _nb_affine_lengths_batch(C, R, lams):
        out = np.zeros(lams.shape[0], dtype=np.int64)
        for k in range(lams.shape[0]):
            total = 0
            for a in range(R.shape[0]):
                v = C[k, a]
                for j in range(R.shape[1]):
                    v -= R[a, j] * lams[k, j]
                if v > 0:
                    total += v
            out[k] = total
        return out

    @njit(cache=True)
    def _nb_series_scale_rows(m, rows, mul, add):
        L = rows.shape[0]
        n = rows.shape[1]
        out = np.zeros_like(rows)
        for k in range(L):
            for a in range(min(k + 1, m.shape[0])):
                ma = m[a]
                if ma == 0:
                    continue
                for j in range(n):
                    out[k, j] = add[out[k, j], mul[ma, rows[k - a, j]]]
        return out

    @njit(cache=True)
    def _nb_gf_matmul(A, B, mul, add):
        n, r = A.shape
        c = B.shape[1]
        out = np.zeros((n, c), dtype=np.int64)
        for i in range(n):
            for k in range(r):
                aik = A[i, k]
                if aik == 0:
                    continue
                for j in range(c):
                    out[i, j] = add[out[i, j], mul[aik, B[k, j]]]
        return out

    @njit(cache=True)
    def _nb_series_matmul(A, B, L, mul, add):
        n = A.shape[1]
        r = A.shape[2]
        c = B.shape[2]
        out = np.zeros((L, n, c), dtype=np.int64)
        for a in range(min(L, A.shape[0])):
            for b in range(min(L - a, B.shape[0])):
                k = a + b
                for i in range(n):
                    for s in range(r):
                        x = A[a, i, s]
                        if x == 0:
                            continue
                        for j in range(c):
                            out[k, i, j] = add[out[k, i, j], mul[x, B[b, s, j]]]
        return out

    @njit(cache=True)
    def _nb_gf_batch_sandwich(G, X, H, mul, add):
        K = X.shape[0]
        n = X.shape[1]
        out = np.zeros_like(X)
        tmp = np.zeros((n, n), dtype=np.int64)
        for k in range(K):
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for s in range(n):
                        acc = add[acc, mul[G[i, s], X[k, s, j]]]
                    tmp[i, j] = acc
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for s in range(n):
                        acc = add[acc, mul[tmp[i, s], H[s, j]]]
                    out[k, i, j] = acc
        return out


# ---------------------------------------------------------------------------
# dispatch


def _pick(nb_name, np_func):
    if HAVE_NUMBA:
        return globals()[nb_name]
    return np_func


affine_length = _pick("_nb_affine_length", _np_affine_length)
affine_lengths_batch = _pick("_nb_affine_lengths_batch", _np_affine_lengths_batch)
series_scale_rows = _pick("_nb_series_scale_rows", _np_series_scale_rows)
gf_matmul = _pick("_nb_gf_matmul", _np_gf_matmul)
series_matmul = _pick("_nb_series_matmul", _np_series_matmul)
gf_batch_sandwich = _pick("_nb_gf_batch_sandwich", _np_gf_batch_sandwich)

NUMPY_KERNELS = {
    "affine_length": _np_affine_length,
    "affine_lengths_batch": _np_affine_lengths_batch,
    "series_scale_rows": _np_series_scale_rows,
    "gf_matmul": _np_gf_matmul,
    "series_matmul": _np_series_matmul,
    "gf_batch_sandwich": _np_gf_batch_sandwich,
}

NUMBA_KERNELS = (
    {
        "affine_length": _nb_affine_length,
        "affine_lengths_batch": _nb_affine_lengths_batch,
        "series_scale_rows": _nb_series_scale_rows,
        "gf_matmul": _nb_gf_matmul,
        "series_matmul": _nb_series_matmul,
        "gf_batch_sandwich": _nb_gf_batch_sandwich,
    }
    if HAVE_NUMBA
    else {}
)
