"""GL_n over F_{q^m}((t)): truncated Laurent-series matrices, Cartan and
Iwahori decompositions, Frobenius twists and Newton points."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from . import _kernels
from .affine import AffineElt
from .errors import InsufficientPrecision
from .fields import FiniteField, LaurentSeries, field
from .rootdatum import GL


@lru_cache(maxsize=None)
def gl_datum(n):
    return GL(n)


def _check_gl(datum):
    if not datum.name.startswith("GL:"):
        raise ValueError(f"matrix algorithms are implemented for GL_n only, got {datum.name}")
    return int(datum.name.split(":")[1])


class LaurentMatrix:
    """n×n matrix Σ_k C[k] t^{v+k}, exact (precision None) or known modulo t^N."""

    __slots__ = ("field", "v", "C", "N")

    def __init__(self, F, v, C, N=None):
        C = np.asarray(C, dtype=np.int64)
        if C.ndim != 3 or C.shape[1] != C.shape[2]:
            raise ValueError("coefficient array must have shape (L, n, n)")
        if N is not None:
            L = max(int(N) - int(v), 0)
            if C.shape[0] < L:
                C = np.concatenate([C, np.zeros((L - C.shape[0],) + C.shape[1:], dtype=np.int64)])
            C = C[:L]
        self.field, self.v, self.C, self.N = F, int(v), C, (None if N is None else int(N))
        self.C.setflags(write=False)

    # ------------------------------------------------------------ constructors

    @property
    def n(self):
        return self.C.shape[1]

    @property
    def L(self):
        return self.C.shape[0]

    @classmethod
    def zeros(cls, F, n, N=None):
        return cls(F, 0, np.zeros((1, n, n), dtype=np.int64), N)

    @classmethod
    def identity(cls, F, n, N=None):
        return cls.constant(F, np.eye(n, dtype=np.int64), N)

    @classmethod
    def constant(cls, F, A, N=None):
        A = np.asarray(A, dtype=np.int64)
        return cls(F, 0, A[None], N)

    @classmethod
    def monomial(cls, x, F, N=None):
        """P_w·diag(t^λ) for x = w ε^λ in W̃(GL_n)."""
        n = _check_gl(x.datum)
        perm = x.datum.mats[x.w]
        lo, hi = min(x.lam), max(x.lam)
        C = np.zeros((hi - lo + 1, n, n), dtype=np.int64)
        for i in range(n):
            wi = int(np.nonzero(perm[:, i])[0][0])
            C[x.lam[i] - lo, wi, i] = 1
        return cls(F, lo, C, N)

    @classmethod
    def from_entries(cls, F, rows, N):
        """From a nested list of LaurentSeries (or {exponent: element} dicts)."""
        n = len(rows)
        terms = [[r.terms() if isinstance(r, LaurentSeries) else dict(r) for r in row] for row in rows]
        if any(len(row) != n for row in terms):
            raise ValueError("matrix must be square")
        exps = [e for row in terms for t in row for e in t]
        v = min(exps) if exps else 0
        if N is not None:
            v = min(v, N)
        top = (N if N is not None else max(exps, default=0) + 1)
        C = np.zeros((max(top - v, 1), n, n), dtype=np.int64)
        for i, row in enumerate(terms):
            for j, t in enumerate(row):
                for e, c in t.items():
                    if N is None or e < N:
                        C[e - v, i, j] = c
        return cls(F, v, C, N)

    def entry(self, i, j):
        terms = {self.v + k: int(self.C[k, i, j]) for k in range(self.L) if self.C[k, i, j]}
        prec = self.N
        if prec is None:
            return LaurentSeries.make(self.field, terms, self.v + self.L) if terms else LaurentSeries.make(self.field, {}, self.v + self.L)
        return LaurentSeries.make(self.field, terms, prec)

    def entries(self):
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    # --------------------------------------------------------------- algebra

    def normalized(self):
        """Drop leading zero layers (raising v) and trailing zero layers of exact matrices."""
        nz = np.nonzero(self.C.reshape(self.L, -1).any(axis=1))[0]
        if nz.size == 0:
            return LaurentMatrix(self.field, self.v if self.N is None else self.N, np.zeros((0 if self.N is not None else 1, self.n, self.n)), self.N)
        lo = int(nz[0])
        hi = self.L if self.N is not None else int(nz[-1]) + 1
        return LaurentMatrix(self.field, self.v + lo, self.C[lo:hi], self.N)

    @property
    def valuation(self):
        nz = np.nonzero(self.C.reshape(self.L, -1).any(axis=1))[0]
        return None if nz.size == 0 else self.v + int(nz[0])

    def __matmul__(self, other):
        F = self.field
        v = self.v + other.v
        if self.N is None and other.N is None:
            N = None
            L = self.L + other.L - 1
        else:
            cands = []
            if self.N is not None:
                cands.append(self.N + other.v)
            if other.N is not None:
                cands.append(other.N + self.v)
            N = min(cands)
            L = max(N - v, 0)
        C = _kernels.series_matmul(self.C, other.C, max(L, 1), F.mul, F.add)[:L] if L else np.zeros((0, self.n, other.n), dtype=np.int64)
        return LaurentMatrix(F, v, C, N)

    def __add__(self, other):
        return self._combine(other, self.field.add)

    def __sub__(self, other):
        return self._combine(other, self.field.sub)

    def _combine(self, other, table):
        v = min(self.v, other.v)
        Ns = [x for x in (self.N, other.N) if x is not None]
        N = min(Ns) if Ns else None
        top = N if N is not None else max(self.v + self.L, other.v + other.L)
        L = max(top - v, 0)
        A = np.zeros((L, self.n, self.n), dtype=np.int64)
        B = np.zeros_like(A)
        for M, T in ((self, A), (other, B)):
            k = min(M.L, L - (M.v - v))
            if k > 0:
                T[M.v - v:M.v - v + k] = M.C[:k]
        return LaurentMatrix(self.field, v, table[A, B], N)

    def shift(self, k):
        """t^k · self."""
        return LaurentMatrix(self.field, self.v + k, self.C, None if self.N is None else self.N + k)

    def sigma(self, power=1):
        F = self.field
        return LaurentMatrix(F, self.v, F.sigma(self.C, power), self.N)

    def truncate(self, N):
        if self.N is not None and N > self.N:
            raise InsufficientPrecision(f"cannot raise precision from {self.N} to {N}", required=N)
        return LaurentMatrix(self.field, min(self.v, N), self.C if self.v <= N else self.C[:0], N)

    def with_precision(self, N):
        """Exact matrices may be given any precision; others only lowered."""
        if self.N is None:
            return LaurentMatrix(self.field, min(self.v, N), self.C, N)
        return self.truncate(N)

    def reduction(self):
        """The matrix mod t (requires integral entries)."""
        if self.valuation is not None and self.valuation < 0:
            raise ValueError("reduction mod t needs entries in O")
        if self.N is not None and self.N <= 0:
            raise InsufficientPrecision("matrix not known modulo t", required=1)
        if self.v > 0 or self.L == 0:
            return np.zeros((self.n, self.n), dtype=np.int64)
        return self.C[-self.v].copy()

    def in_K(self):
        return (self.valuation is None or self.valuation >= 0) and gf_det(self.field, self.reduction()) != 0

    def in_K1(self):
        return self.in_K() and np.array_equal(self.reduction(), np.eye(self.n, dtype=np.int64))

    def in_iwahori(self):
        if not self.in_K():
            return False
        return not np.tril(self.reduction(), -1).any()

    def inverse_K(self):
        """Inverse of an element of K, by Newton iteration X ← X(2 − gX)."""
        if not self.in_K():
            raise ValueError("inverse_K needs an element of K")
        F, n = self.field, self.n
        N = self.N
        target = N if N is not None else max(self.L, 1) * 4
        # X is carried as an exact approximant, correct modulo t^prec
        X = LaurentMatrix.constant(F, gf_inv(F, self.reduction()), None)
        two = LaurentMatrix.constant(F, gf_scale(F, np.eye(n, dtype=np.int64), F.scalar(2)), None)
        prec = 1
        while prec < target:
            prec = min(2 * prec, target)
            Y = (X @ (two - self.with_precision(prec) @ X)).truncate(prec)
            X = LaurentMatrix(F, Y.v, Y.C, None)
        return X.with_precision(target)

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix) or other.N != self.N or other.field != self.field:
            return False
        a, b = self.normalized(), other.normalized()
        return a.v == b.v and a.C.shape == b.C.shape and np.array_equal(a.C, b.C)

    def __hash__(self):
        a = self.normalized()
        return hash((a.v, a.N, a.C.tobytes()))

    def __repr__(self):
        from .fields import format_series
        rows = ["[" + ", ".join(format_series(e) for e in row) + "]" for row in self.entries()]
        prec = "exact" if self.N is None else f"mod t^{self.N}"
        return f"LaurentMatrix({', '.join(rows)}; {prec})"


# ------------------------------------------------------- finite-field matrices


def gf_matmul(F, A, B):
    return _kernels.gf_matmul(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64), F.mul, F.add)


def gf_scale(F, A, c):
    return F.mul[c, np.asarray(A, dtype=np.int64)]


def gf_inv(F, A):
    A = np.array(A, dtype=np.int64)
    n = A.shape[0]
    M = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r, c]), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[[c, piv]] = M[[piv, c]]
        M[c] = F.mul[F.inv[M[c, c]], M[c]]
        for r in range(n):
            if r != c and M[r, c]:
                M[r] = F.sub[M[r], F.mul[M[r, c], M[c]]]
    return M[:, n:]


def gf_det(F, A):
    A = np.array(A, dtype=np.int64)
    n = A.shape[0]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r, c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[[c, piv]] = A[[piv, c]]
            det = int(F.neg[det])
        det = int(F.mul[det, A[c, c]])
        ic = F.inv[A[c, c]]
        for r in range(c + 1, n):
            if A[r, c]:
                A[r] = F.sub[A[r], F.mul[F.mul[A[r, c], ic], A[c]]]
    return det


def sigma_matrix(g, power=1):
    return g.sigma(power)


# ---------------------------------------------------------------- sampling


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _random_invertible(F, n, rng, lower_zero=False):
    while True:
        A = rng.integers(0, F.order, size=(n, n))
        if lower_zero:
            A = np.triu(A)
        if gf_det(F, A):
            return A.astype(np.int64)


def random_K(F, n, N, seed=None):
    rng = _rng(seed)
    C = rng.integers(0, F.order, size=(N, n, n)).astype(np.int64)
    C[0] = _random_invertible(F, n, rng)
    return LaurentMatrix(F, 0, C, N)


def random_K1(F, n, N, seed=None):
    rng = _rng(seed)
    C = rng.integers(0, F.order, size=(N, n, n)).astype(np.int64)
    C[0] = np.eye(n, dtype=np.int64)
    return LaurentMatrix(F, 0, C, N)


def random_iwahori(F, n, N, seed=None):
    rng = _rng(seed)
    C = rng.integers(0, F.order, size=(N, n, n)).astype(np.int64)
    C[0] = _random_invertible(F, n, rng, lower_zero=True)
    return LaurentMatrix(F, 0, C, N)


def random_double_coset_element(x, F, N, seed=None):
    """i1 · x · i2 with i1, i2 uniform in I modulo t^N (entries of x
    are exact, so the product is known modulo t^{N + min λ})."""
    rng = _rng(seed)
    n = _check_gl(x.datum)
    mono = LaurentMatrix.monomial(x, F)
    return random_iwahori(F, n, N, rng) @ mono @ random_iwahori(F, n, N, rng)


# ------------------------------------------------------------ series helpers


def _first_nz(a):
    nz = np.nonzero(a)[0]
    return int(nz[0]) if nz.size else a.shape[0]


def _unit_inverse(F, u, L):
    out = np.zeros(L, dtype=np.int64)
    if L == 0:
        return out
    i0 = int(F.inv[u[0]])
    out[0] = i0
    for k in range(1, L):
        acc = 0
        for j in range(1, min(k, u.shape[0] - 1) + 1):
            acc = F.add[acc, F.mul[u[j], out[k - j]]]
        out[k] = F.mul[F.neg[acc], i0]
    return out


def _quotient(F, a, p, k, L):
    """a / p as a series of length L, where p = t^k·unit and val(a) ≥ k."""
    a_sh = np.zeros(L, dtype=np.int64)
    seg = a[k:]
    a_sh[:min(L, seg.shape[0])] = seg[:L]
    u = np.zeros(L, dtype=np.int64)
    seg = p[k:]
    u[:min(L, seg.shape[0])] = seg[:L]
    return _kernels.series_scale_rows(_unit_inverse(F, u, L), a_sh[:, None], F.mul, F.add)[:, 0]


class _Eliminator:
    """Row/column elimination on an (L, n, n) coefficient block, keeping the
    inverse transforms modulo t so that A = E⁻¹·(result)·F⁻¹."""

    def __init__(self, F, C, track=True):
        self.F = F
        self.A = np.array(C, dtype=np.int64)
        self.L, n = self.A.shape[0], self.A.shape[1]
        self.n = n
        self.track = track
        self.Einv = np.eye(n, dtype=np.int64)
        self.Finv = np.eye(n, dtype=np.int64)

    def val(self, i, j):
        return _first_nz(self.A[:, i, j])

    def row_sub(self, i, r, c):
        """row_i ← row_i − c·row_r."""
        F = self.F
        prod = _kernels.series_scale_rows(c, self.A[:, r, :], F.mul, F.add)
        self.A[:, i, :] = F.sub[self.A[:, i, :], prod]
        if self.track and c.shape[0] and c[0]:
            self.Einv[:, r] = F.add[self.Einv[:, r], F.mul[c[0], self.Einv[:, i]]]

    def col_sub(self, j, r, c):
        """col_j ← col_j − c·col_r."""
        F = self.F
        prod = _kernels.series_scale_rows(c, self.A[:, :, r], F.mul, F.add)
        self.A[:, :, j] = F.sub[self.A[:, :, j], prod]
        if self.track and c.shape[0] and c[0]:
            self.Finv[r, :] = F.add[self.Finv[r, :], F.mul[c[0], self.Finv[j, :]]]

    def clear_around(self, r, c):
        F = self.F
        k = self.val(r, c)
        p = self.A[:, r, c].copy()
        for i in range(self.n):
            if i != r and self.A[:, i, c].any():
                self.row_sub(i, r, _quotient(F, self.A[:, i, c], p, k, self.L))
        for j in range(self.n):
            if j != c and self.A[:, r, j].any():
                self.col_sub(j, c, _quotient(F, self.A[:, r, j], p, k, self.L))


def _working_copy(g):
    """Coefficient block and working length; exact matrices are padded far
    enough that every pivot is certified."""
    if g.N is None:
        L = g.L * g.n + 1
        C = np.zeros((L, g.n, g.n), dtype=np.int64)
        C[:g.L] = g.C
        return C, L
    return np.array(g.C), g.L


def cartan_decomposition(g):
    """Return (μ, k̄1, k̄2) with g = k1·ε^μ·k2, μ dominant and k1, k2 ∈ K
    known modulo t (the reductions k̄1, k̄2 ∈ GL_n(F))."""
    F, n = g.field, g.n
    C, L = _working_copy(g)
    el = _Eliminator(F, C)
    rows, cols = list(range(n)), list(range(n))
    pivots = []
    while rows:
        best = None
        for i in rows:
            for j in cols:
                k = el.val(i, j)
                if k < L and (best is None or k < best[0]):
                    best = (k, i, j)
        if best is None:
            raise InsufficientPrecision(
                f"{len(rows)} elementary divisors are not visible modulo t^{g.v + L}",
                required=(g.N or 0) + 1)
        k, i, j = best
        el.clear_around(i, j)
        rows.remove(i)
        cols.remove(j)
        pivots.append((k, i, j))
    # result: entry (i, j) = t^k·unit at pivot positions.  Reorder so the
    # largest exponent sits first, giving a dominant diagonal.
    pivots.sort(key=lambda p: -p[0])
    mu = tuple(g.v + k for k, _, _ in pivots)
    Pl = np.zeros((n, n), dtype=np.int64)
    Pr = np.zeros((n, n), dtype=np.int64)
    for pos, (k, i, j) in enumerate(pivots):
        u0 = int(el.A[k, i, j])
        Pl[i, pos] = 1
        Pr[pos, j] = u0
    # A = Einv · (Σ unit_pos t^{μ_pos} E_{i_pos, j_pos}) · Finv = (Einv Pl) ε^μ (Pr Finv) mod t
    k1 = gf_matmul(F, el.Einv, Pl)
    k2 = gf_matmul(F, Pr, el.Finv)
    return mu, k1, k2


def cartan_type(g):
    return cartan_decomposition(g)[0]


def iwahori_double_coset(g, datum=None):
    """The unique x ∈ W̃ with g ∈ I x I."""
    return iwahori_decomposition(g, datum)[1]


def iwahori_decomposition(g, datum=None):
    """Return (ī1, x, ī2) with g = i1·x·i2, i1, i2 ∈ I, given modulo t.

    Pivots minimize val(g_ij) + (j − i)/n, which makes every elimination
    step an Iwahori row or column operation."""
    F, n = g.field, g.n
    datum = datum or gl_datum(n)
    C, L = _working_copy(g)
    el = _Eliminator(F, C)
    rows, cols = list(range(n)), list(range(n))
    lam = [0] * n
    target = [0] * n
    while rows:
        best = None
        for i in rows:
            for j in cols:
                k = el.val(i, j)
                if k < L:
                    key = (Fraction(k) + Fraction(j - i, n), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            raise InsufficientPrecision(f"Iwahori pivots not visible modulo t^{g.v + L}", required=(g.N or 0) + 1)
        _, i, j = best
        k = el.val(i, j)
        el.clear_around(i, j)
        rows.remove(i)
        cols.remove(j)
        lam[j] = g.v + k
        target[j] = i
    P = np.zeros((n, n), dtype=np.int64)
    U = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        P[target[j], j] = 1
        U[j, j] = int(el.A[lam[j] - g.v, target[j], j])
    x = AffineElt(datum, weyl_from_perm(datum, P), tuple(lam))
    return el.Einv, x, gf_matmul(F, U, el.Finv)


def weyl_from_perm(datum, P):
    table = getattr(datum, "_mat_index", None)
    if table is None:
        table = datum._mat_index = {m.astype(np.int64).tobytes(): i for i, m in enumerate(datum.mats)}
    return table[np.asarray(P, dtype=np.int64).tobytes()]


# ------------------------------------------------------------------- Newton


def _series_of(g, i, j):
    return g.v, g.C[:, i, j], g.N


def _s_mul(F, a, b):
    va, ca, Na = a
    vb, cb, Nb = b
    v = va + vb
    if Na is None and Nb is None:
        L = ca.shape[0] + cb.shape[0] - 1
        N = None
    else:
        N = min(x for x in ((Na + vb) if Na is not None else None, (Nb + va) if Nb is not None else None) if x is not None)
        L = max(N - v, 0)
    if L <= 0 or ca.shape[0] == 0 or cb.shape[0] == 0:
        return (v, np.zeros(max(L, 0), dtype=np.int64), N)
    out = _kernels.series_scale_rows(ca, _pad(cb, L)[:, None], F.mul, F.add)[:, 0]
    return (v, out, N)


def _pad(c, L):
    out = np.zeros(L, dtype=np.int64)
    k = min(L, c.shape[0])
    out[:k] = c[:k]
    return out


def _s_add(F, a, b, table=None):
    table = F.add if table is None else table
    va, ca, Na = a
    vb, cb, Nb = b
    v = min(va, vb)
    Ns = [x for x in (Na, Nb) if x is not None]
    N = min(Ns) if Ns else None
    top = N if N is not None else max(va + ca.shape[0], vb + cb.shape[0])
    L = max(top - v, 0)
    A = np.zeros(L, dtype=np.int64)
    B = np.zeros(L, dtype=np.int64)
    for (w, c), T in (((va, ca), A), ((vb, cb), B)):
        k = min(c.shape[0], L - (w - v))
        if k > 0:
            T[w - v:w - v + k] = c[:k]
    return (v, table[A, B], N)


def _s_val(s):
    v, c, N = s
    k = _first_nz(c)
    if k < c.shape[0]:
        return v + k
    return None  # zero modulo its precision (or exactly zero)


def charpoly_coefficients(g):
    """c_1..c_n with det(X − g) = X^n + c_1 X^{n-1} + ... + c_n, as series
    triples (valuation offset, coefficients, precision).  Principal minors by
    the Leibniz expansion; the sign of c_k is irrelevant for valuations but
    kept for correctness."""
    F, n = g.field, g.n
    entries = [[_series_of(g, i, j) for j in range(n)] for i in range(n)]
    zero = (0, np.zeros(0, dtype=np.int64), None)
    coeffs = []
    for k in range(1, n + 1):
        total = zero
        for S in combinations(range(n), k):
            for perm in permutations(range(k)):
                term = (0, np.ones(1, dtype=np.int64), None)
                for a in range(k):
                    term = _s_mul(F, term, entries[S[a]][S[perm[a]]])
                sign = _perm_sign(perm)
                total = _s_add(F, total, term, F.add if sign > 0 else F.sub)
        if k % 2 == 1:
            v, c, N = total
            total = (v, F.neg[c], N)
        coeffs.append(total)
    return coeffs


def _perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def newton_polygon_slopes(coeffs, n):
    """Slopes of the lower convex hull of (k, val c_k), c_0 = 1, ascending."""
    pts = [(0, 0)]
    unknown = []
    for k, s in enumerate(coeffs, start=1):
        val = _s_val(s)
        if val is None:
            if s[2] is None:
                continue  # exactly zero
            unknown.append((k, s[2]))
        else:
            pts.append((k, val))
    if pts[-1][0] != n:
        raise InsufficientPrecision("determinant is not visible at this precision")
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    def hull_at(x):
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= x <= x2:
                return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
        return None
    for k, prec in unknown:
        if prec < hull_at(k):
            raise InsufficientPrecision(f"coefficient c_{k} is not known far enough to certify the polygon")
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes += [Fraction(y2 - y1, x2 - x1)] * (x2 - x1)
    return slopes


def twisted_product(g, s):
    out = g
    y = g
    for _ in range(s - 1):
        y = y.sigma()
        out = out @ y
    return out


def newton_matrix(g):
    """Newton point of the isocrystal (F((t))^n, gσ), dominant (decreasing).

    With s the order of σ on F, (gσ)^s is linear and its slopes are s times
    those of gσ."""
    n = g.n
    s = g.field.sigma_order
    prod = twisted_product(g, s)
    slopes = newton_polygon_slopes(charpoly_coefficients(prod), n)
    return tuple(sorted((x / s for x in slopes), reverse=True))
