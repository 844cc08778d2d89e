"""Truncation of level 1 for GL_n matrices, the Iwahori reduction, and
brute-force orbit oracles on finite quotients."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .alcoves import TruncationType, ZipStages, _levi_part, _split
from .errors import ConventionBroken, Inconclusive, InsufficientPrecision, IterationCapExceeded, NotInCoset
from .matrices import (LaurentMatrix, cartan_decomposition, gf_det, gf_inv, gf_matmul, gl_datum,
                       iwahori_decomposition, weyl_from_perm)
from .rootdatum import Levi, WeylElt


# --------------------------------------------------------------- root data


@lru_cache(maxsize=None)
def _entry_roots(n):
    """Root index of the entry (i, j), i ≠ j, of GL_n (−1 on the diagonal)."""
    d = gl_datum(n)
    out = -np.ones((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j:
                v = [0] * n
                v[i], v[j] = 1, -1
                out[i, j] = d.root_index[tuple(v)]
    return out


def levi_mask(levi, n):
    R = _entry_roots(n)
    mask = np.eye(n, dtype=bool)
    for a in levi.roots:
        mask |= R == a
    return mask


def levi_projection(A, levi, n):
    """Zero the entries outside the Levi: the Levi factor of an element of a
    parabolic with that Levi."""
    return np.where(levi_mask(levi, n), A, 0)


def _perm(d, w):
    return d.mats[w]


# ---------------------------------------------------- finite Bruhat decomposition


def bruhat_decomposition(F, b, datum):
    """b = β1·P_π·β2 with β1, β2 upper triangular over F.

    Pivots are taken bottom row first, leftmost column; all row and column
    operations are upper triangular and stay inside any block Levi that
    contains b."""
    A = np.array(b, dtype=np.int64)
    n = A.shape[0]
    Einv = np.eye(n, dtype=np.int64)
    Finv = np.eye(n, dtype=np.int64)
    used = set()
    for r in range(n - 1, -1, -1):
        c = next(j for j in range(n) if j not in used and A[r, j])
        used.add(c)
        piv_inv = F.inv[A[r, c]]
        for j in range(c + 1, n):
            if A[r, j]:
                x = F.mul[A[r, j], piv_inv]
                A[:, j] = F.sub[A[:, j], F.mul[x, A[:, c]]]
                Finv[c, :] = F.add[Finv[c, :], F.mul[x, Finv[j, :]]]
        for i in range(r):
            if A[i, c]:
                x = F.mul[A[i, c], piv_inv]
                A[i, :] = F.sub[A[i, :], F.mul[x, A[r, :]]]
                Einv[:, r] = F.add[Einv[:, r], F.mul[x, Einv[:, i]]]
    P = (A != 0).astype(np.int64)
    D = np.diag(A[np.nonzero(A)[0], np.nonzero(A)[1]][np.argsort(np.nonzero(A)[0])])
    beta1 = gf_matmul(F, Einv, D)
    return beta1, weyl_from_perm(datum, P), Finv


# -------------------------------------------------------------- truncation


@dataclass
class MatrixStep:
    u: WeylElt
    delta: WeylElt
    H: frozenset
    P: frozenset
    Q: frozenset
    p: np.ndarray
    q: np.ndarray
    b: np.ndarray


@dataclass
class Transcript:
    mu: tuple
    k1: np.ndarray
    k2: np.ndarray
    b0: np.ndarray
    steps: list = dc_field(default_factory=list)


def _borel_inside(d, H, R):
    """v ∈ W_H with v(Φ_H⁺) ⊆ R."""
    Hpos = [a for a in H if a < d.npos]
    for v in d.weyl_subgroup(Levi(d, H)):
        if all(int(d.perms[v][a]) in R for a in Hpos):
            return v
    raise ConventionBroken("no Borel of H inside the parabolic")


def parabolic_bruhat(F, d, b, H, P, Q):
    """b = p·δ·q with p ∈ P(k), q ∈ Q(k), for parabolics P, Q ⊇ T of the Levi H."""
    L = Levi(d, _levi_part(d, P))
    Mp = Levi(d, _levi_part(d, Q))
    v1, v2 = _borel_inside(d, H, P), _borel_inside(d, H, Q)
    P1, P2 = _perm(d, v1), _perm(d, v2)
    beta1, pi, beta2 = bruhat_decomposition(F, gf_matmul(F, gf_matmul(F, P1.T, b), P2), d)
    x = d.mul(d.mul(v1, pi), d.inv[v2])
    a, delta, c = _split(d, x, L, Mp)
    p = gf_matmul(F, gf_matmul(F, gf_matmul(F, P1, beta1), P1.T), _perm(d, a))
    q = gf_matmul(F, _perm(d, c), gf_matmul(F, gf_matmul(F, P2, beta2), P2.T))
    if not np.array_equal(gf_matmul(F, gf_matmul(F, p, _perm(d, delta)), q), b):
        raise ConventionBroken("parabolic Bruhat decomposition does not reproduce b")
    return p, delta, q


def _recursion(F, d, b0, mu, transcript=None):
    n = b0.shape[0]
    st = ZipStages(d, mu)
    Pxm = _perm(d, st.xm)
    b = b0
    cap = 4 * n
    for _ in range(cap):
        if st.done:
            if st.u not in d.mu_W(mu):
                raise ConventionBroken(f"recursion ended outside mu_W({mu})")
            return st.u
        if (b[~levi_mask(Levi(d, st.H), n)] != 0).any():
            raise ConventionBroken("b left H(k) during the recursion")
        p, delta, q = parabolic_bruhat(F, d, b, st.H, st.P, st.Q)
        Pu = _perm(d, st.u)
        m = levi_projection(p, st.L, n)
        phi_m = gf_matmul(F, gf_matmul(F, Pxm, F.sigma(gf_matmul(F, gf_matmul(F, Pu, m), Pu.T))), Pxm.T)
        b_new = gf_matmul(F, levi_projection(q, st.Mprime, n), phi_m)
        if transcript is not None:
            transcript.steps.append(MatrixStep(WeylElt(d, st.u), WeylElt(d, delta), st.H, st.P, st.Q, p, q, b_new))
        st.advance(delta)
        b = b_new
    raise IterationCapExceeded(f"matrix truncation recursion did not stabilize in {cap} steps")


def required_precision(mu):
    """Smallest absolute precision accepted for Cartan type μ."""
    return mu[-1] + (mu[0] - mu[-1]) + 2


def truncation_type_matrix(g, with_transcript=False, recheck=True):
    """Truncation type (w, μ) of g ∈ GL_n(F((t))), optionally with a transcript."""
    F, n = g.field, g.n
    d = gl_datum(n)
    mu, k1, k2 = cartan_decomposition(g)
    need = required_precision(mu)
    if g.N is not None and g.N < need:
        raise InsufficientPrecision(f"truncation of Cartan type {mu} needs precision {need}, got {g.N}", required=need)
    Pxm = _perm(d, d.x_mu(mu).idx)
    b0 = gf_matmul(F, gf_matmul(F, F.sigma(k2, -1), k1), Pxm.T)
    tr = Transcript(mu, k1, k2, b0) if with_transcript else None
    u = _recursion(F, d, b0, mu, tr)
    out = TruncationType(WeylElt(d, u), mu)
    if recheck and g.N is not None and g.N > need:
        again = truncation_type_matrix(g.truncate(need), recheck=False)
        if again != out:
            raise ConventionBroken(f"truncation type changed between precision {g.N} and {need}")
    return (out, tr) if with_transcript else out


def truncation_of_b0(F, datum, b0, mu):
    """Type attached to b0·τ_μ for b0 ∈ GL_n(F)."""
    return TruncationType(WeylElt(datum, _recursion(F, datum, np.asarray(b0, dtype=np.int64), mu)), tuple(mu))


def representative_matrix(t, F):
    """The monomial matrix of w·τ_μ."""
    return LaurentMatrix.monomial(t.element(), F)


# ---------------------------------------------------------- Iwahori reduction


def iwahori_reduce(g, w, mu):
    """σ-conjugate g ∈ I·wτ_μ·I towards wτ_μ.

    Returns (h, g′): h ∈ K is the product of the explicit conjugators and g′
    = w·x_μ·m·ε^μ with m ∈ I_∞ lies in K_1·h⁻¹gσ(h)·K_1.  Both are certified
    to have truncation type (w, μ)."""
    F, n = g.field, g.n
    d = gl_datum(n)
    w = w if isinstance(w, WeylElt) else WeylElt(d, int(w))
    mu = tuple(int(v) for v in mu)
    if w.idx not in d.mu_W(mu):
        raise ValueError(f"{w!r} is not in mu_W({mu})")
    t = TruncationType(w, mu)
    x = t.element()
    i1, y, i2 = iwahori_decomposition(g, d)
    if y != x:
        raise NotInCoset(f"g lies in I·{y!r}·I, not I·{x!r}·I")
    h = i1.copy()
    # g ~ x·ī2·σ(ī1); keep the M_μ block of the Iwahori factor
    M_mu = d.centralizer_levi(mu)
    m = levi_projection(gf_matmul(F, i2, F.sigma(i1)), M_mu, n)
    wx = _perm(d, d.mul(w.idx, d.x_mu(mu).idx))
    mask = levi_mask(M_mu, n)
    upper_off = np.triu(~mask, 1)
    for _ in range(2 * n):
        # σ-conjugating by σ⁻¹(m)⁻¹ moves m to (wx_μ)⁻¹σ⁻¹(m)(wx_μ) = m3·n̄
        sm = F.sigma(m, -1)
        m2 = gf_matmul(F, gf_matmul(F, wx.T, sm), wx)
        if (m2[upper_off] != 0).any():
            raise ConventionBroken("conjugated Iwahori factor has an N_μ component")
        h = gf_matmul(F, h, gf_inv(F, sm))
        m_next = np.where(mask, m2, 0)
        if np.array_equal(m_next, m):
            break
        m = m_next
    H = LaurentMatrix.constant(F, h)
    conj = (LaurentMatrix.constant(F, gf_inv(F, h)) @ g @ H.sigma())
    core = LaurentMatrix.constant(F, gf_matmul(F, wx, m))
    gprime = (core @ LaurentMatrix.monomial(_translation(d, mu), F)).with_precision(g.N if g.N is not None else required_precision(mu) + 1)
    for cand in (conj, gprime):
        got = truncation_type_matrix(cand)
        if got != t:
            raise ConventionBroken(f"Iwahori reduction certified {got}, expected {t}")
    return H, gprime


def _translation(d, mu):
    from .affine import AffineElt
    return AffineElt.translation(d, mu)


# ------------------------------------------------------------------ oracles


def _additive_generators(F):
    return [F.element([0] * k + [1]) for k in range(F.degree)]


def _elementary(F, n, i, j, c):
    A = np.eye(n, dtype=np.int64)
    A[i, j] = c
    return A


def _torus_generators(F, n):
    z = int(F.galois_field.primitive_element)
    out = []
    if F.order > 2:
        for i in range(n):
            A = np.eye(n, dtype=np.int64)
            A[i, i] = z
            out.append(A)
    return out


def zip_generators(F, d, mu):
    """Generators (G, H) of the level-1 zip group acting by b ↦ G⁻¹·b·H."""
    n = d.rank
    R = _entry_roots(n)
    M_mu = d.centralizer_levi(mu)
    M1 = M_mu.sigma(-1)
    Pxm = _perm(d, d.x_mu(mu).idx)
    adds = _additive_generators(F)
    gens = []
    eye = np.eye(n, dtype=np.int64)
    for i, j in product(range(n), repeat=2):
        if i == j:
            continue
        a = int(R[i, j])
        for c in adds:
            E = _elementary(F, n, i, j, c)
            if a < d.npos and a not in M1.roots:
                gens.append((E, eye))  # unipotent radical of P_1
            if a not in M_mu.roots and a >= d.npos:
                gens.append((eye, gf_matmul(F, gf_matmul(F, Pxm, E), Pxm.T)))  # x_μ N̄_μ x_μ⁻¹
            if a in M1.roots:
                gens.append((E, gf_matmul(F, gf_matmul(F, Pxm, F.sigma(E)), Pxm.T)))
    for D in _torus_generators(F, n):
        gens.append((D, gf_matmul(F, gf_matmul(F, Pxm, F.sigma(D)), Pxm.T)))
    return gens


def _torus_points(F, n):
    """Diagonal matrices over F.  Monomials P_w·t lie in the orbit of P_w
    over an algebraic closure (Lang's theorem for the torus), while over F
    itself the twisted torus action need not be transitive."""
    units = range(1, F.order)
    for diag in product(units, repeat=n):
        yield np.diag(np.array(diag, dtype=np.int64))


def _all_invertible(F, n):
    Q = F.order
    codes = np.arange(Q ** (n * n), dtype=np.int64)
    digits = (codes[:, None] // (Q ** np.arange(n * n)[None, :])) % Q
    mats = digits.reshape(-1, n, n)
    keep = np.array([gf_det(F, A) != 0 for A in mats])
    return mats[keep]


def _encode(mats, Q):
    n2 = mats.shape[1] * mats.shape[2]
    return (mats.reshape(mats.shape[0], n2) * (Q ** np.arange(n2))[None, :]).sum(axis=1)


@dataclass
class ZipPartition:
    labels: dict
    types: dict  # orbit label -> TruncationType

    @property
    def n_orbits(self):
        return len(set(self.labels.values()))

    @property
    def labelled_fraction(self):
        vals = list(self.labels.values())
        return sum(1 for v in vals if v in self.types) / len(vals)

    def type_of(self, b):
        code = int(_encode(np.asarray(b, dtype=np.int64)[None], self._Q)[0])
        lbl = self.labels[code]
        if lbl not in self.types:
            raise Inconclusive("this F-rational orbit contains no monomial representative")
        return self.types[lbl]


def zip_orbits(F, n, mu):
    """Partition GL_n(F) into orbits of the level-1 zip group of μ.

    An orbit is labelled by w ∈ mu_W(μ) when it contains a monomial P_w·t.
    Over a finite field the twisted action of the Levi is not transitive on
    rational points of a geometric orbit, so some orbits stay unlabelled."""
    d = gl_datum(n)
    mu = tuple(int(v) for v in mu)
    mats = _all_invertible(F, n)
    Q = F.order
    codes = _encode(mats, Q)
    index = {int(c): k for k, c in enumerate(codes)}
    rows, cols = [], []
    for G, H in zip_generators(F, d, mu):
        Ginv = gf_inv(F, G)
        moved = _kernels.gf_batch_sandwich(Ginv, mats, H, F.mul, F.add)
        new = _encode(moved, Q)
        rows.append(np.arange(len(codes)))
        cols.append(np.array([index[int(c)] for c in new]))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones_like(r), (r, c)), shape=(len(codes), len(codes)))
    _, lab = connected_components(graph, directed=True, connection="weak")
    labels = {int(cd): int(l) for cd, l in zip(codes, lab)}
    types = {}
    for widx, D in product(sorted(d.mu_W(mu)), _torus_points(F, n)):
        code = int(_encode(gf_matmul(F, _perm(d, widx), D)[None], Q)[0])
        lbl = labels[code]
        t = TruncationType(WeylElt(d, widx), mu)
        if types.setdefault(lbl, t) != t:
            raise ConventionBroken(f"two elements of mu_W({mu}) share a zip orbit")
    part = ZipPartition(labels, types)
    part._Q = Q
    return part


# ------------------------------------------------------- level-N exhaustive


def _level_generators(F, n, N):
    """(kind, A, A⁻¹) generators: 'conj' for σ-conjugation by K, 'left' and
    'right' for multiplication by K_1, all modulo t^N."""
    adds = _additive_generators(F)
    out = []
    base = []
    for i, j in product(range(n), repeat=2):
        if i != j:
            for c in adds:
                base.append(_elementary(F, n, i, j, c))
    base += _torus_generators(F, n)
    for A in base:
        g = LaurentMatrix.constant(F, A, N)
        out.append(("conj", g, LaurentMatrix.constant(F, gf_inv(F, A), N)))
    for k in range(1, N):
        for i, j in product(range(n), repeat=2):
            for c in adds:
                C = np.zeros((N, n, n), dtype=np.int64)
                C[0] = np.eye(n, dtype=np.int64)
                C[k, i, j] = c
                g = LaurentMatrix(F, 0, C, N)
                ginv = g.inverse_K()
                for kind in ("conj", "left", "right"):
                    out.append((kind, g, ginv))
    return out


def _apply(kind, g, ginv, X):
    if kind == "conj":
        return ginv @ X @ g.sigma()
    if kind == "left":
        return g @ X
    return X @ g


def _key(X):
    Y = X.with_precision(X.N)
    return Y.C.tobytes()


def _integral(g, N):
    """t^{-c}·g modulo t^N, with c the smallest Cartan exponent."""
    mu = cartan_decomposition(g)[0]
    c = mu[-1]
    h = g.shift(-c)
    return LaurentMatrix(h.field, 0, h.with_precision(N).C if h.v == 0 else _realign(h, N), N), c, mu


def _realign(h, N):
    C = np.zeros((N, h.n, h.n), dtype=np.int64)
    for k in range(h.L):
        e = h.v + k
        if 0 <= e < N:
            C[e] = h.C[k]
    return C


def _monomial_types(F, d, mu, N):
    out = {}
    for widx in d.mu_W(mu):
        t = TruncationType(WeylElt(d, widx), mu)
        mono = LaurentMatrix.monomial(t.element(), F).shift(-mu[-1])
        base = LaurentMatrix(F, 0, _realign(mono, N), N)
        for D in _torus_points(F, d.rank):
            out[(base @ LaurentMatrix.constant(F, D, N)).C.tobytes()] = t
    return out


def brute_force_truncation_oracle(g, N=None, max_orbit=200_000, trials=20_000, seed=0):
    """Type of g by searching its orbit modulo t^N for a monomial w·τ_μ.

    The orbit is explored exhaustively while it stays below ``max_orbit``
    elements; beyond that a random walk of ``trials`` steps is used."""
    F, n = g.field, g.n
    d = gl_datum(n)
    mu = cartan_decomposition(g)[0]
    rel = tuple(v - mu[-1] for v in mu)
    N = N if N is not None else rel[0] + 2
    X, c, _ = _integral(g, N)
    targets = _monomial_types(F, d, tuple(int(v) for v in mu), N)
    gens = _level_generators(F, n, N)
    seen = {_key(X)}
    queue = deque([X])
    found = set()
    while queue and len(seen) <= max_orbit:
        Y = queue.popleft()
        t = targets.get(_key(Y))
        if t is not None:
            found.add(t)
        for kind, a, ainv in gens:
            Z = _apply(kind, a, ainv, Y)
            k = _key(Z)
            if k not in seen:
                seen.add(k)
                queue.append(Z)
    if not queue:
        if len(found) != 1:
            raise ConventionBroken(f"orbit contains {len(found)} monomial representatives")
        return found.pop()
    rng = np.random.default_rng(seed)
    Y = X
    for _ in range(trials):
        kind, a, ainv = gens[int(rng.integers(len(gens)))]
        Y = _apply(kind, a, ainv, Y)
        t = targets.get(_key(Y))
        if t is not None:
            return t
    if found:
        return next(iter(found))
    raise Inconclusive(f"no w·τ_μ representative met within {trials} random steps")


def level_orbits(F, n, mu, N):
    """Exhaustive partition of {g ∈ Kε^μK mod t^N} (μ_n = 0) into classes of
    K-σ-conjugation combined with K_1 on both sides."""
    d = gl_datum(n)
    mu = tuple(int(v) for v in mu)
    if mu[-1] != 0:
        raise ValueError("normalize μ so that its last entry is 0")
    Q = F.order
    total = Q ** (N * n * n)
    if total > 1 << 22:
        raise ValueError(f"{total} matrices are too many to enumerate")
    codes = np.arange(total, dtype=np.int64)
    digits = (codes[:, None] // (Q ** np.arange(N * n * n, dtype=np.int64))[None, :]) % Q
    blocks = digits.reshape(-1, N, n, n)
    elems = []
    for C in blocks:
        X = LaurentMatrix(F, 0, C, N)
        try:
            if cartan_decomposition(X)[0] == mu:
                elems.append(X)
        except InsufficientPrecision:
            continue
    index = {X.C.tobytes(): k for k, X in enumerate(elems)}
    gens = _level_generators(F, n, N)
    r, c = [], []
    for k, X in enumerate(elems):
        for kind, a, ainv in gens:
            Z = _apply(kind, a, ainv, X)
            j = index.get(_key(Z))
            if j is None:
                raise ConventionBroken("generator left the double coset")
            r.append(k)
            c.append(j)
    graph = coo_matrix((np.ones(len(r)), (r, c)), shape=(len(elems), len(elems)))
    n_orb, lab = connected_components(graph, directed=True, connection="weak")
    targets = _monomial_types(F, d, mu, N)
    types = {}
    for key, t in targets.items():
        lbl = int(lab[index[key]])
        if types.setdefault(lbl, t) != t:
            raise ConventionBroken(f"two types share a level-{N} orbit")
    return elems, lab, n_orb, types
