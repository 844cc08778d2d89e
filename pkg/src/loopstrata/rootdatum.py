"""Based root data, finite Weyl groups, Levi subgroups and the Frobenius action."""

from __future__ import annotations

import json
from collections import deque
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np
import sympy

from .errors import InvalidCartanData, UnsupportedSigma

MAX_ROOTS = 2000
MAX_WEYL = 50000


def _as_int_matrix(rows, name):
    try:
        arr = np.array(rows, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise InvalidCartanData(f"{name} must be an integer matrix") from exc
    if arr.ndim != 2:
        raise InvalidCartanData(f"{name} must be a list of integer vectors")
    return arr


class WeylElt:
    """Element of the finite Weyl group, stored as an index into the group table."""

    __slots__ = ("datum", "idx")

    def __init__(self, datum, idx):
        self.datum = datum
        self.idx = int(idx)

    def __eq__(self, other):
        return isinstance(other, WeylElt) and other.idx == self.idx and other.datum is self.datum

    def __hash__(self):
        return hash(("W", self.idx))

    def __mul__(self, other):
        return WeylElt(self.datum, self.datum.mul(self.idx, other.idx))

    def inverse(self):
        return WeylElt(self.datum, self.datum.inv[self.idx])

    @property
    def length(self):
        return int(self.datum.lengths[self.idx])

    @property
    def word(self):
        return self.datum.words[self.idx]

    @property
    def matrix(self):
        return self.datum.mats[self.idx]

    def act(self, lam):
        return self.datum.act(self.idx, lam)

    def __repr__(self):
        return self.datum.word_string(self.idx)


class Levi:
    """Levi subgroup containing T, recorded by its set of roots."""

    __slots__ = ("datum", "roots")

    def __init__(self, datum, roots):
        self.datum = datum
        self.roots = frozenset(int(a) for a in roots)

    def __eq__(self, other):
        return isinstance(other, Levi) and other.roots == self.roots and other.datum is self.datum

    def __hash__(self):
        return hash(("L", self.roots))

    def __le__(self, other):
        return self.roots <= other.roots

    def __and__(self, other):
        return Levi(self.datum, self.roots & other.roots)

    @property
    def positive_roots(self):
        P = self.datum.npos
        return sorted(a for a in self.roots if a < P)

    @property
    def simple(self):
        """Simple-root indices contained in this Levi."""
        return tuple(i for i in range(self.datum.semisimple_rank) if i in self.roots)

    @property
    def is_standard(self):
        return self == self.datum.standard_levi(self.simple)

    @property
    def weyl(self):
        return self.datum.weyl_subgroup(self)

    def conj(self, w):
        """The Levi w M w^{-1}."""
        perm = self.datum.perms[w.idx if isinstance(w, WeylElt) else w]
        return Levi(self.datum, (perm[a] for a in self.roots))

    def sigma(self, power=1):
        return Levi(self.datum, (self.datum.sigma_root(a, power) for a in self.roots))

    def __repr__(self):
        if self.is_standard:
            return f"Levi{tuple(i + 1 for i in self.simple)}"
        return f"Levi(roots={sorted(self.roots)})"


class RootDatum:
    """A based root datum together with a finite-order Frobenius action.

    ``simple_roots`` are integer covectors on the cocharacter lattice,
    ``simple_coroots`` integer vectors in it.  ``sigma_lattice`` acts on
    cocharacters and must permute the simple coroots as ``sigma_perm`` does.
    """

    def __init__(self, simple_roots, simple_coroots, sigma_perm=None, sigma_lattice=None,
                 name="raw", display=None):
        A = _as_int_matrix(simple_roots, "simple_roots")
        C = _as_int_matrix(simple_coroots, "simple_coroots")
        if A.shape != C.shape:
            raise InvalidCartanData("simple roots and coroots must have the same shape")
        self.semisimple_rank, self.rank = A.shape
        self.simple_roots = A
        self.simple_coroots = C
        self.name = name
        self._display = display
        self.cartan = A @ C.T  # cartan[i, j] = <alpha_i, alpha_j^vee>
        self._validate_cartan()
        r, n = self.semisimple_rank, self.rank
        if sigma_perm is None:
            sigma_perm = list(range(r))
        if sigma_lattice is None:
            sigma_lattice = np.eye(n, dtype=np.int64)
        self.sigma_perm = tuple(int(i) for i in sigma_perm)
        self.sigma_lattice = _as_int_matrix(sigma_lattice, "sigma_lattice")
        self._validate_sigma()
        self._build_roots()
        self._build_weyl()
        self._build_sigma()
        self._levi_cache = {}

    # ------------------------------------------------------------------ setup

    def _validate_cartan(self):
        A = self.cartan
        r = self.semisimple_rank
        for i in range(r):
            if A[i, i] != 2:
                raise InvalidCartanData(f"diagonal Cartan entry <alpha_{i+1}, alpha_{i+1}^vee> = {A[i, i]}, must be 2")
            for j in range(r):
                if i != j and (A[i, j] > 0 or (A[i, j] == 0) != (A[j, i] == 0)):
                    raise InvalidCartanData(f"Cartan entries ({i+1},{j+1}) violate sign/zero pattern")
        if r and (np.linalg.matrix_rank(self.simple_roots) < r or np.linalg.matrix_rank(self.simple_coroots) < r):
            raise InvalidCartanData("simple roots and coroots must be linearly independent")

    def _validate_sigma(self):
        r, n = self.semisimple_rank, self.rank
        perm, S = self.sigma_perm, self.sigma_lattice
        if sorted(perm) != list(range(r)):
            raise UnsupportedSigma("sigma_perm is not a permutation of the simple roots")
        if S.shape != (n, n) or round(abs(np.linalg.det(S))) != 1:
            raise UnsupportedSigma("sigma_lattice must be a unimodular n x n integer matrix")
        Sinv = sympy.Matrix(S.tolist()).inv()
        self._sigma_inv_lattice = np.array(Sinv.tolist(), dtype=np.int64)
        for i in range(r):
            if not np.array_equal(S @ self.simple_coroots[i], self.simple_coroots[perm[i]]):
                raise UnsupportedSigma(f"sigma_lattice does not send coroot {i+1} to coroot {perm[i]+1}")
            if not np.array_equal(self.simple_roots[i] @ self._sigma_inv_lattice, self.simple_roots[perm[i]]):
                raise UnsupportedSigma(f"sigma does not send root {i+1} to root {perm[i]+1}")
        order, M = 1, S.copy()
        while not np.array_equal(M, np.eye(n, dtype=np.int64)):
            M = M @ S
            order += 1
            if order > 1000:
                raise UnsupportedSigma("sigma_lattice does not have finite order")
        self.sigma_order = order

    def _build_roots(self):
        A, C = self.simple_roots, self.simple_coroots
        r = self.semisimple_rank
        seen = {}
        queue = deque()
        for i in range(r):
            coef = tuple(1 if j == i else 0 for j in range(r))
            key = tuple(A[i])
            seen[key] = (tuple(C[i]), coef)
            queue.append(key)
        while queue:
            alpha = queue.popleft()
            coroot, coef = seen[alpha]
            a = np.array(alpha)
            av = np.array(coroot)
            for j in range(r):
                k = int(a @ C[j])
                new = tuple(a - k * A[j])
                if new in seen:
                    continue
                newv = tuple(av - int(A[j] @ av) * C[j])
                newc = tuple(c - (k if jj == j else 0) for jj, c in enumerate(coef))
                seen[new] = (newv, newc)
                queue.append(new)
                if len(seen) > MAX_ROOTS:
                    raise InvalidCartanData("root system is infinite (not of finite type)")
        pos = [(alpha, data) for alpha, data in seen.items() if all(c >= 0 for c in data[1])]
        if 2 * len(pos) != len(seen):
            raise InvalidCartanData("roots are not split into positive and negative ones")
        pos.sort(key=lambda item: (sum(item[1][1]), tuple(-c for c in item[1][1])))
        P = len(pos)
        self.npos = P
        roots = [alpha for alpha, _ in pos] + [tuple(-x for x in alpha) for alpha, _ in pos]
        coroots = [d[0] for _, d in pos] + [tuple(-x for x in d[0]) for _, d in pos]
        coefs = [d[1] for _, d in pos] + [tuple(-x for x in d[1]) for _, d in pos]
        n = self.rank
        self.roots = np.array(roots, dtype=np.int64).reshape(2 * P, n)
        self.coroots = np.array(coroots, dtype=np.int64).reshape(2 * P, n)
        self.root_coefs = np.array(coefs, dtype=np.int64).reshape(2 * P, r)
        self.root_index = {tuple(int(x) for x in row): a for a, row in enumerate(self.roots)}
        self.simple_index = [self.root_index[tuple(int(x) for x in A[i])] for i in range(r)]
        # k_min(alpha): smallest power of t in the Iwahori's root subgroup for alpha
        self.kmin = np.array([0] * P + [1] * P, dtype=np.int64)

    def neg_root(self, a):
        return a + self.npos if a < self.npos else a - self.npos

    def _build_weyl(self):
        n, r = self.rank, self.semisimple_rank
        R = self.roots
        nroots = R.shape[0]
        ident = np.eye(n, dtype=np.int64)
        gens = [ident - np.outer(self.simple_coroots[i], self.simple_roots[i]) for i in range(r)]
        gen_perms = []
        for g in gens:
            # w acts on covectors by alpha -> alpha o w^{-1}; simple reflections are involutions
            gen_perms.append(np.array([self.root_index[tuple(int(x) for x in R[a] @ g)] for a in range(nroots)],
                                      dtype=np.int64))
        self._gen_perms = gen_perms
        mats = [ident]
        perms = [np.arange(nroots, dtype=np.int64)]
        words = [()]
        lengths = [0]
        index = {perms[0].tobytes(): 0}
        head = 0
        while head < len(mats):
            for i in range(r):
                p = gen_perms[i][perms[head]]
                key = p.tobytes()
                if key in index:
                    continue
                index[key] = len(mats)
                mats.append(gens[i] @ mats[head])
                perms.append(p)
                words.append((i,) + words[head])
                lengths.append(lengths[head] + 1)
                if len(mats) > MAX_WEYL:
                    raise InvalidCartanData("Weyl group too large for exhaustive tables")
            head += 1
        self.order = len(mats)
        self.mats = np.array(mats, dtype=np.int64)
        self.perms = np.array(perms, dtype=np.int64)
        self.words = words
        self.lengths = np.array(lengths, dtype=np.int64)
        self._perm_index = index
        P = self.npos
        assert all(int((p[:P] >= P).sum()) == l for p, l in zip(perms, lengths))
        self.inv = np.array([index[np.argsort(p).tobytes()] for p in perms], dtype=np.int64)
        self._mul_cache = {}
        self.simple_refl = [index[gp.tobytes()] for gp in gen_perms]
        self.refl = {}
        for a in range(P):
            s = ident - np.outer(self.coroots[a], self.roots[a])
            p = np.array([self.root_index[tuple(int(x) for x in R[b] @ s)] for b in range(nroots)], dtype=np.int64)
            self.refl[a] = self.refl[a + P] = index[p.tobytes()]
        self.w0 = int(np.argmax(self.lengths))
        # per-element data for the affine length formula
        self.kdiff = self.kmin[self.perms] - self.kmin[None, :]
        self.mats_tuple = [tuple(tuple(int(x) for x in row) for row in m) for m in self.mats]

    def _build_sigma(self):
        S_inv = self._sigma_inv_lattice
        R = self.roots
        self._sigma_root = np.array([self.root_index[tuple(int(x) for x in R[a] @ S_inv)] for a in range(R.shape[0])],
                                    dtype=np.int64)
        self._sigma_root_inv = np.argsort(self._sigma_root)
        sig = []
        for p in self.perms:
            q = self._sigma_root[p[self._sigma_root_inv]]
            sig.append(self._perm_index[q.tobytes()])
        self._sigma_w = np.array(sig, dtype=np.int64)
        self._sigma_w_inv = np.argsort(self._sigma_w)
        self.sigma_is_trivial = bool(np.array_equal(self.sigma_lattice, np.eye(self.rank, dtype=np.int64)))

    # --------------------------------------------------------------- Weyl group

    def elt(self, idx):
        return WeylElt(self, idx)

    @property
    def identity(self):
        return WeylElt(self, 0)

    def mul(self, i, j):
        key = (i, j)
        out = self._mul_cache.get(key)
        if out is None:
            out = self._perm_index[self.perms[i][self.perms[j]].tobytes()]
            self._mul_cache[key] = out
        return out

    def from_word(self, word):
        idx = 0
        for i in word:
            idx = self.mul(idx, self.simple_refl[i])
        return WeylElt(self, idx)

    def word_string(self, idx):
        word = self.words[idx]
        return "*".join(f"s{i + 1}" for i in word) if word else "e"

    def act(self, w, lam):
        """w . lam for an integer or rational coweight given as a tuple."""
        m = self.mats_tuple[w.idx if isinstance(w, WeylElt) else w]
        return tuple(sum(row[j] * lam[j] for j in range(len(lam)) if row[j]) for row in m)

    def all_elements(self):
        return [WeylElt(self, i) for i in range(self.order)]

    def bruhat_leq_finite(self, u, v):
        """u <= v in the Bruhat order of W (lifting property, iterative)."""
        u = u.idx if isinstance(u, WeylElt) else u
        v = v.idx if isinstance(v, WeylElt) else v
        L = self.lengths
        while True:
            if L[u] > L[v]:
                return False
            if L[v] == 0:
                return u == 0
            s = self.simple_refl[self.words[v][0]]
            v = self.mul(s, v)
            su = self.mul(s, u)
            if L[su] < L[u]:
                u = su

    # ---------------------------------------------------------------- Frobenius

    def sigma_w(self, w, power=1):
        idx = w.idx if isinstance(w, WeylElt) else w
        table = self._sigma_w if power >= 0 else self._sigma_w_inv
        for _ in range(abs(power)):
            idx = int(table[idx])
        return WeylElt(self, idx) if isinstance(w, WeylElt) else idx

    def sigma_root(self, a, power=1):
        table = self._sigma_root if power >= 0 else self._sigma_root_inv
        for _ in range(abs(power)):
            a = int(table[a])
        return a

    def sigma_coweight(self, lam, power=1):
        S = self.sigma_lattice if power >= 0 else self._sigma_inv_lattice
        for _ in range(abs(power)):
            lam = tuple(sum(int(S[i, j]) * lam[j] for j in range(self.rank)) for i in range(self.rank))
        return lam

    # ----------------------------------------------------------------- coweights

    def pairing(self, a, lam):
        row = self.roots[a]
        return sum(int(row[j]) * lam[j] for j in range(self.rank) if row[j])

    def simple_pairings(self, lam):
        return tuple(sum(int(x) * lam[j] for j, x in enumerate(row) if x) for row in self.simple_roots)

    def is_dominant(self, lam):
        return all(v >= 0 for v in self.simple_pairings(lam))

    def dominant_rep(self, lam):
        """Return (lam_dom, v) with lam = v . lam_dom and v of minimal length."""
        lam = tuple(Fraction(x) for x in lam)
        word = []
        while True:
            pairs = self.simple_pairings(lam)
            neg = [i for i, v in enumerate(pairs) if v < 0]
            if not neg:
                break
            i = neg[0]
            cv = self.simple_coroots[i]
            lam = tuple(lam[j] - pairs[i] * int(cv[j]) for j in range(self.rank))
            word.append(i)
        return _normalize(lam), self.from_word(word)

    def dominant(self, lam):
        return self.dominant_rep(lam)[0]

    # --------------------------------------------------------------------- Levis

    def levi(self, roots):
        return Levi(self, roots)

    def standard_levi(self, J):
        J = set(J)
        rows = self.root_coefs
        return Levi(self, (a for a in range(rows.shape[0]) if all(rows[a, j] == 0 for j in range(self.semisimple_rank) if j not in J)))

    @cached_property
    def full_levi(self):
        return self.standard_levi(range(self.semisimple_rank))

    @cached_property
    def torus_levi(self):
        return Levi(self, ())

    def centralizer_levi(self, mu):
        return Levi(self, (a for a in range(self.roots.shape[0]) if self.pairing(a, mu) == 0))

    def weyl_subgroup(self, levi):
        key = ("W", levi.roots)
        out = self._levi_cache.get(key)
        if out is None:
            gens = {self.refl[a] for a in levi.roots}
            seen = {0}
            frontier = [0]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = self.mul(g, x)
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
            out = frozenset(seen)
            self._levi_cache[key] = out
        return out

    def min_coset_reps(self, levi, side="left"):
        """^M W (side='left': shortest in W_M x) or W^M (side='right': shortest in x W_M)."""
        key = ("reps", levi.roots, side)
        out = self._levi_cache.get(key)
        if out is None:
            pos = levi.positive_roots
            P = self.npos
            keep = []
            for x in range(self.order):
                perm = self.perms[self.inv[x]] if side == "left" else self.perms[x]
                if all(perm[a] < P for a in pos):
                    keep.append(x)
            out = frozenset(keep)
            self._levi_cache[key] = out
        return out

    def longest(self, levi):
        W_M = self.weyl_subgroup(levi)
        return max(W_M, key=lambda x: (self.lengths[x], -x))

    def x_mu(self, mu):
        """w_0 w_{0,mu}: the shortest element of the coset w_0 W_{M_mu}."""
        M = self.centralizer_levi(mu)
        return WeylElt(self, self.mul(self.w0, self.longest(M)))

    def mu_W(self, mu):
        """The index set sigma^{-1}(^{M_mu} W) of truncation strata of Cartan type mu."""
        reps = self.min_coset_reps(self.centralizer_levi(mu), "left")
        return frozenset(self.sigma_w(x, -1) for x in reps)

    def double_coset_min(self, left, w, right):
        """Shortest element of W_left w W_right (ties broken by index)."""
        w = w.idx if isinstance(w, WeylElt) else w
        WL, WR = self.weyl_subgroup(left), self.weyl_subgroup(right)
        best = None
        for a in WL:
            aw = self.mul(a, w)
            for c in WR:
                x = self.mul(aw, c)
                key = (self.lengths[x], x)
                if best is None or key < best:
                    best = key
        return best[1]

    # ------------------------------------------------------------ presentation

    def to_display(self, lam):
        return tuple(self._display[1](lam)) if self._display else tuple(lam)

    def from_display(self, vals):
        vals = tuple(vals)
        if self._display:
            return tuple(self._display[0](vals))
        if len(vals) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(vals)}")
        return vals

    @property
    def display_rank(self):
        return len(self.to_display((0,) * self.rank))

    def __repr__(self):
        return f"RootDatum({self.name})"

    def describe(self):
        return self.name


def _normalize(lam):
    return tuple(Fraction(x) for x in lam)


# --------------------------------------------------------------------- presets


@lru_cache(maxsize=None)
def GL(n):
    if n < 1:
        raise InvalidCartanData("GL needs n >= 1")
    roots = [[1 if k == i else -1 if k == i + 1 else 0 for k in range(n)] for i in range(n - 1)]
    if not roots:
        roots = np.zeros((0, n), dtype=np.int64)
    return RootDatum(roots, roots, name=f"GL:{n}")


@lru_cache(maxsize=None)
def SL(n):
    # cocharacter lattice = coroot lattice, coordinates in the simple-coroot basis
    r = n - 1
    cart = [[2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(r)] for i in range(r)]
    eye = [[1 if i == j else 0 for j in range(r)] for i in range(r)]

    def to_lattice(x):
        if len(x) != n or sum(x) != 0:
            raise ValueError(f"SL:{n} coweights are {n}-tuples with sum 0")
        out, acc = [], 0
        for v in x[:-1]:
            acc += v
            out.append(acc)
        return out

    def to_display(c):
        c = list(c) + [0]
        prev = 0
        out = []
        for v in c:
            out.append(v - prev)
            prev = v
        return out

    return RootDatum(cart, eye, name=f"SL:{n}", display=(to_lattice, to_display))


@lru_cache(maxsize=None)
def GSp(two_g):
    if two_g % 2 or two_g < 2:
        raise InvalidCartanData("GSp needs an even size >= 2")
    g = two_g // 2
    n = g + 1  # coordinates (x_1..x_g, c)
    roots, coroots = [], []
    for i in range(g - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        roots.append(v)
        coroots.append(list(v))
    v = [0] * n
    v[g - 1], v[g] = 2, -1
    roots.append(v)
    cv = [0] * n
    cv[g - 1] = 1
    coroots.append(cv)
    return RootDatum(roots, coroots, name=f"GSp:{two_g}")


def siegel_mu(datum):
    """Minuscule Siegel coweight diag(t,..,t,1,..,1) of a GSp preset."""
    if not datum.name.startswith("GSp:"):
        raise ValueError("the Siegel coweight is defined for GSp presets only")
    return (1,) * datum.rank


def raw_datum_from_dict(data, name="raw"):
    return RootDatum(data["simple_roots"], data["simple_coroots"], data.get("sigma_perm"),
                     data.get("sigma_lattice"), name=data.get("name", name))


def build_root_datum(descriptor):
    """Build a datum from 'GL:n', 'SL:n', 'GSp:2g', a JSON file path or a dict."""
    if isinstance(descriptor, RootDatum):
        return descriptor
    if isinstance(descriptor, dict):
        return raw_datum_from_dict(descriptor)
    text = str(descriptor).strip()
    if ":" in text and not Path(text).exists():
        family, _, size = text.partition(":")
        try:
            size = int(size)
        except ValueError as exc:
            raise InvalidCartanData(f"bad group size in {text!r}") from exc
        family = family.upper()
        if size < 1:
            raise InvalidCartanData(f"bad group size in {text!r}")
        if family == "GL":
            return GL(size)
        if family == "SL":
            if size < 2:
                raise InvalidCartanData("SL needs n >= 2")
            return SL(size)
        if family == "GSP":
            return GSp(size)
        raise InvalidCartanData(f"unknown group family {family!r}")
    path = Path(text)
    if not path.exists():
        raise InvalidCartanData(f"group descriptor {text!r} is neither a preset nor a file")
    with path.open() as fh:
        return raw_datum_from_dict(json.load(fh), name=path.stem)
