"""Fundamental alcoves, standard representatives and the Weyl-level truncation algorithm."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import floor

from .affine import AffineElt, box, length, omega_part, sigma_conj, tau
from .errors import ConventionBroken, IterationCapExceeded, NotFound, NotUnique, NoWitness
from .isocrystal import SigmaClass, class_of, kappa, newton_vector
from .rootdatum import Levi, WeylElt


@dataclass(frozen=True)
class SemistandardParabolic:
    levi: Levi
    N: frozenset

    def __post_init__(self):
        d = self.levi.datum
        object.__setattr__(self, "N", frozenset(int(a) for a in self.N))
        Nbar = {d.neg_root(a) for a in self.N}
        allr = set(range(d.roots.shape[0]))
        if self.N & self.levi.roots or Nbar & self.N or (self.N | Nbar | self.levi.roots) != allr:
            raise ValueError("N, -N and the roots of M must partition the root system")
        for a in self.N:
            for b in self.N | self.levi.roots:
                c = _root_sum(d, a, b)
                if c is not None and c not in self.N:
                    raise ValueError("N is not closed under adding roots of P")

    @property
    def datum(self):
        return self.levi.datum

    @property
    def Nbar(self):
        return frozenset(self.datum.neg_root(a) for a in self.N)

    def conj(self, w):
        perm = self.datum.perms[w.idx if isinstance(w, WeylElt) else w]
        return SemistandardParabolic(self.levi.conj(w), frozenset(int(perm[a]) for a in self.N))

    def sigma(self, power=1):
        d = self.datum
        return SemistandardParabolic(self.levi.sigma(power), frozenset(d.sigma_root(a, power) for a in self.N))

    @classmethod
    def standard(cls, datum, J):
        M = datum.standard_levi(J)
        return cls(M, frozenset(a for a in range(datum.npos) if a not in M.roots))

    @classmethod
    def whole(cls, datum):
        return cls(datum.full_levi, frozenset())

    def __repr__(self):
        return f"SemistandardParabolic(M={self.levi!r}, N={sorted(self.N)})"


def _root_sum(d, a, b):
    key = tuple(int(x) + int(y) for x, y in zip(d.roots[a], d.roots[b]))
    return d.root_index.get(key)


def parabolics_with_levi(levi, sigma_stable=True):
    """Every parabolic with Levi M: the sets Φ_M ∪ w(Φ⁺) whose Levi is exactly M."""
    d = levi.datum
    out = set()
    for w in range(d.order):
        R = levi.roots | frozenset(int(d.perms[w][a]) for a in range(d.npos))
        if all(d.neg_root(a) not in R for a in R - levi.roots):
            try:
                P = SemistandardParabolic(levi, R - levi.roots)
            except ValueError:  # the union is not closed for this Borel
                continue
            if not sigma_stable or P.sigma() == P:
                out.add(P)
    return sorted(out, key=lambda Q: sorted(Q.N))


def all_semistandard_parabolics(datum, sigma_stable=True):
    """Every parabolic containing T, as W-conjugates of the standard ones."""
    key = ("parabolics", sigma_stable)
    cached = datum._levi_cache.get(key)
    if cached is not None:
        return cached
    seen = set()
    r = datum.semisimple_rank
    for k in range(r + 1):
        for J in combinations(range(r), k):
            P = SemistandardParabolic.standard(datum, J)
            for w in range(datum.order):
                perm = datum.perms[w]
                seen.add((frozenset(int(perm[a]) for a in P.levi.roots), frozenset(int(perm[a]) for a in P.N)))
    out = []
    for M, N in seen:
        Q = SemistandardParabolic(Levi(datum, M), N)
        if not sigma_stable or Q.sigma() == Q:
            out.append(Q)
    out.sort(key=lambda Q: (len(Q.levi.roots), sorted(Q.N), sorted(Q.levi.roots)))
    datum._levi_cache[key] = out
    return out


@dataclass(frozen=True)
class TruncationType:
    w: WeylElt
    mu: tuple

    def __post_init__(self):
        d = self.w.datum
        if self.w.idx not in d.mu_W(self.mu):
            raise ValueError(f"{self.w!r} is not in mu_W({self.mu})")

    @property
    def datum(self):
        return self.w.datum

    def element(self):
        """The representative w·τ_μ."""
        return AffineElt.weyl(self.datum, self.w) * tau(self.datum, self.mu)

    def to_json(self):
        return {"w": repr(self.w), "mu": [int(v) for v in self.datum.to_display(self.mu)]}

    @classmethod
    def from_json(cls, datum, obj):
        word = obj["w"].strip()
        letters = [] if word in ("", "e") else [int(s.strip()[1:]) - 1 for s in word.split("*")]
        mu = tuple(int(v) for v in datum.from_display(tuple(obj["mu"])))
        return cls(datum.from_word(letters), mu)

    def __repr__(self):
        return f"({self.w!r}, {list(self.datum.to_display(self.mu))})"


# ------------------------------------------------------------------ fundamental


def _raw_newton(x):
    return newton_vector(x)


def _pair(d, a, nu):
    return sum(int(d.roots[a][j]) * nu[j] for j in range(d.rank))


def is_fundamental_def(x, P):
    """The defining conditions xI_Mx^{-1} = I_M, xI_Nx^{-1} ⊆ I_N and
    x^{-1}I_{N̄}x ⊆ I_{N̄}, read off root by root."""
    d = x.datum
    if x.w not in d.weyl_subgroup(P.levi):
        return False
    perm, iperm = d.perms[x.w], d.perms[d.inv[x.w]]
    km = d.kmin
    for a in P.N:
        wa = int(perm[a])
        if wa not in P.N or km[a] + d.pairing(a, x.lam) < km[wa]:
            return False
    for a in P.levi.roots:
        if km[a] + d.pairing(a, x.lam) != km[int(perm[a])]:
            return False
    for a in P.Nbar:
        va = int(iperm[a])
        if va not in P.Nbar or km[a] - d.pairing(va, x.lam) < km[va]:
            return False
    return True


def newton_criterion(x, P):
    """x ∈ W̃_M normalizing I_M, Newton point central in M and ≥ 0 on N.

    Only characterizes P-fundamental elements among those already
    fundamental for some semistandard parabolic."""
    d = x.datum
    if x.w not in d.weyl_subgroup(P.levi) or length(x, P.levi) != 0:
        return False
    nu = _raw_newton(x)
    return all(_pair(d, a, nu) == 0 for a in P.levi.roots) and all(_pair(d, a, nu) >= 0 for a in P.N)


def is_fundamental(x, P):
    """P-fundamental test; the Newton criterion is cross-checked whenever
    x is fundamental for some parabolic."""
    direct = is_fundamental_def(x, P)
    if newton_criterion(x, P) != direct:
        if any(is_fundamental_def(x, Q) for Q in all_semistandard_parabolics(x.datum)):
            raise ConventionBroken(f"fundamental criteria disagree on {x!r} for {P!r}")
    return direct


def enlarge_parabolic(x, P):
    """The parabolic generated by the centralizer of the Newton point of x and N."""
    d = x.datum
    nu = _raw_newton(x)
    M2 = Levi(d, (a for a in range(d.roots.shape[0]) if _pair(d, a, nu) == 0))
    return SemistandardParabolic(M2, frozenset(a for a in P.N if a not in M2.roots))


def fundamental_parabolics(x):
    return [P for P in all_semistandard_parabolics(x.datum) if is_fundamental(x, P)]


# ------------------------------------------------------------ standard reps


def standard_rep(datum, cls):
    """The unique element of Ω_{M_ν} in the class with Newton point ν."""
    nu = tuple(Fraction(v) for v in cls.newton)
    M = datum.centralizer_levi(nu)
    center = tuple(floor(v) for v in nu)
    found = set()
    for lam in box(center, 1):
        b = omega_part(AffineElt.translation(datum, lam), M)
        if kappa(b) == tuple(cls.kappa) and tuple(newton_vector(b)) == nu:
            found.add(b)
    if not found:
        raise NotFound(f"no length-zero element of W̃_M with class {cls}")
    if len(found) > 1:
        raise NotUnique(f"{len(found)} standard representatives for {cls}: {sorted(map(repr, found))}")
    return found.pop()


# -------------------------------------------------------- truncation (Weyl level)


@dataclass(frozen=True)
class TruncationStep:
    """One stage of the recursion: the zip datum (H, P, Q) acting on b."""

    u: WeylElt
    b: WeylElt
    H: Levi
    P: frozenset
    Q: frozenset
    delta: WeylElt


def normalize_to_tau(x):
    """Return (b₀, μ, g) with g ∈ W, sigma_conj(x, g) = b₀·τ_μ and b₀ ∈ W."""
    d = x.datum
    mu_f, v = d.dominant_rep(x.lam)
    mu = tuple(int(c) for c in mu_f)
    g = AffineElt.weyl(d, d.sigma_w(v, -1))
    y = sigma_conj(x, g)
    if y.lam != mu:
        raise ConventionBroken(f"normalization of {x!r} gave translation {y.lam}, expected {mu}")
    b0 = d.mul(y.w, d.inv[d.x_mu(mu).idx])
    return WeylElt(d, b0), mu, g


def _split(d, b, left, right):
    """b = m·δ·m' with m ∈ W_left, m' ∈ W_right, δ the shortest double-coset element."""
    delta = d.double_coset_min(left, b, right)
    WR = d.weyl_subgroup(right)
    for m in d.weyl_subgroup(left):
        rest = d.mul(d.inv[delta], d.mul(d.inv[m], b))
        if rest in WR:
            return m, delta, rest
    raise ConventionBroken("double coset decomposition failed")


class ZipStages:
    """Root-level bookkeeping of the truncation recursion.

    The level-1 class of b·τ_μ is an orbit of the group of pairs (p, q) ∈ P×Q
    with φ(p mod U_P) = q mod U_Q, acting by b ↦ p·b·q⁻¹.  Initially P is
    σ⁻¹(P_μ), Q = x_μ P̄_μ x_μ⁻¹ and φ = Ad(x_μ)∘σ.  After writing
    b = p₀·δ·q₀ the class is that of q₀·φ(p₀) under the datum on the Levi M'
    of Q with
        P' = M' ∩ δ⁻¹Pδ,   Q' = φ(L ∩ δQδ⁻¹),   φ' = φ∘Ad(δ).
    The recursion stops once P = H; then u = δ₁⋯δ_n."""

    def __init__(self, datum, mu):
        d = self.datum = datum
        self.mu = mu
        M_mu = d.centralizer_levi(mu)
        self.M_mu = M_mu
        M1 = M_mu.sigma(-1)
        self.xm = d.x_mu(mu).idx
        self.u = 0
        allr = frozenset(range(d.roots.shape[0]))
        pos = frozenset(range(d.npos))
        neg = allr - pos
        self.H = allr
        self.P = pos | M1.roots
        self.Q = frozenset(self.phi_root(a) for a in (neg | M1.roots))

    def phi_root(self, a, u=None):
        d = self.datum
        u = self.u if u is None else u
        return int(d.perms[self.xm][d.sigma_root(int(d.perms[u][a]))])

    def phi_weyl(self, a):
        """x_μ σ(u a u⁻¹) x_μ⁻¹."""
        d = self.datum
        inner = d.sigma_w(d.mul(d.mul(self.u, a), d.inv[self.u]))
        return d.mul(self.xm, d.mul(inner, d.inv[self.xm]))

    @property
    def L(self):
        return Levi(self.datum, _levi_part(self.datum, self.P))

    @property
    def Mprime(self):
        return Levi(self.datum, _levi_part(self.datum, self.Q))

    @property
    def done(self):
        return self.P == self.H

    def advance(self, delta):
        d = self.datum
        L, Mp = self.L, self.Mprime
        pd, pdi = d.perms[delta], d.perms[d.inv[delta]]
        P_new = frozenset(a for a in Mp.roots if int(pd[a]) in self.P)
        Q_new = frozenset(self.phi_root(a) for a in L.roots if int(pdi[a]) in self.Q)
        self.H, self.P, self.Q = Mp.roots, P_new, Q_new
        self.u = d.mul(self.u, delta)
        if not (self.P <= self.H and self.Q <= self.H):
            raise ConventionBroken("zip datum parabolics left the ambient Levi")


def _levi_part(d, R):
    return frozenset(a for a in R if d.neg_root(a) in R)


def _stage_cap(d):
    return 4 * d.rank + 4


def truncation_type_affine(x, transcript=None):
    """Truncation type of level 1 of x ∈ W̃, by the Bédard-style recursion."""
    d = x.datum
    b0, mu, _ = normalize_to_tau(x)
    return TruncationType(WeylElt(d, weyl_recursion(d, b0.idx, mu, transcript)), mu)


def weyl_recursion(d, b, mu, transcript=None):
    """u ∈ mu_W(μ) with b·τ_μ in the level-1 class of u·τ_μ, for b ∈ W."""
    st = ZipStages(d, mu)
    for _ in range(_stage_cap(d)):
        if st.done:
            if st.u not in d.mu_W(mu):
                raise ConventionBroken(f"recursion ended at {d.word_string(st.u)} outside mu_W({mu})")
            return st.u
        H = Levi(d, st.H)
        if b not in d.weyl_subgroup(H):
            raise ConventionBroken("b left W_H during the truncation recursion")
        a, delta, c = _split(d, b, st.L, st.Mprime)
        b_new = d.mul(c, st.phi_weyl(a))
        if transcript is not None:
            transcript.append(TruncationStep(WeylElt(d, st.u), WeylElt(d, b), H, st.P, st.Q, WeylElt(d, delta)))
        st.advance(delta)
        b = b_new
    raise IterationCapExceeded(f"truncation recursion did not stabilize in {_stage_cap(d)} steps")


def minimal_type(datum, cls):
    t = truncation_type_affine(standard_rep(datum, cls))
    if class_of(t.element()) != cls:
        raise ConventionBroken(f"minimal type {t} does not lie in {cls}")
    return t


def fundamental_conj_witness(x, y):
    """w ∈ W with w^{-1} x σ(w) = y."""
    d = x.datum
    for w in range(d.order):
        if sigma_conj(x, AffineElt.weyl(d, w)) == y:
            return WeylElt(d, w)
    raise NoWitness(f"{x!r} and {y!r} are not σ-conjugate under W")
