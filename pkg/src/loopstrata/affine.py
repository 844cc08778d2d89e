"""Extended affine Weyl group W ⋉ X_*(T): products, lengths, Bruhat order, cones."""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, ConventionBroken
from .rootdatum import Levi, WeylElt

DEFAULT_BUDGET = 2 ** 12


def default_budget():
    env = os.environ.get("LOOPSTRATA_BUDGET")
    if env:
        try:
            val = int(env)
        except ValueError:
            val = 0
        if val > 0:
            return val
    return DEFAULT_BUDGET


class AffineElt:
    """The element w·ε^λ.  Products follow

        (w1 ε^{λ1})(w2 ε^{λ2}) = (w1 w2) ε^{w2^{-1} λ1 + λ2},

    and the element acts on X_*(T)⊗R by v ↦ w(v + λ).
    """

    __slots__ = ("datum", "w", "lam", "_hash")

    def __init__(self, datum, w, lam):
        self.datum = datum
        self.w = w.idx if isinstance(w, WeylElt) else int(w)
        self.lam = tuple(int(x) for x in lam)
        if len(self.lam) != datum.rank:
            raise ValueError(f"translation needs {datum.rank} coordinates")
        self._hash = hash((self.w, self.lam))

    @classmethod
    def identity(cls, datum):
        return cls(datum, 0, (0,) * datum.rank)

    @classmethod
    def translation(cls, datum, lam):
        return cls(datum, 0, lam)

    @classmethod
    def weyl(cls, datum, w):
        return cls(datum, w, (0,) * datum.rank)

    @property
    def finite(self):
        return WeylElt(self.datum, self.w)

    def __eq__(self, other):
        return (isinstance(other, AffineElt) and self.w == other.w and self.lam == other.lam
                and self.datum is other.datum)

    def __hash__(self):
        return self._hash

    def __mul__(self, other):
        d = self.datum
        if isinstance(other, WeylElt):
            other = AffineElt.weyl(d, other)
        shifted = d.act(d.inv[other.w], self.lam)
        return AffineElt(d, d.mul(self.w, other.w), tuple(a + b for a, b in zip(shifted, other.lam)))

    def __rmul__(self, other):
        if isinstance(other, WeylElt):
            return AffineElt.weyl(self.datum, other) * self
        return NotImplemented

    def inverse(self):
        d = self.datum
        return AffineElt(d, d.inv[self.w], tuple(-x for x in d.act(self.w, self.lam)))

    def sigma(self, power=1):
        d = self.datum
        if d.sigma_is_trivial:
            return self
        return AffineElt(d, d.sigma_w(self.w, power), d.sigma_coweight(self.lam, power))

    def __call__(self, v):
        """Action on a (rational) point of X_*(T)⊗Q."""
        return self.datum.act(self.w, tuple(a + b for a, b in zip(v, self.lam)))

    @property
    def length(self):
        return length(self)

    def __repr__(self):
        d = self.datum
        parts = [] if self.w == 0 else [d.word_string(self.w)]
        if any(self.lam) or not parts:
            parts.append("t[" + ",".join(str(x) for x in d.to_display(self.lam)) + "]")
        return "*".join(parts)


# ------------------------------------------------------------------- lengths


def _length_cache(datum):
    cache = getattr(datum, "_aff_len_cache", None)
    if cache is None:
        cache = datum._aff_len_cache = {}
    return cache


def length(x, levi=None):
    """Iwahori-Matsumoto length: affine root hyperplanes separating the base
    alcove from its image, counted as root subgroups of I leaving I under x."""
    d = x.datum
    if levi is None:
        cache = _length_cache(d)
        key = (x.w, x.lam)
        out = cache.get(key)
        if out is None:
            out = int(_kernels.affine_length(d.kdiff[x.w], d.roots, np.asarray(x.lam, dtype=np.int64)))
            cache[key] = out
        return out
    idx = sorted(levi.roots)
    if not idx:
        return 0
    return int(_kernels.affine_length(d.kdiff[x.w][idx], d.roots[idx], np.asarray(x.lam, dtype=np.int64)))


def length_oracle(x):
    """Independent length count: walk every root α and count the affine root
    subgroups U_α(t^k) of I whose image under x leaves I."""
    d = x.datum
    total = 0
    for a in range(d.roots.shape[0]):
        wa = int(d.perms[x.w][a])
        total += max(0, int(d.kmin[wa]) - d.pairing(a, x.lam) - int(d.kmin[a]))
    return total


# --------------------------------------------------- affine simple reflections


def _components(datum, J):
    J = list(J)
    comps, seen = [], set()
    for j in J:
        if j in seen:
            continue
        comp, stack = set(), [j]
        while stack:
            i = stack.pop()
            if i in comp:
                continue
            comp.add(i)
            stack.extend(k for k in J if k not in comp and datum.cartan[i, k] != 0)
        seen |= comp
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class AffineReflection:
    name: str
    elt: AffineElt


def affine_simple_reflections(datum, levi=None):
    """Simple affine reflections of the Coxeter part of W̃_M (M standard)."""
    J = range(datum.semisimple_rank) if levi is None else levi.simple
    key = ("affrefl", tuple(J))
    cache = datum._levi_cache
    if key in cache:
        return cache[key]
    if levi is not None and not levi.is_standard:
        raise ValueError("affine simple reflections are defined for standard Levis")
    refl = [AffineReflection(f"s{j + 1}", AffineElt.weyl(datum, datum.simple_refl[j])) for j in J]
    comps = _components(datum, J)
    for k, comp in enumerate(comps):
        P = datum.npos
        cand = [a for a in range(P) if all(datum.root_coefs[a, j] == 0 for j in range(datum.semisimple_rank) if j not in comp)]
        theta = max(cand, key=lambda a: (int(datum.root_coefs[a].sum()), -a))
        s0 = AffineElt(datum, datum.refl[theta], tuple(int(v) for v in datum.coroots[theta]))
        name = "s0" if len(comps) == 1 else f"s0_{k + 1}"
        if length(s0) != 1 and levi is None:
            raise ConventionBroken("affine simple reflection does not have length 1")
        refl.append(AffineReflection(name, s0))
    cache[key] = refl
    return refl


def _first_descent(x, levi=None):
    lx = length(x, levi)
    for i, r in enumerate(affine_simple_reflections(x.datum, levi)):
        if length(r.elt * x, levi) < lx:
            return i
    return None


@dataclass(frozen=True)
class OmegaDecomp:
    coxeter: tuple  # indices into affine_simple_reflections(datum, levi)
    omega: AffineElt
    names: tuple

    def word(self):
        return "*".join(self.names) if self.names else "e"


def omega_decompose(x, levi=None):
    """x = s_{i1} ... s_{ik} · ω with k = length(x) and ω of length 0."""
    refl = affine_simple_reflections(x.datum, levi)
    word = []
    y = x
    while True:
        i = _first_descent(y, levi)
        if i is None:
            break
        word.append(i)
        y = refl[i].elt * y
    return OmegaDecomp(tuple(word), y, tuple(refl[i].name for i in word))


def omega_part(x, levi=None):
    return omega_decompose(x, levi).omega


def bruhat_leq(y, x):
    """y <= x in the Bruhat order of W̃ (equal Ω-parts, Coxeter subword order)."""
    refl = affine_simple_reflections(x.datum)
    while True:
        ly, lx = length(y), length(x)
        if ly > lx:
            return False
        if lx == 0:
            return y == x
        i = _first_descent(x)
        s = refl[i].elt
        x = s * x
        sy = s * y
        if length(sy) < ly:
            y = sy


def lower_cone(x, budget=None):
    """All y <= x, from the subexpressions of one reduced word of x."""
    budget = default_budget() if budget is None else budget
    dec = omega_decompose(x)
    k = len(dec.coxeter)
    if 2 ** k > budget:
        raise BudgetExceeded(f"lower cone of {x!r}: 2^{k} subwords exceed budget {budget}")
    cache = x.datum._levi_cache
    key = ("cone", x.w, x.lam)
    if key in cache:
        return cache[key]
    refl = affine_simple_reflections(x.datum)
    cone = {dec.omega}
    for i in reversed(dec.coxeter):
        s = refl[i].elt
        cone |= {s * y for y in cone}
    cone = frozenset(cone)
    cache[key] = cone
    return cone


def sigma_conj(x, g):
    """g^{-1} x σ(g)."""
    return g.inverse() * x * g.sigma()


# -------------------------------------------------------------------- τ_μ


def tau(datum, mu):
    """τ_μ = x_μ ε^μ, verified to be the shortest element of W ε^μ W."""
    mu = tuple(int(v) for v in mu)
    if not datum.is_dominant(mu):
        raise ValueError(f"{mu} is not dominant")
    t = AffineElt(datum, datum.x_mu(mu), mu)
    lt = length(t)
    orbit = {datum.act(v, mu) for v in range(datum.order)}
    best = min(length(AffineElt(datum, u, lam)) for u in range(datum.order) for lam in orbit)
    if lt != best:
        raise ConventionBroken(f"x_mu eps^mu has length {lt}, but W eps^mu W contains length {best}")
    return t


def double_coset_elements(datum, mu):
    """All elements u ε^{λ} of W ε^μ W."""
    orbit = {datum.act(v, mu) for v in range(datum.order)}
    return [AffineElt(datum, u, lam) for u in range(datum.order) for lam in sorted(orbit)]


# --------------------------------------------------------- He's lemma, Demazure


def is_min_in_left_coset(x, levi):
    """x is the shortest element of W_M x."""
    lx = length(x)
    d = x.datum
    return all(length(AffineElt.weyl(d, m) * x) >= lx for m in d.weyl_subgroup(levi))


def conj_dominates(y, x, levi):
    """Return the two flags

    (∃ w ∈ W_M: y ≥ w x σ(w)^{-1},  ∃ u, v ∈ W_M, v ≤ u: y ≥ u x σ(v)^{-1}).
    """
    d = x.datum
    W_M = sorted(d.weyl_subgroup(levi))
    try:
        cone = lower_cone(y)
    except BudgetExceeded:
        cone = None

    def below(z):
        return z in cone if cone is not None else bruhat_leq(z, y)

    elts = {u: AffineElt.weyl(d, u) for u in W_M}
    flag1 = any(below(elts[w] * x * elts[w].sigma().inverse()) for w in W_M)
    flag2 = any(below(elts[u] * x * elts[v].sigma().inverse())
                for u in W_M for v in W_M if d.bruhat_leq_finite(v, u))
    return flag1, flag2


def demazure_set(y, z):
    """Elements x with IxI ⊆ IyIzI, by the one-letter recursion
    IsI·IxI = IsxI if l(sx) > l(x), else IxI ∪ IsxI."""
    dec = omega_decompose(y)
    refl = affine_simple_reflections(y.datum)
    current = {dec.omega * z}
    for i in reversed(dec.coxeter):
        s = refl[i].elt
        nxt = set()
        for x in current:
            sx = s * x
            if length(sx) > length(x):
                nxt.add(sx)
            else:
                nxt.add(x)
                nxt.add(sx)
        current = nxt
    return frozenset(current)


def elements_up_to_length(datum, max_len, omegas):
    """All x = c·ω with l(x) <= max_len, for ω in the given length-0 elements."""
    refl = [r.elt for r in affine_simple_reflections(datum)]
    out = set()
    for om in omegas:
        layer = {om}
        out |= layer
        for _ in range(max_len):
            nxt = set()
            for x in layer:
                lx = length(x)
                for s in refl:
                    sx = s * x
                    if length(sx) == lx + 1:
                        nxt.add(sx)
            out |= nxt
            layer = nxt
    return out


def length_zero_elements(datum, lam_box):
    """Length-zero elements ω(ε^λ) for λ in an iterable of translations."""
    return {omega_part(AffineElt.translation(datum, lam)) for lam in lam_box}


def box(center, radius):
    return product(*[range(c - radius, c + radius + 1) for c in center])
