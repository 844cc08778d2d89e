"""Truncation strata: closure relations, generic σ-conjugacy classes, the
minimal-element characterization and the Ekedahl-Oort layer for GSp."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd

import numpy as np

from .affine import AffineElt, bruhat_leq, default_budget, length, lower_cone, sigma_conj
from .alcoves import (TruncationType, all_semistandard_parabolics, is_fundamental, minimal_type,
                      parabolics_with_levi)
from .errors import BudgetExceeded, ConventionBroken, InvalidSlopes, NotMinimalType
from .isocrystal import class_of, kappa_of_coweight, leq_B, max_class, newton_leq
from .rootdatum import GSp, WeylElt, siegel_mu


# ------------------------------------------------------------------ closure


def closure_leq(a, b):
    """S_a ⊆ closure of S_b: some W-σ-conjugate of the representative of a
    lies below that of b in the Bruhat order."""
    d = b.datum
    x, y = a.element(), b.element()
    lx = length(y)
    for g in range(d.order):
        z = sigma_conj(x, AffineElt.weyl(d, g))
        if length(z) <= lx and bruhat_leq(z, y):
            return True
    return False


def closure_leq_same_mu(w_prime, w, mu):
    """Same-μ closure test over the conjugators σ⁻¹(W_{M_μ})."""
    d = w.datum
    xm = d.x_mu(mu).idx
    xinv = d.inv[xm]
    for g in d.weyl_subgroup(d.centralizer_levi(mu).sigma(-1)):
        z = d.mul(d.mul(d.inv[g], w_prime.idx), d.mul(xm, d.mul(d.sigma_w(g), xinv)))
        if d.bruhat_leq_finite(z, w.idx):
            return True
    return False


# ------------------------------------------------------------ generic classes


def generic_class(w, mu, budget=None):
    """The largest class meeting I·wτ_μ·I."""
    d = w.datum
    x = TruncationType(w, mu).element()
    return max_class(d, {class_of(y) for y in lower_cone(x, budget)})


def is_minimal_type(t):
    return minimal_type(t.datum, class_of(t.element())) == t


def dominant_coweights_below(datum, mu):
    """Dominant μ′ ⪯ μ with the same image in π_1(G).

    Dominant coweights below μ are connected to μ by steps subtracting a
    positive coroot, so a search staying among dominant coweights is exhaustive."""
    mu = tuple(int(v) for v in mu)
    pos = [tuple(int(v) for v in datum.coroots[a]) for a in range(datum.npos)]
    seen = {mu}
    frontier = [mu]
    while frontier:
        nxt = []
        for lam in frontier:
            for c in pos:
                new = tuple(a - b for a, b in zip(lam, c))
                if new not in seen and datum.is_dominant(new):
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    k = kappa_of_coweight(datum, mu)
    out = [lam for lam in seen if kappa_of_coweight(datum, lam) == k and newton_leq(datum, lam, mu)]
    return sorted(out, reverse=True)


def generic_via_minimal(w, mu, budget=None, check=True):
    """The largest class of a minimal element whose stratum lies in the
    closure of S_{w,μ}; asserted equal to generic_class when check is set."""
    d = w.datum
    target = TruncationType(w, mu)
    classes = []
    for lam in dominant_coweights_below(d, mu):
        for v in sorted(d.mu_W(lam)):
            t = TruncationType(WeylElt(d, v), lam)
            if is_minimal_type(t) and closure_leq(t, target):
                classes.append(class_of(t.element()))
    out = max_class(d, classes)
    if check:
        other = generic_class(w, mu, budget)
        if other != out:
            raise ConventionBroken(f"generic class of {target}: {other} from the cone, {out} from minimal elements")
    return out


def fundamental_conjugates_below(x, budget=None):
    """Classes of y ≤ x of the form y = w⁻¹zσ(w), z fundamental for a
    semistandard P = MN and w ∈ ^M W."""
    d = x.datum
    cone = lower_cone(x, budget)
    parabolics = all_semistandard_parabolics(d)
    out = set()
    for y in cone:
        c = class_of(y)
        if c in out:
            continue
        if _has_fundamental_conjugate(d, y, parabolics):
            out.add(c)
    return out


def _has_fundamental_conjugate(d, y, parabolics):
    for P in parabolics:
        for w in d.min_coset_reps(P.levi, "left"):
            # z = w·y·σ(w)⁻¹
            z = sigma_conj(y, AffineElt.weyl(d, d.inv[w]))
            if length(z, P.levi) == 0 and is_fundamental(z, P):
                return True
    return False


# ------------------------------------------------------------- verification


@dataclass
class Report:
    name: str
    checked: int = 0
    failures: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {"name": self.name, "checked": self.checked, "passed": self.passed,
                "failures": [str(f) for f in self.failures]}


def verify_thm_main(w, mu, budget=None):
    """Every y ≤ wτ_μ has its minimal truncation type inside the closure of S_{w,μ}."""
    d = w.datum
    target = TruncationType(w, mu)
    rep = Report(f"minimal types below {target}")
    cache = {}
    for y in lower_cone(target.element(), budget):
        c = class_of(y)
        if c not in cache:
            t = minimal_type(d, c)
            cache[c] = (t, closure_leq(t, target))
        rep.checked += 1
        t, ok = cache[c]
        if not ok:
            rep.failures.append(f"{y!r}: minimal type {t} not below {target}")
    return rep


def minimal_closure_vs_class_order(a, b):
    """Closure of minimal strata against the order of their classes.  The
    implication closure ⇒ ⪯ is asserted; the converse is only reported."""
    for t in (a, b):
        if not is_minimal_type(t):
            raise NotMinimalType(f"{t} is not the minimal type of its class")
    d = a.datum
    closure = closure_leq(a, b)
    order = leq_B(d, class_of(a.element()), class_of(b.element()))
    if closure and not order:
        raise ConventionBroken(f"{a} lies in the closure of {b} but its class is not smaller")
    return {"a": a.to_json(), "b": b.to_json(), "closure": closure, "class_leq": order,
            "discrepancy": closure != order}


# ------------------------------------------------------------------- atlas


@dataclass
class StrataAtlas:
    datum: object
    mu_bound: tuple
    strata: list
    closure: np.ndarray
    generic: list
    minimal: list
    lengths: list
    antisymmetry_violations: list = dc_field(default_factory=list)

    def index(self, t):
        return self.strata.index(t)

    def covers(self):
        """Covering pairs (i, j), stratum i directly below stratum j."""
        C = self.closure
        n = len(self.strata)
        out = []
        for i in range(n):
            for j in range(n):
                if i != j and C[i, j] and not any(C[i, k] and C[k, j] for k in range(n) if k not in (i, j)):
                    out.append((i, j))
        return out

    def to_json(self):
        d = self.datum
        return {
            "group": d.describe(),
            "mu": [int(v) for v in d.to_display(self.mu_bound)],
            "strata": [{"w": repr(t.w), "mu": [int(v) for v in d.to_display(t.mu)],
                        "generic": None if g is None else g.to_json(d),
                        "minimal": bool(m), "length": int(l)}
                       for t, g, m, l in zip(self.strata, self.generic, self.minimal, self.lengths)],
            "closure": [[bool(v) for v in row] for row in self.closure],
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_dot(self):
        d = self.datum
        lines = ["digraph strata {", "  rankdir=BT;"]
        for i, (t, g) in enumerate(zip(self.strata, self.generic)):
            nu = "?" if g is None else ",".join(_frac(v) for v in d.to_display(g.newton))
            mu = ",".join(str(int(v)) for v in d.to_display(t.mu))
            lines.append(f'  s{i} [label="{t.w!r} | {mu} | {nu}"];')
        for i, j in self.covers():
            lines.append(f"  s{i} -> s{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _frac(v):
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def closure_poset(datum, mu, budget=None, same_mu_only=False, generic=True):
    """All strata S_{w′,μ′} with μ′ ⪯ μ, their closure relation and generic classes."""
    budget = default_budget() if budget is None else budget
    mu = tuple(int(v) for v in mu)
    if not datum.is_dominant(mu):
        raise ValueError(f"{mu} is not dominant")
    mus = [mu] if same_mu_only else dominant_coweights_below(datum, mu)
    strata = [TruncationType(WeylElt(datum, v), lam) for lam in mus for v in sorted(datum.mu_W(lam))]
    if len(strata) ** 2 > budget * 64:
        raise BudgetExceeded(f"{len(strata)} strata exceed budget {budget}")
    n = len(strata)
    C = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(strata):
        for j, b in enumerate(strata):
            if i == j:
                C[i, j] = True
            elif a.mu == b.mu:
                C[i, j] = closure_leq_same_mu(a.w, b.w, a.mu)
            else:
                C[i, j] = closure_leq(a, b)
    # transitivity is a consequence of the theory; check it
    if (((C.astype(np.int64) @ C.astype(np.int64)) > 0) & ~C).any():
        raise ConventionBroken("closure relation is not transitive")
    viol = [(strata[i], strata[j]) for i in range(n) for j in range(i + 1, n) if C[i, j] and C[j, i]]
    gens, mins = [], []
    for t in strata:
        try:
            gens.append(generic_class(t.w, t.mu, budget) if generic else None)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"stratum {t}: {exc}") from exc
        mins.append(is_minimal_type(t))
    return StrataAtlas(datum, mu, strata, C, gens, mins, [length(t.element()) for t in strata], viol)


def eo_atlas(g, budget=None, generic=True, verify=True):
    """The Ekedahl-Oort strata of GSp_{2g} for the Siegel coweight."""
    d = GSp(2 * g)
    mu = siegel_mu(d)
    atlas = closure_poset(d, mu, budget, same_mu_only=True, generic=False)
    report = []
    if generic:
        atlas.generic = [generic_via_minimal(t.w, t.mu, budget) for t in atlas.strata]
    if verify:
        report = [verify_thm_main(t.w, t.mu, budget) for t in atlas.strata]
    return atlas, report


# ------------------------------------------------------- minimal Dieudonné


@dataclass(frozen=True)
class SlopeData:
    """Pairs (n_i, h_i), gcd 1, with slopes n_i/h_i ∈ [0, 1] nonincreasing."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise InvalidSlopes("empty slope data")
        for n, h in pairs:
            if h <= 0 or not 0 <= n <= h or gcd(n, h) != 1:
                raise InvalidSlopes(f"bad slope pair {(n, h)}")
        s = [Fraction(n, h) for n, h in pairs]
        if any(a < b for a, b in zip(s, s[1:])):
            raise InvalidSlopes("slopes must be nonincreasing")

    @property
    def height(self):
        return sum(h for _, h in self.pairs)

    def newton(self):
        return tuple(Fraction(n, h) for n, h in self.pairs for _ in range(h))

    def blocks(self):
        """(k·n, k·h) for each distinct slope n/h of multiplicity k."""
        out = []
        for n, h in self.pairs:
            if out and Fraction(out[-1][0], out[-1][1]) == Fraction(n, h):
                out[-1] = (out[-1][0] + n, out[-1][1] + h)
            else:
                out.append((n, h))
        return out

    def block_sizes(self):
        return [h for _, h in self.blocks()]


def all_slope_data(max_height):
    """All slope data of total height at most max_height."""
    slopes = sorted({(n, h) for h in range(1, max_height + 1) for n in range(h + 1) if gcd(n, h) == 1},
                    key=lambda p: Fraction(*p), reverse=True)
    out = []

    def rec(start, left, acc):
        if acc:
            out.append(SlopeData(tuple(acc)))
        for k in range(start, len(slopes)):
            n, h = slopes[k]
            if h <= left:
                rec(k, left - h, acc + [(n, h)])

    rec(0, max_height, [])
    return out


def _basis_order(s, interleave):
    """Position of each block basis vector f^i_j (block by block) in the
    final basis.  Interleaving sorts by ((j−1)/h_i, i)."""
    keys = []
    off = 0
    for b, (_, h) in enumerate(s.blocks()):
        for j in range(1, h + 1):
            keys.append(((Fraction(j - 1, h), b) if interleave else (b, j), off + j - 1))
        off += h
    order = [k for _, k in sorted(keys)]
    pos = [0] * len(order)
    for new, old in enumerate(order):
        pos[old] = new
    return pos


def minimal_element(s, datum=None, interleave=True):
    """The affine Weyl element of GL_h of the minimal isocrystal with slopes s.

    On a block of slope n/h the Frobenius sends e_j to e_{j+n}, with
    e_{j+h} = t·e_j, written in the reversed basis f_j = e_{h+1−j}.  Equal
    slopes share one block (k·n, k·h): the same module, basis interleaved,
    and of length zero in its block.  With interleave set, the vectors of
    all blocks are merged by (j−1)/h_i; the block-diagonal order is in
    general not fundamental for any parabolic with the standard block Levi."""
    from .matrices import gl_datum, weyl_from_perm

    d = gl_datum(s.height) if datum is None else datum
    pos = _basis_order(s, interleave)
    perm = [0] * s.height
    lam = [0] * s.height
    off = 0
    for n, h in s.blocks():
        for j in range(1, h + 1):
            k, r = divmod(j + n - 1, h)
            src = pos[off + (h - j)]          # f_{h+1−j}
            perm[src] = pos[off + (h - (r + 1))]
            lam[src] = k
        off += h
    P = np.zeros((s.height, s.height), dtype=np.int64)
    for i, j in enumerate(perm):
        P[j, i] = 1
    return AffineElt(d, weyl_from_perm(d, P), lam)


def block_levi(s, datum, interleave=True):
    """The Levi GL_{h_1} × ... placed on the positions of each block."""
    from .rootdatum import Levi

    pos = _basis_order(s, interleave)
    which = {}
    off = 0
    for b, h in enumerate(s.block_sizes()):
        for j in range(h):
            which[pos[off + j]] = b
        off += h
    roots = [a for a in range(datum.roots.shape[0])
             if which[int(np.argmax(datum.roots[a]))] == which[int(np.argmin(datum.roots[a]))]]
    return Levi(datum, roots)


def block_parabolic(s, datum, interleave=True):
    """The parabolics whose Levi is the block Levi of s."""
    return parabolics_with_levi(block_levi(s, datum, interleave))


def minimal_dieudonne(s, F, interleave=True):
    """Matrix over F((t)) of the minimal isocrystal with slopes s."""
    from .matrices import LaurentMatrix

    return LaurentMatrix.monomial(minimal_element(s, interleave=interleave), F)


def check_minimal_dieudonne(s, F, interleave=True):
    """(fundamental for a parabolic with the block Levi, Newton slopes reproduced)."""
    from .matrices import newton_matrix

    x = minimal_element(s, interleave=interleave)
    fund = any(length(x, P.levi) == 0 and is_fundamental(x, P)
               for P in block_parabolic(s, x.datum, interleave))
    nu = tuple(sorted(s.newton(), reverse=True))
    return fund, tuple(newton_matrix(minimal_dieudonne(s, F, interleave))) == nu
