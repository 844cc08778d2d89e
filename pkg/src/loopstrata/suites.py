"""Property suites shared by the command line and the test-suite.  Each
returns a Report; none raises on a failed property."""

from __future__ import annotations

import numpy as np

from .affine import (AffineElt, box, conj_dominates, demazure_set, elements_up_to_length, is_min_in_left_coset,
                     length, length_zero_elements, lower_cone, omega_part)
from .alcoves import TruncationType, all_semistandard_parabolics, fundamental_conj_witness, is_fundamental_def
from .atlas import (Report, all_slope_data, check_minimal_dieudonne, closure_leq, closure_leq_same_mu,
                    closure_poset, dominant_coweights_below, generic_class, generic_via_minimal,
                    verify_thm_main)
from .errors import LoopStrataError, NoWitness
from .isocrystal import class_of
from .rootdatum import WeylElt


def _strata(datum, mu):
    return [TruncationType(WeylElt(datum, v), lam)
            for lam in dominant_coweights_below(datum, mu) for v in sorted(datum.mu_W(lam))]


def _guard(rep, label, fn):
    try:
        return fn()
    except LoopStrataError as exc:
        rep.failures.append(f"{label}: {type(exc).__name__}: {exc}")
        return None


def suite_types_well_defined(datum, mu, samples=20, q=2, m=1, precision=4, seed=0):
    """Truncation types are well defined: w·τ_μ has type (w, μ), and for GL_n
    random elements of I·wτ_μ·I have the same type."""
    from .alcoves import truncation_type_affine

    rep = Report("thm11")
    for t in _strata(datum, mu):
        rep.checked += 1
        got = _guard(rep, repr(t), lambda: truncation_type_affine(t.element()))
        if got is not None and got != t:
            rep.failures.append(f"{t}: affine recursion gave {got}")
    if datum.name.startswith("GL:") and samples:
        from .fields import field
        from .matrices import random_double_coset_element
        from .matrix_truncation import truncation_type_matrix

        F = field(q, m)
        rng = np.random.default_rng(seed)
        for t in _strata(datum, mu):
            for _ in range(samples):
                rep.checked += 1
                g = random_double_coset_element(t.element(), F, precision, seed=int(rng.integers(2 ** 31)))
                got = _guard(rep, repr(t), lambda: truncation_type_matrix(g))
                if got is not None and got != t:
                    rep.failures.append(f"matrix in I{t.element()!r}I: type {got}, expected {t}")
    return rep


def suite_closure_order(datum, mu, budget=None):
    """Closure relation: a partial order, and the same-μ criterion agrees."""
    rep = Report("thm13")
    atlas = _guard(rep, "closure_poset", lambda: closure_poset(datum, mu, budget, generic=False))
    if atlas is None:
        return rep
    rep.checked += 1
    for a, b in atlas.antisymmetry_violations:
        rep.failures.append(f"antisymmetry fails for {a} and {b}")
    for a in atlas.strata:
        for b in atlas.strata:
            if a.mu == b.mu:
                rep.checked += 1
                if closure_leq(a, b) != closure_leq_same_mu(a.w, b.w, a.mu):
                    rep.failures.append(f"closure criteria differ on ({a}, {b})")
    return rep


def suite_generic_bounds(datum, mu, budget=None):
    rep = Report("thm14")
    for t in _strata(datum, mu):
        r = _guard(rep, repr(t), lambda: verify_thm_main(t.w, t.mu, budget))
        if r is not None:
            rep.checked += r.checked
            rep.failures += r.failures
    return rep


def suite_generic_minimal(datum, mu, budget=None):
    rep = Report("cor15")
    for t in _strata(datum, mu):
        rep.checked += 1
        a = _guard(rep, repr(t), lambda: generic_class(t.w, t.mu, budget))
        b = _guard(rep, repr(t), lambda: generic_via_minimal(t.w, t.mu, budget, check=False))
        if a is not None and b is not None and a != b:
            rep.failures.append(f"{t}: generic {a.to_json(datum)} vs minimal {b.to_json(datum)}")
    return rep


def _omegas(datum):
    return sorted(length_zero_elements(datum, box((0,) * datum.rank, 1)), key=lambda x: (x.lam, x.w))


def suite_lemma_he(datum, max_len=4, demazure_len=None, omegas=None):
    """conj_dominates gives equal flags, and Demazure sets of IyIzI lie in {y′z : y′ ≤ y}."""
    rep = Report("lemma-he")
    omegas = [AffineElt.identity(datum)] if omegas is None else omegas
    els = sorted(elements_up_to_length(datum, max_len, omegas), key=lambda x: (x.lam, x.w))
    levis = sorted({P.levi for P in all_semistandard_parabolics(datum) if P.levi.is_standard},
                   key=lambda M: sorted(M.roots))
    by_omega = {}
    for x in els:
        by_omega.setdefault(omega_part(x), []).append(x)
    for group in by_omega.values():
        for y in group:
            for x in group:
                for M in levis:
                    if not is_min_in_left_coset(x, M):
                        continue
                    rep.checked += 1
                    flags = _guard(rep, f"({y!r}, {x!r})", lambda: conj_dominates(y, x, M))
                    if flags is not None and flags[0] != flags[1]:
                        rep.failures.append(f"flags differ for y={y!r}, x={x!r}, M={M!r}")
    dl = max_len if demazure_len is None else demazure_len
    small = [x for x in els if length(x) <= dl]
    for y in small:
        below = lower_cone(y)
        for z in small:
            rep.checked += 1
            allowed = {yp * z for yp in below}
            extra = demazure_set(y, z) - allowed
            if extra:
                rep.failures.append(f"Demazure set of ({y!r}, {z!r}) has {sorted(map(repr, extra))[:3]}")
    return rep


def suite_fundamental(datum, max_height=4, q=2, m=1, mu_bound=None):
    """Minimal Dieudonné matrices are fundamental and reproduce their slopes;
    same-class fundamental elements are W-σ-conjugate."""
    from .fields import field

    rep = Report("fundamental")
    F = field(q, m)
    for s in all_slope_data(max_height):
        rep.checked += 1
        res = _guard(rep, repr(s.pairs), lambda: check_minimal_dieudonne(s, F))
        if res is not None and res != (True, True):
            rep.failures.append(f"slopes {s.pairs}: fundamental={res[0]}, slopes reproduced={res[1]}")
    if mu_bound is not None:
        Ps = all_semistandard_parabolics(datum)
        found = {}
        for lam0 in dominant_coweights_below(datum, mu_bound):
            for lam in sorted({datum.act(w, lam0) for w in range(datum.order)}):
                for w in range(datum.order):
                    x = AffineElt(datum, w, lam)
                    if any(is_fundamental_def(x, P) for P in Ps):
                        found.setdefault(class_of(x), []).append(x)
        for xs in found.values():
            for x in xs:
                for y in xs:
                    rep.checked += 1
                    try:
                        fundamental_conj_witness(x, y)
                    except NoWitness:
                        rep.failures.append(f"no W-witness between fundamental {x!r} and {y!r}")
    return rep


def suite_matrix_oracle(n, mu, q=2, m=1, precision=3):
    """Exhaustive orbits modulo t^N against truncation_type_matrix."""
    from .fields import field
    from .matrix_truncation import level_orbits, truncation_type_matrix

    rep = Report("matrix-oracle")
    F = field(q, m)
    elems, lab, n_orb, types = level_orbits(F, n, mu, precision)
    rep.checked += 1
    if len(types) != n_orb:
        rep.failures.append(f"{n_orb} orbits but {len(types)} carry a monomial type")
    for X, l in zip(elems, lab):
        rep.checked += 1
        t = types.get(int(l))
        got = _guard(rep, repr(X), lambda: truncation_type_matrix(X))
        if got is not None and t is not None and got != t:
            rep.failures.append(f"{X!r}: matrix type {got}, orbit type {t}")
    return rep
