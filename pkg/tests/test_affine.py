"""Extended affine Weyl group: lengths, Bruhat order and cones against
closed-form counts (Bott's formula, dihedral groups) and independent counts."""

import numpy as np
import pytest

from loopstrata import GL, GSp, siegel_mu
from loopstrata.affine import (AffineElt, affine_simple_reflections, bruhat_leq, box, default_budget, demazure_set,
                               elements_up_to_length, length, length_oracle, length_zero_elements, lower_cone,
                               omega_decompose, sigma_conj, tau)
from loopstrata.errors import BudgetExceeded


def _random_elements(d, count, seed, radius=3):
    rng = np.random.default_rng(seed)
    return [AffineElt(d, int(rng.integers(d.order)), tuple(int(v) for v in rng.integers(-radius, radius + 1, d.rank)))
            for _ in range(count)]


def _series(num, den, terms):
    # power series num/den with integer polynomial coefficient lists, den[0] == 1
    out = []
    for k in range(terms):
        c = num[k] if k < len(num) else 0
        c -= sum(den[j] * out[k - j] for j in range(1, min(k, len(den) - 1) + 1))
        out.append(c)
    return out


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@pytest.mark.parametrize("d", [GL(2), GL(3), GL(4), GSp(4), GSp(6)], ids=repr)
def test_length_matches_independent_count(d):
    for x in _random_elements(d, 200, seed=d.order):
        assert length(x) == length_oracle(x)


@pytest.mark.parametrize("d", [GL(3), GSp(4)], ids=repr)
def test_length_symmetries(d):
    els = _random_elements(d, 60, seed=1)
    for x in els:
        assert length(x) == length(x.inverse())
        for s in affine_simple_reflections(d):
            assert abs(length(s.elt * x) - length(x)) == 1
    for x, y in zip(els, els[1:]):
        assert length(x * y) <= length(x) + length(y)


def test_translation_length_is_two_rho_pairing():
    d = GL(4)
    for lam in [(3, 1, 0, -2), (0, 0, 0, 0), (-1, 2, 2, 5)]:
        dom = sorted(lam, reverse=True)
        two_rho = sum(dom[i] - dom[j] for i in range(4) for j in range(i + 1, 4))
        assert length(AffineElt.translation(d, lam)) == two_rho


@pytest.mark.parametrize("d,mu", [(GL(2), (1, 0)), (GL(3), (2, 1, 0)), (GL(4), (1, 1, 0, 0)),
                                  (GSp(4), siegel_mu(GSp(4)))], ids=repr)
def test_tau_length(d, mu):
    t = tau(d, mu)
    two_rho = sum(d.pairing(a, mu) for a in range(d.npos))
    assert length(t) == two_rho - d.x_mu(mu).length


def test_tau_needs_dominant():
    with pytest.raises(ValueError):
        tau(GL(2), (0, 1))


def test_affine_a1_and_a2_poincare_series():
    e = [AffineElt.identity(GL(2))]
    counts = np.bincount([length(x) for x in elements_up_to_length(GL(2), 8, e)])
    assert list(counts) == _series([1, 1], [1, -1], 9)
    e3 = [AffineElt.identity(GL(3))]
    counts = np.bincount([length(x) for x in elements_up_to_length(GL(3), 7, e3)])
    num = _poly_mul([1, 1], [1, 1, 1])
    den = _poly_mul([1, -1], [1, 0, -1])
    assert list(counts) == _series(num, den, 8)


def test_dihedral_lower_cones():
    d = GL(2)
    for x in elements_up_to_length(d, 7, [AffineElt.identity(d)]):
        k = length(x)
        assert len(lower_cone(x)) == (1 if k == 0 else 2 * k)


def test_bruhat_leq_agrees_with_cone_and_finite_order():
    d = GL(3)
    els = sorted(elements_up_to_length(d, 4, [AffineElt.identity(d)]), key=lambda x: (x.lam, x.w))
    for x in els:
        cone = lower_cone(x)
        for y in els:
            assert bruhat_leq(y, x) == (y in cone)
    for u in d.all_elements():
        for v in d.all_elements():
            assert bruhat_leq(AffineElt.weyl(d, u), AffineElt.weyl(d, v)) == d.bruhat_leq_finite(u, v)


def test_omega_decomposition_reconstructs():
    d = GSp(4)
    refl = affine_simple_reflections(d)
    for x in _random_elements(d, 50, seed=7):
        dec = omega_decompose(x)
        y = dec.omega
        for i in reversed(dec.coxeter):
            y = refl[i].elt * y
        assert y == x and len(dec.coxeter) == length(x) and length(dec.omega) == 0


def test_length_zero_elements_of_gl_are_indexed_by_kappa():
    d = GL(3)
    om = length_zero_elements(d, box((0, 0, 0), 1))
    assert sorted({sum(x.lam) for x in om}) == list(range(-3, 4))
    assert len(om) == 7


def test_demazure_set():
    d = GL(2)
    s0, s1 = (r.elt for r in affine_simple_reflections(d))
    assert demazure_set(s1, s0) == {s1 * s0}
    assert demazure_set(s1, s1) == {AffineElt.identity(d), s1}


def test_sigma_conj_identity_and_budget(monkeypatch):
    d = GL(3)
    x = _random_elements(d, 1, seed=3)[0]
    assert sigma_conj(x, AffineElt.identity(d)) == x
    monkeypatch.setenv("LOOPSTRATA_BUDGET", "8")
    assert default_budget() == 8
    y = AffineElt.translation(d, (3, 0, -3))
    with pytest.raises(BudgetExceeded):
        lower_cone(y)
