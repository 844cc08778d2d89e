"""κ and Newton points: GL_n cycle-type oracle, sympy Smith forms, dominance order."""

from fractions import Fraction
from itertools import accumulate

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from loopstrata import GL, GSp, SL, RootDatum
from loopstrata.affine import AffineElt, sigma_conj
from loopstrata.errors import NoUniqueMaximum
from loopstrata.isocrystal import (SigmaClass, class_of, kappa, kappa_group, leq_B, max_class, newton_leq,
                                   newton_point, smith_normal_form, twisted_power)


def _random_elements(d, count, seed, radius=3):
    rng = np.random.default_rng(seed)
    return [AffineElt(d, int(rng.integers(d.order)), tuple(int(v) for v in rng.integers(-radius, radius + 1, d.rank)))
            for _ in range(count)]


def _cycle_newton(x):
    # slopes of w ε^λ: the average of λ over each cycle of w, with multiplicity
    d = x.datum
    n = d.rank
    perm = [int(np.argmax(d.mats[x.w][:, j])) for j in range(n)]
    seen, slopes = set(), []
    for i in range(n):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        avg = Fraction(sum(x.lam[k] for k in cyc), len(cyc))
        slopes += [avg] * len(cyc)
    return tuple(sorted(slopes, reverse=True))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_gl_newton_point_is_cycle_average(n):
    d = GL(n)
    for x in _random_elements(d, 150, seed=n):
        assert newton_point(x) == _cycle_newton(x)
        assert kappa(x) == (sum(x.lam),)


@pytest.mark.parametrize("d", [GL(3), GSp(4), GSp(6), SL(3)], ids=repr)
def test_class_is_sigma_conjugation_invariant(d):
    xs = _random_elements(d, 40, seed=11)
    gs = _random_elements(d, 40, seed=12)
    for x, g in zip(xs, gs):
        assert class_of(sigma_conj(x, g)) == class_of(x)


def test_nonsplit_sigma_invariance_and_twisted_power():
    d = RootDatum([[2, -1], [-1, 2]], [[1, 0], [0, 1]], sigma_perm=[1, 0], sigma_lattice=[[0, 1], [1, 0]])
    xs = _random_elements(d, 40, seed=5)
    for x, g in zip(xs, reversed(xs)):
        assert class_of(sigma_conj(x, g)) == class_of(x)
        nu = newton_point(x)
        assert d.sigma_coweight(nu) == nu
        assert twisted_power(x, 2) == x * x.sigma()


def test_smith_normal_form_matches_sympy():
    rng = np.random.default_rng(0)
    for _ in range(40):
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        A = rng.integers(-6, 7, size=(m, n)).tolist()
        U, diag = smith_normal_form(A)
        ref = sympy_snf(sympy.Matrix(A), domain=sympy.ZZ)
        expect = sorted(abs(int(ref[i, i])) for i in range(min(m, n)) if ref[i, i] != 0)
        assert sorted(abs(v) for v in diag if v != 0) == expect
        assert abs(sympy.Matrix(U).det()) == 1


def test_kappa_groups():
    assert kappa_group(GL(3)).moduli == [0]
    assert kappa_group(SL(3)).moduli == []
    assert kappa_group(GSp(4)).moduli == [0]
    # rank-1 torus with σ = -1 has π_1(T)_Γ = Z/2
    torus = RootDatum(np.zeros((0, 1), dtype=int), np.zeros((0, 1), dtype=int), sigma_lattice=[[-1]])
    assert kappa_group(torus).torsion == [2]
    assert kappa(AffineElt.translation(torus, (3,))) == (1,)


def _dominance(nu1, nu2):
    p1, p2 = list(accumulate(nu1)), list(accumulate(nu2))
    return p1[-1] == p2[-1] and all(a <= b for a, b in zip(p1, p2))


def test_newton_order_is_dominance_on_gl():
    d = GL(4)
    pts = sorted({newton_point(x) for x in _random_elements(d, 80, seed=9, radius=2)})
    for a in pts:
        for b in pts:
            assert newton_leq(d, a, b) == _dominance(a, b)


def test_max_class():
    d = GL(2)
    half = SigmaClass((1,), (Fraction(1, 2), Fraction(1, 2)))
    top = SigmaClass((1,), (Fraction(1), Fraction(0)))
    assert leq_B(d, half, top) and not leq_B(d, top, half)
    assert max_class(d, [half, top, half]) == top
    other = SigmaClass((0,), (Fraction(0), Fraction(0)))
    with pytest.raises(NoUniqueMaximum):
        max_class(d, [top, other])
    assert SigmaClass.from_json(top.to_json(d), d) == top
