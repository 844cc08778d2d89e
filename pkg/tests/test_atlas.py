"""Strata atlases against classical Ekedahl-Oort pictures, and the minimal
Dieudonné construction."""

from fractions import Fraction as Fr

import numpy as np
import pytest

from loopstrata import GL, GSp, siegel_mu
from loopstrata.affine import AffineElt
from loopstrata.atlas import (SlopeData, all_slope_data, check_minimal_dieudonne, closure_leq, closure_leq_same_mu,
                              closure_poset, dominant_coweights_below, eo_atlas, generic_class,
                              generic_via_minimal, is_minimal_type, minimal_element, verify_thm_main)
from loopstrata.errors import BudgetExceeded, InvalidSlopes
from loopstrata.fields import field
from loopstrata.isocrystal import class_of


def _generic_by_length(atlas):
    d = atlas.datum
    return sorted((l, tuple(d.to_display(g.newton))) for l, g in zip(atlas.lengths, atlas.generic))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gl_minuscule_is_a_chain_of_slope_strata(n):
    # μ = (1,0,…,0): stratum of length n-k has generic slopes (1/k)^k, 0^{n-k}
    mu = (1,) + (0,) * (n - 1)
    atlas = closure_poset(GL(n), mu)
    order = sorted(range(n), key=lambda i: atlas.lengths[i])
    assert sorted(atlas.lengths) == list(range(n))
    for a, b in zip(order, order[1:]):
        assert atlas.closure[a, b] and not atlas.closure[b, a]
    expect = [(n - k, (Fr(1, k),) * k + (Fr(0),) * (n - k)) for k in range(1, n + 1)]
    assert _generic_by_length(atlas) == sorted(expect)


def test_abelian_surfaces():
    d = GSp(4)
    atlas, reports = eo_atlas(2)
    assert all(r.passed for r in reports)
    assert sorted(atlas.lengths) == [0, 1, 2, 3]
    assert bool(np.all(atlas.closure == (np.array(atlas.lengths)[:, None] <= np.array(atlas.lengths)[None, :])))
    half = Fr(1, 2)
    assert _generic_by_length(atlas) == [(0, (half, half, 1)), (1, (half, half, 1)),
                                         (2, (1, half, 1)), (3, (1, 1, 1))]
    assert atlas.datum is d


def test_abelian_threefolds_poset():
    # elementary sequences ordered pointwise; the two strata of dimension 3 are incomparable
    atlas = closure_poset(GSp(6), siegel_mu(GSp(6)), generic=False)
    L = atlas.lengths
    assert sorted(L) == [0, 1, 2, 3, 3, 4, 5, 6]
    C = atlas.closure
    for i in range(8):
        for j in range(8):
            if i != j:
                expected = L[i] < L[j]
                assert bool(C[i, j]) == expected, (atlas.strata[i], atlas.strata[j])


def test_closure_criteria_agree_off_the_minuscule_case():
    d = GL(3)
    atlas = closure_poset(d, (2, 0, 0), generic=False)
    for a in atlas.strata:
        for b in atlas.strata:
            assert closure_leq(a, b) == bool(atlas.closure[atlas.index(a), atlas.index(b)])
            if a.mu == b.mu:
                assert closure_leq(a, b) == closure_leq_same_mu(a.w, b.w, a.mu)


def test_dominant_coweights_below():
    assert sorted(dominant_coweights_below(GL(3), (2, 0, 0))) == [(1, 1, 0), (2, 0, 0)]
    assert sorted(dominant_coweights_below(GL(3), (2, 1, 0))) == [(1, 1, 1), (2, 1, 0)]
    assert dominant_coweights_below(GL(2), (1, 0)) == [(1, 0)]


def test_generic_class_and_minimal_types():
    d = GL(3)
    for w in d.mu_W((1, 1, 0)):
        t_w = d.elt(w)
        assert generic_class(t_w, (1, 1, 0)) == generic_via_minimal(t_w, (1, 1, 0))
        assert verify_thm_main(t_w, (1, 1, 0)).passed
    atlas = closure_poset(d, (1, 1, 0))
    assert sum(atlas.minimal) == len({g for g in atlas.generic})
    for t, m in zip(atlas.strata, atlas.minimal):
        assert is_minimal_type(t) == m


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        closure_poset(GSp(6), siegel_mu(GSp(6)), budget=4)


def _multiset_counts(max_height):
    # Π over coprime (n, h) of 1/(1 - x^h): colours c(h) = #{0 <= n <= h : gcd(n, h) = 1}
    from math import gcd
    coef = [1] + [0] * max_height
    for h in range(1, max_height + 1):
        for _ in range(sum(1 for n in range(h + 1) if gcd(n, h) == 1)):
            for k in range(h, max_height + 1):
                coef[k] += coef[k - h]
    return coef


def test_slope_data_enumeration():
    for H in range(1, 7):
        assert len(all_slope_data(H)) == sum(_multiset_counts(H)[1:])
    assert len(all_slope_data(6)) == 106
    s = SlopeData(((1, 2), (1, 2), (0, 1)))
    assert s.height == 5 and s.newton() == (Fr(1, 2),) * 4 + (Fr(0),)
    assert s.blocks() == [(2, 4), (0, 1)] and s.block_sizes() == [4, 1]
    for bad in [((2, 4),), ((0, 1), (1, 2)), ((3, 2),), ()]:
        with pytest.raises(InvalidSlopes):
            SlopeData(bad)


@pytest.mark.parametrize("pairs", [((1, 2),), ((2, 3), (1, 3)), ((1, 2), (1, 3)), ((1, 1), (1, 2), (0, 1)),
                                   ((1, 2), (1, 4)), ((1, 2), (1, 2))])
def test_minimal_dieudonne_examples(pairs):
    s = SlopeData(pairs)
    assert check_minimal_dieudonne(s, field(2)) == (True, True)
    x = minimal_element(s)
    assert tuple(class_of(x).newton) == s.newton()
