"""Semistandard parabolics, fundamental alcoves and the truncation recursion."""

from itertools import combinations

import numpy as np
import pytest

from loopstrata import GL, GSp, siegel_mu
from loopstrata.affine import AffineElt, double_coset_elements, length, sigma_conj
from loopstrata.alcoves import (SemistandardParabolic, TruncationType, all_semistandard_parabolics,
                                fundamental_conj_witness, fundamental_parabolics, is_fundamental,
                                is_fundamental_def, minimal_type, newton_criterion, normalize_to_tau,
                                standard_rep, truncation_type_affine)
from loopstrata.errors import NoWitness
from loopstrata.fields import field
from loopstrata.isocrystal import class_of, newton_point
from loopstrata.matrices import LaurentMatrix
from loopstrata.matrix_truncation import level_orbits, required_precision, truncation_type_matrix
from loopstrata.suites import _strata


def _faces(d):
    # faces of the Coxeter complex: Σ_J |W| / |W_J|
    r = d.semisimple_rank
    return sum(d.order // len(d.weyl_subgroup(d.standard_levi(J)))
               for k in range(r + 1) for J in combinations(range(r), k))


@pytest.mark.parametrize("d,count", [(GL(2), 3), (GL(3), 13), (GL(4), 75), (GSp(4), 17)], ids=repr)
def test_semistandard_parabolic_count(d, count):
    Ps = all_semistandard_parabolics(d)
    assert len(Ps) == len(set((P.levi.roots, P.N) for P in Ps)) == count == _faces(d)


def test_parabolic_validation():
    d = GL(3)
    with pytest.raises(ValueError):
        SemistandardParabolic(d.torus_levi, frozenset({0}))
    P = SemistandardParabolic.standard(d, [0])
    assert P.levi.is_standard and len(P.N) == 2


def _elements(d, radius, seed=0, count=None):
    rng = np.random.default_rng(seed)
    if count is None:
        from itertools import product
        return [AffineElt(d, w, lam) for w in range(d.order)
                for lam in product(range(-radius, radius + 1), repeat=d.rank)]
    return [AffineElt(d, int(rng.integers(d.order)), tuple(int(v) for v in rng.integers(-radius, radius + 1, d.rank)))
            for _ in range(count)]


@pytest.mark.parametrize("d", [GL(2), GL(3), GSp(4)], ids=repr)
def test_fundamental_elements_are_straight(d):
    found = 0
    for x in _elements(d, 1):
        if fundamental_parabolics(x):
            found += 1
            nu = newton_point(x)
            two_rho = sum(sum(int(d.roots[a][j]) * nu[j] for j in range(d.rank)) for a in range(d.npos))
            assert length(x) == two_rho
    assert found > 0


def test_criteria_agree_on_fundamental_elements():
    d = GL(3)
    Ps = all_semistandard_parabolics(d)
    for x in _elements(d, 1):
        flags = [is_fundamental_def(x, P) for P in Ps]
        if any(flags):
            assert flags == [newton_criterion(x, P) for P in Ps]
            assert flags == [is_fundamental(x, P) for P in Ps]


def test_fundamental_conj_witness():
    d = GL(3)
    x = AffineElt(d, d.from_word([0]).idx, (1, 0, 0))
    w = d.from_word([1])
    y = sigma_conj(x, AffineElt.weyl(d, w))
    assert sigma_conj(x, AffineElt.weyl(d, fundamental_conj_witness(x, y))) == y
    with pytest.raises(NoWitness):
        fundamental_conj_witness(x, AffineElt.identity(d))


@pytest.mark.parametrize("d", [GL(2), GL(3), GL(4), GSp(4)], ids=repr)
def test_standard_reps_are_length_zero_in_their_levi(d):
    for x in _elements(d, 2, seed=3, count=40):
        cls = class_of(x)
        b = standard_rep(d, cls)
        assert class_of(b) == cls
        assert length(b, d.centralizer_levi(newton_point(x))) == 0
        assert class_of(minimal_type(d, cls).element()) == cls


@pytest.mark.parametrize("d,mu", [(GL(3), (1, 0, 0)), (GL(4), (1, 1, 0, 0)), (GL(4), (2, 1, 0, 0)),
                                  (GSp(4), siegel_mu(GSp(4))), (GSp(6), siegel_mu(GSp(6)))], ids=repr)
def test_representatives_have_their_own_type(d, mu):
    types = _strata(d, mu)
    assert len({t for t in types if t.mu == mu}) == len(d.mu_W(mu))
    for t in types:
        assert truncation_type_affine(t.element()) == t


def test_type_is_constant_on_w_sigma_conjugacy():
    d = GL(3)
    for x in _elements(d, 2, seed=5, count=40):
        t = truncation_type_affine(x)
        for g in range(d.order):
            assert truncation_type_affine(sigma_conj(x, AffineElt.weyl(d, g))) == t


@pytest.mark.parametrize("mu", [(1, 0), (2, 0)])
def test_affine_type_matches_exhaustive_orbits(mu):
    # orbits of K-σ-conjugation and K_1 on both sides, enumerated modulo t^N
    d = GL(2)
    F = field(2)
    N = required_precision(mu)
    elems, lab, _, types = level_orbits(F, 2, mu, N)
    index = {X.C.tobytes(): int(l) for X, l in zip(elems, lab)}
    for x in double_coset_elements(d, mu):
        M = LaurentMatrix.monomial(x, F).with_precision(N)
        assert types[index[M.C.tobytes()]] == truncation_type_affine(x)


@pytest.mark.parametrize("mu", [(1, 0, 0), (1, 1, 0), (2, 0, 0), (2, 1, 0)])
def test_affine_and_matrix_types_agree(mu):
    d = GL(3)
    F = field(2, 2)
    for x in double_coset_elements(d, mu):
        assert truncation_type_matrix(LaurentMatrix.monomial(x, F).with_precision(6)) == truncation_type_affine(x)


def test_normalize_to_tau():
    d = GSp(4)
    for x in _elements(d, 2, seed=8, count=30):
        b0, mu, g = normalize_to_tau(x)
        y = sigma_conj(x, g)
        assert y.lam == mu and y.w == d.mul(b0.idx, d.x_mu(mu).idx)


def test_truncation_type_json_round_trip():
    d = GL(3)
    for t in _strata(d, (2, 1, 0)):
        assert TruncationType.from_json(d, t.to_json()) == t
    with pytest.raises(ValueError):
        TruncationType(d.from_word([0, 1, 0]), (1, 0, 0))
