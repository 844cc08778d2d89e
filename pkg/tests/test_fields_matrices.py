"""Finite fields, Laurent matrices and their decompositions.

Products are checked against a naive convolution; decompositions against
elements built with a known double coset."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from loopstrata import GL
from loopstrata.affine import AffineElt
from loopstrata.errors import InsufficientPrecision
from loopstrata.fields import field, format_series, parse_series
from loopstrata.matrices import (LaurentMatrix, cartan_decomposition, gf_det, gf_inv, gf_matmul,
                                 iwahori_decomposition, newton_matrix, random_iwahori, random_K)


@pytest.mark.parametrize("q,m", [(2, 1), (3, 1), (2, 2), (2, 3), (4, 1), (3, 2)])
def test_field_axioms(q, m):
    F = field(q, m)
    Q = F.order
    els = range(Q)
    for a, b in product(els, els):
        assert F.add[a, b] == F.add[b, a] and F.mul[a, b] == F.mul[b, a]
    for a, b, c in product(els, els, els):
        assert F.mul[a, F.add[b, c]] == F.add[F.mul[a, b], F.mul[a, c]]
        assert F.mul[a, F.mul[b, c]] == F.mul[F.mul[a, b], c]
    assert all(F.mul[a, F.inv[a]] == 1 for a in range(1, Q))
    # Frobenius x ↦ x^q is a ring automorphism of order m
    for a, b in product(els, els):
        assert F.frob[F.mul[a, b]] == F.mul[F.frob[a], F.frob[b]]
        assert F.frob[F.add[a, b]] == F.add[F.frob[a], F.frob[b]]
    assert F.sigma_order == m
    assert all(F.sigma(F.sigma(a, 1), -1) == a for a in els)


def test_prime_field_is_integers_mod_p():
    F = field(5)
    for a, b in product(range(5), range(5)):
        assert F.mul[a, b] == a * b % 5 and F.add[a, b] == (a + b) % 5


def test_field_limits():
    with pytest.raises(ValueError):
        field(6)
    with pytest.raises(ValueError):
        field(2, 9)


def _naive(F, A, B):
    # A, B as lists of {exponent: element} entries
    n = len(A)
    out = [[{} for _ in range(n)] for _ in range(n)]
    for i, j, k in product(range(n), range(n), range(n)):
        for e1, c1 in A[i][k].items():
            for e2, c2 in B[k][j].items():
                cur = out[i][j].get(e1 + e2, 0)
                out[i][j][e1 + e2] = int(F.add[cur, F.mul[c1, c2]])
    return [[{e: c for e, c in d.items() if c} for d in row] for row in out]


def _random_entries(F, n, rng, lo=-2, hi=3):
    return [[{e: int(rng.integers(F.order)) for e in range(lo, hi) if rng.random() < 0.6} for _ in range(n)]
            for _ in range(n)]


@pytest.mark.parametrize("q,m", [(2, 1), (3, 1), (2, 2)])
def test_matmul_matches_naive_convolution(q, m):
    F = field(q, m)
    rng = np.random.default_rng(q * 10 + m)
    for _ in range(20):
        A, B = _random_entries(F, 3, rng), _random_entries(F, 3, rng)
        got = LaurentMatrix.from_entries(F, A, None) @ LaurentMatrix.from_entries(F, B, None)
        want = LaurentMatrix.from_entries(F, _naive(F, A, B), None)
        assert got == want


def test_gf_linear_algebra():
    F = field(2, 2)
    rng = np.random.default_rng(1)
    for _ in range(30):
        A = rng.integers(0, 4, size=(3, 3))
        if gf_det(F, A):
            assert np.array_equal(gf_matmul(F, A, gf_inv(F, A)), np.eye(3, dtype=np.int64))


def test_inverse_in_K():
    F = field(3)
    for s in range(10):
        g = random_K(F, 3, 5, seed=s)
        assert g @ g.inverse_K() == LaurentMatrix.identity(F, 3, 5)


def _exact(g):
    return LaurentMatrix(g.field, g.v, g.C, None)


@pytest.mark.parametrize("lam", [(2, 0, -1), (1, 1, 0), (0, 3, 3), (-1, 2, 0)])
def test_cartan_type_of_k_eps_k(lam):
    F = field(2, 2)
    d = GL(3)
    for s in range(5):
        k1, k2 = _exact(random_K(F, 3, 3, seed=s)), _exact(random_K(F, 3, 3, seed=100 + s))
        g = k1 @ LaurentMatrix.monomial(AffineElt.translation(d, lam), F) @ k2
        mu, a, b = cartan_decomposition(g)
        assert mu == tuple(sorted(lam, reverse=True))
        assert gf_det(F, a) and gf_det(F, b)


def test_iwahori_double_coset_of_constructed_elements():
    F = field(3)
    d = GL(3)
    rng = np.random.default_rng(4)
    for _ in range(30):
        x = AffineElt(d, int(rng.integers(6)), tuple(int(v) for v in rng.integers(-2, 3, 3)))
        i1, i2 = (_exact(random_iwahori(F, 3, 3, seed=int(rng.integers(1 << 30)))) for _ in range(2))
        g = i1 @ LaurentMatrix.monomial(x, F) @ i2
        a, got, b = iwahori_decomposition(g, d)
        assert got == x
        assert not np.tril(a, -1).any() and not np.tril(b, -1).any()


def test_monomial_newton_point_over_extension_field():
    F = field(2, 2)
    d = GL(3)
    x = AffineElt(d, d.from_word([0, 1]).idx, (1, 0, 0))
    assert newton_matrix(LaurentMatrix.monomial(x, F)) == (Fraction(1, 3),) * 3
    y = AffineElt(d, d.from_word([0]).idx, (2, 1, 0))
    assert newton_matrix(LaurentMatrix.monomial(y, F)) == (Fraction(3, 2), Fraction(3, 2), 0)


def test_newton_is_sigma_conjugation_invariant():
    F = field(2, 2)
    d = GL(2)
    g = LaurentMatrix.monomial(AffineElt(d, 1, (1, 0)), F)
    for s in range(5):
        h = _exact(random_K(F, 2, 2, seed=s))
        conj = (h.inverse_K() @ g @ h.sigma()).truncate(6)
        assert newton_matrix(conj) == newton_matrix(g)


def test_precision_is_enforced():
    F = field(2)
    g = LaurentMatrix.from_entries(F, [[{}, {0: 1}], [{1: 1}, {}]], 1)
    with pytest.raises(InsufficientPrecision):
        cartan_decomposition(g)
    with pytest.raises(InsufficientPrecision):
        g.truncate(2)


def test_series_text_round_trip():
    F = field(2, 2)
    for text in ["t^-1 + a*t + t^2", "0", "a^2*t^3 + 1"]:
        s = parse_series(text, F, 5)
        assert parse_series(format_series(s), F, 5) == s
