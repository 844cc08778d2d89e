"""Truncation types of matrices: invariance under the level-1 equivalence,
zip-orbit constancy over small fields and the Iwahori reduction."""

import numpy as np
import pytest

from loopstrata import GL
from loopstrata.errors import InsufficientPrecision, NotInCoset
from loopstrata.fields import field
from loopstrata.matrices import LaurentMatrix, gf_matmul, random_double_coset_element, random_K, random_K1
from loopstrata.matrix_truncation import (_all_invertible, _perm, iwahori_reduce, parabolic_bruhat,
                                          representative_matrix, required_precision, truncation_of_b0,
                                          truncation_type_matrix, zip_orbits)
from loopstrata.alcoves import ZipStages
from loopstrata.suites import _strata


def _exact(g):
    return LaurentMatrix(g.field, g.v, g.C, None)


@pytest.mark.parametrize("n,mu", [(2, (1, 0)), (3, (1, 1, 0)), (3, (2, 1, 0)), (4, (1, 1, 0, 0))])
def test_representatives(n, mu):
    F = field(2, 2)
    for t in _strata(GL(n), mu):
        assert truncation_type_matrix(representative_matrix(t, F).with_precision(6)) == t


@pytest.mark.parametrize("q,m", [(2, 1), (3, 1), (2, 2)])
def test_type_is_a_level_one_invariant(q, m):
    F = field(q, m)
    d = GL(3)
    rng = np.random.default_rng(q + 7 * m)
    N = 6
    for t in _strata(d, (2, 1, 0)):
        g = _exact(random_double_coset_element(t.element(), F, N, seed=int(rng.integers(1 << 30))))
        k1, k2 = (_exact(random_K1(F, 3, N, seed=int(rng.integers(1 << 30)))) for _ in range(2))
        k = _exact(random_K(F, 3, N, seed=int(rng.integers(1 << 30))))
        assert truncation_type_matrix((k1 @ g @ k2).with_precision(N)) == t
        conj = (k.inverse_K().with_precision(N) @ g @ k.sigma()).with_precision(N)
        assert truncation_type_matrix(conj) == t


@pytest.mark.parametrize("q,m,n,mu", [(2, 1, 2, (1, 0)), (3, 1, 2, (1, 0)), (2, 2, 2, (1, 0)),
                                      (2, 1, 3, (1, 0, 0)), (2, 1, 3, (1, 1, 0)), (2, 1, 3, (2, 1, 0))])
def test_type_is_constant_on_zip_orbits(q, m, n, mu):
    F = field(q, m)
    d = GL(n)
    part = zip_orbits(F, n, mu)
    assert len(set(part.types.values())) == len(d.mu_W(mu))
    seen = {}
    for b in _all_invertible(F, n):
        code = int((b.reshape(-1) * (F.order ** np.arange(n * n))).sum())
        lbl = part.labels[code]
        t = truncation_of_b0(F, d, b, mu)
        assert seen.setdefault(lbl, t) == t
        if lbl in part.types:
            assert part.types[lbl] == t


def test_parabolic_bruhat_factors_lie_in_the_parabolics():
    F = field(3)
    d = GL(3)
    st = ZipStages(d, (1, 0, 0))
    rng = np.random.default_rng(2)
    for b in _all_invertible(F, 3)[rng.integers(0, 11232, 30)]:
        p, delta, q = parabolic_bruhat(F, d, b, st.H, st.P, st.Q)
        for M, R in ((p, st.P), (q, st.Q)):
            for i in range(3):
                for j in range(3):
                    if i != j and M[i, j]:
                        assert d.root_index[tuple(int(v) for v in np.eye(3, dtype=int)[i] - np.eye(3, dtype=int)[j])] in R
        assert np.array_equal(gf_matmul(F, gf_matmul(F, p, _perm(d, delta)), q), b)


def test_transcript_records_the_recursion():
    F = field(2)
    d = GL(3)
    t = _strata(d, (1, 1, 0))[1]
    g = random_double_coset_element(t.element(), F, 4, seed=1)
    got, tr = truncation_type_matrix(g, with_transcript=True)
    u = d.identity
    for step in tr.steps:
        u = u * step.delta
    assert got == t and u == t.w


def test_iwahori_reduce():
    F = field(2, 2)
    d = GL(3)
    for t in _strata(d, (2, 1, 0)):
        g = random_double_coset_element(t.element(), F, 5, seed=3)
        h, gprime = iwahori_reduce(g, t.w, t.mu)
        assert h.in_K() and truncation_type_matrix(gprime) == t
    t0, t1 = _strata(d, (1, 0, 0))[:2]
    with pytest.raises(NotInCoset):
        iwahori_reduce(random_double_coset_element(t0.element(), F, 4, seed=0), t1.w, t1.mu)


def test_insufficient_precision_reports_the_bound():
    F = field(2)
    d = GL(3)
    t = _strata(d, (2, 0, 0))[0]
    need = required_precision((2, 0, 0))
    g = random_double_coset_element(t.element(), F, need, seed=0)
    assert truncation_type_matrix(g) == t
    with pytest.raises(InsufficientPrecision) as exc:
        truncation_type_matrix(g.truncate(need - 1))
    assert exc.value.required == need
