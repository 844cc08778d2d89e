"""Element, coweight and matrix-file formats."""

import numpy as np
import pytest

from loopstrata import GL, GSp, SL
from loopstrata.affine import AffineElt, tau
from loopstrata.errors import ParseError
from loopstrata.fields import field
from loopstrata.matrices import LaurentMatrix, random_K
from loopstrata.parsing import format_element, format_matrix, parse_element, parse_matrix, parse_mu


def test_element_grammar():
    d = GL(3)
    s1, s2 = (AffineElt.weyl(d, d.from_word([i])) for i in (0, 1))
    assert parse_element("s1*s2*t[1,0,0]", d) == s1 * s2 * AffineElt.translation(d, (1, 0, 0))
    assert parse_element(" tau[1, 1, 0] ", d) == tau(d, (1, 1, 0))
    assert parse_element("e", d) == AffineElt.identity(d)
    assert parse_element("t[2]", GL(1)) == AffineElt.translation(GL(1), (2,))


@pytest.mark.parametrize("d", [GL(3), SL(3), GSp(4)], ids=repr)
def test_element_round_trip(d):
    rng = np.random.default_rng(0)
    for _ in range(30):
        w = int(rng.integers(d.order))
        lam = tuple(int(v) for v in rng.integers(-3, 4, d.rank))
        x = AffineElt(d, w, lam)
        assert parse_element(format_element(x), d) == x


@pytest.mark.parametrize("text,pos", [("s4", 1), ("s1*", 3), ("t[1,0]", 0), ("tau[0,1,0]", 0), ("s1 s2", 3),
                                      ("x", 0), ("t[1,,0,0]", 4)])
def test_element_errors_report_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_element(text, GL(3))
    assert exc.value.position == pos
    assert exc.value.expected


def test_parse_mu():
    assert parse_mu("2,1,0", GL(3)) == (2, 1, 0)
    assert parse_mu("1,0,-1", SL(3)) == SL(3).from_display((1, 0, -1))
    with pytest.raises(ParseError):
        parse_mu("1,a", GL(2))


def test_matrix_file_round_trip():
    F = field(2, 2)
    for s in range(5):
        g = random_K(F, 3, 4, seed=s).shift(-1)
        assert parse_matrix(format_matrix(g)) == g
    text = "# comment\nfield 2 1\nprecision exact\n0, 1  # entry comment\nt, 0\n"
    g = parse_matrix(text)
    assert g.N is None and g == LaurentMatrix.from_entries(field(2), [[{}, {0: 1}], [{1: 1}, {}]], None)


@pytest.mark.parametrize("text", [
    "0, 1\nt, 0\n",
    "field 2\nprecision 3\n1\n",
    "field 2 1\nprecision 3\n1, 0\n0\n",
    "field 2 1\nprecision 3\n1, q\n0, 1\n",
    "field 2 1\nprecision x\n1\n",
    "field 2 1\nprecision 3\n1,\n0, 1\n",
])
def test_matrix_file_errors(text):
    with pytest.raises(ParseError) as exc:
        parse_matrix(text)
    assert exc.value.position is not None and 0 <= exc.value.position <= len(text)
