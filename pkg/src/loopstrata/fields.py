"""Finite fields F_{q^m} as lookup tables, and truncated Laurent series over them.

Elements are ints in the polynomial basis over the prime field (the integer
representation used by ``galois``): k = Σ c_i p^i stands for Σ c_i a^i where
a is a root of the Conway polynomial.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

with warnings.catch_warnings():
    # numba complains about old TBB builds while galois compiles its ufuncs
    warnings.simplefilter("ignore")
    import galois

from .errors import ParseError

MAX_ORDER = 256


def _prime_power(q):
    f = galois.factors(int(q))
    if len(f[0]) != 1:
        raise ValueError(f"{q} is not a prime power")
    return int(f[0][0]), int(f[1][0])


class FiniteField:
    """F_{q^m} with Frobenius σ(x) = x^q."""

    def __init__(self, q, m=1):
        p, e = _prime_power(q)
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        self.q, self.m, self.p = int(q), int(m), p
        self.degree = e * m
        self.order = q ** m
        if self.order > MAX_ORDER:
            raise ValueError(f"field order {self.order} exceeds the table limit {MAX_ORDER}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            F = galois.GF(self.order)
            elts = F.elements
            self.mul = np.asarray(elts[:, None] * elts[None, :], dtype=np.int64)
            self.add = np.asarray(elts[:, None] + elts[None, :], dtype=np.int64)
            self.neg = np.asarray(-elts, dtype=np.int64)
            self.inv = np.zeros(self.order, dtype=np.int64)
            self.inv[1:] = np.asarray(elts[1:] ** -1, dtype=np.int64)
            self.frob = np.asarray(elts ** self.q, dtype=np.int64)
        self.galois_field = F
        fi = np.zeros(self.order, dtype=np.int64)
        fi[self.frob] = np.arange(self.order)
        self.frob_inv = fi
        self.sub = self.add[:, self.neg]
        self.char2 = p == 2

    def __repr__(self):
        return f"FiniteField(q={self.q}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.q, self.m) == (other.q, other.m)

    def __hash__(self):
        return hash((self.q, self.m))

    def sigma(self, x, power=1):
        table = self.frob if power >= 0 else self.frob_inv
        for _ in range(abs(power) % self.sigma_order if self.sigma_order else 0):
            x = table[x]
        return x

    @property
    def sigma_order(self):
        """Order of x ↦ x^q on this field (m when q is the prime-field size)."""
        k, x = 1, self.frob
        ident = np.arange(self.order)
        while not np.array_equal(x, ident):
            x = self.frob[x]
            k += 1
        return k

    # ---------------------------------------------------------- element text

    def format(self, x):
        x = int(x)
        if x == 0:
            return "0"
        digits = []
        k = x
        while k:
            digits.append(k % self.p)
            k //= self.p
        terms = []
        for i in range(len(digits) - 1, -1, -1):
            c = digits[i]
            if not c:
                continue
            mono = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms)

    def element(self, poly_coeffs):
        """Element Σ c_i a^i from coefficients c_0, c_1, ..."""
        out = 0
        apow = 1
        a = self.p if self.degree > 1 else None
        for i, c in enumerate(poly_coeffs):
            c = int(c) % self.p
            if c:
                if i > 0 and a is None:
                    raise ValueError("the prime field has no generator symbol a")
                term = self.scalar(c)
                out = int(self.add[out, self.mul[term, apow]])
            if a is not None:
                apow = int(self.mul[apow, a])
        return out

    def scalar(self, c):
        """Image of the integer c in the prime field."""
        c %= self.p
        out = 0
        for _ in range(c):
            out = int(self.add[out, 1])
        return out


@lru_cache(maxsize=None)
def field(q, m=1):
    return FiniteField(q, m)


@dataclass(frozen=True)
class LaurentSeries:
    """Σ_{k} coeffs[k] t^{valuation+k}, known modulo t^precision."""

    field: FiniteField
    valuation: int
    coeffs: tuple
    precision: int

    @classmethod
    def make(cls, F, terms, precision):
        """From a {exponent: element} mapping; terms at or above precision are dropped."""
        terms = {int(e): int(c) for e, c in terms.items() if int(c) != 0 and int(e) < precision}
        if not terms:
            return cls(F, precision, (), precision)
        lo = min(terms)
        coeffs = tuple(terms.get(lo + k, 0) for k in range(precision - lo))
        return cls(F, lo, coeffs, precision)

    @property
    def is_zero(self):
        return not self.coeffs

    def terms(self):
        return {self.valuation + k: c for k, c in enumerate(self.coeffs) if c}

    def coefficient(self, e):
        k = e - self.valuation
        if e >= self.precision:
            raise ValueError(f"coefficient of t^{e} is beyond the precision {self.precision}")
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __str__(self):
        return format_series(self)


def format_series(s):
    parts = []
    for e, c in sorted(s.terms().items()):
        coef = s.field.format(c)
        if "+" in coef:
            coef = f"({coef})"
        if e == 0:
            parts.append(coef)
        else:
            mono = "t" if e == 1 else f"t^{e}"
            parts.append(mono if coef == "1" else f"{coef}*{mono}")
    return " + ".join(parts) if parts else "0"


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<sym>[at])|(?P<op>[\^*+\-()]))")


class _Parser:
    """Recursive-descent parser for polynomials in a and t with integer exponents."""

    def __init__(self, text, F):
        self.text, self.F = text, F
        self.toks = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            mt = _TOKEN.match(text, pos)
            if not mt or mt.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", position=pos, expected="number, a, t, ^, *, +, -, (, )")
            kind = mt.lastgroup
            start = mt.start(kind)
            self.toks.append((kind, mt.group(kind), start))
            pos = mt.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, kind=None, value=None, expected=None):
        k, v, pos = self.peek()
        if (kind and k != kind) or (value and v != value):
            raise ParseError(f"unexpected {v!r}" if v else "unexpected end of input", position=pos, expected=expected)
        self.i += 1
        return v

    # polynomial values are dicts {(t_exp): {a_exp: int coeff}} kept as {t_exp: field element}
    def parse(self):
        val = self.expr()
        k, v, pos = self.peek()
        if k is not None:
            raise ParseError(f"unexpected {v!r}", position=pos, expected="+, - or end of entry")
        return val

    def expr(self):
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        acc = self._scale(self.term(), sign)
        while self.peek()[1] in ("+", "-"):
            op = self.take()
            acc = self._add(acc, self._scale(self.term(), 1 if op == "+" else -1))
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take()
            acc = self._mul(acc, self.factor())
        return acc

    def factor(self):
        k, v, pos = self.peek()
        if k == "num":
            self.take()
            return {0: self.F.scalar(int(v))}
        if k == "sym":
            self.take()
            e = 1
            if self.peek()[1] == "^":
                self.take()
                neg = False
                if self.peek()[1] == "-":
                    self.take()
                    neg = True
                e = int(self.take("num", expected="integer exponent"))
                e = -e if neg else e
            if v == "t":
                return {e: 1}
            if e < 0:
                raise ParseError("negative power of a", position=pos, expected="nonnegative exponent")
            return {0: self.F.element([0] * e + [1])}
        if v == "(":
            self.take()
            inner = self.expr()
            self.take(value=")", expected=")")
            return inner
        raise ParseError(f"unexpected {v!r}" if v else "unexpected end of input", position=pos, expected="number, a, t or (")

    def _scale(self, p, sign):
        if sign == 1:
            return p
        return {e: int(self.F.neg[c]) for e, c in p.items()}

    def _add(self, p, r):
        out = dict(p)
        for e, c in r.items():
            out[e] = int(self.F.add[out.get(e, 0), c])
        return out

    def _mul(self, p, r):
        out = {}
        for e1, c1 in p.items():
            for e2, c2 in r.items():
                out[e1 + e2] = int(self.F.add[out.get(e1 + e2, 0), self.F.mul[c1, c2]])
        return out


def parse_series(text, F, precision):
    """Parse an entry such as ``t^-1 + a*t + t^2`` into a LaurentSeries."""
    return LaurentSeries.make(F, _Parser(text, F).parse(), precision)
