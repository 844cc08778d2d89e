"""Text formats: affine Weyl elements, group descriptors and matrix files."""

from __future__ import annotations

import re

from .affine import AffineElt, tau
from .errors import ParseError
from .fields import _Parser, field, format_series

_ELT_TOKEN = re.compile(r"\s*(?:(?P<word>tau|t|e|s)|(?P<int>-?\d+)|(?P<punct>[\[\],*]))")


class _ElementParser:
    def __init__(self, text, datum):
        self.text, self.datum = text, datum
        self.toks = []
        pos = 0
        while pos < len(text):
            if not text[pos:].strip():
                break
            m = _ELT_TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", position=pos,
                                 expected="s<i>, t[...], tau[...], e or *")
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, kind, value=None, expected=None):
        k, v, pos = self.peek()
        if k != kind or (value is not None and v != value):
            raise ParseError(f"unexpected {v!r}" if v else "unexpected end of input", position=pos,
                             expected=expected or value or kind)
        self.i += 1
        return v, pos

    def parse(self):
        x = self.factor()
        while self.peek()[1] == "*":
            self.take("punct", "*")
            x = x * self.factor()
        k, v, pos = self.peek()
        if k is not None:
            raise ParseError(f"unexpected {v!r}", position=pos, expected="* or end of input")
        return x

    def factor(self):
        d = self.datum
        word, pos = self.take("word", expected="s<i>, t[...], tau[...] or e")
        if word == "e":
            return AffineElt.identity(d)
        if word == "s":
            val, ipos = self.take("int", expected="reflection index")
            i = int(val)
            if not 1 <= i <= d.semisimple_rank:
                raise ParseError(f"no simple reflection s{i}", position=ipos,
                                 expected=f"index in 1..{d.semisimple_rank}")
            return AffineElt.weyl(d, d.simple_refl[i - 1])
        vec = self.vector()
        try:
            lam = tuple(int(v) for v in d.from_display(vec))
        except ValueError as exc:
            raise ParseError(str(exc), position=pos, expected="a coweight") from exc
        if word == "t":
            return AffineElt.translation(d, lam)
        if not d.is_dominant(lam):
            raise ParseError(f"tau needs a dominant coweight, got {list(vec)}", position=pos,
                             expected="dominant coweight")
        return tau(d, lam)

    def vector(self):
        self.take("punct", "[")
        vals = []
        if self.peek()[1] != "]":
            vals.append(int(self.take("int", expected="integer")[0]))
            while self.peek()[1] == ",":
                self.take("punct", ",")
                vals.append(int(self.take("int", expected="integer")[0]))
        self.take("punct", "]", expected=", or ]")
        return tuple(vals)


def parse_element(text, datum):
    """``s1*s2*t[1,0,0]`` is s1·s2·ε^{(1,0,0)}; ``tau[1,1,0]`` is τ_μ."""
    return _ElementParser(text, datum).parse()


def format_element(x):
    return repr(x)


def parse_group(text):
    """``GL:n``, ``SL:n``, ``GSp:2g`` or a path to a raw-datum JSON file."""
    from .rootdatum import build_root_datum
    return build_root_datum(text)


def parse_mu(text, datum):
    """Comma-separated coweight in display coordinates."""
    try:
        vals = tuple(int(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError as exc:
        raise ParseError(f"bad coweight {text!r}", position=0, expected="comma-separated integers") from exc
    return tuple(int(v) for v in datum.from_display(vals))


# ------------------------------------------------------------------ matrices


def parse_matrix(text):
    """Matrix file: header lines ``field q m`` and ``precision N`` (or
    ``precision exact``), then one row per line with comma-separated
    entries such as ``t^-1 + a*t + t^2``.  ``#`` starts a comment."""
    from .matrices import LaurentMatrix

    F = None
    N = "unset"
    rows = []
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        stripped = body.strip()
        line_start = offset
        start = offset + len(body) - len(body.lstrip())
        offset += len(line)
        if not stripped:
            continue
        head = stripped.split()
        if head[0] == "field":
            if len(head) != 3 or not all(h.isdigit() for h in head[1:]):
                raise ParseError("bad field header", position=start, expected="field q m")
            F = field(int(head[1]), int(head[2]))
            continue
        if head[0] == "precision":
            if len(head) != 2 or not (head[1] == "exact" or head[1].lstrip("-").isdigit()):
                raise ParseError("bad precision header", position=start, expected="precision N")
            N = None if head[1] == "exact" else int(head[1])
            continue
        if F is None or N == "unset":
            raise ParseError("matrix rows before the field and precision headers", position=start,
                             expected="field q m and precision N")
        row = []
        col = line_start
        for cell in body.split(","):
            if not cell.strip():
                raise ParseError("empty entry", position=col, expected="Laurent polynomial")
            try:
                terms = _Parser(cell, F).parse()
                row.append({e: c for e, c in terms.items() if c and (N is None or e < N)})
            except ParseError as exc:
                raise ParseError(f"in entry {cell.strip()!r}: {exc.args[0].split(' at position')[0]}", position=col + (exc.position or 0),
                                 expected=exc.expected) from exc
            col += len(cell) + 1
        rows.append(row)
    if F is None or N == "unset":
        raise ParseError("missing header", position=len(text), expected="field q m and precision N")
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError("matrix must be square and nonempty", position=len(text), expected="n rows of n entries")
    return LaurentMatrix.from_entries(F, rows, N)


def format_matrix(g):
    F = g.field
    lines = [f"field {F.q} {F.m}", f"precision {'exact' if g.N is None else g.N}"]
    for row in g.entries():
        lines.append(", ".join(format_series(e) for e in row))
    return "\n".join(lines) + "\n"
