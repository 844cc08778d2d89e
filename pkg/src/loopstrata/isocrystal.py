"""Kottwitz invariants of W̃ elements: κ, Newton points, and the order on B(G)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .affine import AffineElt
from .errors import IterationCapExceeded, NoUniqueMaximum


def smith_normal_form(rows):
    """Integer Smith form.  Returns (U, D) with U unimodular and U·A·V = D
    for some unimodular V (V itself is not needed here)."""
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def add_row(dst, src, c):
        A[dst] = [a - c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - c * b for a, b in zip(U[dst], U[src])]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]

    def add_col(dst, src, c):
        for r in A:
            r[dst] -= c * r[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, q)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, q)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]]
                if not bad:
                    break
                i, _ = bad[0]
                for j in range(n):
                    A[t][j] += A[i][j]
                U[t] = [a + b for a, b in zip(U[t], U[i])]
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    diag = [A[i][i] if i < n else 0 for i in range(m)]
    return U, diag


class KappaGroup:
    """π_1(G)_Γ = X_*(T) / (coroot lattice + (σ-1)X_*(T))."""

    def __init__(self, datum):
        n = datum.rank
        gens = [list(map(int, c)) for c in datum.simple_coroots]
        S = datum.sigma_lattice
        for j in range(n):
            col = [int(S[i, j]) - int(i == j) for i in range(n)]
            if any(col):
                gens.append(col)
        cols = [[g[i] for g in gens] for i in range(n)] if gens else [[] for _ in range(n)]
        if gens:
            U, diag = smith_normal_form(cols)
        else:
            U, diag = [[int(i == j) for j in range(n)] for i in range(n)], [0] * n
        self.U = U
        self.moduli = [d for d in diag if d != 1]
        self.rows = [U[i] for i, d in enumerate(diag) if d != 1]
        self.torsion = [d for d in self.moduli if d > 1]

    def __call__(self, lam):
        out = []
        for row, d in zip(self.rows, self.moduli):
            v = sum(a * b for a, b in zip(row, lam))
            out.append(v % d if d > 1 else v)
        return tuple(out)


def kappa_group(datum):
    kg = getattr(datum, "_kappa_group", None)
    if kg is None:
        kg = datum._kappa_group = KappaGroup(datum)
    return kg


@dataclass(frozen=True)
class SigmaClass:
    kappa: tuple
    newton: tuple  # dominant rational coweight, lattice coordinates

    def to_json(self, datum=None):
        newton = datum.to_display(self.newton) if datum is not None else self.newton
        return {"kappa": [int(k) for k in self.kappa], "newton": [_frac_str(x) for x in newton]}

    @classmethod
    def from_json(cls, obj, datum=None):
        newton = tuple(Fraction(s) for s in obj["newton"])
        if datum is not None:
            newton = tuple(Fraction(x) for x in datum.from_display(newton))
        return cls(tuple(int(k) for k in obj["kappa"]), newton)

    def dumps(self, datum=None):
        return json.dumps(self.to_json(datum), sort_keys=True)


def _frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def kappa(x):
    """Image of the translation part of x in π_1(G)_Γ."""
    return kappa_group(x.datum)(x.lam)


def kappa_of_coweight(datum, lam):
    return kappa_group(datum)(tuple(int(v) for v in lam))


def twisted_power(x, k):
    """x σ(x) ⋯ σ^{k-1}(x)."""
    out = AffineElt.identity(x.datum)
    y = x
    for _ in range(k):
        out = out * y
        y = y.sigma()
    return out


def newton_vector(x):
    """(λ/N) where x σ(x) ⋯ σ^{N-1}(x) = ε^λ with σ^N = id, not made dominant."""
    d = x.datum
    cap = d.order * d.sigma_order
    acc = AffineElt.identity(d)
    y = x
    for k in range(1, cap + 1):
        acc = acc * y
        y = y.sigma()
        if acc.w == 0 and k % d.sigma_order == 0:
            # x·σ(λ) = λ, so σ(λ) is W-conjugate to λ and its dominant
            # representative is σ-stable without any averaging
            return tuple(Fraction(v, k) for v in acc.lam)
    raise IterationCapExceeded(f"twisted powers of {x!r} never became a translation within {cap} steps")


def newton_point(x):
    return x.datum.dominant(newton_vector(x))


def class_of(x):
    return SigmaClass(kappa(x), newton_point(x))


class _CorootSolver:
    def __init__(self, datum):
        C = sympy.Matrix(datum.simple_coroots.tolist()).T  # n x r
        self.n = datum.rank
        if C.shape[1] == 0:
            self.left = None
            self.annihilator = [list(row) for row in sympy.eye(self.n).tolist()]
            return
        gram = C.T * C
        self.left = [[Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in row]
                     for row in (gram.inv() * C.T).tolist()]
        null = C.T.nullspace()
        self.annihilator = []
        for v in null:
            v = v * sympy.ilcm(*[sympy.fraction(e)[1] for e in v])
            self.annihilator.append([int(e) for e in v])

    def coefficients(self, d):
        """Coefficients of d in the simple coroots, or None if d is outside their span."""
        for z in self.annihilator:
            if sum(a * b for a, b in zip(z, d)) != 0:
                return None
        if self.left is None:
            return ()
        return tuple(sum(a * b for a, b in zip(row, d)) for row in self.left)


def coroot_coefficients(datum, d):
    solver = getattr(datum, "_coroot_solver", None)
    if solver is None:
        solver = datum._coroot_solver = _CorootSolver(datum)
    return solver.coefficients(tuple(Fraction(v) for v in d))


def newton_leq(datum, nu1, nu2):
    """ν1 ⪯ ν2: ν2 − ν1 is a nonnegative rational combination of simple coroots."""
    coef = coroot_coefficients(datum, tuple(b - a for a, b in zip(nu1, nu2)))
    return coef is not None and all(c >= 0 for c in coef)


def leq_B(datum, c1, c2):
    return c1.kappa == c2.kappa and newton_leq(datum, c1.newton, c2.newton)


def max_class(datum, classes):
    classes = list(dict.fromkeys(classes))
    if not classes:
        raise ValueError("max_class needs a nonempty set")
    tops = [m for m in classes if all(leq_B(datum, c, m) for c in classes)]
    if len(tops) != 1:
        raise NoUniqueMaximum(f"{len(tops)} maximal candidates among {len(classes)} classes")
    return tops[0]
