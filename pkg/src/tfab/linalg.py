"""Exact rational linear algebra over `fractions.Fraction`.

Vectors are tuples of Fractions; subspaces are represented by canonical
bases: reduced-row-echelon rows scaled to primitive integer vectors with
positive leading entry.  Everything is pure and deterministic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple  # tuple of Fractions


def vec(entries) -> Vec:
    return tuple(Fraction(e) for e in entries)


def zero_vec(n: int) -> Vec:
    return tuple(Fraction(0) for _ in range(n))


def unit_vec(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Vec) -> Vec:
    c = Fraction(c)
    return tuple(c * x for x in a)


def vdot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def is_zero(a: Vec) -> bool:
    return all(x == 0 for x in a)


def primitive(a: Vec) -> tuple:
    """Scale a non-zero rational vector to a primitive integer vector with
    positive first non-zero entry; returns integer tuple."""
    den = 1
    for x in a:
        f = Fraction(x)
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = [int(Fraction(x) * den) for x in a]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g:
        ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


def rref(rows: Sequence[Vec]) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns (non-zero rows, pivot columns)."""
    M = [list(map(Fraction, r)) for r in rows]
    if not M:
        return [], []
    n, m = len(M), len(M[0])
    row = 0
    pivots = []
    for col in range(m):
        piv = None
        for i in range(row, n):
            if M[i][col]:
                piv = i
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [v * inv for v in M[row]]
        for i in range(n):
            if i != row and M[i][col]:
                c = M[i][col]
                M[i] = [a - c * b for a, b in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    return [tuple(r) for r in M[:row]], pivots


def canonical_basis(rows: Iterable[Vec]) -> list[tuple]:
    """Canonical basis of the span: RREF rows scaled primitive-integer."""
    R, _ = rref([r for r in rows if not is_zero(r)])
    return [primitive(r) for r in R]


def rank(rows: Sequence[Vec]) -> int:
    R, _ = rref(list(rows))
    return len(R)


def in_span(rows_rref: Sequence[Vec], pivots: Sequence[int], x: Vec) -> bool:
    y = list(map(Fraction, x))
    for r, pc in zip(rows_rref, pivots):
        c = y[pc] / r[pc]
        if c:
            for j in range(len(y)):
                y[j] -= c * r[j]
    return all(v == 0 for v in y)


class Subspace:
    """A rational subspace of Q^dim with a canonical basis."""

    __slots__ = ("dim", "basis", "_rref", "_pivots")

    def __init__(self, dim: int, vectors: Iterable[Vec] = ()):
        self.dim = dim
        R, piv = rref([vec(v) for v in vectors if not is_zero(vec(v))])
        self._rref = R
        self._pivots = piv
        self.basis = tuple(primitive(r) for r in R)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, x) -> bool:
        return in_span(self._rref, self._pivots, vec(x))

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def coords(self, x) -> tuple | None:
        """Coefficients of x over self.basis, or None when x is outside."""
        y = list(vec(x))
        coeffs = [Fraction(0)] * len(self.basis)
        for k in range(len(self.basis)):
            r, pc = self._rref[k], self._pivots[k]
            c = y[pc] / r[pc]
            if c:
                for j in range(len(y)):
                    y[j] -= c * r[j]
            # translate from rref row to basis row scaling
            scale = Fraction(self.basis[k][pc]) / r[pc]
            coeffs[k] = c / scale
        if any(v != 0 for v in y):
            return None
        return tuple(coeffs)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        if not self.basis or not other.basis:
            return Subspace(self.dim)
        rows = [vec(b) for b in self.basis] + [vec(b) for b in other.basis]
        ker = kernel(rows)
        na = len(self.basis)
        out = []
        for k in ker:
            v = zero_vec(self.dim)
            for i in range(na):
                if k[i]:
                    v = vadd(v, vscale(k[i], vec(self.basis[i])))
            out.append(v)
        return Subspace(self.dim, out)

    def add(self, other: "Subspace") -> "Subspace":
        return Subspace(self.dim, list(self.basis) + list(other.basis))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, basis={list(self.basis)})"


def kernel(rows: Sequence[Vec]) -> list[tuple]:
    """Basis of {x : x·rows = 0} (left kernel), primitive-integer rows."""
    n = len(rows)
    if n == 0:
        return []
    m = len(rows[0])
    # Row-reduce [rows | I] and read off kernel rows.
    aug = [list(map(Fraction, rows[i])) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    row = 0
    for col in range(m):
        piv = None
        for i in range(row, n):
            if aug[i][col]:
                piv = i
                break
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for i in range(n):
            if i != row and aug[i][col]:
                c = aug[i][col]
                aug[i] = [a - c * b for a, b in zip(aug[i], aug[row])]
        row += 1
        if row == n:
            break
    out = []
    for i in range(row, n):
        out.append(primitive(tuple(aug[i][m:])))
    return out


def solve_right(rows: Sequence[Vec], target: Vec) -> tuple | None:
    """Solve x·rows = target over Q; returns x or None."""
    n = len(rows)
    if n == 0:
        return () if is_zero(target) else None
    m = len(rows[0])
    aug = [list(map(Fraction, rows[i])) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    y = list(map(Fraction, target))
    row = 0
    pivots = []
    for col in range(m):
        piv = None
        for i in range(row, n):
            if aug[i][col]:
                piv = i
                break
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for i in range(n):
            if i != row and aug[i][col]:
                c = aug[i][col]
                aug[i] = [a - c * b for a, b in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    x = [Fraction(0)] * n
    for k, pc in enumerate(pivots):
        c = y[pc]
        if c:
            for j in range(m):
                y[j] -= c * aug[k][j]
            for j in range(n):
                x[j] += c * aug[k][m + j]
    if any(v != 0 for v in y):
        return None
    return tuple(x)


def mat_mul_vec(rows: Sequence[Vec], x: Vec) -> Vec:
    """x·rows (x has one coefficient per row)."""
    if not rows:
        return ()
    out = list(zero_vec(len(rows[0])))
    for c, r in zip(x, rows):
        if c:
            for j in range(len(out)):
                out[j] += Fraction(c) * r[j]
    return tuple(out)


class RowSolver:
    """Solves x = t·rows for t, caching the echelon decomposition.

    The rows must be linearly independent.
    """

    __slots__ = ("n", "m", "_rows", "_transform", "_pivots")

    def __init__(self, rows: Sequence[Vec]):
        rows = [vec(r) for r in rows]
        self.n = len(rows)
        self.m = len(rows[0]) if rows else 0
        aug = [
            list(rows[i]) + [Fraction(int(i == j)) for j in range(self.n)]
            for i in range(self.n)
        ]
        row = 0
        pivots = []
        for col in range(self.m):
            piv = None
            for i in range(row, self.n):
                if aug[i][col]:
                    piv = i
                    break
            if piv is None:
                continue
            aug[row], aug[piv] = aug[piv], aug[row]
            inv = 1 / aug[row][col]
            aug[row] = [v * inv for v in aug[row]]
            for i in range(self.n):
                if i != row and aug[i][col]:
                    c = aug[i][col]
                    aug[i] = [a - c * b for a, b in zip(aug[i], aug[row])]
            pivots.append(col)
            row += 1
            if row == self.n:
                break
        if row != self.n:
            raise ValueError("RowSolver rows are linearly dependent")
        self._rows = [tuple(r[: self.m]) for r in aug]
        self._transform = [tuple(r[self.m:]) for r in aug]
        self._pivots = pivots

    def solve(self, x: Vec) -> tuple | None:
        y = list(map(Fraction, x))
        t = [Fraction(0)] * self.n
        for k, pc in enumerate(self._pivots):
            c = y[pc]
            if c:
                row = self._rows[k]
                for j in range(self.m):
                    if row[j]:
                        y[j] -= c * row[j]
                tr = self._transform[k]
                for j in range(self.n):
                    if tr[j]:
                        t[j] += c * tr[j]
        if any(v != 0 for v in y):
            return None
        return tuple(t)
