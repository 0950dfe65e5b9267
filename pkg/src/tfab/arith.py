"""Exact arithmetic foundation.

Arbitrary-precision integers and rationals, extended naturals (the value
``INF`` used for unbounded divisibility exponents), congruences and the
Chinese Remainder Theorem, p-adic valuations, small-prime utilities, and
integer-lattice normal-form helpers (Hermite form, kernels, saturation,
congruence systems).

Everything here is a pure function on immutable values; no global state,
safe to call from any number of concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class ArithError(Exception):
    pass


class Infeasible(ArithError):
    """A congruence system has no solution."""


class NotInvertible(ArithError):
    """gcd(a, m) != 1 in mod_inverse."""


class UndefinedOnZero(ArithError):
    """p-adic valuation of zero."""


class DimensionMismatch(ArithError):
    pass


# ---------------------------------------------------------------------------
# Extended naturals
# ---------------------------------------------------------------------------

class _Infinity:
    """The top element of the extended naturals: INF + k = INF, INF > k."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("tfab-INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

# An extended natural is either a non-negative int or INF.
ExtNat = object


def ext_is_finite(a) -> bool:
    return a is not INF


def ext_add(a, b):
    if a is INF or b is INF:
        return INF
    return a + b


def ext_min(a, b):
    if a is INF:
        return b
    if b is INF:
        return a
    return min(a, b)


def ext_le(a, b) -> bool:
    if b is INF:
        return True
    if a is INF:
        return False
    return a <= b


# ---------------------------------------------------------------------------
# Congruences and CRT
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Congruence:
    """x ≡ residue (mod modulus), stored with 0 <= residue < modulus."""

    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ArithError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds_for(self, x: int) -> bool:
        return x % self.modulus == self.residue


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


def crt_solve(constraints: Sequence[Congruence]) -> Congruence:
    """Solve a system of congruences with arbitrary (possibly non-coprime)
    moduli.

    Returns the least non-negative solution modulo the lcm of the moduli.
    Raises Infeasible when two constraints conflict on a shared prime power.
    """
    if not constraints:
        raise ArithError("crt_solve needs at least one congruence")
    r, m = 0, 1
    for c in constraints:
        g, s, _ = xgcd(m, c.modulus)
        if (c.residue - r) % g:
            raise Infeasible(f"conflict merging x≡{r} (mod {m}) with {c}")
        lcm = m // g * c.modulus
        # r + m*t ≡ c.residue (mod c.modulus)  =>  t ≡ s*(diff/g) (mod c.modulus/g)
        t = (s * ((c.residue - r) // g)) % (c.modulus // g)
        r = (r + m * t) % lcm
        m = lcm
    return Congruence(r, m)


def mod_inverse(a: int, m: int) -> int:
    """Multiplicative inverse of a modulo m (0 <= result < m)."""
    if m < 1:
        raise ArithError(f"modulus must be >= 1, got {m}")
    g, x, _ = xgcd(a % m if m > 1 else 0, m)
    if m == 1:
        return 0
    if g != 1:
        raise NotInvertible(f"gcd({a}, {m}) = {g}")
    return x % m


def p_valuation(q, p: int) -> int:
    """v_p(q) for a non-zero rational q: q = p^v * (unit prime to p)."""
    q = Fraction(q)
    if q == 0:
        raise UndefinedOnZero("p-adic valuation of 0 is undefined")

    def int_val(n: int) -> int:
        n = abs(n)
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v

    return int_val(q.numerator) - int_val(q.denominator)


# ---------------------------------------------------------------------------
# Small-prime utilities (presentations only ever name small primes)
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_from(start: int = 2):
    """Yield primes >= start in increasing order."""
    n = max(2, start)
    while True:
        if is_prime(n):
            yield n
        n += 1


def first_primes(k: int, exclude: Iterable[int] = ()) -> list[int]:
    out, banned = [], set(exclude)
    for p in primes_from():
        if p not in banned:
            out.append(p)
        if len(out) == k:
            return out


def factorint(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division (desk-scale inputs)."""
    n = abs(n)
    out: dict[int, int] = {}
    if n < 2:
        return out
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def fraction_primes(q) -> set[int]:
    """Primes dividing the numerator or denominator of a rational."""
    q = Fraction(q)
    out = set(factorint(q.numerator)) if q.numerator else set()
    out |= set(factorint(q.denominator))
    return out


# ---------------------------------------------------------------------------
# Integer matrices and lattices.  Lattices are row spans of integer matrices
# (lists of tuples).  The canonical Hermite form has positive pivots and
# entries above each pivot reduced into [0, pivot).
# ---------------------------------------------------------------------------

def _ncols(rows) -> int:
    return len(rows[0]) if rows else 0


def hnf(rows, transform: bool = False):
    """Row-style Hermite normal form.

    Returns (H, pivots) where H lists the non-zero rows in echelon order and
    pivots the pivot column of each row.  With transform=True also returns U,
    a unimodular matrix over the *input* rows with U[:len(H)] mapping to H and
    the remaining rows spanning the left kernel.
    """
    M = [list(r) for r in rows]
    n = len(M)
    m = _ncols(M)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
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
        U[row], U[piv] = U[piv], U[row]
        for i in range(row + 1, n):
            while M[i][col]:
                a, b = M[row][col], M[i][col]
                if b % a == 0:
                    q = b // a
                    for jj in range(m):
                        M[i][jj] -= q * M[row][jj]
                    for jj in range(n):
                        U[i][jj] -= q * U[row][jj]
                else:
                    g, x, y = xgcd(a, b)
                    ag, mbg = a // g, -(b // g)
                    for jj in range(m):
                        ra, rb = M[row][jj], M[i][jj]
                        M[row][jj] = x * ra + y * rb
                        M[i][jj] = mbg * ra + ag * rb
                    for jj in range(n):
                        ra, rb = U[row][jj], U[i][jj]
                        U[row][jj] = x * ra + y * rb
                        U[i][jj] = mbg * ra + ag * rb
        if M[row][col] < 0:
            M[row] = [-v for v in M[row]]
            U[row] = [-v for v in U[row]]
        for i in range(row):
            q = M[i][col] // M[row][col]
            if q:
                for jj in range(m):
                    M[i][jj] -= q * M[row][jj]
                for jj in range(n):
                    U[i][jj] -= q * U[row][jj]
        pivots.append(col)
        row += 1
        if row == n:
            break
    H = [tuple(r) for r in M[:row]]
    if transform:
        return H, pivots, [tuple(r) for r in U]
    return H, pivots


def kernel_int(rows) -> list[tuple[int, ...]]:
    """Basis of the left kernel {x in Z^n : x·rows = 0} (a saturated lattice),
    returned in Hermite form."""
    if not rows:
        return []
    H, _, U = hnf(rows, transform=True)
    ker = [U[i] for i in range(len(H), len(rows))]
    KH, _ = hnf(ker)
    return list(KH)


def transpose(rows):
    if not rows:
        return []
    return [tuple(r[j] for r in rows) for j in range(len(rows[0]))]


def solve_int(rows, target) -> tuple[int, ...] | None:
    """Integer solution x of x·rows = target, or None."""
    if not rows:
        return None if any(target) else ()
    H, pivots, U = hnf(rows, transform=True)
    y = list(target)
    coeff = [0] * len(H)
    for k, pc in enumerate(pivots):
        if any(y[c] for c in range(pc) if c not in pivots[:k]):
            return None
        if y[pc] % H[k][pc]:
            return None
        q = y[pc] // H[k][pc]
        coeff[k] = q
        if q:
            for jj in range(len(y)):
                y[jj] -= q * H[k][jj]
    if any(y):
        return None
    n = len(rows)
    x = [0] * n
    for k, c in enumerate(coeff):
        if c:
            for jj in range(n):
                x[jj] += c * U[k][jj]
    return tuple(x)


def lattice_contains(hnf_rows, pivots, x) -> bool:
    y = list(x)
    for row, pc in zip(hnf_rows, pivots):
        if y[pc] % row[pc]:
            return False
        q = y[pc] // row[pc]
        if q:
            for jj in range(len(y)):
                y[jj] -= q * row[jj]
    return not any(y)


def coset_reduce(x, hnf_rows, pivots) -> tuple[int, ...]:
    """Canonical representative of x modulo the row lattice: the pivot
    coordinates are reduced into [0, pivot)."""
    y = list(x)
    for row, pc in zip(hnf_rows, pivots):
        q = y[pc] // row[pc]
        if q:
            for jj in range(len(y)):
                y[jj] -= q * row[jj]
    return tuple(y)


def coset_reduce_trailing(x, rows) -> tuple[int, ...]:
    """Canonical coset representative that prioritizes the trailing
    coordinates (they are reduced to least non-negative first)."""
    if not rows:
        return tuple(x)
    rev = [tuple(reversed(r)) for r in rows]
    H, pivots = hnf(rev)
    red = coset_reduce(tuple(reversed(tuple(x))), H, pivots)
    return tuple(reversed(red))


def saturate(rows, dim: int) -> list[tuple[int, ...]]:
    """Hermite basis of the saturation {x in Z^dim : k·x in span_Z(rows)}."""
    rows = [tuple(r) for r in rows if any(r)]
    for r in rows:
        if len(r) != dim:
            raise DimensionMismatch(f"vector of length {len(r)} in dim {dim}")
    if not rows:
        return []
    right_ker = kernel_int(transpose(rows))  # {y : rows·y^T = 0}
    if not right_ker:
        H, _ = hnf([tuple(int(i == j) for j in range(dim)) for i in range(dim)])
        return list(H)
    sat = kernel_int(transpose(right_ker))
    return sat


def lattice_saturate(vectors, ambient_dim: int) -> list[tuple[int, ...]]:
    """Spec operation: canonical (Hermite) basis of the saturation of the
    integer span of `vectors` inside Z^ambient_dim."""
    return saturate(vectors, ambient_dim)


def lattice_intersect(rows_a, rows_b, dim: int) -> list[tuple[int, ...]]:
    """Hermite basis of the intersection of two row lattices in Z^dim."""
    if not rows_a or not rows_b:
        return []
    stacked = [tuple(r) for r in rows_a] + [tuple(-v for v in r) for r in rows_b]
    # x in both lattices: x = u·A = v·B.  Solve (u, v)·[A; -B] = 0.
    ker = kernel_int(stacked)
    na = len(rows_a)
    out = []
    for k in ker:
        vec = [0] * dim
        for i in range(na):
            if k[i]:
                for j in range(dim):
                    vec[j] += k[i] * rows_a[i][j]
        out.append(tuple(vec))
    H, _ = hnf([r for r in out if any(r)])
    return list(H)


# ---------------------------------------------------------------------------
# Congruence systems:  x·A ≡ b (mod m_r) per column r, x in Z^n.
# ---------------------------------------------------------------------------

def congruence_solve(cols, mods, rhs, nvars):
    """Solve sum_j x_j·cols[r][j] ≡ rhs[r] (mod mods[r]) for all r.

    cols[r] is the coefficient row of constraint r (length nvars).
    Returns (particular x, hnf basis of the homogeneous solution lattice),
    or None when infeasible.  The homogeneous lattice has full rank nvars.
    """
    ncons = len(cols)
    if ncons == 0:
        ident = [tuple(int(i == j) for j in range(nvars)) for i in range(nvars)]
        return tuple([0] * nvars), ident
    # Unknowns (x, y) with x·A + y·diag(m) = b.
    rows = []
    for j in range(nvars):
        rows.append(tuple(cols[r][j] for r in range(ncons)))
    for r in range(ncons):
        rows.append(tuple(mods[r] if rr == r else 0 for rr in range(ncons)))
    part = solve_int(rows, tuple(rhs))
    if part is None:
        return None
    ker = kernel_int(rows)
    hom = [k[:nvars] for k in ker]
    hom = [h for h in hom if any(h)]
    H, _ = hnf(hom)
    # The homogeneous lattice always contains prod(mods)·Z^n, hence full rank.
    return tuple(part[:nvars]), list(H)


# ---------------------------------------------------------------------------
# Valuation-constrained affine solving.
#
# Unknown rational vector s of length nvars subject to
#   * per-variable valuation floors:     v_p(s_j) >= floors[p][j]
#   * linear form constraints:           v_p(const + coeffs·s) >= minval
#   * exact linear equalities:           coeffs·s == const
# Denominators of s are unrestricted at `free_primes` (they carry no floors
# and no form constraints name them).  Every solution automatically has
# v_p(s_j) >= floor, so the search space for denominators is bounded by the
# floors themselves; this keeps the reduction to integer lattices complete.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormConstraint:
    coeffs: tuple  # Fractions, length nvars
    const: Fraction
    p: int
    minval: int


def _clear_other_primes(fracs: list[Fraction], p: int) -> tuple[list[int], int]:
    """Multiply a list of p-integral rationals by a unit mod any p-power so
    they all become integers (denominators are prime to p)."""
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    if den % p == 0:
        raise ArithError("internal: denominators not prime to p")
    return [int(f * den) for f in fracs], den


def solve_valuation_system(
    nvars: int,
    floors: dict[int, Sequence[int]],
    forms: Sequence[FormConstraint],
    equalities: Sequence[tuple[tuple, Fraction]] = (),
    free_primes: Iterable[int] = (),
):
    """Solve the constrained system described above.

    Returns the canonical solution vector (tuple of Fractions) or None.
    Canonical means: the integer parameter vector is reduced modulo the
    homogeneous solution lattice, least non-negative on trailing coordinates.
    """
    free = set(free_primes)
    primes = set(floors) | {f.p for f in forms}
    primes -= free
    if nvars == 0:
        for cf, c in equalities:
            if c != 0:
                return None
        for f in forms:
            if f.const and p_valuation(f.const, f.p) < f.minval:
                return None
        return ()
    # Substitute s_j = sigma_j / delta_j with delta_j clearing the allowed
    # denominators at constrained primes; positive floors become congruences.
    delta = [1] * nvars
    for p in primes:
        fl = floors.get(p, (0,) * nvars)
        for j in range(nvars):
            if fl[j] < 0:
                delta[j] *= p ** (-fl[j])
    cons_cols: list[tuple[int, ...]] = []
    cons_mods: list[int] = []
    cons_rhs: list[int] = []
    for p in primes:
        fl = floors.get(p, (0,) * nvars)
        for j in range(nvars):
            # v_p(sigma_j) >= fl[j] + v_p(delta_j)
            need = fl[j] + p_valuation(Fraction(delta[j]), p)
            if need > 0:
                cons_cols.append(tuple(int(jj == j) for jj in range(nvars)))
                cons_mods.append(p ** need)
                cons_rhs.append(0)
    for f in forms:
        if f.p in free:
            continue
        coeffs = [Fraction(c) / delta[j] for j, c in enumerate(f.coeffs)]
        entries = [Fraction(f.const)] + coeffs
        mu = min(
            [f.minval]
            + [p_valuation(e, f.p) for e in entries if e != 0]
        )
        e = f.minval - mu
        if e <= 0:
            continue
        scaled = [x * Fraction(f.p) ** (-mu) for x in entries]
        ints, _ = _clear_other_primes(scaled, f.p)
        mod = f.p ** e
        cons_cols.append(tuple(v % mod for v in ints[1:]))
        cons_mods.append(mod)
        cons_rhs.append((-ints[0]) % mod)
    sol = congruence_solve(cons_cols, cons_mods, cons_rhs, nvars)
    if sol is None:
        return None
    part, hom = sol
    if not equalities:
        red = coset_reduce_trailing(part, hom)
        return tuple(Fraction(red[j], delta[j]) for j in range(nvars))
    # Substitute sigma = part + z·hom into the equalities and solve for z
    # over Z with denominators allowed at the free primes.
    k = len(hom)
    eq_rows = []
    eq_rhs = []
    for cf, c in equalities:
        coeffs = [Fraction(cf[j]) / delta[j] for j in range(nvars)]
        base = sum(coeffs[j] * part[j] for j in range(nvars))
        row = [
            sum(coeffs[j] * hom[i][j] for j in range(nvars)) for i in range(k)
        ]
        eq_rows.append(row)
        eq_rhs.append(Fraction(c) - base)
    # Clear denominators to an integer system  z·A^T = b  (z length k).
    den = 1
    for row in eq_rows:
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
    for v in eq_rhs:
        den = den * v.denominator // math.gcd(den, v.denominator)
    A = [tuple(int(eq_rows[r][i] * den) for r in range(len(eq_rows))) for i in range(k)]
    b = [int(v * den) for v in eq_rhs]
    # Solve z·A = b with z in Z[1/free]: find minimal free-number f with
    # z'·A = f·b solvable over Z, then z = z'/f.
    if not any(any(row) for row in A):
        if any(b):
            return None
        z = (0,) * k
        f_den = 1
    else:
        H, pivots = hnf(A)
        # Rational solvability and the needed free-denominator.
        coeffs_gamma = _rational_coords(b, H, pivots)
        if coeffs_gamma is None:
            return None
        f_den = 1
        for g in coeffs_gamma:
            d = g.denominator
            for p in factorint(d):
                if p not in free:
                    return None
            f_den = f_den * d // math.gcd(f_den, d)
        z_int = solve_int(A, tuple(v * f_den for v in b))
        if z_int is None:
            return None
        ker = kernel_int(A)
        z_int = coset_reduce_trailing(z_int, ker)
        z = z_int
    sigma = [
        Fraction(part[j]) + sum(Fraction(z[i], f_den) * hom[i][j] for i in range(k))
        for j in range(nvars)
    ]
    out = tuple(sigma[j] / delta[j] for j in range(nvars))
    return out


def _rational_coords(target, hnf_rows, pivots):
    """Rational coefficients expressing target over independent HNF rows,
    or None when target is outside their rational span."""
    y = [Fraction(v) for v in target]
    coeffs = []
    for row, pc in zip(hnf_rows, pivots):
        q = y[pc] / row[pc]
        coeffs.append(q)
        if q:
            for jj in range(len(y)):
                y[jj] -= q * row[jj]
    if any(y):
        return None
    return coeffs


def valuation_solution_lattice(
    nvars: int,
    floors: dict[int, Sequence[int]],
    forms: Sequence[FormConstraint],
) -> tuple[tuple[int, ...], list[tuple[int, ...]]] | None:
    """Integer solutions of a homogeneous-or-not valuation system with
    non-negative floors: returns (particular, hnf basis of the lattice of
    homogeneous integer solutions).  All floors must be >= 0 (integer vars).
    """
    for p, fl in floors.items():
        if any(v < 0 for v in fl):
            raise ArithError("valuation_solution_lattice needs floors >= 0")
    primes = set(floors) | {f.p for f in forms}
    cons_cols, cons_mods, cons_rhs = [], [], []
    for p in primes:
        fl = floors.get(p, (0,) * nvars)
        for j in range(nvars):
            if fl[j] > 0:
                cons_cols.append(tuple(int(jj == j) for jj in range(nvars)))
                cons_mods.append(p ** fl[j])
                cons_rhs.append(0)
    for f in forms:
        entries = [Fraction(f.const)] + [Fraction(c) for c in f.coeffs]
        mu = min([f.minval] + [p_valuation(e, f.p) for e in entries if e != 0])
        e = f.minval - mu
        if e <= 0:
            continue
        scaled = [x * Fraction(f.p) ** (-mu) for x in entries]
        ints, _ = _clear_other_primes(scaled, f.p)
        mod = f.p ** e
        cons_cols.append(tuple(v % mod for v in ints[1:]))
        cons_mods.append(mod)
        cons_rhs.append((-ints[0]) % mod)
    return congruence_solve(cons_cols, cons_mods, cons_rhs, nvars)
