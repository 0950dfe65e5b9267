"""Characteristics (finite-support height sequences) and Baer types.

A characteristic stores, for finitely many primes, an exponent that is
either a positive integer or INF; absent primes mean exponent 0.  Two
finite-support characteristics are equivalent (define the same type) iff
their INF-supports agree, so a type is canonically a finite set of primes.
The empty set is the type of the integers.

Consequence of the finite-support restriction: divisible groups and the
rationals are not representable, and every type that occurs is determined
by its set of INF primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import INF, ext_is_finite, ext_le, ext_min, is_prime

LE, GE, EQ, INCOMPARABLE = "LE", "GE", "EQ", "INCOMPARABLE"


class TypesysError(Exception):
    pass


class NonPrimeInUniverse(TypesysError):
    pass


def _check_entries(entries):
    for p, e in entries.items():
        if not is_prime(p):
            raise NonPrimeInUniverse(f"{p} is not prime")
        if e is not INF and (not isinstance(e, int) or e < 0):
            raise TypesysError(f"exponent at {p} must be a natural or INF, got {e!r}")


@dataclass(frozen=True)
class Characteristic:
    """Finite map prime -> exponent (int >= 1 or INF); zeros not stored."""

    _items: tuple

    def __init__(self, entries=()):
        entries = dict(entries)
        _check_entries(entries)
        items = tuple(sorted(
            ((p, e) for p, e in entries.items() if e is INF or e > 0),
            key=lambda pe: pe[0],
        ))
        object.__setattr__(self, "_items", items)

    @property
    def entries(self) -> dict:
        return dict(self._items)

    def value_at(self, p: int):
        for q, e in self._items:
            if q == p:
                return e
        return 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self._items)

    @property
    def inf_primes(self) -> frozenset[int]:
        return frozenset(p for p, e in self._items if e is INF)

    def finite_content(self) -> int:
        """Product of p^e over the finite entries."""
        out = 1
        for p, e in self._items:
            if e is not INF:
                out *= p ** e
        return out

    def shifted(self, p: int, k: int) -> "Characteristic":
        """Add k to the entry at p (entry must stay >= 0 and finite)."""
        e = self.value_at(p)
        if e is INF:
            return self
        new = self.entries
        v = e + k
        if v < 0:
            raise TypesysError(f"entry at {p} would become negative")
        if v == 0:
            new.pop(p, None)
        else:
            new[p] = v
        return Characteristic(new)

    def denominator_allows(self, q: Fraction) -> bool:
        """Whether q lies in D_chi = {rationals with v_p >= -chi(p) for all p}."""
        q = Fraction(q)
        d = q.denominator
        for p, e in self._items:
            if e is INF:
                while d % p == 0:
                    d //= p
            else:
                for _ in range(e):
                    if d % p == 0:
                        d //= p
        return d == 1

    def __str__(self):
        if not self._items:
            return "Z"
        parts = []
        for p, e in self._items:
            parts.append(f"{p}^inf" if e is INF else f"{p}^{e}")
        return " * ".join(parts)


def char_compare(a: Characteristic, b: Characteristic) -> str:
    """Pointwise comparison over the union of supports."""
    le = ge = True
    for p in sorted(set(a.support) | set(b.support)):
        x, y = a.value_at(p), b.value_at(p)
        if not ext_le(x, y):
            le = False
        if not ext_le(y, x):
            ge = False
    if le and ge:
        return EQ
    if le:
        return LE
    if ge:
        return GE
    return INCOMPARABLE


def char_inf(a: Characteristic, b: Characteristic) -> Characteristic:
    """Pointwise minimum (the meet in the lattice of characteristics)."""
    out = {}
    for p in set(a.support) | set(b.support):
        m = ext_min(a.value_at(p), b.value_at(p))
        if m is INF or m > 0:
            out[p] = m
    return Characteristic(out)


@dataclass(frozen=True)
class TypeClass:
    """A Baer type in the finite-support class: the set of INF primes."""

    inf_primes: frozenset

    def __init__(self, primes=()):
        ps = frozenset(primes)
        for p in ps:
            if not is_prime(p):
                raise NonPrimeInUniverse(f"{p} is not prime")
        object.__setattr__(self, "inf_primes", ps)

    def __str__(self):
        if not self.inf_primes:
            return "Z"
        return "{" + ",".join(str(p) for p in sorted(self.inf_primes)) + "}"

    def __le__(self, other: "TypeClass") -> bool:
        return self.inf_primes <= other.inf_primes


TYPE_OF_INTEGERS = TypeClass()


def type_of_char(a: Characteristic) -> TypeClass:
    """Canonicalize a characteristic into its type (the INF-support)."""
    return TypeClass(a.inf_primes)


def type_le(t1: TypeClass, t2: TypeClass) -> bool:
    return t1.inf_primes <= t2.inf_primes


# ---------------------------------------------------------------------------
# Textual form:  `2^inf * 3^2`, `Z` for the empty characteristic.
# ---------------------------------------------------------------------------

def parse_characteristic(text: str) -> Characteristic:
    s = text.strip()
    if s == "Z":
        return Characteristic()
    entries = {}
    for term in s.split("*"):
        term = term.strip()
        if "^" not in term:
            raise TypesysError(f"bad characteristic term {term!r}")
        base, _, exp = term.partition("^")
        p = int(base.strip())
        exp = exp.strip()
        e = INF if exp == "inf" else int(exp)
        if p in entries:
            raise TypesysError(f"repeated prime {p}")
        entries[p] = e
    return Characteristic(entries)


def char_to_text(c: Characteristic) -> str:
    return str(c)


def char_to_jsonable(c: Characteristic) -> dict:
    return {str(p): ("inf" if e is INF else e) for p, e in c.entries.items()}


def char_from_jsonable(d: dict) -> Characteristic:
    return Characteristic({int(p): (INF if e == "inf" else int(e)) for p, e in d.items()})
