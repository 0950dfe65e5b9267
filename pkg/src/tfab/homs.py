"""Homomorphism constraint solving.

Splitting functionals onto rank-one pure subgroups (the computational form
of Baer's lemma), kernels and verified complements, integrality structure
of endomorphism rings, bounded idempotent search, and mono-equivalence
witnesses between decompositions.

A functional G -> <x>_* is determined by rational multipliers f(v_i) =
lambda_i * x.  The multipliers are constrained by divisibility (an INF
exponent of chi_i at a prime where the target is finite forces
lambda_i = 0; finite exponents become valuation floors) and by one
congruence per relation generator per prime.  The system is solved exactly
over the integers, so a None answer is a proof of non-existence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import arith, linalg
from .arith import INF, FormConstraint, fraction_primes, p_valuation
from .groups import (
    DimensionMismatch,
    Group,
    GroupError,
    NotMember,
    ZeroElement,
    direct_sum,
    equal_subgroups,
)
from .linalg import Subspace, is_zero, vec, vscale
from .typesys import type_of_char


class InvalidFunctional(GroupError):
    pass


class RankCapExceeded(GroupError):
    pass


class NotADecomposition(GroupError):
    pass


class NotHomogeneous(GroupError):
    pass


@dataclass(frozen=True)
class HomConstraintSystem:
    """The congruence system behind a splitting/endomorphism search.

    Unknowns are rational coefficients (images per base direction); every
    congruence names a prime of the joint universe with a modulus that is a
    power of it; valuation floors bound denominators per unknown per prime.
    """

    nvars: int
    floors: dict
    forms: tuple
    equalities: tuple = ()
    free_primes: frozenset = frozenset()

    def solve(self):
        return arith.solve_valuation_system(
            self.nvars,
            self.floors,
            list(self.forms),
            equalities=list(self.equalities),
            free_primes=self.free_primes,
        )

    def solution_lattice(self):
        return arith.valuation_solution_lattice(self.nvars, self.floors, list(self.forms))


@dataclass
class SplittingFunctional:
    """A verified-checkable functional f: G -> <x>_* with f|<x>_* = id."""

    group: Group
    target: Group
    x: tuple
    lam: tuple  # Fractions, one per base direction of `group`

    def apply(self, y):
        t = self.group.coords(vec(y))
        if t is None:
            raise NotMember("element outside the group's span")
        scale = sum((Fraction(self.lam[i]) * t[i] for i in range(len(t))), Fraction(0))
        return vscale(scale, vec(self.x))

    def scale_of(self, y) -> Fraction:
        t = self.group.coords(vec(y))
        if t is None:
            raise NotMember("element outside the group's span")
        return sum((Fraction(self.lam[i]) * t[i] for i in range(len(t))), Fraction(0))

    def verify(self) -> bool:
        G, R = self.group, self.target
        if self.apply(self.x) != vec(self.x):
            return False
        for i, (v, c) in enumerate(zip(G.directions, G.chars)):
            if self.lam[i] == 0:
                continue
            img = vscale(Fraction(self.lam[i], c.finite_content()), vec(self.x))
            if not R.member(img):
                return False
            for p in c.inf_primes:
                if not R.w_span(p).contains(img):
                    return False
        for j in range(len(G.relations)):
            if not R.member(self.apply(G.relation_gen(j))):
                return False
        return True

    def to_jsonable(self) -> dict:
        return {
            "target_line": [str(v) for v in self.x],
            "multipliers": [str(l) for l in self.lam],
        }


def baer_split(G: Group, x):
    """Decide exactly whether the pure rank-one subgroup <x>_* is a direct
    summand of G, via a splitting functional.

    Returns the canonical SplittingFunctional, or None as a *proof* that no
    functional exists (the constraint system is solved exactly).
    """
    x = vec(x)
    if is_zero(x):
        raise ZeroElement("cannot split along the zero element")
    if not G.member(x):
        raise NotMember("element outside the group")
    R = G.purify([x])
    sigma = G.characteristic_of(x)
    t = G.coords(x)
    free = set()
    for i, c in enumerate(G.chars):
        if any(c.value_at(p) is INF and p not in sigma.inf_primes for p in c.inf_primes):
            continue
        free.add(i)
    free_idx = sorted(free)
    if not free_idx:
        return None
    primes = set(G.prime_universe) | set(sigma.support)
    for ti in t:
        if ti:
            primes.update(fraction_primes(ti))
    con_primes = sorted(primes - sigma.inf_primes)
    floors = {}
    forms = []
    nv = len(free_idx)
    for p in con_primes:
        sp = sigma.value_at(p)
        floors[p] = tuple(G.chars[i].value_at(p) - sp for i in free_idx)
        for w, m in G.relations:
            e = p_valuation(Fraction(m), p)
            coeffs = tuple(Fraction(w[i]) for i in free_idx)
            if any(coeffs):
                forms.append(FormConstraint(coeffs, Fraction(0), p, e - sp))
            # relations supported entirely on forced-zero directions map to 0
    eq = [((tuple(Fraction(t[i]) for i in free_idx)), Fraction(1))]
    system = HomConstraintSystem(
        nv, floors, tuple(forms), tuple(eq), frozenset(sigma.inf_primes)
    )
    s = system.solve()
    if s is None:
        return None
    lam = [Fraction(0)] * G.rank
    for k, i in enumerate(free_idx):
        lam[i] = s[k]
    f = SplittingFunctional(G, R, x, tuple(lam))
    if not f.verify():
        raise GroupError("internal: solved functional failed verification")
    return f


def kernel_presentation(G: Group, f: SplittingFunctional) -> Group:
    """Presentation of ker f, with G = target ⊕ ker f verified."""
    if f.group is not G and not equal_subgroups(f.group, G):
        raise InvalidFunctional("functional belongs to a different group")
    if not f.verify():
        raise InvalidFunctional("functional fails verification")
    rows = [(Fraction(l),) for l in f.lam]
    kbasis = linalg.kernel(rows)
    elements = [G.element(tb) for tb in kbasis]
    K = G.purify(elements) if elements else Group.zero(G.ambient_dim)
    if K.rank + f.target.rank != G.rank:
        raise InvalidFunctional("kernel rank mismatch")
    if not equal_subgroups(direct_sum(f.target, K), G):
        raise InvalidFunctional("target ⊕ kernel fails to reassemble the group")
    return K


# ---------------------------------------------------------------------------
# Endomorphism integrality
# ---------------------------------------------------------------------------

@dataclass
class EndDescription:
    """End(G) described by the allowed matrix-unit positions of the rational
    endomorphism algebra plus the lattice of integer coefficient vectors
    whose matrices preserve G.  Denominators are additionally allowed at
    primes where the acted-on directions carry INF exponents (not encoded in
    the finite lattice)."""

    group: Group
    units: tuple  # ordered (i, j): matrix position row i, col j
    lattice: tuple  # hnf rows over the units

    def matrix_of(self, coeffs) -> tuple:
        n = self.group.rank
        M = [[Fraction(0)] * n for _ in range(n)]
        for c, (i, j) in zip(coeffs, self.units):
            M[i][j] += Fraction(c)
        return tuple(tuple(r) for r in M)

    @property
    def rational_basis(self) -> list:
        return [self.matrix_of([int(k == u) for k in range(len(self.units))]) for u in range(len(self.units))]

    def to_jsonable(self) -> dict:
        return {
            "units": [[i, j] for i, j in self.units],
            "coefficient_lattice": [list(r) for r in self.lattice],
        }


def matrix_in_end(G: Group, M) -> bool:
    """Exact test that the coordinate-space matrix M (rows = images of the
    base directions, in direction coordinates) defines an endomorphism."""
    n = G.rank
    for i, c in enumerate(G.chars):
        row = M[i]
        if all(v == 0 for v in row):
            continue
        img = G.element([Fraction(v, c.finite_content()) for v in row])
        if not G.member(img):
            return False
        for p in c.inf_primes:
            if not G.w_span(p).contains(img):
                return False
    for w, m in G.relations:
        coords = [
            sum((Fraction(w[i], m) * M[i][j] for i in range(n)), Fraction(0))
            for j in range(n)
        ]
        if not G.member(G.element(coords)):
            return False
    return True


def _parametric_membership_lattice(G: Group, nu: int, coord_coeffs, p: int):
    """Lattice of integer parameter vectors c for which the element with
    direction coordinates sum(coord_coeffs[k]·c) passes the p-local
    membership test (residue unknowns are existential, per condition)."""
    J, pe, finite_rows, bound, gcol, _ = G._local_info(p)
    rho = len(J)
    forms = []
    for k in finite_rows:
        coeffs = list(coord_coeffs[k]) + [
            Fraction(-G.relations[j][0][k], G.relations[j][1]) for j in J
        ]
        if any(coeffs):
            forms.append(FormConstraint(tuple(coeffs), Fraction(0), p, -bound[k]))
    sol = arith.valuation_solution_lattice(nu + rho, {}, forms)
    if sol is None:
        raise GroupError("internal: homogeneous membership lattice infeasible")
    _, hom = sol
    proj = [h[:nu] for h in hom if any(h[:nu])]
    Hp, _ = arith.hnf(proj)
    return list(Hp)


def end_integrality_basis(G: Group, cap: int = 6) -> EndDescription:
    """Generating description of End(G): allowed matrix units of the
    rational algebra (stabilizing every p-divisible coordinate subspace)
    plus the congruence lattice of integer coefficient vectors."""
    if G.rank > cap:
        raise RankCapExceeded(f"rank {G.rank} exceeds cap {cap}")
    n = G.rank
    if n == 0:
        return EndDescription(G, (), ())
    inf_sets = {p: {i for i in range(n) if G.chars[i].value_at(p) is INF} for p in G.inf_primes}
    units = tuple(
        (i, j)
        for i in range(n)
        for j in range(n)
        if all(j in S for S in inf_sets.values() if i in S)
    )
    nu = len(units)
    current = [tuple(int(a == b) for b in range(nu)) for a in range(nu)]
    # Each generator of G yields one parametric membership condition; each
    # condition carries its own residue unknowns per prime.
    conditions = []
    for i in range(n):
        ci = G.chars[i].finite_content()
        cond = [
            tuple(
                Fraction(1, ci) if (ri == i and rj == k) else Fraction(0)
                for (ri, rj) in units
            )
            for k in range(n)
        ]
        conditions.append(cond)
    for w, m in G.relations:
        cond = [
            tuple(Fraction(w[ri], m) if rj == k else Fraction(0) for (ri, rj) in units)
            for k in range(n)
        ]
        conditions.append(cond)
    for p in sorted(G.prime_universe):
        for cond in conditions:
            lat = _parametric_membership_lattice(G, nu, cond, p)
            current = arith.lattice_intersect(current, lat, nu)
    return EndDescription(G, units, tuple(current))


@dataclass
class IdempotentReport:
    matrices: list
    bound: int
    exhaustive: bool

    def to_jsonable(self) -> dict:
        return {
            "count": len(self.matrices),
            "bound": self.bound,
            "exhaustive": self.exhaustive,
            "matrices": [[[str(x) for x in row] for row in M] for M in self.matrices],
        }


def _mat_mul(A, B):
    n = len(A)
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(n)), Fraction(0)) for j in range(n))
        for i in range(n)
    )


def idempotent_search(G: Group, coeff_bound: int, cap: int = 6) -> IdempotentReport:
    """All idempotents of End(G) with coefficients bounded by coeff_bound in
    the computed lattice basis; always contains 0 and the identity.

    When the rational endomorphism algebra is diagonal (every allowed matrix
    unit is on the diagonal) the search is exhaustive regardless of the
    bound: an idempotent diagonal rational matrix has entries in {0, 1}, so
    the finitely many 0/1 patterns are tested exactly.
    """
    desc = end_integrality_basis(G, cap=cap)
    n = G.rank
    zero = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    ident = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    found = {zero, ident} if n else {zero}
    diagonal = all(i == j for i, j in desc.units)
    if diagonal:
        for pattern in itertools.product((0, 1), repeat=n):
            M = tuple(
                tuple(Fraction(pattern[i] if i == j else 0) for j in range(n))
                for i in range(n)
            )
            if matrix_in_end(G, M):
                found.add(M)
        return IdempotentReport(sorted(found), coeff_bound, True)
    basis = list(desc.lattice)
    r = len(basis)
    if r and (2 * coeff_bound + 1) ** r <= 200_000:
        for coeffs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=r):
            flat = [
                sum(coeffs[k] * basis[k][u] for k in range(r))
                for u in range(len(desc.units))
            ]
            M = desc.matrix_of(flat)
            if _mat_mul(M, M) == M and matrix_in_end(G, M):
                found.add(M)
        return IdempotentReport(sorted(found), coeff_bound, False)
    return IdempotentReport(sorted(found), coeff_bound, False)


# ---------------------------------------------------------------------------
# Mono-equivalence witnesses
# ---------------------------------------------------------------------------

@dataclass
class MonoWitness:
    """The two restricted projections between the non-decomposable parts of
    two decompositions, with exact injectivity verification."""

    map_images: list  # [(direction of H', image under pi_H), ...]
    reverse_images: list
    injective_forward: bool
    injective_backward: bool

    @property
    def mono_equivalent(self) -> bool:
        return self.injective_forward and self.injective_backward


def _check_homogeneous_cd(A: Group, name: str):
    if A.relations:
        raise NotHomogeneous(f"{name} is not manifestly completely decomposable")
    types = {type_of_char(c) for c in A.chars}
    if len(types) > 1:
        raise NotHomogeneous(f"{name} is not homogeneous")


def _projection(G_span: Subspace, keep: Subspace, kill: Subspace):
    """Projection of span(keep ⊕ kill) onto keep along kill, as a function."""
    rows = [vec(b) for b in keep.basis] + [vec(b) for b in kill.basis]
    solver = linalg.RowSolver(rows)

    def proj(y):
        t = solver.solve(vec(y))
        if t is None:
            raise NotMember("element outside the decomposed span")
        return linalg.mat_mul_vec(rows[: keep.rank], t[: keep.rank])

    return proj


def mono_equivalence_witness(G: Group, dec1, dec2) -> MonoWitness:
    """Given two verified decompositions G = A ⊕ H = A' ⊕ H' with A, A'
    homogeneous completely decomposable, return the mutual restricted
    projections with injectivity verified exactly (the rational kernel of
    each projection meets the other complement trivially)."""
    A, H = dec1
    A2, H2 = dec2
    for (Ax, Hx, name) in ((A, H, "first"), (A2, H2, "second")):
        if not equal_subgroups(direct_sum(Ax, Hx), G):
            raise NotADecomposition(f"{name} pair is not an internal decomposition of the group")
    _check_homogeneous_cd(A, "first decomposable part")
    _check_homogeneous_cd(A2, "second decomposable part")
    spanA, spanH = A.span, H.span
    spanA2, spanH2 = A2.span, H2.span
    proj_H = _projection(G.span, spanH, spanA)
    proj_H2 = _projection(G.span, spanH2, spanA2)
    fwd = [(tuple(v), proj_H(v)) for v in H2.directions]
    bwd = [(tuple(v), proj_H2(v)) for v in H.directions]
    inj_f = spanA.intersect(spanH2).rank == 0
    inj_b = spanA2.intersect(spanH).rank == 0
    return MonoWitness(fwd, bwd, inj_f, inj_b)
