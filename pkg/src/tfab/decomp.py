"""Rank-one summand extraction and Main Decompositions at finite rank.

A Main Decomposition writes G = A ⊕ H with A completely decomposable and
H clipped (no rank-one direct summand).  Extraction enumerates candidate
lines in a fixed documented order (content-reduced integer coordinate
vectors over the base, max-norm ascending, lexicographic tiebreak) and
decides each candidate exactly with a splitting functional.

Clippedness is certified within an explicit bound, except when the
documented exhaustiveness argument applies: when every non-zero
p-divisible subspace of the presentation is a line and those lines span,
any rank-one summand must be one of the finitely many divisible lines, so
testing them decides clippedness exactly.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field

from .groups import Group, GroupError, block_sum, direct_sum, equal_subgroups
from .homs import SplittingFunctional, baer_split, kernel_presentation
from .linalg import Subspace, primitive, vec
from .typesys import TypeClass, type_of_char


class PreconditionError(GroupError):
    pass


CLIPPED_WITHIN_BOUND = "ClippedWithinBound"
RANK_ONE_FOUND = "RankOneFound"


@dataclass
class RankOneWitness:
    x: tuple
    functional: SplittingFunctional
    complement: Group

    def reverify(self) -> bool:
        if not self.functional.verify():
            return False
        return equal_subgroups(
            direct_sum(self.functional.target, self.complement),
            self.functional.group,
        )

    def to_jsonable(self) -> dict:
        return {
            "line": [str(v) for v in self.x],
            "functional": self.functional.to_jsonable(),
            "complement_rank": self.complement.rank,
        }


@dataclass
class ExtractionOutcome:
    witness: RankOneWitness | None
    bound: int
    candidates_examined: int
    exhaustive: bool  # a None witness is a proof, not just within-bound

    @property
    def found(self) -> bool:
        return self.witness is not None


def _candidate_vectors(n: int, bound: int, seed=None):
    """Content-reduced integer vectors, max-norm ascending; within a norm
    shell sparser vectors come first, then lexicographic; first non-zero
    entry positive.  A seed shuffles within each norm shell (search-order
    perturbation for uniqueness testing)."""
    rng = random.Random(seed) if seed is not None else None
    for norm in range(1, bound + 1):
        shell = []
        for v in itertools.product(range(-norm, norm + 1), repeat=n):
            if max(abs(x) for x in v) != norm:
                continue
            g = 0
            for x in v:
                g = math.gcd(g, x)
            if g != 1:
                continue
            lead = next(x for x in v if x)
            if lead < 0:
                continue
            shell.append(v)
        shell.sort(key=lambda v: (sum(1 for x in v if x), v))
        if rng is not None:
            rng.shuffle(shell)
        yield from shell


def _exact_candidate_lines(G: Group):
    """When every non-zero p-divisible subspace is a line and those lines
    span the group, return the lines' canonical generators (testing them is
    an exact clippedness decision); otherwise None."""
    if G.rank == 1:
        return [G.element((1,))]
    lines = []
    seen = set()
    total = Subspace(G.ambient_dim)
    for p in sorted(G.inf_primes):
        W = G.w_span(p)
        if W.rank == 0:
            continue
        if W.rank > 1:
            return None
        key = W.basis
        if key not in seen:
            seen.add(key)
            lines.append(W)
            total = total.add(W)
    if total.rank != G.rank:
        return None
    out = []
    for W in lines:
        t = G.coords(vec(W.basis[0]))
        out.append(G.element(primitive(t)))
    return out


def extract_rank1(
    G: Group,
    bound: int,
    seed=None,
    tau: TypeClass | None = None,
    skip_span: Subspace | None = None,
) -> ExtractionOutcome:
    """First rank-one direct summand in the documented candidate order,
    with its splitting functional and verified complement.

    With `tau`, only lines of exactly that type qualify.  `skip_span`
    candidates are ignored (used by socle splitting to avoid the kernel)."""
    if G.rank == 0:
        return ExtractionOutcome(None, bound, 0, True)
    exact = _exact_candidate_lines(G)
    examined = 0
    if exact is not None:
        for x in exact:
            examined += 1
            if skip_span is not None and skip_span.contains(x):
                continue
            if tau is not None and G.type_of(x) != tau:
                continue
            f = baer_split(G, x)
            if f is not None:
                K = kernel_presentation(G, f)
                return ExtractionOutcome(RankOneWitness(vec(x), f, K), bound, examined, True)
        return ExtractionOutcome(None, bound, examined, True)
    for t in _candidate_vectors(G.rank, bound, seed=seed):
        x = G.element(t)
        examined += 1
        if skip_span is not None and skip_span.contains(x):
            continue
        if tau is not None and G.type_of(x) != tau:
            continue
        f = baer_split(G, x)
        if f is not None:
            K = kernel_presentation(G, f)
            return ExtractionOutcome(RankOneWitness(vec(x), f, K), bound, examined, False)
    return ExtractionOutcome(None, bound, examined, False)


@dataclass
class DecompositionReport:
    """Result of a Main Decomposition run."""

    group: Group
    cd_types: tuple  # sorted multiset of TypeClass
    cd_summands: list  # [(element, functional), ...] per extraction stage
    complement: Group
    complement_rank: int
    certificate_bound: int
    deterministic_seed: object
    candidates_examined: int
    complement_certificate_exact: bool

    def reverify(self) -> bool:
        parts = [f.target for _, f in self.cd_summands]
        assembled = direct_sum(*parts, self.complement) if parts else self.complement
        if not equal_subgroups(assembled, self.group):
            return False
        return all(f.verify() for _, f in self.cd_summands)

    def to_jsonable(self) -> dict:
        return {
            "cd_types": [str(t) for t in self.cd_types],
            "summands": [
                {"line": [str(v) for v in x], "functional": f.to_jsonable()}
                for x, f in self.cd_summands
            ],
            "complement_rank": self.complement_rank,
            "bound": self.certificate_bound,
            "seed": self.deterministic_seed,
            "candidates_examined": self.candidates_examined,
            "complement_certificate_exact": self.complement_certificate_exact,
        }


def main_decomposition(G: Group, bound: int = 4, seed=None) -> DecompositionReport:
    """Iterate rank-one extraction on successive complements until no
    further summand is found within the bound."""
    summands = []
    current = G
    examined = 0
    exact = True
    while current.rank > 0:
        out = extract_rank1(current, bound, seed=seed)
        examined += out.candidates_examined
        if not out.found:
            exact = out.exhaustive
            break
        summands.append((out.witness.x, out.witness.functional))
        current = out.witness.complement
    else:
        exact = True
    types = sorted(
        (type_of_char(x_f[1].target.chars[0]) for x_f in summands),
        key=lambda t: sorted(t.inf_primes),
    )
    return DecompositionReport(
        group=G,
        cd_types=tuple(types),
        cd_summands=summands,
        complement=current,
        complement_rank=current.rank,
        certificate_bound=bound,
        deterministic_seed=seed,
        candidates_examined=examined,
        complement_certificate_exact=exact,
    )


@dataclass
class ClippedCertificate:
    verdict: str  # CLIPPED_WITHIN_BOUND or RANK_ONE_FOUND
    witness: RankOneWitness | None
    bound: int
    candidates_examined: int
    exhaustive: bool

    def to_jsonable(self) -> dict:
        return {
            "verdict": self.verdict,
            "bound": self.bound,
            "candidates_examined": self.candidates_examined,
            "exhaustive": self.exhaustive,
            **({"witness": self.witness.to_jsonable()} if self.witness else {}),
        }


def is_clipped(G: Group, bound: int, seed=None) -> ClippedCertificate:
    out = extract_rank1(G, bound, seed=seed)
    if out.found:
        return ClippedCertificate(RANK_ONE_FOUND, out.witness, bound, out.candidates_examined, True)
    return ClippedCertificate(
        CLIPPED_WITHIN_BOUND, None, bound, out.candidates_examined, out.exhaustive
    )


def is_tau_clipped(G: Group, tau: TypeClass, bound: int, seed=None) -> ClippedCertificate:
    """No rank-one direct summand of type exactly tau, within the bound."""
    out = extract_rank1(G, bound, seed=seed, tau=tau)
    if out.found:
        return ClippedCertificate(RANK_ONE_FOUND, out.witness, bound, out.candidates_examined, True)
    return ClippedCertificate(
        CLIPPED_WITHIN_BOUND, None, bound, out.candidates_examined, out.exhaustive
    )


def cd_iso_test(r1: DecompositionReport, r2: DecompositionReport) -> bool:
    """Isomorphism of the completely decomposable parts: multiset equality
    of the extracted types (finite-rank completely decomposable groups are
    isomorphic iff their homogeneous components match rank by rank)."""
    return Counter(r1.cd_types) == Counter(r2.cd_types)


def stein_socle_decomposition(
    G: Group, tau: TypeClass, bound: int = 5, seed=None
) -> tuple[Group, Group]:
    """Split the socle G(tau) as K ⊕ B with B tau-homogeneous completely
    decomposable and K tau-clipped (within the bound).

    K is the joint rational kernel of all functionals into a rank-one group
    of type tau: the pure closure of the directions whose type strictly
    exceeds tau.  B is assembled by repeated extraction of type-tau lines;
    the extraction never eats into K because divisibility forces every
    functional to vanish on it.
    """
    S = G.socle(tau)
    if S.rank == 0:
        z = Group.zero(G.ambient_dim)
        return z, z
    killed = [
        v
        for v, c in zip(S.directions, S.chars)
        if type_of_char(c).inf_primes > tau.inf_primes
    ]
    K = S.purify(killed) if killed else Group.zero(G.ambient_dim)
    kspan = K.span if K.rank else Subspace(G.ambient_dim)
    current = S
    lines = []
    while current.rank > K.rank:
        out = extract_rank1(current, bound, seed=seed, skip_span=kspan)
        if not out.found:
            raise GroupError(
                "socle splitting stalled within bound "
                f"{bound} at rank {current.rank} (kernel rank {K.rank})"
            )
        lines.append(out.witness.functional.target)
        current = out.witness.complement
    if K.rank and not equal_subgroups(current, K):
        raise GroupError("socle splitting complement does not match the kernel")
    B = direct_sum(*lines) if lines else Group.zero(G.ambient_dim)
    assembled = direct_sum(K, B) if (K.rank and B.rank) else (B if B.rank else K)
    if not equal_subgroups(assembled, S):
        raise GroupError("socle splitting fails to reassemble the socle")
    for c in B.chars:
        if type_of_char(c) != tau:
            raise GroupError("socle complement is not homogeneous of the requested type")
    return K, B


def tau_clipped_sum_check(A: Group, B: Group, tau: TypeClass, bound: int) -> bool:
    """Property check: a completely decomposable tau-clipped A plus a
    tau-clipped B should give a tau-clipped sum.  Returns True when no
    rank-one summand of type tau is found in A ⊕ B within the bound."""
    if A.relations:
        raise PreconditionError("first summand is not manifestly completely decomposable")
    if any(type_of_char(c) == tau for c in A.chars):
        raise PreconditionError("first summand has a base direction of the forbidden type")
    if B.rank:
        certB = is_tau_clipped(B, tau, bound)
        if certB.verdict == RANK_ONE_FOUND:
            raise PreconditionError("second summand is not tau-clipped within the bound")
    G = block_sum(A, B) if (A.rank or B.rank) else Group.zero(1)
    cert = is_tau_clipped(G, tau, bound)
    return cert.verdict == CLIPPED_WITHIN_BOUND


# ---------------------------------------------------------------------------
# Relation-preserving automorphisms (for uniqueness experiments)
# ---------------------------------------------------------------------------

def random_group_automorphism(G: Group, rng: random.Random, attempts: int = 60):
    """A random unimodular ambient map U with U(G) = G, verified by mutual
    generator membership; returns the matrix rows or None.

    Candidates are shears v_i -> v_i + k*v_j whose scale k clears all
    relation moduli and the finite characteristic content, biased toward
    pairs whose divisibility is compatible; every candidate is verified.
    """
    n = G.rank
    if n < 2:
        return None
    m_all = 1
    for _, m in G.relations:
        m_all *= m
    d = G.ambient_dim
    for _ in range(attempts):
        i, j = rng.sample(range(n), 2)
        if not G.chars[i].inf_primes <= G.chars[j].inf_primes:
            continue
        k = m_all * G.chars[i].finite_content() * rng.choice([1, -1, 2])
        vi, vj = G.directions[i], G.directions[j]
        rows = _shear_rows(d, vi, vj, k, G)
        if rows is None:
            continue
        G2 = G.transformed(rows)
        try:
            if equal_subgroups(G, G2):
                return rows
        except GroupError:
            continue
    return None


def _shear_rows(d, vi, vj, k, G: Group):
    """Ambient matrix sending vi -> vi + k*vj and fixing a complement."""
    from fractions import Fraction

    from .linalg import RowSolver, mat_mul_vec, unit_vec, vadd, vscale

    basis = list(G.directions)
    span = Subspace(d, basis)
    extra = []
    for r in range(d):
        e = unit_vec(d, r)
        if not span.add(Subspace(d, extra)).contains(e):
            extra.append(e)
        if len(basis) + len(extra) == d:
            break
    full = basis + extra
    solver = RowSolver(full)
    images = []
    for r in range(d):
        t = solver.solve(unit_vec(d, r))
        img = unit_vec(d, r)
        idx = basis.index(vi)
        img = vadd(img, vscale(Fraction(k) * t[idx], vj))
        images.append(img)
    return images
