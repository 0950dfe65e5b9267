"""Finite truncations of three classical example families (constructions of
A.L.S. Corner, cf. Fuchs, Infinite Abelian Groups) and the CRT-based
summand-splitting engine.

Truncation conventions: family 1 and 3 use indices 1..N, family 2 uses
-N..N; a relation is kept only when every index it couples lies inside the
window, so truncations are well-defined subgroups.  Default prime
assignments take the smallest primes in a fixed documented order, making
all outputs reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import arith, linalg
from .arith import INF, Congruence, crt_solve, first_primes, mod_inverse, p_valuation
from .decomp import cd_iso_test, is_clipped, main_decomposition
from .groups import (
    DimensionMismatch,
    Group,
    GroupError,
    direct_sum,
    equal_subgroups,
)
from .linalg import RowSolver, Subspace, mat_mul_vec, primitive, unit_vec, vadd, vec, vscale
from .typesys import Characteristic

REPORT_SCHEMA = "tfab.report/1"


class BadConfig(GroupError):
    pass


class NotASummand(GroupError):
    pass


class NormalizationFailed(GroupError):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_jsonable(self):
        out = {"name": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    title: str
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_jsonable(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_jsonable() for c in self.checks],
        }


# ===========================================================================
# Example family 1:  G = A ⊕ B = C ⊕ D
# ===========================================================================

@dataclass(frozen=True)
class Example1Config:
    N: int
    p_list: tuple
    p: int
    q: int
    t: int
    s: int

    def __post_init__(self):
        if self.N < 2:
            raise BadConfig("window must have at least two indices")
        if len(self.p_list) != self.N:
            raise BadConfig("p_list must have one prime per index")
        primes = set(self.p_list) | {self.p, self.q}
        if len(primes) != self.N + 2:
            raise BadConfig("all primes must be distinct")
        for x in primes:
            if not arith.is_prime(x):
                raise BadConfig(f"{x} is not prime")
        if self.p * self.s - self.t * self.q != 1:
            raise BadConfig("p*s - t*q must equal 1")

    @classmethod
    def default(cls, N: int = 4):
        return cls(N, tuple(first_primes(N, exclude=(2, 3))), 2, 3, 1, 2)


@dataclass
class Example1Data:
    cfg: Example1Config
    G: Group
    A: Group
    B: Group
    C: Group
    D: Group


def build_example1(cfg: Example1Config) -> Example1Data:
    """Ambient Q^{2N}: coordinates a_1..a_N then b_1..b_N.  The four rank-N
    pieces use c_n = p a_n + t b_n and d_n = q a_n + s b_n; relations couple
    consecutive interior indices only."""
    N = cfg.N
    d = 2 * N

    def a(n):
        return unit_vec(d, n - 1)

    def b(n):
        return unit_vec(d, N + n - 1)

    chi = [Characteristic({cfg.p_list[n - 1]: INF}) for n in range(1, N + 1)]
    A = Group(d, [(a(n), chi[n - 1]) for n in range(1, N + 1)])
    B = Group(
        d,
        [(b(n), chi[n - 1]) for n in range(1, N + 1)],
        [
            (tuple(1 if i == n - 1 else -1 if i == n else 0 for i in range(N)), cfg.p * cfg.q)
            for n in range(1, N)
        ],
    )
    c_dirs = [vadd(vscale(cfg.p, a(n)), vscale(cfg.t, b(n))) for n in range(1, N + 1)]
    d_dirs = [vadd(vscale(cfg.q, a(n)), vscale(cfg.s, b(n))) for n in range(1, N + 1)]
    C = Group(
        d,
        [(c_dirs[n - 1], chi[n - 1]) for n in range(1, N + 1)],
        [
            (tuple(1 if i == n - 1 else -1 if i == n else 0 for i in range(N)), cfg.p)
            for n in range(1, N)
        ],
    )
    D = Group(
        d,
        [(d_dirs[n - 1], chi[n - 1]) for n in range(1, N + 1)],
        [
            (tuple(1 if i == n - 1 else -1 if i == n else 0 for i in range(N)), cfg.q)
            for n in range(1, N)
        ],
    )
    G = direct_sum(A, B)
    return Example1Data(cfg, G, A, B, C, D)


def verify_example1(cfg: Example1Config, bound: int = 3) -> VerificationReport:
    data = build_example1(cfg)
    N = cfg.N
    rep = VerificationReport(f"example-1 truncation N={N}")
    rep.add("config unimodular identity", cfg.p * cfg.s - cfg.t * cfg.q == 1)
    rep.add("rank bookkeeping", data.G.rank == 2 * N, f"rank {data.G.rank}")
    CD = direct_sum(data.C, data.D)
    rep.add(
        "interior equality A+B = C+D",
        equal_subgroups(data.G, CD),
    )
    d = 2 * N
    both = True
    for n in range(1, N + 1):
        an, bn = unit_vec(d, n - 1), unit_vec(d, N + n - 1)
        both &= CD.member(an) and CD.member(bn)
        cn = vadd(vscale(cfg.p, an), vscale(cfg.t, bn))
        dn = vadd(vscale(cfg.q, an), vscale(cfg.s, bn))
        both &= data.G.member(cn) and data.G.member(dn)
    rep.add("generator membership both directions", both)
    rep.add("A completely decomposable by construction", data.A.relations == ())
    for name, H in (("B", data.B), ("C", data.C), ("D", data.D)):
        cert = is_clipped(H, bound)
        rep.add(
            f"{name} clipped",
            cert.verdict == "ClippedWithinBound",
            f"bound {bound}, exhaustive={cert.exhaustive}",
        )
    r1 = main_decomposition(data.G, bound)
    r2 = main_decomposition(data.G, bound, seed=20240811)
    rep.add("two-run decomposable-part multiset equality", cd_iso_test(r1, r2))
    rep.add(
        "two-run complement rank equality",
        r1.complement_rank == r2.complement_rank == N,
        f"ranks {r1.complement_rank}, {r2.complement_rank}",
    )
    return rep


# ===========================================================================
# Example family 2:  G = B ⊕ C = ⊕ E_n, with a Main Decomposition
# ===========================================================================

@dataclass(frozen=True)
class Example2Config:
    N: int  # window is -N..N
    p: dict  # index -> prime
    q: dict  # relation index (-N..N-1) -> prime
    r: dict
    k: dict  # index -> integer

    def __post_init__(self):
        idx = list(range(-self.N, self.N + 1))
        rel = list(range(-self.N, self.N))
        for n in idx:
            if n not in self.p or n not in self.k:
                raise BadConfig(f"missing p or k at index {n}")
        for n in rel:
            if n not in self.q or n not in self.r:
                raise BadConfig(f"missing q or r at relation index {n}")
        primes = [self.p[n] for n in idx] + [self.q[n] for n in rel] + [self.r[n] for n in rel]
        if len(set(primes)) != len(primes):
            raise BadConfig("all primes must be distinct")
        for x in primes:
            if not arith.is_prime(x):
                raise BadConfig(f"{x} is not prime")

    @property
    def indices(self):
        return range(-self.N, self.N + 1)

    @property
    def rel_indices(self):
        return range(-self.N, self.N)

    @classmethod
    def default(cls, N: int = 4):
        """Smallest distinct primes in the documented order: p over the
        window ascending, then q over the relation window, then r; the k_n
        solve the congruences forced by membership of the E-block relation
        generators (k ≡ 0 mod q_n, ≡ 1 mod q_{n-1}, ≡ -1 mod r_n, ≡ 0 mod
        r_{n-1}, boundary factors dropped)."""
        idx = list(range(-N, N + 1))
        rel = list(range(-N, N))
        need = len(idx) + 2 * len(rel)
        ps = first_primes(need)
        p = {n: ps[i] for i, n in enumerate(idx)}
        q = {n: ps[len(idx) + i] for i, n in enumerate(rel)}
        r = {n: ps[len(idx) + len(rel) + i] for i, n in enumerate(rel)}
        k = {}
        for n in idx:
            cons = []
            if n in q:
                cons.append(Congruence(0, q[n]))
                cons.append(Congruence(-1, r[n]))
            if n - 1 in q:
                cons.append(Congruence(1, q[n - 1]))
                cons.append(Congruence(0, r[n - 1]))
            k[n] = crt_solve(cons).residue if cons else 0
        return cls(N, p, q, r, k)


@dataclass
class Example2Data:
    cfg: Example2Config
    G: Group
    B: Group
    C: Group
    E_blocks: dict  # n -> Group

    def b(self, n):
        N = self.cfg.N
        return unit_vec(2 * (2 * N + 1), n + N)

    def c(self, n):
        N = self.cfg.N
        return unit_vec(2 * (2 * N + 1), (2 * N + 1) + n + N)

    def u(self, n):
        k = self.cfg.k[n]
        return vadd(vscale(1 + k, self.b(n)), vscale(-k, self.c(n)))

    def v(self, n):
        k = self.cfg.k[n]
        return vadd(vscale(k, self.b(n)), vscale(1 - k, self.c(n)))


def build_example2(cfg: Example2Config) -> Example2Data:
    """Ambient Q^{2(2N+1)}: coordinates b_{-N}..b_N then c_{-N}..c_N.
    u_n = (1+k_n) b_n - k_n c_n and v_n = k_n b_n + (1-k_n) c_n (the change
    of basis per index is unimodular)."""
    N = cfg.N
    d = 2 * (2 * N + 1)
    idx = list(cfg.indices)
    chi = {n: Characteristic({cfg.p[n]: INF}) for n in idx}

    def pos(n):
        return n + N

    B = Group(
        d,
        [(unit_vec(d, pos(n)), chi[n]) for n in idx],
        [
            (
                tuple(1 if i == pos(n) or i == pos(n + 1) else 0 for i in range(2 * N + 1)),
                cfg.q[n],
            )
            for n in cfg.rel_indices
        ],
    )
    C = Group(
        d,
        [(unit_vec(d, (2 * N + 1) + pos(n)), chi[n]) for n in idx],
        [
            (
                tuple(1 if i == pos(n) or i == pos(n + 1) else 0 for i in range(2 * N + 1)),
                cfg.r[n],
            )
            for n in cfg.rel_indices
        ],
    )
    G = direct_sum(B, C)
    data = Example2Data(cfg, G, B, C, {})
    for n in cfg.rel_indices:
        u_n, v_n1 = data.u(n), data.v(n + 1)
        E = Group(
            d,
            [(u_n, chi[n]), (v_n1, chi[n + 1])],
            [((1, 1), cfg.q[n] * cfg.r[n])],
        )
        data.E_blocks[n] = E
    return data


@dataclass
class Example2MainDecomposition:
    data: Example2Data
    alpha: dict
    t_dirs: dict
    z_dirs: dict
    z_lines: list
    H: Group
    report: VerificationReport


def example2_main_decomposition(cfg: Example2Config) -> Example2MainDecomposition:
    """Main Decomposition of the truncated group: divisible lines through
    z_n plus the chain block on the t_n.

    alpha_n is the least non-negative CRT solution of alpha ≡ 0 mod
    q_{n-1} q_n and alpha ≡ -1 mod r_{n-1} r_n (boundary factors dropped);
    t_n = (1+alpha_n) b_n - alpha_n c_n and z_n = alpha_n b_n +
    (1-alpha_n) c_n, so each per-index change of basis has determinant 1
    and the assembled sum reproduces the group exactly.
    """
    data = build_example2(cfg)
    G = data.G
    N = cfg.N
    rep = VerificationReport(f"example-2 main decomposition N={N}")
    alpha = {}
    for n in cfg.indices:
        cons = []
        if n in cfg.q:
            cons.append(Congruence(0, cfg.q[n]))
            cons.append(Congruence(-1, cfg.r[n]))
        if n - 1 in cfg.q:
            cons.append(Congruence(0, cfg.q[n - 1]))
            cons.append(Congruence(-1, cfg.r[n - 1]))
        alpha[n] = crt_solve(cons).residue if cons else 0
    ok = True
    for n in cfg.indices:
        for j in (n, n - 1):
            if j in cfg.q:
                ok &= alpha[n] % cfg.q[j] == 0
                ok &= (alpha[n] + 1) % cfg.r[j] == 0
    rep.add("alpha congruences exact", ok)
    t_dirs = {
        n: vadd(vscale(1 + alpha[n], data.b(n)), vscale(-alpha[n], data.c(n)))
        for n in cfg.indices
    }
    z_dirs = {
        n: vadd(vscale(alpha[n], data.b(n)), vscale(1 - alpha[n], data.c(n)))
        for n in cfg.indices
    }
    okq = okr = okm = True
    for n in cfg.rel_indices:
        tsum = vadd(t_dirs[n], t_dirs[n + 1])
        bsum = vadd(data.b(n), data.b(n + 1))
        csum = vadd(data.c(n), data.c(n + 1))
        okq &= all((x - y) % cfg.q[n] == 0 for x, y in zip(tsum, bsum))
        okr &= all((x - y) % cfg.r[n] == 0 for x, y in zip(tsum, csum))
        okm &= G.member(vscale(Fraction(1, cfg.q[n] * cfg.r[n]), tsum))
    rep.add("t-chain congruent to b-chain mod q", okq)
    rep.add("t-chain congruent to c-chain mod r", okr)
    rep.add("(t_n + t_n+1)/(q_n r_n) membership", okm)
    d = G.ambient_dim
    z_lines = [
        Group(d, [(z_dirs[n], Characteristic({cfg.p[n]: INF}))]) for n in cfg.indices
    ]
    idx = list(cfg.indices)
    H = Group(
        d,
        [(t_dirs[n], Characteristic({cfg.p[n]: INF})) for n in idx],
        [
            (
                tuple(1 if idx[i] in (n, n + 1) else 0 for i in range(len(idx))),
                cfg.q[n] * cfg.r[n],
            )
            for n in cfg.rel_indices
        ],
    )
    assembled = direct_sum(*z_lines, H)
    rep.add("ranks add up", assembled.rank == G.rank == 2 * (2 * N + 1))
    rep.add("assembled decomposition equals the group", equal_subgroups(assembled, G))
    okE = True
    for n in cfg.rel_indices:
        gen = vscale(Fraction(1, cfg.q[n] * cfg.r[n]), vadd(data.u(n), data.v(n + 1)))
        okE &= G.member(gen)
    rep.add("E-block relation generators lie in the group", okE)
    return Example2MainDecomposition(data, alpha, t_dirs, z_dirs, z_lines, H, rep)


def verify_example2(cfg: Example2Config) -> VerificationReport:
    return example2_main_decomposition(cfg).report


# ===========================================================================
# Example family 3 and the summand-splitting engine
# ===========================================================================

@dataclass(frozen=True)
class Example3Config:
    N: int
    p: int
    p_list: tuple
    q_list: tuple

    def __post_init__(self):
        primes = [self.p, *self.p_list, *self.q_list]
        if len(self.p_list) != self.N or len(self.q_list) != self.N:
            raise BadConfig("need one p_n and one q_n per block")
        if len(set(primes)) != len(primes):
            raise BadConfig("all primes must be distinct")
        for x in primes:
            if not arith.is_prime(x):
                raise BadConfig(f"{x} is not prime")

    @classmethod
    def default(cls, N: int = 4):
        ps = first_primes(2 * N + 1)
        return cls(N, ps[0], tuple(ps[1 : N + 1]), tuple(ps[N + 1 :]))


@dataclass(frozen=True)
class Example3Summand:
    """Presentation data of a summand: its index set, p-divisible part,
    the divisible-part vectors w_n coupled to each x_n, their coordinates
    over the chosen divisible basis, and the fiber ranks."""

    p: int
    S: tuple
    divisible_basis: tuple  # ambient vectors v_0..v_K-1
    w: dict  # n -> ambient vector in the divisible part's span
    beta: dict  # n -> tuple of Fractions over the divisible basis
    k_map: dict  # n -> top support index

    def census_ok(self, lab: "Example3Lab") -> bool:
        """Every n has a non-zero u_n-coefficient somewhere in
        v_0..v_{k_n} (the finiteness argument for the fiber ranks)."""
        for n in self.S:
            kn = self.k_map[n]
            if not any(
                self.divisible_basis[i][lab.u_pos(n)] != 0 for i in range(kn + 1)
            ):
                return False
        return True


@dataclass
class SplitPlan:
    """The data of one splitting step: the chosen divisible generator, the
    inert index set T, the inverses alpha_n, and the retraction phi."""

    v0: tuple
    T: tuple
    alpha: dict  # n -> multiplicative inverse of beta_{n,0} mod q_n
    lam: dict  # basis index k -> multiplier of v_0 under phi
    block: Group
    summand: Example3Summand

    def to_jsonable(self) -> dict:
        return {
            "v0": [str(x) for x in self.v0],
            "T": list(self.T),
            "alpha": {str(n): a for n, a in self.alpha.items()},
            "phi_multipliers": {str(k): str(v) for k, v in self.lam.items()},
            "block_rank": self.block.rank,
        }


class Example3Lab:
    """A built truncation G = ⊕_{n<=N} B_n with the splitting engine."""

    def __init__(self, cfg: Example3Config):
        self.cfg = cfg
        N = cfg.N
        d = 2 * N
        self.ambient_dim = d
        blocks = []
        for n in range(1, N + 1):
            chi_u = Characteristic({cfg.p: INF})
            chi_x = Characteristic({cfg.p_list[n - 1]: INF})
            blocks.append(
                Group(
                    d,
                    [(self.u_vec(n), chi_u), (self.x_vec(n), chi_x)],
                    [((1, 1), cfg.q_list[n - 1])],
                )
            )
        self.blocks = blocks
        self.G = direct_sum(*blocks)

    # ambient layout: u_n at 2(n-1), x_n at 2(n-1)+1
    def u_pos(self, n: int) -> int:
        return 2 * (n - 1)

    def x_pos(self, n: int) -> int:
        return 2 * (n - 1) + 1

    def u_vec(self, n: int):
        return unit_vec(self.ambient_dim, self.u_pos(n))

    def x_vec(self, n: int):
        return unit_vec(self.ambient_dim, self.x_pos(n))

    def q_of(self, n: int) -> int:
        return self.cfg.q_list[n - 1]

    # -- summand inspection -------------------------------------------------

    def index_set(self, H: Group) -> tuple:
        span = H.span
        return tuple(
            n for n in range(1, self.cfg.N + 1) if span.contains(self.x_vec(n))
        )

    def verify_summand(self, H: Group, complement: Group) -> bool:
        return equal_subgroups(direct_sum(H, complement), self.G)

    def eq2_data(self, H: Group) -> Example3Summand:
        """Bring a summand to its canonical shape: divisible part basis,
        index set S, and for each n in S a w_n in the divisible part with
        (w_n + x_n)/q_n inside the summand."""
        S = self.index_set(H)
        Hp = H.p_divisible_part(self.cfg.p)
        basis = tuple(vec(v) for v in Hp.directions)
        w = {}
        beta = {}
        k_map = {}
        for n in S:
            wn = self._solve_w(H, basis, n)
            if wn is None:
                raise NotASummand(
                    f"no divisible-part partner for x_{n}: not in canonical shape"
                )
            w[n] = wn
        summand = Example3Summand(self.cfg.p, S, basis, w, beta, k_map)
        return summand

    def _solve_w(self, H: Group, basis, n: int):
        """Integer-coefficient w in span(basis) with (w + x_n)/q_n in H."""
        qn = self.q_of(n)
        K = len(basis)
        if K == 0:
            return None
        hc = [H.coords(b) for b in basis]
        xc = H.coords(self.x_vec(n))
        if xc is None:
            return None
        J, pe, finite_rows, bound, gcol, _ = H._local_info(qn)
        rho = len(J)
        forms = []
        for i in finite_rows:
            coeffs = [Fraction(hc[k][i], qn) for k in range(K)]
            coeffs += [
                Fraction(-H.relations[j][0][i], H.relations[j][1]) for j in J
            ]
            forms.append(
                arith.FormConstraint(
                    tuple(coeffs), Fraction(xc[i], qn), qn, -bound[i]
                )
            )
        sol = arith.valuation_solution_lattice(K + rho, {}, forms)
        if sol is None:
            return None
        y = sol[0][:K]
        return mat_mul_vec([vec(b) for b in basis], vec(y))

    # -- normalization and basis completion -----------------------------------

    def _normalize_v0(self, basis, target):
        """Scale target to a primitive generator of its line in the
        Z[1/p]-module spanned by the divisible basis."""
        solver = RowSolver([vec(b) for b in basis])
        y = solver.solve(vec(target))
        if y is None or all(v == 0 for v in y):
            raise NormalizationFailed("vector outside the divisible part")
        p = self.cfg.p
        # clear p so that some coordinate is a p-unit, then divide content
        minv = min(p_valuation(v, p) for v in y if v)
        y = [v / Fraction(p) ** minv for v in y]
        den = 1
        for v in y:
            den = den * v.denominator // math.gcd(den, v.denominator)
        ints = [int(v * den) for v in y]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        ints = [v // g for v in ints]
        lead = next(v for v in ints if v)
        if lead < 0:
            ints = [-v for v in ints]
        return tuple(ints)

    def _complete_basis(self, y0: tuple):
        """Integer unimodular matrix whose first row is the primitive y0."""
        K = len(y0)
        rows = [(v,) for v in y0]
        H, piv, U = arith.hnf(rows, transform=True)
        if not H or H[0][0] != 1:
            raise NormalizationFailed("generator is not primitive")
        # U · y0^T = e_1, so y0 is the first column of U^{-1}; transpose it.
        from .groups import _fraction_inverse

        inv = _fraction_inverse([list(map(Fraction, r)) for r in U])
        B = [tuple(int(inv[i][j]) for i in range(K)) for j in range(K)]
        assert B[0] == tuple(y0)
        return B

    # -- the splitting step ----------------------------------------------------

    def analyze_summand(self, H: Group, m: int | None = None, v0=None) -> SplitPlan:
        """One step of the splitting algorithm on a verified summand H.

        Chooses v_0 (the normalized partner w_m of the least index by
        default, or a caller-supplied divisible vector), completes it to a
        basis of the divisible part, reads off the fiber data, solves the
        retraction congruences by CRT stage by stage (falling back to a
        joint lattice solve when a top coefficient is not invertible), and
        returns the verified plan with its block."""
        summand = self.eq2_data(H)
        S = summand.S
        basis = summand.divisible_basis
        if not basis:
            raise NotASummand("summand has trivial divisible part")
        if v0 is None:
            if m is None:
                if not S:
                    raise NotASummand("no coupled indices to split along")
                m = S[0]
            if m not in S:
                raise NotASummand(f"index {m} is not coupled in this summand")
            target = summand.w[m]
        else:
            target = vec(v0)
        y0 = self._normalize_v0(basis, target)
        B_rows = self._complete_basis(y0)
        vbasis = [mat_mul_vec([vec(b) for b in basis], vec(r)) for r in B_rows]
        K = len(vbasis)
        vb_solver = RowSolver(vbasis)
        beta = {}
        k_map = {}
        for n in S:
            coords = vb_solver.solve(vec(summand.w[n]))
            beta[n] = tuple(coords)
            top = max((i for i in range(K) if coords[i] != 0), default=0)
            k_map[n] = top
        summand = Example3Summand(
            self.cfg.p, S, tuple(tuple(v) for v in vbasis), summand.w, beta, k_map
        )
        T = tuple(n for n in S if k_map[n] == 0)
        if m is not None and v0 is None and m not in T:
            raise NormalizationFailed(f"chosen index {m} did not land in the inert set")
        p = self.cfg.p
        alpha = {}
        for n in T:
            b0 = beta[n][0]
            red = _reduce_zp(b0, p, self.q_of(n))
            alpha[n] = mod_inverse(red, self.q_of(n))
        # retraction multipliers lambda_k (lambda_0 = 1)
        lam = {0: Fraction(1)}
        pending = {n: None for n in S if n not in T}
        for k in range(1, K):
            cons = []
            fallback = False
            for n in S:
                if n in T or k_map[n] != k:
                    continue
                qn = self.q_of(n)
                rhs = -sum(
                    (_signed_reduce(beta[n][i] * lam[i], p, qn) for i in range(k)),
                    0,
                )
                top = _reduce_zp(beta[n][k], p, qn)
                if top % qn == 0:
                    fallback = True
                    break
                cons.append(Congruence(rhs * mod_inverse(top, qn), qn))
            if fallback:
                lam = self._joint_lambda_solve(summand, beta, k_map, T, K)
                break
            lam[k] = Fraction(crt_solve(cons).residue) if cons else Fraction(0)
        block = self._block_group(y0, vbasis, T, alpha)
        plan = SplitPlan(tuple(vbasis[0]), T, alpha, lam, block, summand)
        self._verify_plan(H, plan, vbasis)
        return plan

    def _joint_lambda_solve(self, summand, beta, k_map, T, K):
        """Solve all retraction congruences jointly over the integers."""
        p = self.cfg.p
        cols, mods, rhs = [], [], []
        for n in summand.S:
            if n in T:
                continue
            qn = self.q_of(n)
            row = [
                _reduce_zp(beta[n][i], p, qn) if i < len(beta[n]) else 0
                for i in range(1, K)
            ]
            cols.append(tuple(row))
            mods.append(qn)
            rhs.append((-_reduce_zp(beta[n][0], p, qn)) % qn)
        sol = arith.congruence_solve(cols, mods, rhs, K - 1)
        if sol is None:
            raise NormalizationFailed("retraction congruences are infeasible")
        part, hom = sol
        part = arith.coset_reduce_trailing(part, hom)
        lam = {0: Fraction(1)}
        for k in range(1, K):
            lam[k] = Fraction(part[k - 1])
        return lam

    def _block_group(self, y0, vbasis, T, alpha) -> Group:
        d = self.ambient_dim
        base = [(vbasis[0], Characteristic({self.cfg.p: INF}))]
        for n in T:
            base.append(
                (self.x_vec(n), Characteristic({self.cfg.p_list[n - 1]: INF}))
            )
        rels = []
        for idx, n in enumerate(T):
            w = [0] * (1 + len(T))
            w[0] = 1
            w[1 + idx] = alpha[n]
            rels.append((tuple(w), self.q_of(n)))
        return Group(d, base, rels)

    def _phi_apply(self, plan: SplitPlan, vbasis, H: Group):
        """The retraction as a function on span(H)."""
        S = plan.summand.S
        rows = list(vbasis) + [self.x_vec(n) for n in S]
        solver = RowSolver(rows)
        K = len(vbasis)
        images = [vscale(plan.lam[k], vec(plan.v0)) for k in range(K)]
        for n in S:
            images.append(self.x_vec(n) if n in plan.T else vec([0] * self.ambient_dim))

        def phi(y):
            t = solver.solve(vec(y))
            if t is None:
                raise NotASummand("element outside the summand's span")
            out = vec([0] * self.ambient_dim)
            for c, img in zip(t, images):
                if c:
                    out = vadd(out, vscale(c, img))
            return out

        return phi, rows, images

    def _verify_plan(self, H: Group, plan: SplitPlan, vbasis):
        B = plan.block
        phi, rows, images = self._phi_apply(plan, vbasis, H)
        # identity on the block
        if phi(vec(plan.v0)) != vec(plan.v0):
            raise NormalizationFailed("retraction does not fix the divisible generator")
        for n in plan.T:
            if phi(self.x_vec(n)) != self.x_vec(n):
                raise NormalizationFailed("retraction does not fix an inert coordinate")
        # generator images land in the block: divisible lines and relations
        for k in range(len(vbasis)):
            img = images[k]
            if any(img):
                if not B.member(img):
                    raise NormalizationFailed("a divisible image leaves the block")
                if not B.w_span(self.cfg.p).contains(img):
                    raise NormalizationFailed("a divisible image is not p-divisible")
        for n in plan.summand.S:
            gen = vscale(
                Fraction(1, self.q_of(n)), vadd(vec(plan.summand.w[n]), self.x_vec(n))
            )
            if not B.member(phi(gen)):
                raise NormalizationFailed(
                    f"(w_{n} + x_{n}) phi is not divisible by q_{n} in the block"
                )

    def kernel_of_plan(self, H: Group, plan: SplitPlan) -> Group:
        vbasis = [vec(v) for v in plan.summand.divisible_basis]
        phi, rows, images = self._phi_apply(plan, vbasis, H)
        # kernel of phi on span(H): solve in the (rows) coordinates
        K = len(vbasis)
        S = plan.summand.S
        ncols = len(rows)
        # phi(sum t_i row_i) = (sum_k t_k lam_k) v0 + sum_{n in T} t_n x_n
        # kernel: sum_k t_k lam_k = 0 and t_n = 0 for n in T
        lam_row = [plan.lam[k] for k in range(K)] + [
            Fraction(0) for _ in range(len(S))
        ]
        constraints = [lam_row]
        for off, n in enumerate(S):
            if n in plan.T:
                row = [Fraction(0)] * ncols
                row[K + off] = Fraction(1)
                constraints.append(row)
        kernel_coords = linalg.kernel([tuple(c) for c in zip(*constraints)])
        elements = [mat_mul_vec(rows, vec(t)) for t in kernel_coords]
        if not elements:
            return Group.zero(self.ambient_dim)
        return H.purify(elements)

    def split_off(self, H: Group, m: int | None = None, v0=None):
        plan = self.analyze_summand(H, m=m, v0=v0)
        Kg = self.kernel_of_plan(H, plan)
        if not equal_subgroups(direct_sum(plan.block, Kg) if Kg.rank else plan.block, H):
            raise NotASummand("block plus kernel fails to reassemble the summand")
        return plan, Kg

    def decompose_fully(self, H: Group):
        """Iterate the splitting step over the coupled indices in ascending
        order, then split the leftover inside the homogeneous divisible part
        into rank-one lines."""
        plans = []
        current = H
        guard = len(self.index_set(H)) + self.G.rank + 1
        while self.index_set(current):
            plan, current = self.split_off(current, m=self.index_set(current)[0])
            plans.append(plan)
            guard -= 1
            if guard < 0:
                raise NotASummand("splitting loop failed to terminate")
        lines = []
        if current.rank:
            if current.relations:
                raise NotASummand("leftover part is not completely decomposable")
            for v, c in zip(current.directions, current.chars):
                lines.append(Group(self.ambient_dim, [(v, c)]))
        parts = [p.block for p in plans] + lines
        assembled = direct_sum(*parts) if parts else Group.zero(self.ambient_dim)
        if not equal_subgroups(assembled, H):
            raise NotASummand("full decomposition fails to reassemble the summand")
        return plans, lines

    # -- random verified summands ------------------------------------------------

    def random_summand(self, rng: random.Random):
        """A verified summand: the image of a sub-sum of blocks under a
        verified relation-preserving automorphism of the whole group."""
        N = self.cfg.N
        J = sorted(rng.sample(range(1, N + 1), rng.randrange(1, N)))
        rows = [unit_vec(self.ambient_dim, i) for i in range(self.ambient_dim)]
        for _ in range(rng.randrange(1, 3)):
            i, j = rng.sample(range(1, N + 1), 2)
            c = self.q_of(i) * rng.choice([1, -1]) * rng.choice([1, self.cfg.p])
            rows = [
                vadd(r, vscale(Fraction(c) * r[self.u_pos(i)], self.u_vec(j)))
                if r[self.u_pos(i)]
                else r
                for r in rows
            ]
        G2 = self.G.transformed(rows)
        if not equal_subgroups(self.G, G2):
            return None
        Hsub = direct_sum(*[self.blocks[n - 1] for n in J])
        comp = [self.blocks[n - 1] for n in range(1, N + 1) if n not in J]
        H = Hsub.transformed(rows)
        Hc = direct_sum(*comp).transformed(rows) if comp else Group.zero(self.ambient_dim)
        if comp:
            if not self.verify_summand(H, Hc):
                return None
        else:
            if not equal_subgroups(H, self.G):
                return None
        return H, Hc


def build_example3(cfg: Example3Config) -> Example3Lab:
    return Example3Lab(cfg)


def verify_example3(cfg: Example3Config, bound: int = 3) -> VerificationReport:
    lab = build_example3(cfg)
    rep = VerificationReport(f"example-3 truncation N={cfg.N}")
    rep.add("rank bookkeeping", lab.G.rank == 2 * cfg.N)
    ok = all(
        lab.G.member(vscale(Fraction(1, lab.q_of(n)), vadd(lab.u_vec(n), lab.x_vec(n))))
        for n in range(1, cfg.N + 1)
    )
    rep.add("block relation generators lie in the group", ok)
    pdiv = lab.G.p_divisible_part(cfg.p)
    expected = Group(
        lab.ambient_dim,
        [(lab.u_vec(n), Characteristic({cfg.p: INF})) for n in range(1, cfg.N + 1)],
    )
    rep.add("global p-divisible part is the u-span", equal_subgroups(pdiv, expected))
    per_block = all(
        equal_subgroups(
            lab.blocks[n - 1].p_divisible_part(cfg.p),
            Group(lab.ambient_dim, [(lab.u_vec(n), Characteristic({cfg.p: INF}))]),
        )
        for n in range(1, cfg.N + 1)
    )
    rep.add("per-block p-divisible part is the u-line", per_block)
    plans, lines = lab.decompose_fully(lab.G)
    rep.add(
        "full split of the whole group into blocks",
        sum(p.block.rank for p in plans) + len(lines) == lab.G.rank,
        f"{len(plans)} blocks, {len(lines)} lines",
    )
    census = all(p.summand.census_ok(lab) for p in plans)
    rep.add("fiber census", census)
    return rep


def _reduce_zp(x: Fraction, p: int, q: int) -> int:
    """Reduce an element of Z[1/p] modulo q (p is invertible mod q)."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    return (num * mod_inverse(den % q, q)) % q


def _signed_reduce(x: Fraction, p: int, q: int) -> int:
    return _reduce_zp(x, p, q)
