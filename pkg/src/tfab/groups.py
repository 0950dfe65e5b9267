"""Group presentations and their exact decision procedures.

A group is presented inside an ambient Q^d by

    G  =  sum_i D_{chi_i} * v_i  +  sum_j Z * (w_j / m_j)

where the v_i are linearly independent directions, chi_i are finite-support
characteristics (D_chi is the ring of rationals whose denominators obey
chi), and each relation contributes the fractional generator
(sum_i w_{ji} v_i) / m_j with integer w_j and m_j >= 2.  The subgroup
A = sum_i D_{chi_i} v_i is completely decomposable and G/A is finite of
exponent dividing lcm(m_j): every group here is a finite essential
extension of a completely decomposable group.

Elements are ambient rational vectors, so membership, subgroup equality
and sums work across presentations sharing an ambient.  All operations
are pure; Group values are immutable after construction and safe to share
between concurrent workers.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from . import arith, linalg
from .arith import INF, FormConstraint, factorint, fraction_primes, p_valuation
from .linalg import Subspace, is_zero, primitive, vec, vscale, vsub
from .typesys import Characteristic, TypeClass, type_of_char


class GroupError(Exception):
    pass


class NotFullRank(GroupError):
    pass


class BadRelation(GroupError):
    pass


class DimensionMismatch(GroupError):
    pass


class ZeroElement(GroupError):
    pass


class NotMember(GroupError):
    pass


class EmptySpan(GroupError):
    pass


class NotRepresentable(GroupError):
    """The pure closure leaves the representation class (no basis of the
    span is adapted to every p-divisible subspace)."""


def _canonical_base_pair(direction, char: Characteristic):
    v = vec(direction)
    if is_zero(v):
        raise NotFullRank("zero base direction")
    u = primitive(v)
    j = next(i for i, x in enumerate(u) if x)
    s = abs(Fraction(v[j], u[j]))
    newchar = char
    residual = Fraction(1)
    for p in sorted(fraction_primes(s)):
        k = p_valuation(s, p)
        e = newchar.value_at(p)
        if e is INF:
            continue
        if e + k >= 0:
            newchar = newchar.shifted(p, k)
        else:
            newchar = newchar.shifted(p, -e)
            residual *= Fraction(p) ** (k + e)
    return vscale(residual, vec(u)), newchar


class Group:
    """A validated, canonicalized group presentation."""

    def __init__(self, ambient_dim: int, base=(), relations=()):
        if ambient_dim < 0:
            raise GroupError("ambient dimension must be >= 0")
        self.ambient_dim = ambient_dim
        raw_dirs = [vec(v) for v, _ in base]
        for v in raw_dirs:
            if len(v) != ambient_dim:
                raise DimensionMismatch("direction length != ambient dimension")
        pairs = [_canonical_base_pair(v, c) for v, c in base]
        order = sorted(
            range(len(pairs)),
            key=lambda i: (
                next((j for j, x in enumerate(pairs[i][0]) if x), ambient_dim),
                pairs[i][0],
                pairs[i][1]._items,
            ),
        )
        pairs = [pairs[i] for i in order]
        self.directions = tuple(p[0] for p in pairs)
        self.chars = tuple(p[1] for p in pairs)
        self.rank = len(pairs)
        if self.rank and linalg.rank(self.directions) != self.rank:
            raise NotFullRank("base directions are linearly dependent")
        self._solver = linalg.RowSolver(self.directions) if self.rank else None
        # Relations are given over the *input* base order; convert each to
        # its ambient generator, then re-coordinatize over the canonical
        # directions (which may be rescaled, negated, or reordered).
        rels = []
        for w, m in relations:
            w = tuple(int(x) for x in w)
            if len(w) != len(raw_dirs):
                raise BadRelation("relation length != rank")
            if not any(w):
                raise BadRelation("zero relation vector")
            if m < 1:
                raise BadRelation(f"modulus must be >= 1, got {m}")
            gen = tuple(
                sum((Fraction(w[i], m) * raw_dirs[i][k] for i in range(len(raw_dirs))), Fraction(0))
                for k in range(ambient_dim)
            )
            t = self.coords(gen)
            if t is None:
                raise BadRelation("relation generator outside the base span")
            den = 1
            for ti in t:
                den = den * ti.denominator // math.gcd(den, ti.denominator)
            if den > 1:
                rels.append((tuple(int(ti * den) for ti in t), den))
        self.relations = tuple(self._canonical_relations(rels))
        universe = set()
        for c in self.chars:
            universe.update(c.support)
        for _, m in self.relations:
            universe.update(factorint(m))
        for v in self.directions:
            for x in v:
                universe.update(factorint(Fraction(x).denominator))
        self.prime_universe = frozenset(universe)
        self.relation_primes = frozenset(
            p for _, m in self.relations for p in factorint(m)
        )
        self._wspan_cache: dict[int, Subspace] = {}
        self._local_cache: dict[int, tuple] = {}
        self._char_cache: dict[tuple, Characteristic] = {}

    # -- canonicalization ---------------------------------------------------

    def _strip_absorbed(self, w, m):
        """Replace the relation generator by one in the same coset modulo
        the decomposable base: denominator parts the characteristics absorb
        (INF primes, or finite entries at least the needed exponent) are
        split off coordinate-wise, minimizing the modulus."""
        new_t = []
        for i in range(self.rank):
            t = Fraction(w[i], m)
            if t == 0:
                new_t.append(Fraction(0))
                continue
            den = t.denominator
            keep = 1
            for p, e in factorint(den).items():
                chi = self.chars[i].value_at(p)
                if chi is INF or chi >= e:
                    continue  # absorbed entirely by the base
                keep *= p ** e  # partial absorption is impossible; keep whole
            if keep == 1:
                new_t.append(Fraction(0))
                continue
            rest = den // keep
            c = (t.numerator * arith.mod_inverse(rest % keep, keep)) % keep
            new_t.append(Fraction(c, keep))
        m2 = 1
        for t in new_t:
            m2 = m2 * t.denominator // math.gcd(m2, t.denominator)
        if m2 == 1:
            return None
        return tuple(int(t * m2) for t in new_t), m2

    def _canonical_relations(self, rels):
        out = set()
        for w, m in rels:
            stripped = self._strip_absorbed(w, m)
            if stripped is None:
                continue
            w, m = stripped
            while True:
                w = tuple(x % m for x in w) if m > 1 else w
                if m == 1 or not any(w):
                    w = None
                    break
                g = m
                for x in w:
                    g = math.gcd(g, x)
                if g == 1:
                    break
                w = tuple(x // g for x in w)
                m //= g
            if w is None:
                continue
            out.add((w, m))
        return sorted(out, key=lambda wm: (wm[1], wm[0]))

    # -- basic views --------------------------------------------------------

    @property
    def span(self) -> Subspace:
        return Subspace(self.ambient_dim, self.directions)

    def w_span(self, p: int) -> Subspace:
        """Rational span of the directions with exponent INF at p."""
        if p not in self._wspan_cache:
            self._wspan_cache[p] = Subspace(
                self.ambient_dim,
                [v for v, c in zip(self.directions, self.chars) if c.value_at(p) is INF],
            )
        return self._wspan_cache[p]

    @property
    def inf_primes(self) -> frozenset:
        return frozenset(p for c in self.chars for p in c.inf_primes)

    def relation_gen(self, j: int):
        w, m = self.relations[j]
        return tuple(
            sum((Fraction(w[i], m) * self.directions[i][k] for i in range(self.rank)), Fraction(0))
            for k in range(self.ambient_dim)
        )

    def element(self, coords):
        """Ambient vector of a coordinate combination over the directions."""
        return linalg.mat_mul_vec(self.directions, vec(coords))

    def coords(self, x):
        if self.rank == 0:
            return () if is_zero(vec(x)) else None
        return self._solver.solve(vec(x))

    @classmethod
    def standard(cls, chars, relations=()):
        n = len(chars)
        base = [(linalg.unit_vec(n, i), c) for i, c in enumerate(chars)]
        return cls(n, base, relations)

    @classmethod
    def zero(cls, ambient_dim: int):
        return cls(ambient_dim, (), ())

    def __repr__(self):
        return (
            f"Group(ambient={self.ambient_dim}, rank={self.rank}, "
            f"chars=[{', '.join(str(c) for c in self.chars)}], "
            f"relations={list(self.relations)})"
        )

    # -- membership ---------------------------------------------------------

    def _local_info(self, p: int):
        if p in self._local_cache:
            return self._local_cache[p]
        J = [j for j, (_, m) in enumerate(self.relations) if m % p == 0]
        pe = {j: p ** p_valuation(Fraction(self.relations[j][1]), p) for j in J}
        finite_rows = [i for i in range(self.rank) if self.chars[i].value_at(p) is not INF]
        bound = {i: self.chars[i].value_at(p) for i in finite_rows}
        gcol = {
            j: [Fraction(self.relations[j][0][i], self.relations[j][1]) for i in finite_rows]
            for j in J
        }
        last = {}
        for r, i in enumerate(finite_rows):
            lt = -1
            for k, j in enumerate(J):
                if gcol[j][r]:
                    lt = k
            last[r] = lt
        info = (J, pe, finite_rows, bound, gcol, last)
        self._local_cache[p] = info
        return info

    def _member_local(self, t, p: int) -> bool:
        J, pe, finite_rows, bound, gcol, last = self._local_info(p)

        def ok(i, val) -> bool:
            return val == 0 or p_valuation(val, p) >= -bound[i]

        cur = [Fraction(t[i]) for i in finite_rows]
        for r in range(len(finite_rows)):
            if last[r] == -1 and not ok(finite_rows[r], cur[r]):
                return False
        if not J:
            return True

        def rec(k, values) -> bool:
            if k == len(J):
                return True
            j = J[k]
            col = gcol[j]
            for c in range(pe[j]):
                nxt = [values[r] - c * col[r] for r in range(len(values))]
                good = True
                for r in range(len(finite_rows)):
                    if last[r] == k and not ok(finite_rows[r], nxt[r]):
                        good = False
                        break
                if good and rec(k + 1, nxt):
                    return True
            return False

        return rec(0, cur)

    def member(self, x) -> bool:
        """Exact membership by per-prime residue search with early pruning."""
        x = vec(x)
        if len(x) != self.ambient_dim:
            raise DimensionMismatch("element has wrong ambient dimension")
        if self.rank == 0:
            return is_zero(x)
        t = self.coords(x)
        if t is None:
            return False
        relevant = set(self.relation_primes)
        for ti in t:
            relevant.update(factorint(Fraction(ti).denominator))
        return all(self._member_local(t, p) for p in sorted(relevant))

    def member_bruteforce(self, x, budget: int) -> bool:
        """Differential-testing oracle: integer-lattice membership with all
        prime exponents capped at `budget`.

        Sound and complete whenever the witness fits the budget; may return
        false negatives above it.
        """
        x = vec(x)
        if len(x) != self.ambient_dim:
            raise DimensionMismatch("element has wrong ambient dimension")
        if self.rank == 0:
            return is_zero(x)
        rows = []
        for v, c in zip(self.directions, self.chars):
            den = 1
            for p in c.support:
                e = c.value_at(p)
                den *= p ** (budget if e is INF else min(e, budget))
            rows.append(tuple(Fraction(xx, den) for xx in v))
        for j in range(len(self.relations)):
            rows.append(self.relation_gen(j))
        D = 1
        for row in rows:
            for e in row:
                D = D * e.denominator // math.gcd(D, e.denominator)
        for e in x:
            D = D * e.denominator // math.gcd(D, e.denominator)
        int_rows = [tuple(int(e * D) for e in row) for row in rows]
        target = tuple(int(e * D) for e in x)
        return arith.solve_int(int_rows, target) is not None

    # -- heights and characteristics -----------------------------------------

    def height(self, x, p: int):
        """p-height of x in G.

        INF is detected structurally: h_p(x) = INF iff x lies in the span of
        the directions with exponent INF at p (for this class that span meets
        G in the p-divisible part).  Finite heights iterate the p-local
        membership test for x/p^k up to the provable cutoff

            h_p(x) <= v_p(prod m_j) + min over supporting coordinates i with
                      finite chi_i(p) of (v_p(t_i) + chi_i(p)),

        since x/p^k in G forces (prod m_j)·t_i/p^k into D_{chi_i}.
        """
        x = vec(x)
        if is_zero(x):
            raise ZeroElement("height of 0 is undefined")
        t = self.coords(x)
        if t is None or not self.member(x):
            raise NotMember("element outside the group")
        support = [i for i in range(self.rank) if t[i]]
        if all(self.chars[i].value_at(p) is INF for i in support):
            return INF
        vpm = sum(p_valuation(Fraction(m), p) for _, m in self.relations)
        cutoff = vpm + min(
            p_valuation(t[i], p) + self.chars[i].value_at(p)
            for i in support
            if self.chars[i].value_at(p) is not INF
        )
        k = 0
        inv = Fraction(1, p)
        scaled = [Fraction(ti) for ti in t]
        while k < cutoff:
            scaled = [ti * inv for ti in scaled]
            if not self._member_local(scaled, p):
                break
            k += 1
        return k

    def characteristic_of(self, x) -> Characteristic:
        x = vec(x)
        if is_zero(x):
            raise ZeroElement("characteristic of 0 is undefined")
        key = x
        if key in self._char_cache:
            return self._char_cache[key]
        t = self.coords(x)
        if t is None or not self.member(x):
            raise NotMember("element outside the group")
        primes = set(self.prime_universe)
        for ti in t:
            if ti:
                primes.update(fraction_primes(ti))
        entries = {}
        for p in sorted(primes):
            h = self.height(x, p)
            if h is INF or h > 0:
                entries[p] = h
        out = Characteristic(entries)
        self._char_cache[key] = out
        return out

    def type_of(self, x) -> TypeClass:
        return type_of_char(self.characteristic_of(x))

    # -- pure closures --------------------------------------------------------

    def _adapted_basis(self, U: Subspace):
        """Basis of U adapted to every {U ∩ W_p}; NotRepresentable if none."""
        arrangement = []
        for p in sorted(self.inf_primes):
            X = U.intersect(self.w_span(p))
            if X.rank:
                arrangement.append(X)
        closure = {U}
        for X in arrangement:
            closure.add(X)
        changed = True
        while changed:
            changed = False
            items = list(closure)
            for a, b in itertools.combinations(items, 2):
                c = a.intersect(b)
                if c.rank and c not in closure:
                    closure.add(c)
                    changed = True
        chosen: list = []
        for X in sorted(closure, key=lambda s: (s.rank, s.basis)):
            cur = Subspace(self.ambient_dim, [v for v in chosen if X.contains(v)])
            if cur.rank == X.rank:
                continue
            total = Subspace(self.ambient_dim, chosen)
            for b in X.basis:
                if cur.rank == X.rank:
                    break
                if cur.contains(b):
                    continue
                if total.contains(b):
                    raise NotRepresentable(
                        "pure closure has no completely decomposable frame: "
                        "its divisible subspaces admit no common adapted basis"
                    )
                chosen.append(vec(b))
                cur = cur.add(Subspace(self.ambient_dim, [b]))
                total = total.add(Subspace(self.ambient_dim, [b]))
        for X in arrangement:
            if Subspace(self.ambient_dim, [v for v in chosen if X.contains(v)]) != X:
                raise NotRepresentable("adapted basis verification failed")
        return chosen

    def purify(self, elements) -> "Group":
        """Presentation of the pure closure <S>_* = span_Q(S) ∩ G.

        The result lives in the same ambient.  Raises EmptySpan when the
        span is zero and NotRepresentable when the closure falls outside the
        representation class (possible for skew spans; never for rank-one
        closures, coordinate-subset spans, or direct summands).
        """
        vecs = [vec(x) for x in elements]
        for x in vecs:
            if len(x) != self.ambient_dim:
                raise DimensionMismatch("element has wrong ambient dimension")
            if not is_zero(x) and not self.member(x):
                raise NotMember("purify input outside the group")
        U = Subspace(self.ambient_dim, vecs)
        if U.rank == 0:
            raise EmptySpan("purify of the zero span")
        adapted = self._adapted_basis(U)
        lines = []
        for b in adapted:
            tb = self.coords(b)
            lines.append(self.element(primitive(tb)))
        base = [(u, self.characteristic_of(u)) for u in lines]
        rels = self._closure_relations(U, lines)
        return Group(self.ambient_dim, base, rels)

    def _closure_relations(self, U: Subspace, lines):
        """Relation generators of span(U) ∩ G over the given base lines."""
        if not self.relations:
            return []
        Bt = [self.coords(b) for b in U.basis]  # U in direction coords
        r = len(Bt)
        line_solver = linalg.RowSolver([vec(u) for u in lines])
        rels = []
        nJ_total = len(self.relations)
        for p in sorted(self.relation_primes):
            J, pe, finite_rows, bound, gcol, _ = self._local_info(p)
            if not J:
                continue
            Dp = self._sigma_depth(Bt, p)
            forms = []
            for r_i, i in enumerate(finite_rows):
                coeffs = [Fraction(self.relations[j][0][i], self.relations[j][1]) for j in J]
                coeffs += [Fraction(-Bt[l][i], 1) / (p ** Dp) for l in range(r)]
                forms.append(
                    FormConstraint(tuple(coeffs), Fraction(0), p, -bound[i])
                )
            sol = arith.valuation_solution_lattice(len(J) + r, {}, forms)
            if sol is None:
                continue
            _, hom = sol
            cproj = [h[: len(J)] for h in hom]
            cproj = [h for h in cproj if any(h)]
            H, _ = arith.hnf(cproj)
            trivial = [
                tuple(pe[j] if jj == j else 0 for jj in J) for j in J
            ]
            TH, Tpv = arith.hnf(trivial)
            for gen in H:
                if arith.lattice_contains(TH, Tpv, gen):
                    continue
                cfull = [0] * nJ_total
                for idx, j in enumerate(J):
                    parts = [arith.Congruence(gen[idx], pe[j])]
                    m_other = self.relations[j][1] // pe[j]
                    if m_other > 1:
                        parts.append(arith.Congruence(0, m_other))
                    cfull[j] = arith.crt_solve(parts).residue
                z = [
                    sum(
                        (Fraction(cfull[j] * self.relations[j][0][i], self.relations[j][1])
                         for j in range(nJ_total)),
                        Fraction(0),
                    )
                    for i in range(self.rank)
                ]
                tau = self._solve_in_A_plus_U(z, Bt)
                if tau is None:
                    raise GroupError("internal: infeasible closure witness")
                elem = self.element(tau)
                mu = line_solver.solve(vec(elem))
                den = 1
                for q in mu:
                    den = den * q.denominator // math.gcd(den, q.denominator)
                if den > 1:
                    rels.append((tuple(int(q * den) for q in mu), den))
        return rels

    def _sigma_depth(self, Bt, p: int) -> int:
        """Denominator depth bound for span parameters at p."""
        R, piv = linalg.rref([vec(b) for b in Bt])
        depth = 0
        sub = [[Bt[i][c] for c in piv] for i in range(len(Bt))]
        inv_rows = _fraction_inverse(sub)
        for row in inv_rows:
            for e in row:
                if e:
                    depth = max(depth, -p_valuation(e, p))
        maxchi = 0
        for c in self.chars:
            e = c.value_at(p)
            if e is not INF:
                maxchi = max(maxchi, e)
        vpm = sum(p_valuation(Fraction(m), p) for _, m in self.relations)
        return depth + maxchi + vpm + 1

    def _solve_in_A_plus_U(self, z, Bt):
        """Given direction coords z with z ∈ U + A (locally feasible at all
        primes), return tau ∈ span(Bt) with z − tau ∈ A, or None."""
        r = len(Bt)
        primes = set(self.prime_universe)
        for zi in z:
            if zi:
                primes.update(fraction_primes(zi))
        for row in Bt:
            for e in row:
                if e:
                    primes.update(fraction_primes(e))
        floors = {}
        forms = []
        for p in sorted(primes):
            depth = self._sigma_depth(Bt, p)
            minz = min(
                [0] + [p_valuation(zi, p) for zi in z if zi]
            )
            floors[p] = tuple([-(depth + max(0, -minz))] * r)
            for i in range(self.rank):
                e = self.chars[i].value_at(p)
                if e is INF:
                    continue
                coeffs = tuple(Fraction(-Bt[l][i]) for l in range(r))
                forms.append(FormConstraint(coeffs, Fraction(z[i]), p, -e))
        s = arith.solve_valuation_system(r, floors, forms)
        if s is None:
            return None
        tau = [
            sum((Fraction(s[l]) * Bt[l][i] for l in range(r)), Fraction(0))
            for i in range(self.rank)
        ]
        return tuple(tau)

    def p_divisible_part(self, p: int) -> "Group":
        """Largest subgroup divisible by every power of p: the pure closure
        of the span of the directions with exponent INF at p."""
        dirs = [v for v, c in zip(self.directions, self.chars) if c.value_at(p) is INF]
        if not dirs:
            return Group.zero(self.ambient_dim)
        return self.purify(dirs)

    def socle(self, tau: TypeClass) -> "Group":
        """G(tau): the elements of type >= tau (with 0)."""
        if not tau.inf_primes:
            return self
        dirs = [
            v
            for v, c in zip(self.directions, self.chars)
            if all(c.value_at(p) is INF for p in tau.inf_primes)
        ]
        if not dirs:
            return Group.zero(self.ambient_dim)
        return self.purify(dirs)

    # -- sums and equality ----------------------------------------------------

    def contains_group(self, other: "Group") -> bool:
        """Whether other ⊆ self (other's ambient must match)."""
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        for v, c in zip(other.directions, other.chars):
            g = vscale(Fraction(1, c.finite_content()), v)
            if not self.member(g):
                return False
            for p in c.inf_primes:
                if not self.w_span(p).contains(g):
                    return False
        for j in range(len(other.relations)):
            if not self.member(other.relation_gen(j)):
                return False
        return True

    def transformed(self, matrix_rows) -> "Group":
        """Apply an ambient linear map (rows = images of the ambient basis)
        to the presentation: directions map, characteristics and relation
        data are unchanged."""
        base = [
            (linalg.mat_mul_vec(matrix_rows, v), c)
            for v, c in zip(self.directions, self.chars)
        ]
        return Group(self.ambient_dim, base, self.relations)

    def reindexed(self) -> tuple["Group", list]:
        """Abstract (standard-basis) presentation of this group together
        with the embedding rows mapping the new basis to the old directions."""
        g = Group.standard(list(self.chars), list(self.relations))
        return g, [tuple(v) for v in self.directions]

    def to_jsonable(self) -> dict:
        from .typesys import char_to_jsonable

        standard = all(
            self.directions[i] == linalg.unit_vec(self.ambient_dim, i)
            for i in range(self.rank)
        ) and self.rank == self.ambient_dim
        out = {
            "rank": self.rank,
            "base": [
                {
                    "char": char_to_jsonable(c),
                    **(
                        {}
                        if standard
                        else {"direction": [str(x) for x in v]}
                    ),
                }
                for v, c in zip(self.directions, self.chars)
            ],
            "relations": [
                {"coeffs": list(w), "modulus": m} for w, m in self.relations
            ],
        }
        if not standard:
            out["ambient_dim"] = self.ambient_dim
        return out


def _fraction_inverse(square_rows):
    """Inverse of a small invertible Fraction matrix, as rows."""
    n = len(square_rows)
    aug = [
        [Fraction(square_rows[i][j]) for j in range(n)]
        + [Fraction(int(i == j)) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                c = aug[i][col]
                aug[i] = [a - c * b for a, b in zip(aug[i], aug[col])]
    return [tuple(row[n:]) for row in aug]


# ---------------------------------------------------------------------------
# Module-level operations (spec surface)
# ---------------------------------------------------------------------------

def validate(presentation) -> Group:
    """Validate and canonicalize; accepts a Group or (ambient, base, rels)."""
    if isinstance(presentation, Group):
        return presentation
    ambient, base, rels = presentation
    return Group(ambient, base, rels)


def member(G: Group, x) -> bool:
    return G.member(x)


def member_bruteforce(G: Group, x, budget: int) -> bool:
    return G.member_bruteforce(x, budget)


def height(G: Group, x, p: int):
    return G.height(x, p)


def characteristic_of(G: Group, x) -> Characteristic:
    return G.characteristic_of(x)


def type_of(G: Group, x) -> TypeClass:
    return G.type_of(x)


def purify(G: Group, S) -> Group:
    return G.purify(S)


def p_divisible_part(G: Group, p: int) -> Group:
    return G.p_divisible_part(p)


def socle(G: Group, tau: TypeClass) -> Group:
    return G.socle(tau)


def direct_sum(*groups: Group) -> Group:
    """Internal direct sum of presentations in a common ambient.

    The spans must be independent (disjoint coordinate blocks are the common
    case); raises NotFullRank otherwise, DimensionMismatch on ambient
    mismatch.
    """
    if not groups:
        raise GroupError("direct_sum of nothing")
    d = groups[0].ambient_dim
    for g in groups:
        if g.ambient_dim != d:
            raise DimensionMismatch("ambient dimensions differ")
    total = sum(g.rank for g in groups)
    base = []
    rels = []
    offset = 0
    for g in groups:
        base.extend(zip(g.directions, g.chars))
        for w, m in g.relations:
            rels.append(
                (tuple([0] * offset + list(w) + [0] * (total - offset - g.rank)), m)
            )
        offset += g.rank
    return Group(d, base, rels)


def block_sum(G: Group, H: Group) -> Group:
    """External direct sum: embeds the two groups on disjoint coordinate
    blocks of Q^(dG+dH)."""
    d = G.ambient_dim + H.ambient_dim
    base = [
        (tuple(list(v) + [Fraction(0)] * H.ambient_dim), c)
        for v, c in zip(G.directions, G.chars)
    ]
    base += [
        (tuple([Fraction(0)] * G.ambient_dim + list(v)), c)
        for v, c in zip(H.directions, H.chars)
    ]
    rels = [
        (tuple(list(w) + [0] * H.rank), m) for w, m in G.relations
    ] + [
        (tuple([0] * G.rank + list(w)), m) for w, m in H.relations
    ]
    return Group(d, base, rels)


def equal_subgroups(G: Group, H: Group) -> bool:
    """Exact subgroup equality inside a common ambient, by mutual membership
    of all generators (base generators with their full divisibility, plus
    relation generators)."""
    if G.ambient_dim != H.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if G.rank != H.rank:
        return False
    return G.contains_group(H) and H.contains_group(G)
