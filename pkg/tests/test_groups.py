import random
from fractions import Fraction

import pytest

from tfab.arith import INF
from tfab.groups import (
    BadRelation,
    EmptySpan,
    Group,
    NotFullRank,
    NotMember,
    ZeroElement,
    block_sum,
    direct_sum,
    equal_subgroups,
)
from tfab.linalg import unit_vec, vec, vscale
from tfab.typesys import Characteristic, TypeClass

CHI_2INF = Characteristic({2: INF})
CHI_Z = Characteristic()


def pocket(pa=2, pb=3, m=5):
    """Rank-2 block with two incomparable divisible lines glued mod m."""
    return Group.standard(
        [Characteristic({pa: INF}), Characteristic({pb: INF})], [((1, 1), m)]
    )


@pytest.fixture
def G():
    # <e1 : 2^inf, e2 : Z> + (e1+e2)/3
    return Group.standard([CHI_2INF, CHI_Z], [((1, 1), 3)])


def e(n, i, scale=1):
    return vscale(scale, unit_vec(n, i))


# -- validate ---------------------------------------------------------------

def test_validate_universe(G):
    assert G.prime_universe == {2, 3}
    assert G.rank == 2


def test_validate_not_full_rank():
    with pytest.raises(NotFullRank):
        Group(2, [(unit_vec(2, 0), CHI_Z), (vscale(2, unit_vec(2, 0)), CHI_Z)])


def test_validate_relation_canonicalized():
    g = Group.standard([CHI_Z, CHI_Z], [((2, 2), 4)])
    assert g.relations == (((1, 1), 2),)


def test_validate_rejects_zero_relation():
    with pytest.raises(BadRelation):
        Group.standard([CHI_Z, CHI_Z], [((0, 0), 3)])


def test_redundant_relation_dropped():
    g = Group.standard([Characteristic({3: 1}), CHI_Z], [((1, 0), 3)])
    assert g.relations == ()


# -- member -------------------------------------------------------------------

def test_member_examples(G):
    assert G.member(e(2, 0, Fraction(1, 8)))            # e1/8
    assert G.member(vec([Fraction(1, 3), Fraction(1, 3)]))   # (e1+e2)/3
    # (e1-e2)/3: frozen from the brute-force oracle at budget 4
    x = vec([Fraction(1, 3), Fraction(-1, 3)])
    assert G.member_bruteforce(x, 4) is False
    assert G.member(x) is False


def test_member_bruteforce_examples(G):
    assert G.member_bruteforce(vec([0, 0]), 4)
    assert G.member_bruteforce(e(2, 0, Fraction(1, 8)), 4)
    assert G.member_bruteforce(vec([Fraction(1, 3), Fraction(1, 3)]), 4)
    # outside the rational span (of a rank-1 subgroup)
    line = Group(2, [(unit_vec(2, 0), CHI_2INF)])
    assert line.member_bruteforce(unit_vec(2, 1), 4) is False


def test_member_vs_bruteforce_random():
    rng = random.Random(99)
    primes = [2, 3, 5, 7, 11, 13]
    for _ in range(120):
        n = rng.randrange(1, 4)
        universe = rng.sample(primes, rng.randrange(1, 4))
        chars = []
        for _ in range(n):
            entries = {}
            for p in universe:
                r = rng.random()
                if r < 0.25:
                    entries[p] = INF
                elif r < 0.5:
                    entries[p] = rng.randrange(1, 3)
            chars.append(Characteristic(entries))
        rels = []
        if n >= 2 and rng.random() < 0.8:
            w = tuple(rng.randrange(0, 4) for _ in range(n))
            if any(w):
                rels.append((w, rng.choice(universe)))
        G = Group.standard(chars, rels)
        den = rng.choice([1, 2, 3, 4, 5, 6, 12])
        x = vec([Fraction(rng.randrange(-4, 5), den) for _ in range(n)])
        assert G.member(x) == G.member_bruteforce(x, 6), (G, x)


# -- heights -----------------------------------------------------------------

def test_height_examples(G):
    assert G.height(unit_vec(2, 0), 2) is INF
    x = vec([1, 1])
    # frozen from the brute-force oracle at budget 4: x/3 in G, x/9 not
    assert G.member_bruteforce(vscale(Fraction(1, 3), x), 4)
    assert not G.member_bruteforce(vscale(Fraction(1, 9), x), 4)
    assert G.height(x, 3) == 1
    assert G.height(unit_vec(2, 0), 5) == 0


def test_height_errors(G):
    with pytest.raises(ZeroElement):
        G.height(vec([0, 0]), 2)
    with pytest.raises(NotMember):
        G.height(vec([Fraction(1, 3), 0]), 2)


def test_height_scaling_law(G):
    rng = random.Random(5)
    for _ in range(40):
        x = vec([rng.randrange(-6, 7), rng.randrange(-6, 7)])
        if all(v == 0 for v in x):
            continue
        for p in (2, 3, 5):
            h = G.height(x, p)
            hp = G.height(vscale(p, x), p)
            if h is INF:
                assert hp is INF
            else:
                assert hp == h + 1


def test_height_superadditive(G):
    rng = random.Random(6)
    for _ in range(40):
        x = vec([rng.randrange(-5, 6), rng.randrange(-5, 6)])
        y = vec([rng.randrange(-5, 6), rng.randrange(-5, 6)])
        s = vec([a + b for a, b in zip(x, y)])
        if any(all(v == 0 for v in z) for z in (x, y, s)):
            continue
        for p in (2, 3):
            hx, hy, hs = G.height(x, p), G.height(y, p), G.height(s, p)
            lower = hx if hy is INF else hy if hx is INF else min(hx, hy)
            if lower is INF:
                assert hs is INF
            else:
                assert hs is INF or hs >= lower


# -- characteristics and types -------------------------------------------------

def test_characteristic_examples(G):
    assert G.characteristic_of(unit_vec(2, 0)) == CHI_2INF
    assert G.type_of(unit_vec(2, 0)) == TypeClass({2})
    assert G.type_of(vec([1, 1])) == TypeClass()
    assert G.type_of(vscale(6, unit_vec(2, 0))) == G.type_of(unit_vec(2, 0))


def test_type_scaling_invariant(G):
    rng = random.Random(13)
    for _ in range(25):
        x = vec([rng.randrange(-4, 5), rng.randrange(-4, 5)])
        if all(v == 0 for v in x):
            continue
        c = rng.choice([2, 3, 5, -7, 12])
        assert G.type_of(x) == G.type_of(vscale(c, x))


# -- purify ---------------------------------------------------------------------

def test_purify_examples(G):
    line = G.purify([vscale(2, unit_vec(2, 0))])
    assert line.rank == 1
    assert equal_subgroups(line, Group(2, [(unit_vec(2, 0), CHI_2INF)]))

    full = G.purify([unit_vec(2, 0), unit_vec(2, 1)])
    assert equal_subgroups(full, G)

    diag = G.purify([vec([1, 1])])
    assert diag.rank == 1
    expected = Group(2, [(vec([1, 1]), Characteristic({3: 1}))])
    assert equal_subgroups(diag, expected)
    assert diag.member(vec([Fraction(1, 3), Fraction(1, 3)]))


def test_purify_idempotent(G):
    sub = G.purify([vec([1, 1])])
    again = G.purify([vec(v) for v in sub.directions])
    assert equal_subgroups(sub, again)


def test_purify_empty_span(G):
    with pytest.raises(EmptySpan):
        G.purify([vec([0, 0])])


def test_purify_requires_membership(G):
    with pytest.raises(NotMember):
        G.purify([vec([Fraction(1, 5), 0])])


# -- p-divisible parts and socles -----------------------------------------------

def test_p_divisible_examples(G):
    d2 = G.p_divisible_part(2)
    assert equal_subgroups(d2, Group(2, [(unit_vec(2, 0), CHI_2INF)]))
    # oracle checks at budget 4: e1/2^k in G, mixed vectors not in the part
    for k in range(1, 5):
        assert G.member_bruteforce(e(2, 0, Fraction(1, 2**k)), 4)
    assert not d2.member(vec([1, 1]))
    assert G.p_divisible_part(5).rank == 0


def test_socle_examples(G):
    s2 = G.socle(TypeClass({2}))
    assert equal_subgroups(s2, Group(2, [(unit_vec(2, 0), CHI_2INF)]))
    assert G.socle(TypeClass()) is G
    assert G.socle(TypeClass({2, 3})).rank == 0


def test_socle_keeps_relations():
    # both directions 2-divisible: the socle at {2} is the whole group
    g = Group.standard([CHI_2INF, CHI_2INF], [((1, 1), 3)])
    s = g.socle(TypeClass({2}))
    assert equal_subgroups(s, g)
    assert s.member(vec([Fraction(1, 3), Fraction(1, 3)]))


# -- sums and equality ------------------------------------------------------------

def test_direct_sum_rank(G):
    H = pocket()
    s = block_sum(G, H)
    assert s.rank == G.rank + H.rank
    assert s.ambient_dim == G.ambient_dim + H.ambient_dim


def test_equal_subgroups_reflexive(G):
    assert equal_subgroups(G, G)


def test_equal_subgroups_distinguishes(G):
    H = Group.standard([CHI_2INF, CHI_Z])
    assert not equal_subgroups(G, H)


def test_equal_subgroups_on_regenerated_presentation(G):
    # same subgroup generated with a relation-preserving generator change
    other = Group(
        2,
        [(vec([1, 0]), CHI_2INF), (vec([1, 1]), CHI_Z)],
        [((2, 1), 3)],
    )
    # (2*(e1) + (e1+e2))/3 = (3e1 + e1+e2)/3 ... sanity: membership decides
    assert equal_subgroups(G, other) == (
        G.contains_group(other) and other.contains_group(G)
    )


def test_equal_subgroups_equivalence_random():
    rng = random.Random(42)
    base = Group.standard([CHI_2INF, CHI_Z], [((1, 1), 3)])
    variants = [base]
    # generator changes: replace e2-direction by e2 + k*e1 (unimodular),
    # keeping the same subgroup when the relation vector is adjusted
    for k in (1, -1, 2):
        dirs = [(vec([1, 0]), CHI_2INF), (vec([k, 1]), CHI_Z)]
        # (e1 + (e2 + k e1) - k e1)/3 = old generator: w = (1 - k, 1)
        variants.append(Group(2, dirs, [((1 - k, 1), 3)]))
    for a in variants:
        for b in variants:
            assert equal_subgroups(a, b), (a, b)
    for a in variants:
        for b in variants:
            for c in variants:
                if equal_subgroups(a, b) and equal_subgroups(b, c):
                    assert equal_subgroups(a, c)


def test_zero_group():
    z = Group.zero(3)
    assert z.rank == 0
    assert z.member(vec([0, 0, 0]))
    assert not z.member(vec([1, 0, 0]))
