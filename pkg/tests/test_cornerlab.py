import random
from fractions import Fraction

import pytest

from tfab.arith import INF
from tfab.cornerlab import (
    BadConfig,
    Example1Config,
    Example2Config,
    Example3Config,
    build_example1,
    build_example2,
    build_example3,
    example2_main_decomposition,
    verify_example1,
    verify_example2,
    verify_example3,
)
from tfab.groups import Group, direct_sum, equal_subgroups
from tfab.linalg import unit_vec, vadd, vec, vscale
from tfab.typesys import Characteristic


# -- family 1 -----------------------------------------------------------------

def test_example1_config_guard():
    cfg = Example1Config.default(3)
    assert cfg.p * cfg.s - cfg.t * cfg.q == 1
    with pytest.raises(BadConfig):
        Example1Config(3, (5, 7, 11), 2, 3, 1, 3)  # ps - tq = 1 fails
    with pytest.raises(BadConfig):
        Example1Config(3, (5, 5, 11), 2, 3, 1, 2)  # repeated prime


def test_example1_build_ranks():
    data = build_example1(Example1Config.default(3))
    assert data.G.rank == 6
    for part in (data.A, data.B, data.C, data.D):
        assert part.rank == 3


def test_example1_generators_cross_membership():
    cfg = Example1Config.default(3)
    data = build_example1(cfg)
    CD = direct_sum(data.C, data.D)
    d = 2 * cfg.N
    for n in range(1, cfg.N + 1):
        an, bn = unit_vec(d, n - 1), unit_vec(d, cfg.N + n - 1)
        assert CD.member(an) and CD.member(bn)
        cn = vadd(vscale(cfg.p, an), vscale(cfg.t, bn))
        dn = vadd(vscale(cfg.q, an), vscale(cfg.s, bn))
        assert data.G.member(cn) and data.G.member(dn)


def test_example1_interior_equality_small():
    data = build_example1(Example1Config.default(3))
    assert equal_subgroups(data.G, direct_sum(data.C, data.D))


def test_example1_verify_report():
    rep = verify_example1(Example1Config.default(3), bound=2)
    assert rep.passed, [c for c in rep.checks if not c.passed]


# -- family 2 -----------------------------------------------------------------

def test_example2_default_config_small():
    cfg = Example2Config.default(1)
    # window -1..1, relations at -1 and 0
    assert sorted(cfg.p) == [-1, 0, 1]
    assert sorted(cfg.q) == [-1, 0]
    # k congruences forced by the E-block relation generators
    for n in cfg.rel_indices:
        assert cfg.k[n] % cfg.q[n] == 0
        assert (cfg.k[n + 1] - 1) % cfg.q[n] == 0
        assert (cfg.k[n] + 1) % cfg.r[n] == 0
        assert cfg.k[n + 1] % cfg.r[n] == 0


def test_example2_build():
    cfg = Example2Config.default(1)
    data = build_example2(cfg)
    assert data.G.rank == 2 * 3
    # E-block relation generators lie in G
    for n in cfg.rel_indices:
        gen = vscale(
            Fraction(1, cfg.q[n] * cfg.r[n]), vadd(data.u(n), data.v(n + 1))
        )
        assert data.G.member(gen)
    # B relation generators
    for n in cfg.rel_indices:
        gen = vscale(Fraction(1, cfg.q[n]), vadd(data.b(n), data.b(n + 1)))
        assert data.G.member(gen)


def test_example2_alpha_hand_values():
    # window {0, 1} analogue: with a single relation pair the alpha at both
    # indices solve alpha ≡ 0 mod q and alpha ≡ -1 mod r
    cfg = Example2Config.default(1)
    dec = example2_main_decomposition(cfg)
    for n in cfg.indices:
        cons = []
        for j in (n, n - 1):
            if j in cfg.q:
                cons.append((cfg.q[j], 0))
                cons.append((cfg.r[j], cfg.r[j] - 1))
        for mod, want in cons:
            assert dec.alpha[n] % mod == want


def test_example2_main_decomposition_passes():
    dec = example2_main_decomposition(Example2Config.default(1))
    assert dec.report.passed, [c for c in dec.report.checks if not c.passed]


def test_example2_wrong_sign_assembly_differs():
    # the same construction with z = alpha*b - (1-alpha)*c has non-unit
    # determinant and fails to reassemble the group
    cfg = Example2Config.default(1)
    dec = example2_main_decomposition(cfg)
    data = dec.data
    bad_z = {
        n: vadd(
            vscale(dec.alpha[n], data.b(n)),
            vscale(-(1 - dec.alpha[n]), data.c(n)),
        )
        for n in cfg.indices
    }
    d = data.G.ambient_dim
    bad_lines = [
        Group(d, [(bad_z[n], Characteristic({cfg.p[n]: INF}))]) for n in cfg.indices
    ]
    assembled = direct_sum(*bad_lines, dec.H)
    det = 2 * dec.alpha[0] ** 2 - 1
    if abs(det) != 1 and not _is_p_power(abs(det), cfg.p[0]):
        assert not equal_subgroups(assembled, data.G)


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


# -- family 3 -----------------------------------------------------------------

def test_example3_build_and_pdiv():
    cfg = Example3Config.default(3)
    lab = build_example3(cfg)
    assert lab.G.rank == 6
    rep = verify_example3(cfg)
    assert rep.passed, [c for c in rep.checks if not c.passed]


def test_example3_single_block_splits_to_itself():
    cfg = Example3Config(2, 2, (3, 5), (7, 11))
    lab = build_example3(cfg)
    H = lab.blocks[0]
    plan, K = lab.split_off(H, m=1)
    assert plan.T == (1,)
    assert K.rank == 0
    assert equal_subgroups(plan.block, H)


def test_example3_pair_with_external_v0():
    # B_1 ⊕ B_2 with (p, p1, p2, q1, q2) = (2, 3, 5, 7, 11) and the external
    # line v0 = u_1 + u_2: T is empty and the retraction sends u_2 to a
    # multiple ≡ 1 mod 7 and ≡ 0 mod 11 of v0.
    cfg = Example3Config(2, 2, (3, 5), (7, 11))
    lab = build_example3(cfg)
    H = lab.G
    v0 = vadd(lab.u_vec(1), lab.u_vec(2))
    plan = lab.analyze_summand(H, v0=v0)
    assert plan.T == ()
    assert plan.block.rank == 1
    lam1 = plan.lam[1]
    assert lam1.denominator == 1
    assert lam1 % 7 == 1 and lam1 % 11 == 0
    assert lam1 == 22
    # the block splits off: kernel has rank 3 and reassembles
    K = lab.kernel_of_plan(H, plan)
    assert K.rank == 3
    assert equal_subgroups(direct_sum(plan.block, K), H)
    # 1 - 22 divisible by 7 and 22 by 11 (the CRT certificate)
    assert (1 - lam1) % 7 == 0 and lam1 % 11 == 0


def test_example3_decompose_whole_group():
    cfg = Example3Config(2, 2, (3, 5), (7, 11))
    lab = build_example3(cfg)
    plans, lines = lab.decompose_fully(lab.G)
    assert sum(p.block.rank for p in plans) + len(lines) == 4
    assert all(p.summand.census_ok(lab) for p in plans)


def test_example3_random_summands_decompose():
    cfg = Example3Config.default(3)
    lab = build_example3(cfg)
    rng = random.Random(77)
    done = 0
    attempts = 0
    while done < 4 and attempts < 30:
        attempts += 1
        out = lab.random_summand(rng)
        if out is None:
            continue
        H, Hc = out
        plans, lines = lab.decompose_fully(H)
        parts = [p.block for p in plans] + lines
        assembled = direct_sum(*parts) if parts else Group.zero(lab.ambient_dim)
        assert equal_subgroups(assembled, H)
        done += 1
    assert done == 4


def test_example3_rank1_divisible_line_is_bare_block():
    cfg = Example3Config(2, 2, (3, 5), (7, 11))
    lab = build_example3(cfg)
    H = lab.G.purify([lab.u_vec(1)])
    plans, lines = lab.decompose_fully(H)
    assert plans == [] and len(lines) == 1
    assert equal_subgroups(lines[0], H)
