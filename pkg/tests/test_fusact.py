import pytest

from fusactk.errors import PreconditionError, VerificationError
from fusactk.fusact import (
    FAMorphism,
    ambient_fusion_action,
    automizer_diamond,
    classify_fully,
    f_centric_at_x,
    is_f_stable,
    is_intertwined,
    underlying_fusion_system,
    x_centric_classify,
    x_centric_objects,
)
from fusactk.fusion import InjectiveHom, ambient_fusion_system
from fusactk.fixtures import build_fixture, build_fixture_with_ambient
from fusactk.permgroup import GroupAction, Perm, generate_group, parse_cycles


def fix(name):
    return build_fixture(name)


def sub(G, *cycles):
    return G.closure_of([G.index[parse_cycles(c, G.degree)] for c in cycles])


# -- construction ------------------------------------------------------------


def test_requires_sylow_and_action_of_g():
    G = generate_group(3, ["(0 1)", "(0 1 2)"])
    act = GroupAction.natural(G)
    with pytest.raises(PreconditionError):
        ambient_fusion_action(G, G.trivial(), act, 2)
    H = generate_group(3, ["(0 1)"])
    with pytest.raises(PreconditionError):
        ambient_fusion_action(G, G.closure_of([G.index[parse_cycles("(0 1)", 3)]]),
                              GroupAction.natural(H), 2)


def test_point_action_reproduces_fusion_system():
    X = fix("FIX-P")
    F = ambient_fusion_system(X.group, X.base, 2)
    proj = underlying_fusion_system(X)
    assert {P.indices for P in proj.subgroups} == {P.indices for P in F.subgroups}
    for P in proj.subgroups:
        assert proj.store[P] == F.store[P]
    # pairs carry the trivial permutation
    for P in X.subgroups:
        assert all(sigma == (0,) for _, sigma in X.store[P])


def test_fixture_b_hom_sizes():
    X = fix("FIX-B")
    G = X.group
    triv = G.trivial()
    assert len(X.hom(triv, triv)) == 6  # faithful: Z_G(1;X) = 1
    assert len(X.hom(X.base, X.base)) == 2


def test_fixture_c_hom_size_at_top():
    X = fix("FIX-C")
    assert len(X.hom(X.base, X.base)) == 4  # |N_G(S)| / |Z_G(S;X)| = 8/2


def test_fixture_c_core():
    X = fix("FIX-C")
    core = X.core()
    assert core.order == 4
    evens = {g for g in core.elements()}
    assert all(g.is_identity() or all(len(c) == 2 for c in g.cycles()) for g in evens)


def test_validate_all_fixtures():
    for name in ("FIX-T", "FIX-B", "FIX-A", "FIX-C", "FIX-P"):
        X = fix(name)
        X.validate(deep=(name in ("FIX-T", "FIX-B")))


def test_empty_set_rejected():
    G = generate_group(2, ["(0 1)"])
    with pytest.raises(PreconditionError):
        GroupAction(G, 0, [])


# -- intertwining ------------------------------------------------------------


def test_is_intertwined_trivial_cases():
    X = fix("FIX-B")
    G = X.group
    act = X.action
    P = X.base
    assert is_intertwined(InjectiveHom.identity(P), Perm.identity(3), act)
    # trivial domain: any sigma intertwines
    assert is_intertwined(InjectiveHom.identity(G.trivial()), Perm((1, 2, 0)), act)
    # forced conjugation on a transposition subgroup
    g = G.index[parse_cycles("(0 1 2)", 3)]
    phi = InjectiveHom.conjugation(g, P)
    assert is_intertwined(phi, act.of(g), act)
    assert not is_intertwined(InjectiveHom.identity(P), Perm((1, 2, 0)), act)


def test_stored_morphisms_intertwined():
    X = fix("FIX-C")
    for P in X.subgroups:
        for phi, sigma in X.store[P]:
            m = FAMorphism(P, X.base, phi, sigma)
            assert is_intertwined(m.phi_hom(), Perm(sigma), X.action)


# -- underlying fusion system --------------------------------------------------


def test_underlying_of_ambient_is_ambient_fusion():
    for name in ("FIX-B", "FIX-A", "FIX-C"):
        X = fix(name)
        F = ambient_fusion_system(X.group, X.base, X.p)
        proj = underlying_fusion_system(X)
        for P in F.subgroups:
            assert proj.store[P] == F.store[P]


# -- automizer diamond ----------------------------------------------------------


def test_diamond_abelian_faithful_top():
    # abelian S acting faithfully, G = S: conjugation is trivial, sigma carries all
    C4 = generate_group(4, ["(0 1 2 3)"])
    X = ambient_fusion_action(C4, C4.whole(), GroupAction.natural(C4), 2)
    d = automizer_diamond(X, X.base)
    assert len(d.full) == 4 and len(d.fusion) == 1 and len(d.sigma) == 4


def test_diamond_fixture_b_trivial_subgroup():
    X = fix("FIX-B")
    d = automizer_diamond(X, X.group.trivial())
    assert len(d.full) == 6
    assert len(d.fusion) == 1
    assert len(d.sigma) == 6
    assert len(d.fusion0) == 1
    assert len(d.sigma0) == 6


def test_diamond_fixture_c_top():
    X = fix("FIX-C")
    d = automizer_diamond(X, X.base)
    # oracle: N_G(S)=D8, Z_G(S;X) of order 2, core V4
    assert len(d.full) == 4
    assert len(d.sigma) == 2
    assert len(d.fusion0) == 2
    assert len(d.fusion) == 4
    assert len(d.sigma0) == 1
    assert len(d.full) == len(d.sigma0) * len(d.fusion) == len(d.fusion0) * len(d.sigma)


def test_diamond_exactness_everywhere():
    for name in ("FIX-T", "FIX-B", "FIX-A", "FIX-C", "FIX-P"):
        X = fix(name)
        for P in X.subgroups:
            automizer_diamond(X, P)  # raises on exactness failure


def test_core_strong_closure_pointwise():
    for name in ("FIX-B", "FIX-C", "FIX-P"):
        X = fix(name)
        core = X.core()
        for P in X.subgroups:
            for phi, sigma in X.store[P]:
                m = FAMorphism(P, X.base, phi, sigma)
                for c in P.indices & core.indices:
                    assert m.map(c) in core.indices


# -- extender ------------------------------------------------------------------


def test_extender_of_s_pairs_is_full_normalizer():
    X = fix("FIX-C")
    for P in X.subgroups:
        for s in X.base.sorted_indices:
            phi, sigma = X.s_pair(s, P)
            img = X.group.subgroup(frozenset(phi), validate=False)
            m = FAMorphism(P, img, phi, sigma)
            assert X.extender(m) == X.n_s(P)


def test_extender_identity_automorphism():
    X = fix("FIX-A")
    for P in X.subgroups:
        m = FAMorphism(P, P, P.sorted_indices, tuple(range(X.set_size)))
        assert X.extender(m) == X.n_s(P)


def test_extender_trivial_subgroup_three_cycle():
    X = fix("FIX-B")
    triv = X.group.trivial()
    m = FAMorphism(triv, triv, triv.sorted_indices, Perm((1, 2, 0)).images)
    assert X.contains(m)
    assert X.extender(m).is_trivial()


def test_extender_sandwich():
    # P Z_S(P;X) <= N_(phi,sigma) <= N_S(P)
    from fusactk.permgroup import join

    for name in ("FIX-B", "FIX-C", "FIX-A"):
        X = fix(name)
        for P in X.subgroups:
            for j in X.class_of(P):
                Q = X.subgroups[j]
                for m in X.isos(P, Q):
                    N = X.extender(m)
                    low = join(P, X.z_s_x(P))
                    assert low.indices <= N.indices <= X.n_s(P).indices


def test_extender_requires_iso():
    X = fix("FIX-B")
    nm = X.hom(X.group.trivial(), X.base)[0]
    with pytest.raises(PreconditionError):
        X.extender(nm)


# -- classify_fully ---------------------------------------------------------------


def test_top_subgroup_always_fully_normalized():
    for name in ("FIX-T", "FIX-B", "FIX-A", "FIX-C", "FIX-P"):
        X = fix(name)
        assert classify_fully(X, X.base).normalized


def test_trivial_subgroup_flags():
    X = fix("FIX-B")
    flags = classify_fully(X, X.group.trivial())
    assert flags.normalized and flags.centralized
    assert flags.x_normalized and flags.x_centralized


def test_klein_fours_fully_normalized_in_fix_a():
    X = fix("FIX-A")
    G = X.group
    for V in (sub(G, "(0 2)(1 3)", "(0 1)(2 3)"), sub(G, "(0 2)", "(1 3)")):
        assert classify_fully(X, V).normalized
        assert X.n_s(V) == X.base


def test_ambient_extension_lemma():
    # iso with fully X-centralized target extends to its extender (ambient systems)
    for name in ("FIX-B", "FIX-C", "FIX-A"):
        X = fix(name)
        for Q in X.subgroups:
            if not classify_fully(X, Q).x_centralized:
                continue
            for j in X.class_of(Q):
                P = X.subgroups[j]
                for m in X.isos(P, Q):
                    assert X.extension_exists(m, X.extender(m))


def test_ambient_sylow_conditions():
    # fully normalized P: all three S-automizers are Sylow in their X-versions
    from fusactk.permgroup import p_part

    for name in ("FIX-B", "FIX-C", "FIX-A", "FIX-P"):
        X = fix(name)
        for P in X.subgroups:
            if not classify_fully(X, P).normalized:
                continue
            d = automizer_diamond(X, P)
            assert len(d.s_full) == p_part(len(d.full), X.p)
            assert len(d.s_sigma) == p_part(len(d.sigma), X.p)
            assert len(d.s_fusion) == p_part(len(d.fusion), X.p)


# -- centricity --------------------------------------------------------------------


def test_faithful_all_x_centric():
    X = fix("FIX-A")
    assert len(x_centric_objects(X)) == len(X.subgroups)


def test_point_set_x_centric_is_p_centric():
    G, S, action, p, X = build_fixture_with_ambient("FIX-P")
    flags = x_centric_classify(X, ambient=(G, action))
    for P, f in flags.items():
        assert f.f_centric_at_x == f.p_centric_at_x
        assert f.p_centric == f.p_centric_at_x  # X = point


def test_fix_c_x_centric_objects():
    G, S, action, p, X = build_fixture_with_ambient("FIX-C")
    flags = x_centric_classify(X, ambient=(G, action))
    objs = x_centric_objects(X)
    assert X.base in objs
    # oracle-computed list: C4, both Klein fours inside D8, and S itself
    expected = {
        sub(G, "(0 1 2 3)").indices,
        sub(G, "(0 2)", "(1 3)").indices,
        sub(G, "(0 2)(1 3)", "(0 1)(2 3)").indices,
        X.base.indices,
    }
    assert {P.indices for P in objs} == expected
    for P, f in flags.items():
        assert f.p_centric_at_x == f.f_centric_at_x


# -- F-stability ---------------------------------------------------------------------


def test_f_stability():
    X = fix("FIX-B")
    F = underlying_fusion_system(X)
    assert is_f_stable(X.action, F)  # restriction of a G-set is F_S(G)-stable

    XP = fix("FIX-P")
    FP = underlying_fusion_system(XP)
    assert is_f_stable(XP.action, FP)  # point set: all counts are 1

    # unequal fixed-point counts on a swapped pair: not stable
    V = generate_group(4, ["(0 1)", "(2 3)"])
    F2 = ambient_fusion_system(V, V.whole(), 2)
    from fusactk.fusion import fusion_system_from_seeds

    a = sub(V, "(0 1)")
    b = sub(V, "(2 3)")
    swap = fusion_system_from_seeds(
        V, V.whole(), 2, [InjectiveHom(a, b, tuple(b.sorted_indices))]
    )
    # a acts as the flip of {0,1}, b acts trivially
    act = GroupAction.from_generator_images(V, 2, ["(0 1)", "()"])
    assert len(act.fixed_points(a)) != len(act.fixed_points(b))
    assert not is_f_stable(act, swap)
    assert is_f_stable(act, F2)  # no fusion between the halves
