import pytest

from fusactk.errors import PreconditionError, VerificationError
from fusactk.fusact import underlying_fusion_system, x_centric_objects
from fusactk.fixtures import build_fixture, build_fixture_with_ambient
from fusactk.linking import (
    ambient_linking_action,
    ambient_transporter,
    categories_isomorphic,
    category_from_json,
    category_to_json,
    extend_token,
    factor_token,
    fusion_action_from_theta,
    induced_theta,
    left_pseudolift,
    lift_right,
    linking_from_theta,
    orbit_category,
    restrict_token,
    stabilizer_linking,
    verify_linking_axioms,
    verify_transporter_axioms,
    x_centric_orbit_category,
    X_center_of,
)
from fusactk.permgroup import parse_cycles


from functools import cache


@cache
def setup(name):
    return build_fixture_with_ambient(name)


@cache
def transporter_of(name):
    G, S, action, p, X = setup(name)
    return X, ambient_transporter(G, S, action, p, X)


@cache
def linking_of(name):
    G, S, action, p, X = setup(name)
    return X, ambient_linking_action(G, S, action, p, X)


# -- transporter ------------------------------------------------------------


def test_transporter_sizes_fix_b():
    X, T = transporter_of("FIX-B")
    triv = X.group.trivial()
    i = T.obj_index[triv]
    assert len(T.hom(i, i)) == 6  # N_G(1,1) = G


def test_transporter_single_object():
    G, S, action, p, X = setup("FIX-A")
    T = ambient_transporter(G, S, action, p, X, objects=(S,))
    assert len(T.objects) == 1
    assert len(T.hom(0, 0)) == 8  # N_G(S) = S


def test_transporter_top_normalizer_fix_a():
    X, T = transporter_of("FIX-A")
    i = T.obj_index[X.base]
    assert len(T.hom(i, i)) == 8


def test_object_filter_closure_enforced():
    G, S, action, p, X = setup("FIX-A")
    A = G.closure_of([G.index[parse_cycles("(0 2)", 4)]])
    with pytest.raises(PreconditionError):
        ambient_transporter(G, S, action, p, X, objects=(A, S))  # class of A missing


def test_transporter_axioms_all_fixtures():
    for name in ("FIX-T", "FIX-B", "FIX-C", "FIX-P"):
        X, T = transporter_of(name)
        F = underlying_fusion_system(X)
        report = verify_transporter_axioms(T, F)
        assert report.verdict, (name, report.violations[:5])


# -- linking ------------------------------------------------------------------


def test_linking_faithful_equals_transporter():
    # faithful X: Z_G(P;X) trivial, so the linking system is the transporter
    G, S, action, p, X = setup("FIX-B")
    L = ambient_linking_action(G, S, action, p, X)
    T = ambient_transporter(G, S, action, p, X, objects=L.objects)
    assert categories_isomorphic(L, T)


def test_linking_fix_c_top_hom():
    X, L = linking_of("FIX-C")
    i = L.obj_index[X.base]
    assert len(L.hom(i, i)) == 8  # Z_G(S;X) is a 2-group, O^p = 1


def test_linking_point_set_classical():
    X, L = linking_of("FIX-P")
    i = L.obj_index[X.base]
    assert len(L.hom(i, i)) == 8  # N_G(S)/O^p(Z_G(S)) = 8


def test_linking_axioms_and_counting():
    for name in ("FIX-T", "FIX-B", "FIX-A", "FIX-C", "FIX-P"):
        X, L = linking_of(name)
        report = verify_linking_axioms(L, X)
        assert report.verdict, (name, report.violations[:5])
        for i, P in enumerate(L.objects):
            z = X_center_of(L, P).order
            for j, Q in enumerate(L.objects):
                assert len(L.hom(i, j)) == len(X.hom(P, Q)) * z


def test_linking_as_transporter():
    for name in ("FIX-B", "FIX-C", "FIX-P"):
        X, L = linking_of(name)
        F = underlying_fusion_system(X)
        report = verify_transporter_axioms(L, F)
        assert report.verdict, (name, report.violations[:5])


def test_linking_rejects_non_centric_object():
    G, S, action, p, X = setup("FIX-C")
    bad = G.trivial()  # not X-centric for FIX-C
    with pytest.raises(PreconditionError):
        ambient_linking_action(G, S, action, p, X, objects=(bad,))


def test_mutated_category_fails_axioms():
    from fusactk.linking import AugmentedCategory

    X, T = transporter_of("FIX-B")
    F = underlying_fusion_system(X)
    # drop one composite: some axiom must fail
    broken = dict(T.compose_table)
    victim = next(
        (g, h) for (g, h), gh in T.compose_table.items() if gh != g and gh != h
    )
    del broken[victim]
    mut = AugmentedCategory(
        T.group, T.base, T.p, T.action, T.objects,
        list(T.tok_dom), list(T.tok_cod), list(T.payload), broken, dict(T.delta), dict(T.pi),
    )
    report = verify_transporter_axioms(mut, F)
    assert not report.verdict


def test_linking_mutation_breaks_axiom_a():
    X, L = linking_of("FIX-C")
    # delete one token from a Z(P;X)-orbit: axiom (A) must fail
    i = L.obj_index[X.base]
    victims = [t for t in L.hom(i, i) if t != L.identity_token(i)]
    t0 = victims[0]
    keep = [t for t in range(L.n_tokens) if t != t0]
    remap = {t: k for k, t in enumerate(keep)}
    from fusactk.linking import AugmentedCategory

    mut = AugmentedCategory(
        L.group, L.base, L.p, L.action, L.objects,
        [L.tok_dom[t] for t in keep], [L.tok_cod[t] for t in keep],
        [L.payload[t] for t in keep],
        {(remap[g], remap[h]): remap[gh] for (g, h), gh in L.compose_table.items()
         if g in remap and h in remap and gh in remap},
        {k: remap[t] for k, t in L.delta.items() if t in remap},
        {remap[t]: L.pi[t] for t in keep},
    )
    report = verify_linking_axioms(mut, X)
    assert not report.verdict


# -- structural operations -----------------------------------------------------


def test_lift_right_exhaustive():
    for name in ("FIX-C", "FIX-B"):
        X, L = linking_of(name)
        for (g, h), gh in L.compose_table.items():
            m = L.pi[h]
            assert lift_right(L, g, gh, (m.phi, m.sigma)) == h


def test_restrict_and_factor():
    X, L = linking_of("FIX-C")
    for t in range(L.n_tokens):
        i, j = L.tok_dom[t], L.tok_cod[t]
        # restriction to itself is the identity operation
        assert restrict_token(L, t, L.objects[i], L.objects[j]) == t
        iso, incl = factor_token(L, t)
        assert L.compose_table[(incl, iso)] == t
        if L.pi[t].is_iso():
            assert iso == t or L.objects[j] == L.pi[t].image_subgroup()


def test_restrictions_unique_over_all_eligible_data():
    X, L = linking_of("FIX-C")
    for t in range(L.n_tokens):
        i, j = L.tok_dom[t], L.tok_cod[t]
        m = L.pi[t]
        for Pstar in L.objects:
            if not Pstar.indices <= L.objects[i].indices:
                continue
            img = frozenset(m.map(a) for a in Pstar.indices)
            for Qstar in L.objects:
                if img <= Qstar.indices <= L.objects[j].indices:
                    restrict_token(L, t, Pstar, Qstar)  # raises unless unique


def test_extend_token_exhaustive():
    from fusactk.permgroup import normalizer_in

    X, L = linking_of("FIX-C")
    for t in range(L.n_tokens):
        if not L.is_iso_token(t):
            continue
        i, j = L.tok_dom[t], L.tok_cod[t]
        P, Q = L.objects[i], L.objects[j]
        t_inv = L.inverse_token(t)
        for Pb in L.objects:
            if not (P.indices < Pb.indices and Pb.indices <= normalizer_in(L.base, P).indices):
                continue
            for Qb in L.objects:
                if not (Q.indices <= Qb.indices and Qb.indices <= normalizer_in(L.base, Q).indices):
                    continue
                dQb = {L.delta[(j, j, q)] for q in Qb.indices if (j, j, q) in L.delta}
                if all(
                    L.compose_table[(L.compose_table[(t, L.delta[(i, i, pb)])], t_inv)] in dQb
                    for pb in Pb.sorted_indices
                ):
                    big = extend_token(L, t, Pb, Qb)
                    assert restrict_token(L, big, P, Q) == t


def test_left_pseudolift_exhaustive():
    X, L = linking_of("FIX-C")
    count = 0
    for (g, h), gh in L.compose_table.items():
        mg = L.pi[g]
        got, z = left_pseudolift(L, h, gh, (mg.phi, mg.sigma))
        assert got == g
        count += 1
    assert count


def test_tokens_mono_and_epi():
    for name in ("FIX-C", "FIX-P"):
        X, L = linking_of(name)
        by_dom: dict[int, list[int]] = {}
        for (g, h), gh in L.compose_table.items():
            pass
        # mono: g o h1 = g o h2 -> h1 = h2; epi: h1 o g = h2 o g -> h1 = h2
        for g in range(L.n_tokens):
            seen: dict[int, int] = {}
            for h in range(L.n_tokens):
                c = L.compose_table.get((g, h))
                if c is not None:
                    assert c not in seen or seen[c] == h
                    seen[c] = h
        for g in range(L.n_tokens):
            seen2: dict[int, int] = {}
            for h in range(L.n_tokens):
                c = L.compose_table.get((h, g))
                if c is not None:
                    assert c not in seen2 or seen2[c] == h
                    seen2[c] = h


def test_fully_normalized_sylow_in_linking():
    from fusactk.fusact import classify_fully
    from fusactk.permgroup import normalizer_in, sylow_in_set

    X, L = linking_of("FIX-C")
    for i, P in enumerate(L.objects):
        if classify_fully(X, P).normalized:
            dn = frozenset(
                L.delta[(i, i, s)] for s in normalizer_in(L.base, P).sorted_indices
            )
            assert sylow_in_set(dn, frozenset(L.autos(i)), L.p)


# -- orbit categories -------------------------------------------------------------


def test_orbit_category_counts():
    X = build_fixture("FIX-B")
    O = orbit_category(X)
    i = O.obj_index[X.group.trivial()]
    assert O.hom_size(i, i) == 6  # Q = 1 acts trivially
    # |O(S,S)| = |X(S)| / (orbit size of the S-translation action), oracle count:
    s = O.obj_index[X.base]
    auto = X.hom(X.base, X.base)
    orbits = set()
    for m in auto:
        orbits.add(min(
            (tuple(dict(zip(X.base.sorted_indices, X.s_pair(q, X.base)[0]))[b] for b in m.phi),
             tuple(X.s_pair(q, X.base)[1][x] for x in m.sigma))
            for q in X.base.sorted_indices
        ))
    assert O.hom_size(s, s) == len(orbits) == 1


def test_orbit_category_point_c2():
    from fusactk.fusact import minimal_fusion_action
    from fusactk.permgroup import GroupAction, generate_group

    C2 = generate_group(2, ["(0 1)"])
    X = minimal_fusion_action(C2, GroupAction.point(C2), 2)
    O = orbit_category(X, centric_only=True)
    assert len(O.objects) == 1
    assert O.hom_size(0, 0) == 1


def test_x_centric_orbit_category_fix_c():
    X = build_fixture("FIX-C")
    O = x_centric_orbit_category(X)
    assert len(O.objects) == 4


# -- theta round trips ---------------------------------------------------------------


def test_theta_roundtrip_transporter():
    for name in ("FIX-B", "FIX-C", "FIX-P"):
        G, S, action, p, X = setup(name)
        T = ambient_transporter(G, S, action, p, X)
        theta = induced_theta(T)
        X2, report = fusion_action_from_theta(T, theta, action=action)
        assert X2.same_homs(X), name
        assert report.verdict, (name, report.saturation_violations[:3])


def test_theta_roundtrip_linking_objects():
    # theta on the ambient linking system reproduces the system on X-centric objects
    G, S, action, p, X = setup("FIX-C")
    L = ambient_linking_action(G, S, action, p, X)
    theta = induced_theta(L)
    X2, report = fusion_action_from_theta(L, theta, action=action)
    for P in L.objects:
        assert X2.store[P] == X.store[P]
    assert report.verdict


def test_linking_from_theta_identity_on_linking_system():
    # a linking action system quotients trivially: EK'(P) = 1
    X, L = linking_of("FIX-C")
    theta = induced_theta(L)
    L2 = linking_from_theta(L, theta, X)
    assert categories_isomorphic(L2, L)


def test_linking_from_theta_from_transporter():
    for name in ("FIX-B", "FIX-C", "FIX-P"):
        G, S, action, p, X = setup(name)
        T = ambient_transporter(G, S, action, p, X)
        theta = induced_theta(T)
        Xq, _ = fusion_action_from_theta(T, theta, action=action)
        Lq = linking_from_theta(T, theta, Xq)
        L = ambient_linking_action(G, S, action, p, X)
        assert categories_isomorphic(Lq, L), name
        report = verify_linking_axioms(Lq, Xq)
        assert report.verdict, (name, report.violations[:5])


# -- stabilizer linking -----------------------------------------------------------


def test_stabilizer_linking_point_set_is_whole():
    X, L = linking_of("FIX-P")
    rep = stabilizer_linking(L, X, 0)
    assert rep.fully_stabilized and rep.sylow_criterion
    assert rep.category.n_tokens == L.n_tokens
    assert rep.verdict


def test_stabilizer_linking_fix_b():
    X, L = linking_of("FIX-B")
    rep = stabilizer_linking(L, X, 2)
    assert rep.fully_stabilized and rep.sylow_criterion
    assert rep.image_concentration_ok
    assert rep.transporter_report.verdict
    assert rep.stabilizer_fusion_saturated
    assert rep.centric_hypothesis_ok


def test_stabilizer_linking_fix_b_bad_point():
    X, L = linking_of("FIX-B")
    rep = stabilizer_linking(L, X, 0)
    assert not rep.fully_stabilized
    assert not rep.sylow_criterion
    assert not rep.verdict


# -- serialization -----------------------------------------------------------------


def test_category_json_roundtrip():
    X, L = linking_of("FIX-C")
    text = category_to_json(L)
    L2 = category_from_json(text)
    report = verify_linking_axioms(L2, X_rebuilt(L2))
    assert report.verdict
    assert category_to_json(L2) == category_to_json(L2)  # deterministic


def X_rebuilt(L2):
    from fusactk.fusact import ambient_fusion_action

    return ambient_fusion_action(L2.group, L2.base, L2.action, L2.p)
