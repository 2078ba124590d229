import pytest
from hypothesis import given, strategies as st

from fusactk.errors import CapExceededError, ParseError, PreconditionError
from fusactk.permgroup import (
    GroupAction,
    Perm,
    PermGroup,
    all_subgroups,
    centralizer_in,
    generate_group,
    intersect,
    is_sylow_in,
    normalizer_in,
    parse_cycles,
    p_part,
    sylow_subgroup,
    transporter_set,
    x_centralizer,
    x_normalizer,
)

from oracles import kernel_scan, naive_closure, subgroups_by_subset_closure, transporter_scan


def s3():
    return generate_group(3, ["(0 1)", "(0 1 2)"])


def s4():
    return generate_group(4, ["(0 1 2 3)", "(0 1)"])


def d8_in_s4(G):
    return G.closure_of([G.index[parse_cycles("(0 1 2 3)", 4)], G.index[parse_cycles("(0 2)", 4)]])


perms = st.permutations(range(5)).map(Perm)


@given(perms, perms, perms)
def test_composition_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(perms)
def test_inverse_roundtrip(p):
    assert p * p.inverse() == Perm.identity(5)
    assert p.inverse() * p == Perm.identity(5)


@given(perms)
def test_cycle_string_roundtrip(p):
    assert parse_cycles(p.cycle_string(), 5) == p


def test_parse_cycles_basic():
    assert parse_cycles("()", 4) == Perm.identity(4)
    assert parse_cycles("(0 1 2)(3 4)", 5).images == (1, 2, 0, 4, 3)
    for bad in ["", "(0 1", "0 1 2", "(0 1 1)", "(0 9)", "(x y)"]:
        with pytest.raises(ParseError):
            parse_cycles(bad, 4)


def test_generate_group_orders_against_naive_closure():
    cases = [
        (2, ["(0 1)"], 2),
        (3, ["(0 1)", "(0 1 2)"], 6),
        (4, ["(0 1 2 3)", "(0 2)"], 8),
        (4, ["(0 1 2 3)", "(0 1)"], 24),
        (5, ["(0 1 2 3 4)", "(0 1)"], 120),
    ]
    for degree, gens, order in cases:
        G = generate_group(degree, gens)
        assert G.order == order
        oracle = naive_closure(degree, [parse_cycles(g, degree) for g in gens])
        assert frozenset(G.elements) == oracle
        assert list(G.elements) == sorted(G.elements)


def test_generate_group_cap():
    with pytest.raises(CapExceededError):
        generate_group(5, ["(0 1 2 3 4)", "(0 1)"], max_order=100)


def test_malformed_generator_rejected():
    with pytest.raises(ParseError):
        generate_group(3, ["(0 1"])


def test_sylow_subgroup_orders():
    G3 = s3()
    assert sylow_subgroup(G3, 2).order == 2
    assert sylow_subgroup(G3, 3).order == 3
    assert sylow_subgroup(G3, 5).order == 1
    G4 = s4()
    assert sylow_subgroup(G4, 2).order == 8
    assert sylow_subgroup(G4, 3).order == 3
    with pytest.raises(PreconditionError):
        sylow_subgroup(G3, 4)


def test_sylow_subgroup_deterministic():
    G = s4()
    a = sylow_subgroup(G, 2)
    b = sylow_subgroup(G, 2)
    assert a == b and a.canonical_key() == b.canonical_key()


def test_sylow_conjugates_cover_all_sylows():
    # every Sylow found by exhaustive subgroup scan is a conjugate of the output
    for G, p in [(s3(), 2), (s3(), 3), (s4(), 2), (s4(), 3)]:
        S = sylow_subgroup(G, p)
        target = p_part(G.order, p)
        whole = G.whole()
        found = {
            H
            for H in subgroups_by_subset_closure(whole, 2)
            if len(H) == target
        }
        conjugates = {
            frozenset(G.conj(g, a) for a in S.indices) for g in range(G.order)
        }
        assert found <= conjugates


def test_transporter_matches_exhaustive_scan():
    G = s4()
    subs = all_subgroups(d8_in_s4(G))
    whole = G.whole()
    for P in subs:
        for Q in subs:
            assert transporter_set(whole, P, Q) == transporter_scan(G, P, Q)


def test_transporter_examples():
    G = s3()
    whole = G.whole()
    triv = G.trivial()
    assert transporter_set(whole, triv, triv) == tuple(range(G.order))
    P = G.closure_of([G.index[parse_cycles("(0 1)", 3)]])
    got = transporter_set(whole, P, P)
    assert [G.elements[i].cycle_string() for i in got] == ["()", "(0 1)"]
    G4 = s4()
    A = G4.closure_of([G4.index[parse_cycles("(0 2)", 4)]])
    B = G4.closure_of([G4.index[parse_cycles("(1 3)", 4)]])
    assert len(transporter_set(G4.whole(), A, B)) == 4


def test_transporter_nonempty_iff_subconjugate_and_normalizer():
    G = s4()
    whole = G.whole()
    subs = all_subgroups(d8_in_s4(G))
    for P in subs:
        for Q in subs:
            got = transporter_set(whole, P, Q)
            assert bool(got) == bool(transporter_scan(G, P, Q))
        assert set(transporter_set(whole, P, P)) == set(normalizer_in(whole, P).indices)


def test_all_subgroups_counts():
    C2 = generate_group(2, ["(0 1)"])
    assert len(all_subgroups(C2.whole())) == 2
    G = s4()
    D8 = d8_in_s4(G)
    subs = all_subgroups(D8)
    assert len(subs) == 10
    assert subs[0].is_trivial() and subs[-1] == D8
    # oracle: D8 subgroups are all 2-generated
    assert {H.indices for H in subs} == subgroups_by_subset_closure(D8, 2)
    V4 = generate_group(4, ["(0 1)(2 3)", "(0 1)", "(2 3)"])
    assert len(all_subgroups(V4.whole())) == 5


def test_all_subgroups_cap():
    G = s4()
    with pytest.raises(CapExceededError):
        all_subgroups(G.whole(), max_group_order=10)


def quotient_action_s4():
    """S4 on the 3 pair-partitions of {0,1,2,3}; kernel is the Klein four group."""
    G = s4()
    partitions = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]

    def act(g, part):
        return tuple(
            tuple(sorted((g(a), g(b)))) for a, b in part
        )

    sigma = []
    for g in G.elements:
        images = []
        for part in partitions:
            moved = tuple(sorted(act(g, part)))
            images.append(partitions.index(moved))
        sigma.append(Perm(images))
    return G, GroupAction(G, 3, sigma)


def test_action_core_scan():
    G = s3()
    act = GroupAction.natural(G)
    assert act.core(G.whole()).is_trivial()

    G4, act4 = quotient_action_s4()
    core = act4.core(G4.whole())
    assert core.order == 4
    assert kernel_scan(act4, G4.whole()) == core.indices
    assert all(g.cycles() and all(len(c) == 2 for c in g.cycles()) or g.is_identity()
               for g in core.elements())
    D8 = d8_in_s4(G4)
    assert act4.core(D8) == core  # V4 lies inside every Sylow 2-subgroup


def test_action_core_is_normal():
    G, act = quotient_action_s4()
    core = act.core(G.whole())
    for g in range(G.order):
        assert frozenset(G.conj(g, a) for a in core.indices) == core.indices


def test_x_normalizer_x_centralizer():
    G = s3()
    act = GroupAction.natural(G)
    P = G.closure_of([G.index[parse_cycles("(0 1)", 3)]])
    assert x_normalizer(G.whole(), P, act).is_trivial()  # faithful: core trivial

    G4, act4 = quotient_action_s4()
    whole = G4.whole()
    D8 = d8_in_s4(G4)
    V4 = act4.core(whole)
    assert x_normalizer(whole, D8, act4) == V4
    assert x_centralizer(whole, V4, act4) == V4


def test_group_action_from_generator_images_and_errors():
    G = s4()
    act = GroupAction.from_generator_images(G, 3, ["(0 2)", "(1 2)"])
    # this is the quotient action up to labeling: kernel has order 4
    assert len(kernel_scan(act, G.whole())) == 4
    with pytest.raises(PreconditionError):
        GroupAction.from_generator_images(G, 2, ["(0 1)", "()"])  # not a homomorphism


def test_natural_action_homomorphism_property():
    G = s3()
    act = GroupAction.natural(G)
    for i in range(G.order):
        for j in range(G.order):
            assert act.of(G.mul(i, j)) == act.of(i) * act.of(j)


def test_stabilizer_and_orbits():
    G = s3()
    act = GroupAction.natural(G)
    S2 = act.stabilizer(2, G.whole())
    assert S2.order == 2
    assert act.is_transitive(G.whole())
    assert act.fixed_points(S2) == (2,)


def test_subgroupref_equality_and_validation():
    G = s3()
    t = G.index[parse_cycles("(0 1)", 3)]
    H1 = G.closure_of([t])
    H2 = G.subgroup([G.identity_index, t])
    assert H1 == H2 and hash(H1) == hash(H2)
    with pytest.raises(PreconditionError):
        G.subgroup([G.identity_index, G.index[parse_cycles("(0 1 2)", 3)]])


def test_is_sylow_in():
    G = s4()
    D8 = d8_in_s4(G)
    assert is_sylow_in(D8, G.whole(), 2)
    assert not is_sylow_in(G.trivial(), G.whole(), 2)


def test_centralizer_matches_bruteforce():
    G = s4()
    D8 = d8_in_s4(G)
    for P in all_subgroups(D8):
        brute = frozenset(
            g
            for g in range(G.order)
            if all(G.conj(g, a) == a for a in P.indices)
        )
        assert centralizer_in(G.whole(), P).indices == brute
