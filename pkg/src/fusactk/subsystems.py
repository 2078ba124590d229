"""Subsystem constructions: the core, the extension map to its outer
automorphisms, K-normalizers, stabilizers, and preimages."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError, VerificationError
from .fusact import (
    FAMorphism,
    FusionActionSystem,
    Pair,
    aut_pair_group,
    classify_fully,
    pair_inverse_on,
    pair_mul_on,
)
from .fusion import FusionAutGroups, FusionSystem, InjectiveHom, fusion_aut_groups, is_saturated_fusion
from .permgroup import (
    SubgroupRef,
    generic_closure,
    intersect,
    join,
    p_part,
    sylow_in_set,
)


# ---------------------------------------------------------------------------
# core subsystem


@dataclass
class CoreResult:
    core_group: SubgroupRef
    core_fusion: FusionSystem
    strongly_closed: bool
    invariance_ok: bool
    factorization_ok: bool
    factorization_witnesses: dict[tuple[int, int, tuple[int, ...]], tuple[tuple[int, ...], tuple[int, ...]]]
    aschbacher_ok: bool
    aschbacher_witnesses: dict[tuple[int, ...], tuple[int, ...]]
    saturated: bool
    exactness_ok: bool

    @property
    def verdict(self) -> bool:
        return (
            self.strongly_closed
            and self.invariance_ok
            and self.factorization_ok
            and self.aschbacher_ok
            and self.saturated
            and self.exactness_ok
        )


def core_fusion_system(X: FusionActionSystem) -> tuple[SubgroupRef, FusionSystem]:
    """The fusion system on the core whose maps appear with trivial permutation."""
    C = X.core()
    subs = tuple(P for P in X.subgroups if P.indices <= C.indices)
    id_sigma = tuple(range(X.set_size))
    store = {
        P: {phi for phi, sigma in X.store[P] if sigma == id_sigma and frozenset(phi) <= C.indices}
        for P in subs
    }
    return C, FusionSystem(X.group, C, X.p, store, subs)


def core_subsystem(X: FusionActionSystem, check_saturation: bool = True) -> CoreResult:
    """Build the core fusion system and verify closure, invariance,
    factorization-through-the-core, the extension condition for normality,
    saturation, and the two kernel identifications."""
    if check_saturation:
        from .saturation import check_saturation_rs

        if not check_saturation_rs(X).verdict:
            raise PreconditionError("core construction requires a saturated system")
    C, CF = core_fusion_system(X)
    id_sigma = tuple(range(X.set_size))

    strongly_closed = True
    for P in X.subgroups:
        inside = P.indices & C.indices
        for phi, _sigma in X.store[P]:
            m = FAMorphism(P, X.base, phi, _sigma)
            if any(m.map(c) not in C.indices for c in inside):
                strongly_closed = False

    # automorphisms of C in the underlying fusion system
    f_auts_at_C = sorted(
        phi for phi, _ in X.store[C] if frozenset(phi) == C.indices
    )
    f_auts_unique = sorted(set(f_auts_at_C))

    invariance_ok = True
    for psi_t in f_auts_unique:
        psi = InjectiveHom(C, C, psi_t, validate=False)
        psi_inv = psi.inverse()
        for P in CF.subgroups:
            for phi_t in CF.store[P]:
                phi = InjectiveHom(P, C, phi_t, validate=False)
                newP = SubgroupRef(X.group, frozenset(psi.map(a) for a in P.indices), _trusted=True)
                table = tuple(
                    psi.map(phi.map(psi_inv.map(b))) for b in newP.sorted_indices
                )
                if table not in CF.store[newP]:
                    invariance_ok = False

    # every underlying morphism between core subgroups factors as an automorphism
    # of C followed by a core map
    factorization_ok = True
    factorization_witnesses: dict = {}
    for P in CF.subgroups:
        for chi in sorted(underlying_hom_tables(X, P)):
            if not frozenset(chi) <= C.indices:
                continue
            wit = _factor_through_core(X, CF, P, chi, f_auts_unique)
            key = (X.sub_index[P], chi)
            if wit is None:
                factorization_ok = False
            else:
                factorization_witnesses[key] = wit

    aschbacher_ok = True
    aschbacher_witnesses: dict = {}
    CZ = join(C, X.z_s(C))
    group = X.group
    for phi_t in sorted(CF.store[C]):
        if frozenset(phi_t) != C.indices:
            continue
        phi_map = dict(zip(C.sorted_indices, phi_t))
        wit = None
        for big_t in sorted(underlying_hom_tables(X, CZ)):
            big = InjectiveHom(CZ, X.base, big_t, validate=False)
            if any(big.map(a) != phi_map[a] for a in C.sorted_indices):
                continue
            if all(
                group.mul(big.map(z), group.inv(z)) in C.indices
                for z in X.z_s(C).sorted_indices
            ):
                wit = big_t
                break
        if wit is None:
            aschbacher_ok = False
        else:
            aschbacher_witnesses[phi_t] = wit

    saturated = is_saturated_fusion(CF).verdict

    # F(C)_0 = CF(C) and F_S(C)_0 = Aut_C(C)
    f0 = {phi for phi, sigma in X.store[C] if sigma == id_sigma and frozenset(phi) == C.indices}
    cf_auts = {phi for phi in CF.store[C] if frozenset(phi) == C.indices}
    aut_C_of_C = {
        tuple(X.group.conj(c, a) for a in C.sorted_indices) for c in C.sorted_indices
    }
    fs0 = {
        tuple(X.group.conj(n, a) for a in C.sorted_indices)
        for n in X.n_s_x(C).sorted_indices
    }
    exactness_ok = f0 == cf_auts and fs0 == aut_C_of_C

    return CoreResult(
        core_group=C,
        core_fusion=CF,
        strongly_closed=strongly_closed,
        invariance_ok=invariance_ok,
        factorization_ok=factorization_ok,
        factorization_witnesses=factorization_witnesses,
        aschbacher_ok=aschbacher_ok,
        aschbacher_witnesses=aschbacher_witnesses,
        saturated=saturated,
        exactness_ok=exactness_ok,
    )


def underlying_hom_tables(X: FusionActionSystem, P: SubgroupRef) -> set[tuple[int, ...]]:
    return {phi for phi, _ in X.store[P]}


def _factor_through_core(
    X: FusionActionSystem,
    CF: FusionSystem,
    P: SubgroupRef,
    chi: tuple[int, ...],
    f_auts_unique: list[tuple[int, ...]],
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """chi = (core map) o (restriction of an F(C)-automorphism); first witness."""
    chi_map = dict(zip(P.sorted_indices, chi))
    for psi_t in f_auts_unique:
        psi = InjectiveHom(X.core(), X.core(), psi_t, validate=False)
        newP = SubgroupRef(X.group, frozenset(psi.map(a) for a in P.indices), _trusted=True)
        psi_inv = psi.inverse()
        table = tuple(chi_map[psi_inv.map(b)] for b in newP.sorted_indices)
        if table in CF.store[newP]:
            return (psi_t, table)
    return None


# ---------------------------------------------------------------------------
# the extension map into Out of the core


@dataclass
class KappaResult:
    point_group_order: int
    core_aut_groups: FusionAutGroups
    out_order: int
    assignment: dict[tuple[int, ...], int]  # sigma -> coset index
    well_defined: bool
    homomorphism: bool
    injective: bool
    image_order: int

    @property
    def verdict(self) -> bool:
        return self.well_defined and self.homomorphism


def kappa_map(X: FusionActionSystem, check_saturation: bool = True) -> KappaResult:
    """Send each permutation at the trivial subgroup to the outer class of an
    automorphism of the core lifting it."""
    if check_saturation:
        from .saturation import check_saturation_rs

        if not check_saturation_rs(X).verdict:
            raise PreconditionError("the extension map requires a saturated system")
    C, CF = core_fusion_system(X)
    ag = fusion_aut_groups(CF)
    aut_tables = {h.images for h in ag.aut}
    # coset lookup: table of alpha -> index of its coset representative
    coset_of: dict[tuple[int, ...], int] = {}
    for i, rep in enumerate(ag.coset_reps):
        for h in ag.inn:
            coset_of[rep.compose(h).images] = i

    sigmas = sorted(X.point_group())
    assignment: dict[tuple[int, ...], int] = {}
    well_defined = True
    for sigma in sigmas:
        lifts = sorted(
            phi for phi, s in X.store[C] if s == sigma and frozenset(phi) == C.indices
        )
        if not lifts:
            raise PreconditionError(
                "no automorphism of the core lifts a point permutation; system unsaturated"
            )
        first = lifts[0]
        if first not in aut_tables:
            raise VerificationError("core lift is not fusion-preserving")
        assignment[sigma] = coset_of[first]
        for other in lifts[1:]:
            if coset_of.get(other) != assignment[sigma]:
                well_defined = False

    homomorphism = True
    rep_mul: dict[tuple[int, int], int] = {}
    for i, a in enumerate(ag.coset_reps):
        for j, b in enumerate(ag.coset_reps):
            rep_mul[(i, j)] = coset_of[a.compose(b).images]
    for s1 in sigmas:
        for s2 in sigmas:
            s12 = tuple(s1[x] for x in s2)
            if assignment[s12] != rep_mul[(assignment[s1], assignment[s2])]:
                homomorphism = False

    image = set(assignment.values())
    injective = len(image) == len(sigmas)
    return KappaResult(
        point_group_order=len(sigmas),
        core_aut_groups=ag,
        out_order=ag.out_order,
        assignment=assignment,
        well_defined=well_defined,
        homomorphism=homomorphism,
        injective=injective,
        image_order=len(image),
    )


# ---------------------------------------------------------------------------
# K-normalizer subsystems


@dataclass
class KNormalizerSpec:
    base_subgroup: SubgroupRef
    k: frozenset[Pair]
    n_s_k: SubgroupRef
    subsystem: FusionActionSystem


def validate_k(X: FusionActionSystem, P: SubgroupRef, K: frozenset[Pair]) -> None:
    full = aut_pair_group(P, X.action)
    if not K <= full:
        raise PreconditionError("K is not contained in Aut(P;X)")
    mul = pair_mul_on(P)
    if generic_closure(K, mul, (P.sorted_indices, tuple(range(X.set_size)))) != K:
        raise PreconditionError("K is not a subgroup")


def n_s_k(X: FusionActionSystem, P: SubgroupRef, K: frozenset[Pair]) -> SubgroupRef:
    members = [n for n in X.n_s(P).sorted_indices if X.s_pair(n, P) in K]
    return SubgroupRef(X.group, frozenset(members), _trusted=True)


def k_normalizer_subsystem(
    X: FusionActionSystem, P: SubgroupRef, K: frozenset[Pair], validate: bool = True
) -> KNormalizerSpec:
    """Morphisms between subgroups of N_S^K(P) that extend over P with the
    P-part landing in K."""
    if validate:
        validate_k(X, P, K)
    N = n_s_k(X, P, K)
    base_subs = tuple(Q for Q in X.subgroups if Q.indices <= N.indices)
    store: dict[SubgroupRef, set[Pair]] = {Q: set() for Q in base_subs}
    for Q in base_subs:
        PQ = join(P, Q)
        for phi_t, sigma in X.store[PQ]:
            big = FAMorphism(PQ, X.base, phi_t, sigma)
            if frozenset(big.map(a) for a in P.indices) != P.indices:
                continue
            p_part_table = tuple(big.map(a) for a in P.sorted_indices)
            if (p_part_table, sigma) not in K:
                continue
            small = tuple(big.map(a) for a in Q.sorted_indices)
            if frozenset(small) <= N.indices:
                store[Q].add((small, sigma))
    sub = FusionActionSystem(X.group, N, X.p, X.action, store, base_subs)
    return KNormalizerSpec(base_subgroup=P, k=K, n_s_k=N, subsystem=sub)


@dataclass
class KNormalizedResult:
    by_order: bool
    by_lemma: bool
    x_centralized: bool
    sylow_condition: bool


def is_fully_k_normalized(
    X: FusionActionSystem, P: SubgroupRef, K: frozenset[Pair], assume_saturated: bool = True
) -> KNormalizedResult:
    """Order-maximality of |N_S^K(P)| over all isomorphisms out of P, plus the
    two-condition characterization; the two must agree on saturated systems."""
    mul = pair_mul_on(P)
    inv = pair_inverse_on(P)
    my_order = n_s_k(X, P, K).order
    by_order = True
    for j in X.class_of(P):
        Q = X.subgroups[j]
        for m in X.isos(P, Q):
            conj_K = frozenset(_conjugate_pair(m, k) for k in K)
            if n_s_k(X, Q, conj_K).order > my_order:
                by_order = False
    x_centralized = classify_fully(X, P).x_centralized
    aut_s_k = X.aut_S_pairs(P) & K
    aut_x_k = X.automorphism_pairs(P) & K
    sylow_condition = sylow_in_set(aut_s_k, aut_x_k, X.p)
    by_lemma = x_centralized and sylow_condition
    if assume_saturated and by_order != by_lemma:
        raise VerificationError(
            "order definition and characterization of full K-normalization disagree"
        )
    return KNormalizedResult(by_order, by_lemma, x_centralized, sylow_condition)


def _conjugate_pair(m: FAMorphism, k: Pair) -> Pair:
    """(m o k o m^-1) as an automorphism pair of cod(m)."""
    Q = m.cod
    inv = m.inverse()
    kmap = dict(zip(m.dom.sorted_indices, k[0]))
    phi = tuple(m.map(kmap[inv.map(b)]) for b in Q.sorted_indices)
    minv_sigma = inv.sigma
    sigma = tuple(m.sigma[k[1][minv_sigma[x]]] for x in range(len(m.sigma)))
    return (phi, sigma)


def k_extension_witness(
    X: FusionActionSystem, m: FAMorphism, K: frozenset[Pair]
) -> tuple[FAMorphism, FAMorphism] | None:
    """For an iso m: P -> Q with Q fully (m K m^-1)-normalized, a stored pair
    (psi, tau) on P N_S^K(P) and automorphism (chi, nu) of P with
    psi|_P = m o chi and tau = sigma o nu."""
    P = m.dom
    big = join(P, n_s_k(X, P, K))
    for chi_phi, chi_sigma in sorted(X.automorphism_pairs(P)):
        chi = FAMorphism(P, P, chi_phi, chi_sigma)
        target = m.compose(chi)
        for phi in X.by_sigma(big).get(target.sigma, ()):
            cand = FAMorphism(big, X.base, phi, target.sigma)
            if all(cand.map(a) == target.map(a) for a in P.sorted_indices):
                return cand, chi
    return None


# ---------------------------------------------------------------------------
# stabilizers and preimages


@dataclass
class StabilizerResult:
    point: int
    stabilizer_group: SubgroupRef
    subsystem: FusionActionSystem
    fully_stabilized_by_order: bool
    fully_stabilized_by_sylow: bool
    transitive: bool

    @property
    def fully_stabilized(self) -> bool:
        return self.fully_stabilized_by_order


def stabilizer_subsystem(X: FusionActionSystem, x: int) -> StabilizerResult:
    """Morphisms fixing x, on the stabilizer subgroup of x."""
    if not 0 <= x < X.set_size:
        raise PreconditionError("point out of range")
    Sx = X.action.stabilizer(x, X.base)
    subs = tuple(Q for Q in X.subgroups if Q.indices <= Sx.indices)
    store: dict[SubgroupRef, set[Pair]] = {Q: set() for Q in subs}
    for Q in subs:
        for phi, sigma in X.store[Q]:
            if sigma[x] == x and frozenset(phi) <= Sx.indices:
                store[Q].add((phi, sigma))
    sub = FusionActionSystem(X.group, Sx, X.p, X.action, store, subs)
    by_order = all(
        X.action.stabilizer(y, X.base).order <= Sx.order for y in range(X.set_size)
    )
    point_grp = X.point_group()
    fixing = frozenset(s for s in point_grp if s[x] == x)
    ell_sx = frozenset(X.action.of(s).images for s in Sx.sorted_indices)
    by_sylow = sylow_in_set(ell_sx, fixing, X.p)
    transitive = X.is_transitive()
    if transitive and by_order != by_sylow:
        raise VerificationError(
            "order and Sylow characterizations of full stabilization disagree"
        )
    return StabilizerResult(
        point=x,
        stabilizer_group=Sx,
        subsystem=sub,
        fully_stabilized_by_order=by_order,
        fully_stabilized_by_sylow=by_sylow,
        transitive=transitive,
    )


@dataclass
class PreimageResult:
    subgroup_t: SubgroupRef
    subsystem: FusionActionSystem
    sylow_condition: bool  # l_T Sylow in H: the saturation guarantee applies


def preimage_subsystem(X: FusionActionSystem, H: frozenset[tuple[int, ...]]) -> PreimageResult:
    """The subsystem of morphisms whose permutation lies in H <= X(1)."""
    point_grp = X.point_group()
    if not H <= point_grp:
        raise PreconditionError("H is not contained in the point permutation group")
    idx = tuple(range(X.set_size))
    mul = lambda a, b: tuple(a[x] for x in b)
    if generic_closure(H, mul, idx) != H:
        raise PreconditionError("H is not a subgroup")
    members = [s for s in X.base.sorted_indices if X.action.of(s).images in H]
    T = SubgroupRef(X.group, frozenset(members), _trusted=True)
    subs = tuple(Q for Q in X.subgroups if Q.indices <= T.indices)
    store: dict[SubgroupRef, set[Pair]] = {Q: set() for Q in subs}
    for Q in subs:
        for phi, sigma in X.store[Q]:
            if sigma in H and frozenset(phi) <= T.indices:
                store[Q].add((phi, sigma))
    sub = FusionActionSystem(X.group, T, X.p, X.action, store, subs)
    ell_t = frozenset(X.action.of(s).images for s in T.sorted_indices)
    return PreimageResult(
        subgroup_t=T,
        subsystem=sub,
        sylow_condition=sylow_in_set(ell_t, H, X.p),
    )


@dataclass
class SubconjugacyReport:
    witnesses: dict[int, FAMorphism]

    @property
    def verdict(self) -> bool:
        return True  # construction raises when a witness is missing


def stabilizer_subconjugacy_check(X: FusionActionSystem, x: int) -> SubconjugacyReport:
    """For each point y, a stored morphism carrying the stabilizer of y into
    the stabilizer of x."""
    if not X.is_transitive():
        raise PreconditionError("subconjugacy of stabilizers needs a transitive system")
    Sx = X.action.stabilizer(x, X.base)
    witnesses: dict[int, FAMorphism] = {}
    for y in range(X.set_size):
        Sy = X.action.stabilizer(y, X.base)
        found = None
        for phi, sigma in sorted(X.store[Sy]):
            if sigma[y] != x:
                continue
            if frozenset(phi) <= Sx.indices:
                found = FAMorphism(Sy, Sx, phi, sigma)
                break
        if found is None:
            raise VerificationError(f"no stored morphism carries the stabilizer of {y} into that of {x}")
        witnesses[y] = found
    return SubconjugacyReport(witnesses=witnesses)
