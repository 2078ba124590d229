"""Saturation checking, Alperin-style factorization, and faithful realization.

Three saturation criteria are implemented independently and cross-validated:
the full axiom list, the automized+receiving class condition, and the
top-group condition.  Equivalence is an empirical invariant of the suite,
never assumed by the code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError, VerificationError
from .fusact import (
    FAMorphism,
    FusionActionSystem,
    ambient_fusion_action,
    classify_fully,
    fusion_action_from_seeds,
    is_fully_automized,
    is_receiving,
    underlying_fusion_system,
)
from .fusion import FusionSystem
from .permgroup import (
    GroupAction,
    Perm,
    PermGroup,
    SubgroupRef,
    is_sylow_in,
    p_part,
    sylow_in_set,
)

Pair = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass
class SaturationReport:
    criterion: str  # full | automized_receiving | sylow_plus_receiving
    verdict: bool = True
    violations: list[tuple[str, str, str]] = field(default_factory=list)

    def add(self, subgroup: str, axiom: str, witness: str) -> None:
        self.violations.append((subgroup, axiom, witness))
        self.verdict = False


def _sub_name(X: FusionActionSystem, P: SubgroupRef) -> str:
    return f"subgroup#{X.sub_index[P]}(order {P.order})"


def check_saturation_full(
    X: FusionActionSystem, only: set[SubgroupRef] | None = None
) -> SaturationReport:
    """The five-part axiom list: implication square, three Sylow conditions,
    and the extension axiom.  With `only`, the axioms are checked just for the
    given objects (object-level saturation)."""
    report = SaturationReport("full")
    p = X.p
    scope = [P for P in X.subgroups if only is None or P in only]
    flags = {P: classify_fully(X, P) for P in scope}
    for P in scope:
        f = flags[P]
        name = _sub_name(X, P)
        # axiom 1: the implication square, all four edges
        if f.normalized and not f.x_normalized:
            report.add(name, "axiom1:normalized=>x_normalized", "")
        if f.normalized and not f.centralized:
            report.add(name, "axiom1:normalized=>centralized", "")
        if f.centralized and not f.x_centralized:
            report.add(name, "axiom1:centralized=>x_centralized", "")
        if f.x_normalized and not f.x_centralized:
            report.add(name, "axiom1:x_normalized=>x_centralized", "")
        full = X.automorphism_pairs(P)
        id_phi = P.sorted_indices
        id_sigma = tuple(range(X.set_size))
        s_pairs = X.aut_S_pairs(P)
        if f.normalized:
            # axiom 2: three Sylow conditions at fully normalized subgroups
            if not sylow_in_set(s_pairs, full, p):
                report.add(name, "axiom2:Aut_S(P;X) Sylow in X(P)", f"{len(s_pairs)} in {len(full)}")
            fus = frozenset(phi for phi, _ in full)
            fus_s = frozenset(phi for phi, _ in s_pairs)
            if len(fus_s) != p_part(len(fus), p) or not fus_s <= fus:
                report.add(name, "axiom2:Aut_S(P) Sylow in F(P)", f"{len(fus_s)} in {len(fus)}")
            sig = frozenset(s for _, s in full)
            sig_s = frozenset(s for _, s in s_pairs)
            if len(sig_s) != p_part(len(sig), p) or not sig_s <= sig:
                report.add(name, "axiom2:Sigma^S(P) Sylow in Sigma(P)", f"{len(sig_s)} in {len(sig)}")
        if f.x_normalized:
            # axiom 3
            fus0 = frozenset(phi for phi, s in full if s == id_sigma)
            fus0_s = frozenset(
                tuple(X.group.conj(n, a) for a in P.sorted_indices)
                for n in X.n_s_x(P).sorted_indices
            )
            if len(fus0_s) != p_part(len(fus0), p) or not fus0_s <= fus0:
                report.add(name, "axiom3:F_S(P)_0 Sylow in F(P)_0", f"{len(fus0_s)} in {len(fus0)}")
        if f.centralized:
            # axiom 4
            sig0 = frozenset(s for phi, s in full if phi == id_phi)
            sig0_s = frozenset(X.action.of(z).images for z in X.z_s(P).sorted_indices)
            if len(sig0_s) != p_part(len(sig0), p) or not sig0_s <= sig0:
                report.add(name, "axiom4:Sigma^S(P)_0 Sylow in Sigma(P)_0", f"{len(sig0_s)} in {len(sig0)}")
    # axiom 5: extension axiom
    for Q in scope:
        if not flags[Q].x_centralized:
            continue
        for j in X.class_of(Q):
            P = X.subgroups[j]
            if only is not None and P not in only:
                continue
            for m in X.isos(P, Q):
                if not X.extension_exists(m, X.extender(m)):
                    report.add(
                        _sub_name(X, Q),
                        "axiom5:extension",
                        f"iso from {_sub_name(X, P)} sigma={Perm(m.sigma).cycle_string()}",
                    )
    return report


def check_saturation_rs(X: FusionActionSystem) -> SaturationReport:
    """Every conjugacy class contains a fully automized, receiving subgroup."""
    report = SaturationReport("automized_receiving")
    for cls in X.classes():
        if not any(
            is_fully_automized(X, X.subgroups[j]) and is_receiving(X, X.subgroups[j])
            for j in cls
        ):
            P = X.subgroups[cls[0]]
            report.add(
                f"class of {_sub_name(X, P)}",
                "automized_receiving",
                "no fully automized receiving member",
            )
    return report


def check_saturation_stancu(X: FusionActionSystem) -> SaturationReport:
    """S fully automized and every fully normalized subgroup receiving."""
    report = SaturationReport("sylow_plus_receiving")
    if not is_fully_automized(X, X.base):
        report.add(_sub_name(X, X.base), "top_fully_automized", "")
    for P in X.subgroups:
        if classify_fully(X, P).normalized and not is_receiving(X, P):
            report.add(_sub_name(X, P), "fully_normalized_receiving", "")
    return report


ALL_CHECKERS = {
    "full": check_saturation_full,
    "rs": check_saturation_rs,
    "stancu": check_saturation_stancu,
}


def check_all_criteria(X: FusionActionSystem) -> dict[str, SaturationReport]:
    return {name: fn(X) for name, fn in ALL_CHECKERS.items()}


# ---------------------------------------------------------------------------
# Alperin factorization


@dataclass
class AlperinWord:
    """A factorization of a morphism into automorphisms of subgroups.

    steps[i] = (R_i, automorphism of R_i in the system); applying the steps in
    order, each restricted to the running image of the source, recomposes the
    original morphism (inclusions are implicit at the interfaces).
    """

    source: SubgroupRef
    target: SubgroupRef
    steps: list[tuple[SubgroupRef, FAMorphism]]
    composite: FAMorphism

    def recompose(self, X: FusionActionSystem) -> FAMorphism:
        cur = FAMorphism(
            self.source, self.source, self.source.sorted_indices, tuple(range(X.set_size))
        )
        for R, a in self.steps:
            if not X.contains(a) or a.dom != R or not a.is_iso() or a.cod != R:
                raise VerificationError("word step is not a stored automorphism")
            if not cur.image_indices <= R.indices:
                raise VerificationError("running image escapes the step subgroup")
            cur = a.restrict(cur.image_subgroup()).compose(cur)
        if not cur.image_indices <= self.target.indices:
            raise VerificationError("word lands outside the target")
        return cur.with_codomain(self.target)

    def verify(self, X: FusionActionSystem) -> None:
        got = self.recompose(X)
        want = self.composite
        if (got.phi, got.sigma) != (want.phi, want.sigma) or got.dom != want.dom:
            raise VerificationError("word does not recompose to the input")


def alperin_factorize(X: FusionActionSystem, m: FAMorphism, _presaturated: bool = False) -> AlperinWord:
    """Write a stored morphism as a chain of automorphisms of subgroups.

    The system must be saturated (checked up front unless the caller vouches).
    """
    if not X.contains(m):
        raise PreconditionError("morphism is not in the system")
    if not _presaturated and not check_saturation_rs(X).verdict:
        raise PreconditionError("factorization requires a saturated system")
    iso = FAMorphism(m.dom, m.image_subgroup(), m.phi, m.sigma)
    steps = _factor_iso(X, iso)
    word = AlperinWord(source=m.dom, target=m.cod, steps=steps, composite=m)
    word.verify(X)
    return word


def _factor_iso(X: FusionActionSystem, m: FAMorphism) -> list[tuple[SubgroupRef, FAMorphism]]:
    """Factor an isomorphism; recursion strictly increases the source order."""
    P, Q = m.dom, m.cod
    if P == X.base:
        return [(X.base, m)]
    if _is_identity_morphism(X, m):
        return []
    if classify_fully(X, Q).normalized:
        psi = _straightening_automorphism(X, m)
        rest = m.compose(psi)
        # rest = m o psi has extender containing N_S(P); find a stored extension
        ext = _find_extension(X, rest, X.n_s(P))
        inv_step = (P, psi.inverse())
        return [inv_step] + _factor_iso_from(X, ext)
    # route through the canonical fully normalized member of the class
    R = _canonical_fully_normalized(X, P)
    bridge = _first_iso(X, P, R)
    w1 = _factor_iso(X, bridge)
    # m = (m o bridge^-1) o bridge, and (m o bridge^-1)^-1 has normalized target
    back = m.compose(bridge.inverse())  # R -> Q
    w2 = _factor_iso(X, back.inverse())  # Q -> R, fully normalized target
    return w1 + _invert_word(w2)


def _factor_iso_from(X: FusionActionSystem, ext: FAMorphism) -> list[tuple[SubgroupRef, FAMorphism]]:
    iso_part = FAMorphism(ext.dom, ext.image_subgroup(), ext.phi, ext.sigma)
    return _factor_iso(X, iso_part)


def _is_identity_morphism(X: FusionActionSystem, m: FAMorphism) -> bool:
    return (
        m.dom == m.cod
        and m.phi == m.dom.sorted_indices
        and m.sigma == tuple(range(X.set_size))
    )


def _canonical_fully_normalized(X: FusionActionSystem, P: SubgroupRef) -> SubgroupRef:
    best = None
    for j in X.class_of(P):
        Q = X.subgroups[j]
        if classify_fully(X, Q).normalized:
            if best is None or Q.canonical_key() < best.canonical_key():
                best = Q
    if best is None:  # pragma: no cover - saturated systems always have one
        raise VerificationError("conjugacy class has no fully normalized member")
    return best


def _first_iso(X: FusionActionSystem, P: SubgroupRef, Q: SubgroupRef) -> FAMorphism:
    isos = X.isos(P, Q)
    if not isos:  # pragma: no cover - class members are isomorphic by definition
        raise VerificationError("no isomorphism between class members")
    return isos[0]


def _straightening_automorphism(X: FusionActionSystem, m: FAMorphism) -> FAMorphism:
    """An automorphism (psi,tau) of P = dom(m) such that m o (psi,tau) has
    extender all of N_S(P); exists whenever cod(m) is fully normalized."""
    P, Q = m.dom, m.cod
    for phi, sigma in sorted(X.automorphism_pairs(P)):
        psi = FAMorphism(P, P, phi, sigma)
        cand = m.compose(psi)
        if X.extender(cand).indices >= X.n_s(P).indices:
            return psi
    raise VerificationError(
        "no straightening automorphism found; system is not saturated"
    )  # pragma: no cover


def _find_extension(X: FusionActionSystem, m: FAMorphism, N: SubgroupRef) -> FAMorphism:
    for phi in X.by_sigma(N).get(m.sigma, ()):
        ext = FAMorphism(N, X.base, phi, m.sigma)
        if all(ext.map(a) == m.map(a) for a in m.dom.sorted_indices):
            return ext
    raise VerificationError("extension promised by saturation not found")  # pragma: no cover


def _invert_word(steps: list[tuple[SubgroupRef, FAMorphism]]) -> list[tuple[SubgroupRef, FAMorphism]]:
    return [(R, a.inverse()) for R, a in reversed(steps)]


def alperin_factorize_all(X: FusionActionSystem) -> dict[tuple[int, int], list[AlperinWord]]:
    """Factor every stored morphism; raises on any recomposition failure."""
    if not check_saturation_rs(X).verdict:
        raise PreconditionError("factorization requires a saturated system")
    out: dict[tuple[int, int], list[AlperinWord]] = {}
    for P in X.subgroups:
        for Q in X.subgroups:
            words = []
            for m in X.hom(P, Q):
                words.append(alperin_factorize(X, m, _presaturated=True))
            if words:
                out[(X.sub_index[P], X.sub_index[Q])] = words
    return out


# ---------------------------------------------------------------------------
# faithful realization


@dataclass
class RealizationReport:
    group: PermGroup
    sylow_image: SubgroupRef
    sylow_ok: bool
    fusion_equal: bool
    action_system_equal: bool

    @property
    def verdict(self) -> bool:
        return self.sylow_ok and self.fusion_equal and self.action_system_equal


def realize_faithful(X: FusionActionSystem) -> RealizationReport:
    """For a saturated system with faithful S-action: the permutations at the
    trivial subgroup form a group realizing the whole system."""
    if not X.core().is_trivial():
        raise PreconditionError("realization needs a faithful S-action")
    if not check_saturation_rs(X).verdict:
        raise PreconditionError("realization needs a saturated system")
    sigmas = sorted(X.point_group())
    G = PermGroup(X.set_size, [Perm(s) for s in sigmas])
    if G.order != len(sigmas):
        raise VerificationError("point permutations are not closed")
    ell = {a: X.action.of(a) for a in X.base.sorted_indices}
    S_img = G.subgroup_of_perms(ell.values(), validate=False)
    sylow_ok = is_sylow_in(S_img, G.whole(), X.p)
    ambient = ambient_fusion_action(G, S_img, GroupAction.natural(G), X.p)
    fusion_equal, action_equal = _compare_transported(X, ambient, ell, G)
    return RealizationReport(
        group=G,
        sylow_image=S_img,
        sylow_ok=sylow_ok,
        fusion_equal=fusion_equal,
        action_system_equal=action_equal,
    )


def _compare_transported(
    X: FusionActionSystem,
    ambient: FusionActionSystem,
    ell: dict[int, Perm],
    G: PermGroup,
) -> tuple[bool, bool]:
    """Transport X along s -> l_s and compare hom-set by hom-set."""
    to_g = {a: G.index[p] for a, p in ell.items()}
    sub_map: dict[SubgroupRef, SubgroupRef] = {}
    for P in X.subgroups:
        img = frozenset(to_g[a] for a in P.indices)
        sub_map[P] = G.subgroup(img, validate=False)
    if {r.indices for r in sub_map.values()} != {P.indices for P in ambient.subgroups}:
        return (False, False)
    fusion_equal = True
    action_equal = True
    for P in X.subgroups:
        transported: set[Pair] = set()
        for phi, sigma in X.store[P]:
            phi_g = tuple(to_g[b] for b in phi)
            transported.add((phi_g, sigma))
        target = ambient.store[sub_map[P]]
        if transported != target:
            action_equal = False
        if {t[0] for t in transported} != {t[0] for t in target}:
            fusion_equal = False
    return fusion_equal, action_equal


# ---------------------------------------------------------------------------
# mutation harness


def non_minimal_targets(X: FusionActionSystem) -> list[tuple[SubgroupRef, Pair]]:
    """Stored (domain, pair) records not forced by the minimal system, sorted."""
    out = []
    for P in X.subgroups:
        minimal = X.aut_S_minimal_pairs(P)
        for pair in sorted(X.store[P]):
            if pair not in minimal:
                out.append((P, pair))
    return out


def delete_and_reclose(X: FusionActionSystem, P: SubgroupRef, pair: Pair) -> FusionActionSystem:
    """The subsystem obtained by deleting (P, pair) and everything that would
    regenerate it: restrictions onto banned pairs, inverses of banned isos, and
    (deterministically chosen) factors of banned composites are banned too,
    then the survivors are re-closed.  Minimal-system morphisms never die, so
    the result is always a well-formed fusion action system.
    """
    if pair in X.aut_S_minimal_pairs(P):
        raise PreconditionError("cannot delete a minimal-system morphism")
    by_key = {Q.indices: Q for Q in X.subgroups}
    minimal = {Q: X.aut_S_minimal_pairs(Q) for Q in X.subgroups}
    banned: set[tuple[frozenset[int], Pair]] = set()

    def ban(Q: SubgroupRef, pr: Pair) -> bool:
        key = (Q.indices, pr)
        if key in banned:
            return False
        if pr in minimal[Q]:  # pragma: no cover - guarded by ban-rule choices
            raise VerificationError("deletion would remove a minimal morphism")
        banned.add(key)
        return True

    ban(P, pair)
    changed = True
    while changed:
        changed = False
        for Q in X.subgroups:
            for phi, sigma in X.store[Q]:
                if (Q.indices, (phi, sigma)) in banned:
                    continue
                m = FAMorphism(Q, X.base, phi, sigma)
                # restriction-upward: anything restricting onto a banned pair dies
                for R in X.subgroups:
                    if R.indices <= Q.indices:
                        key = (R.indices, (tuple(m.map(a) for a in R.sorted_indices), sigma))
                        if key in banned:
                            changed |= ban(Q, (phi, sigma))
                            break
        # inverse closure on the banned set
        for key in list(banned):
            qind, (phi, sigma) = key
            Q = by_key[qind]
            img = by_key[frozenset(phi)]
            inv = FAMorphism(Q, img, phi, sigma).inverse()
            if (img.indices, (inv.phi, inv.sigma)) not in banned:
                changed |= ban(img, (inv.phi, inv.sigma))
        # composite-of-survivors must never be banned: kill a non-minimal factor
        for Q in X.subgroups:
            for phi, sigma in sorted(X.store[Q]):
                if (Q.indices, (phi, sigma)) in banned:
                    continue
                f = FAMorphism(Q, X.base, phi, sigma)
                img = by_key[frozenset(phi)]
                for phi2, sigma2 in sorted(X.store[img]):
                    if (img.indices, (phi2, sigma2)) in banned:
                        continue
                    g = FAMorphism(img, X.base, phi2, sigma2)
                    comp = (tuple(g.map(b) for b in phi), tuple(sigma2[x] for x in sigma))
                    if (Q.indices, comp) in banned:
                        if (phi2, sigma2) not in minimal[img]:
                            changed |= ban(img, (phi2, sigma2))
                        else:
                            changed |= ban(Q, (phi, sigma))
                        break
    seeds = []
    for Q in X.subgroups:
        for phi, sigma in sorted(X.store[Q]):
            if (Q.indices, (phi, sigma)) not in banned:
                seeds.append(FAMorphism(Q, X.base, phi, sigma))
    mutant = fusion_action_from_seeds(X.group, X.base, X.p, X.action, seeds)
    for Q in X.subgroups:
        if not mutant.store[Q] <= X.store[Q]:  # pragma: no cover
            raise VerificationError("mutation closure escaped the original system")
    if (pair in mutant.store[P]):  # pragma: no cover - fixpoint prevents this
        raise VerificationError("deleted morphism regenerated")
    return mutant


def generate_mutants(X: FusionActionSystem, limit: int | None = None) -> list[tuple[str, FusionActionSystem]]:
    """Strictly smaller well-formed subsystems obtained by single deletions."""
    mutants = []
    for P, pair in non_minimal_targets(X):
        if limit is not None and len(mutants) >= limit:
            break
        mutant = delete_and_reclose(X, P, pair)
        if any(mutant.store[Q] != X.store[Q] for Q in X.subgroups):
            label = f"del@{X.sub_index[P]}:{pair[0]}|{Perm(pair[1]).cycle_string()}"
            mutants.append((label, mutant))
    return mutants
