"""Transporter categories, linking action systems, orbit categories, and the
constructions driven by a permutation representation of a transporter system.

Morphisms here are opaque integer tokens with explicit composition tables:
two tokens with equal underlying maps stay distinct unless the category says
otherwise, which is exactly what the free-action axioms require.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import CapExceededError, ParseError, PreconditionError, VerificationError
from .fusact import (
    FAMorphism,
    FusionActionSystem,
    Pair,
    f_centric_at_x,
    fusion_action_from_seeds,
    x_centric_objects,
)
from .fusion import FusionSystem, InjectiveHom
from .permgroup import (
    GroupAction,
    Perm,
    PermGroup,
    SubgroupRef,
    generate_group,
    generic_closure,
    generic_order_of,
    intersect,
    is_p_power,
    p_part,
    sylow_in_set,
    transporter_set,
)


class AugmentedCategory:
    """A finite category over subgroup objects with structure maps delta and pi.

    tokens: 0..n-1; hom-sets per ordered object pair; delta embeds transporter
    elements of the base p-group; pi projects to intertwined pairs.
    """

    def __init__(
        self,
        group: PermGroup,
        base: SubgroupRef,
        p: int,
        action: GroupAction,
        objects: tuple[SubgroupRef, ...],
        tok_dom: list[int],
        tok_cod: list[int],
        payload: list[frozenset],
        compose_table: dict[tuple[int, int], int],
        delta: dict[tuple[int, int, int], int],
        pi: dict[int, FAMorphism],
    ):
        self.group = group
        self.base = base
        self.p = p
        self.action = action
        self.objects = objects
        self.obj_index = {P: i for i, P in enumerate(objects)}
        self.tok_dom = tok_dom
        self.tok_cod = tok_cod
        self.payload = payload
        self.compose_table = compose_table
        self.delta = delta
        self.pi = pi
        self._hom: dict[tuple[int, int], tuple[int, ...]] = {}
        for t in range(len(tok_dom)):
            self._hom.setdefault((tok_dom[t], tok_cod[t]), ())
        for key in list(self._hom):
            self._hom[key] = tuple(
                t for t in range(len(tok_dom)) if (tok_dom[t], tok_cod[t]) == key
            )

    @property
    def n_tokens(self) -> int:
        return len(self.tok_dom)

    def hom(self, i: int, j: int) -> tuple[int, ...]:
        return self._hom.get((i, j), ())

    def autos(self, i: int) -> tuple[int, ...]:
        return self.hom(i, i)

    def compose(self, g: int, h: int) -> int:
        """g o h, for h: P -> Q and g: Q -> R."""
        try:
            return self.compose_table[(g, h)]
        except KeyError:
            raise PreconditionError("tokens are not composable") from None

    def identity_token(self, i: int) -> int:
        return self.delta[(i, i, self.group.identity_index)]

    def inclusion_token(self, i: int, j: int) -> int:
        return self.delta[(i, j, self.group.identity_index)]

    def is_iso_token(self, t: int) -> bool:
        i, j = self.tok_dom[t], self.tok_cod[t]
        for u in self.hom(j, i):
            if (
                self.compose_table.get((t, u)) == self.identity_token(j)
                and self.compose_table.get((u, t)) == self.identity_token(i)
            ):
                return True
        return False

    def inverse_token(self, t: int) -> int:
        i, j = self.tok_dom[t], self.tok_cod[t]
        for u in self.hom(j, i):
            if (
                self.compose_table.get((t, u)) == self.identity_token(j)
                and self.compose_table.get((u, t)) == self.identity_token(i)
            ):
                return u
        raise PreconditionError("token is not invertible")

    def flat_payload(self, t: int) -> frozenset:
        """Recursively flatten quotient payloads down to base-level atoms."""
        out = set()
        stack = [self.payload[t]]
        while stack:
            item = stack.pop()
            for x in item:
                if isinstance(x, frozenset):
                    stack.append(x)
                else:
                    out.add(x)
        return frozenset(out)


# ---------------------------------------------------------------------------
# ambient constructors


def _closed_object_filter(
    X_like_subgroups: tuple[SubgroupRef, ...], objects: tuple[SubgroupRef, ...],
    fusion_classes: tuple[tuple[int, ...], ...], sub_index: dict[SubgroupRef, int],
) -> None:
    chosen = {sub_index[P] for P in objects}
    for cls in fusion_classes:
        inside = chosen & set(cls)
        if inside and not set(cls) <= chosen:
            raise PreconditionError("object set not closed under conjugacy")
    for P in objects:
        for Q in X_like_subgroups:
            if P.indices <= Q.indices and sub_index[Q] not in chosen:
                raise PreconditionError("object set not closed under overgroups")


def ambient_transporter(
    G: PermGroup,
    S: SubgroupRef,
    action: GroupAction,
    p: int,
    X: FusionActionSystem,
    objects: tuple[SubgroupRef, ...] | None = None,
) -> AugmentedCategory:
    """The transporter category: one token per (P, Q, g) with g P g^-1 <= Q."""
    objs = objects if objects is not None else X.subgroups
    _closed_object_filter(X.subgroups, objs, X.classes(), X.sub_index)
    whole = G.whole()
    tok_dom: list[int] = []
    tok_cod: list[int] = []
    payload: list[frozenset] = []
    pi: dict[int, FAMorphism] = {}
    token_of: dict[tuple[int, int, int], int] = {}
    for i, P in enumerate(objs):
        for j, Q in enumerate(objs):
            for g in transporter_set(whole, P, Q):
                t = len(tok_dom)
                token_of[(i, j, g)] = t
                tok_dom.append(i)
                tok_cod.append(j)
                payload.append(frozenset({g}))
                pi[t] = FAMorphism(
                    P, Q, tuple(G.conj(g, a) for a in P.sorted_indices), action.of(g).images
                )
    compose_table: dict[tuple[int, int], int] = {}
    for (i, j, g), h_t in token_of.items():
        for (j2, k, h), g_t in token_of.items():
            if j2 == j:
                compose_table[(g_t, h_t)] = token_of[(i, k, G.mul(h, g))]
    delta: dict[tuple[int, int, int], int] = {}
    for (i, j, g), t in token_of.items():
        if g in S.indices:
            delta[(i, j, g)] = t
    return AugmentedCategory(
        G, S, p, action, objs, tok_dom, tok_cod, payload, compose_table, delta, pi
    )


def p_prime_complement_in_x_centralizer(
    G: PermGroup, P: SubgroupRef, action: GroupAction, p: int
) -> SubgroupRef:
    """O^p(Z_G(P;X)) for an X-centric P: the set of p'-elements, which must be
    a subgroup (this is what X-centricity buys)."""
    from .permgroup import centralizer_in

    whole = G.whole()
    zgx = intersect(centralizer_in(whole, P), action.core(whole))
    members = frozenset(g for g in zgx.indices if G.elements[g].order() % p != 0)
    try:
        ref = SubgroupRef(G, members)
    except PreconditionError as exc:
        raise PreconditionError("subgroup is not X-centric: p'-part is not a group") from exc
    return ref


def ambient_linking_action(
    G: PermGroup,
    S: SubgroupRef,
    action: GroupAction,
    p: int,
    X: FusionActionSystem,
    objects: tuple[SubgroupRef, ...] | None = None,
) -> AugmentedCategory:
    """Tokens are cosets g O^p(Z_G(P;X)) of transporter elements."""
    objs = objects if objects is not None else x_centric_objects(X)
    for P in objs:
        if not f_centric_at_x(X, P):
            raise PreconditionError("a non-X-centric object was requested")
    whole = G.whole()
    zprime = {P: p_prime_complement_in_x_centralizer(G, P, action, p) for P in objs}
    tok_dom: list[int] = []
    tok_cod: list[int] = []
    payload: list[frozenset] = []
    pi: dict[int, FAMorphism] = {}
    elem2tok: dict[tuple[int, int, int], int] = {}
    for i, P in enumerate(objs):
        for j, Q in enumerate(objs):
            seen: set[frozenset] = set()
            for g in transporter_set(whole, P, Q):
                coset = frozenset(G.mul(g, z) for z in zprime[P].indices)
                if coset in seen:
                    continue
                seen.add(coset)
                t = len(tok_dom)
                tok_dom.append(i)
                tok_cod.append(j)
                payload.append(coset)
                g0 = min(coset)
                pi[t] = FAMorphism(
                    P, Q, tuple(G.conj(g0, a) for a in P.sorted_indices), action.of(g0).images
                )
                for x in coset:
                    elem2tok[(i, j, x)] = t
    compose_table: dict[tuple[int, int], int] = {}
    for h_t in range(len(tok_dom)):
        i, j = tok_dom[h_t], tok_cod[h_t]
        h0 = min(payload[h_t])
        for g_t in range(len(tok_dom)):
            if tok_dom[g_t] != j:
                continue
            k = tok_cod[g_t]
            g0 = min(payload[g_t])
            compose_table[(g_t, h_t)] = elem2tok[(i, k, G.mul(g0, h0))]
    delta: dict[tuple[int, int, int], int] = {}
    for i, P in enumerate(objs):
        for j, Q in enumerate(objs):
            for s in transporter_set(S, P, Q):
                delta[(i, j, s)] = elem2tok[(i, j, s)]
    return AugmentedCategory(
        G, S, p, action, objs, tok_dom, tok_cod, payload, compose_table, delta, pi
    )


# ---------------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomReport:
    kind: str
    violations: list[tuple[str, str]] = field(default_factory=list)

    def add(self, axiom: str, detail: str) -> None:
        self.violations.append((axiom, detail))

    @property
    def verdict(self) -> bool:
        return not self.violations


def _delta_images(T: AugmentedCategory, i: int, j: int) -> dict[int, int]:
    out = {}
    for (a, b, s), t in T.delta.items():
        if (a, b) == (i, j):
            out[s] = t
    return out


def _functoriality_violations(T: AugmentedCategory, report: AxiomReport) -> None:
    for i in range(len(T.objects)):
        if (i, i, T.group.identity_index) not in T.delta:
            report.add("category", "identity token missing")
            return
        e = T.identity_token(i)
        for t in range(T.n_tokens):
            if T.tok_dom[t] == i and T.compose_table.get((t, e)) != t:
                report.add("category", "right identity fails")
            if T.tok_cod[t] == i and T.compose_table.get((e, t)) != t:
                report.add("category", "left identity fails")
    by_dom: dict[int, list[int]] = {}
    for t in range(T.n_tokens):
        by_dom.setdefault(T.tok_dom[t], []).append(t)
    ct = T.compose_table
    # totality on composable pairs
    for h in range(T.n_tokens):
        for g in by_dom.get(T.tok_cod[h], ()):
            if (g, h) not in ct:
                report.add("category", "missing composite for a composable pair")
                return
    # associativity over all composable triples
    for (g, h), gh in ct.items():
        for f in by_dom.get(T.tok_cod[g], ()):
            left = ct.get((f, gh))
            fg = ct.get((f, g))
            right = ct.get((fg, h)) if fg is not None else None
            if left is None or left != right:
                report.add("category", "associativity fails")
                return


def _delta_functorial(T: AugmentedCategory, report: AxiomReport) -> None:
    group = T.group
    for (i, j, s), t in T.delta.items():
        for (j2, k, s2), t2 in T.delta.items():
            if j2 == j:
                expect = T.delta.get((i, k, group.mul(s2, s)))
                if expect is None or T.compose_table.get((t2, t)) != expect:
                    report.add("delta", "delta is not a functor")
                    return


def _pi_functorial(T: AugmentedCategory, report: AxiomReport) -> None:
    for (g, h), gh in T.compose_table.items():
        mg, mh, mgh = T.pi[g], T.pi[h], T.pi[gh]
        comp = mg.compose(mh)
        if (comp.phi, comp.sigma) != (mgh.phi, mgh.sigma):
            report.add("pi", "pi is not a functor")
            return


def verify_transporter_axioms(T: AugmentedCategory, F: FusionSystem) -> AxiomReport:
    """Axioms (A1)(A2)(B)(C) and saturation axioms (I)(II) over the fusion
    system F (only first coordinates of pi are used)."""
    report = AxiomReport("transporter")
    _functoriality_violations(T, report)
    _delta_functorial(T, report)
    _pi_functorial(T, report)
    by_key = {P.indices: P for P in F.subgroups}
    # (A1) handled structurally: delta/pi are identity on objects by encoding.
    # (B): delta injective with c_{delta(s)} = c_s
    for i, P in enumerate(T.objects):
        for j, Q in enumerate(T.objects):
            dimg = _delta_images(T, i, j)
            expected = set(transporter_set(T.base, P, Q))
            if set(dimg) != expected:
                report.add("B", f"delta domain mismatch at pair ({i},{j})")
            if len(set(dimg.values())) != len(dimg):
                report.add("B", f"delta not injective at pair ({i},{j})")
            for s, t in dimg.items():
                want = tuple(T.group.conj(s, a) for a in P.sorted_indices)
                if T.pi[t].phi != want:
                    report.add("B", "c_{delta(s)} differs from c_s")
    # (A2): E(P) free on both sides, pi the orbit map of the right action
    E: dict[int, set[int]] = {}
    for i, P in enumerate(T.objects):
        E[i] = {
            t for t in T.autos(i) if T.pi[t].phi == P.sorted_indices
        }
        ident = T.identity_token(i)
        if ident not in E[i]:
            report.add("A2", "identity not in E(P)")
    for i in range(len(T.objects)):
        for j in range(len(T.objects)):
            toks = T.hom(i, j)
            if not toks:
                continue
            for t in toks:
                seen_r = set()
                for e in E[i]:
                    c = T.compose_table.get((t, e))
                    if c is None or c in seen_r:
                        report.add("A2", "right E(P)-action not free")
                        break
                    seen_r.add(c)
                seen_l = set()
                for e in E[j]:
                    c = T.compose_table.get((e, t))
                    if c is None or c in seen_l:
                        report.add("A2", "left E(Q)-action not free")
                        break
                    seen_l.add(c)
            # orbit map: fibers of pi (first coordinate) = right E(P)-orbits
            fibers: dict[tuple, set[int]] = {}
            for t in toks:
                fibers.setdefault(T.pi[t].phi, set()).add(t)
            P, Q = T.objects[i], T.objects[j]
            for phi, fiber in fibers.items():
                some = min(fiber)
                orbit = {T.compose_table.get((some, e)) for e in E[i]}
                if None in orbit or orbit != fiber:
                    report.add("A2", "pi is not the orbit map of the E(P)-action")
            if P in by_key.values() and Q in by_key.values():
                want = {h.images for h in F.hom(P, Q)}
                if set(fibers) != want:
                    report.add("A2", "pi not surjective onto the fusion hom-set")
    # (C): g o delta(p) = delta(c_g(p)) o g
    for t in range(T.n_tokens):
        i, j = T.tok_dom[t], T.tok_cod[t]
        m = T.pi[t]
        for a in T.objects[i].sorted_indices:
            dp = T.delta.get((i, i, a))
            dq = T.delta.get((j, j, m.map(a)))
            if dp is None or dq is None:
                report.add("C", "delta image missing for a subgroup element")
                continue
            lhs = T.compose_table.get((t, dp))
            rhs = T.compose_table.get((dq, t))
            if lhs is None or lhs != rhs:
                report.add("C", "naturality square fails")
    # (I): delta(S) Sylow in T(S)
    if T.base in T.obj_index:
        i = T.obj_index[T.base]
        dS = {T.delta[(i, i, s)] for s in T.base.sorted_indices}
        if not sylow_in_set(frozenset(dS), frozenset(T.autos(i)), T.p):
            report.add("I", "delta(S) is not Sylow in T(S)")
    # (II): extension axiom
    for t in range(T.n_tokens):
        if not T.is_iso_token(t):
            continue
        i, j = T.tok_dom[t], T.tok_cod[t]
        P, Q = T.objects[i], T.objects[j]
        t_inv = T.inverse_token(t)
        for bi, Pb in enumerate(T.objects):
            if not (P.indices <= Pb.indices and Pb.indices <= _normalizer_indices(T, P)):
                continue
            for bj, Qb in enumerate(T.objects):
                if not (Q.indices <= Qb.indices and Qb.indices <= _normalizer_indices(T, Q)):
                    continue
                ok = True
                dQb = {T.delta[(j, j, q)] for q in Qb.indices if (j, j, q) in T.delta}
                for pb in Pb.sorted_indices:
                    inner = T.compose_table.get((t, T.delta[(i, i, pb)]))
                    conj = T.compose_table.get((inner, t_inv)) if inner is not None else None
                    if conj is None or conj not in dQb:
                        ok = False
                        break
                if not ok:
                    continue
                incl_p = T.delta[(i, bi, T.group.identity_index)]
                incl_q = T.delta[(j, bj, T.group.identity_index)]
                target = T.compose_table.get((incl_q, t))
                if target is None or not any(
                    T.compose_table.get((tb, incl_p)) == target for tb in T.hom(bi, bj)
                ):
                    report.add("II", f"extension missing over pair ({bi},{bj})")
    return report


def _normalizer_indices(T: AugmentedCategory, P: SubgroupRef) -> frozenset[int]:
    from .permgroup import normalizer_in

    return normalizer_in(T.base, P).indices


def verify_linking_axioms(L: AugmentedCategory, X: FusionActionSystem) -> AxiomReport:
    """Axioms (A)(B)(C) of linking action systems over the fusion action system."""
    report = AxiomReport("linking")
    _functoriality_violations(L, report)
    _delta_functorial(L, report)
    _pi_functorial(L, report)
    # (A): delta injective, pi surjective, right-free Z(P;X)-action with pi its orbit map
    for i, P in enumerate(L.objects):
        zpx = X.z_x(P)
        zhat = {z: L.delta[(i, i, z)] for z in zpx.sorted_indices}
        for j, Q in enumerate(L.objects):
            dimg = _delta_images(L, i, j)
            if len(set(dimg.values())) != len(dimg):
                report.add("A", "delta not injective")
            toks = L.hom(i, j)
            want_pairs = {(m.phi, m.sigma) for m in X.hom(P, Q)}
            got_pairs = {(L.pi[t].phi, L.pi[t].sigma) for t in toks}
            if got_pairs != want_pairs:
                report.add("A", f"pi image differs from the hom-set at ({i},{j})")
            fibers: dict[Pair, set[int]] = {}
            for t in toks:
                fibers.setdefault((L.pi[t].phi, L.pi[t].sigma), set()).add(t)
            for pair, fiber in fibers.items():
                some = min(fiber)
                orbit = set()
                for z, zt in zhat.items():
                    c = L.compose_table.get((some, zt))
                    if c is None or c in orbit:
                        report.add("A", "right Z(P;X)-action not free/transitive on fibers")
                        break
                    orbit.add(c)
                if orbit != fiber:
                    report.add("A", "pi is not the orbit map of the Z(P;X)-action")
            if toks and len(toks) != len(want_pairs) * zpx.order:
                report.add("A", f"|L({i},{j})| != |X({i},{j})| |Z(P;X)|")
    # (B): c and l of delta(s) agree with conjugation and the action
    for (i, j, s), t in L.delta.items():
        P = L.objects[i]
        want_phi = tuple(L.group.conj(s, a) for a in P.sorted_indices)
        if L.pi[t].phi != want_phi or L.pi[t].sigma != L.action.of(s).images:
            report.add("B", "pi(delta(s)) != (c_s, l_s)")
    # (C)
    for t in range(L.n_tokens):
        i, j = L.tok_dom[t], L.tok_cod[t]
        m = L.pi[t]
        for a in L.objects[i].sorted_indices:
            dp = L.delta.get((i, i, a))
            dq = L.delta.get((j, j, m.map(a)))
            if dp is None or dq is None:
                report.add("C", "delta image missing for a subgroup element")
                continue
            lhs = L.compose_table.get((t, dp))
            rhs = L.compose_table.get((dq, t))
            if lhs is None or lhs != rhs:
                report.add("C", "naturality square fails")
    return report


# ---------------------------------------------------------------------------
# structural operations


def lift_right(L: AugmentedCategory, g_tok: int, composite_tok: int, pair: Pair) -> int:
    """The unique h with pi(h) = pair and g o h = composite."""
    j, k = L.tok_dom[g_tok], L.tok_cod[g_tok]
    i = L.tok_dom[composite_tok]
    if L.tok_cod[composite_tok] != k:
        raise PreconditionError("tokens are not composable to each other")
    found = [
        h
        for h in L.hom(i, j)
        if (L.pi[h].phi, L.pi[h].sigma) == pair and L.compose_table.get((g_tok, h)) == composite_tok
    ]
    if len(found) != 1:
        raise VerificationError(f"right lifting not unique: {len(found)} candidates")
    return found[0]


def restrict_token(L: AugmentedCategory, t: int, Pstar: SubgroupRef, Qstar: SubgroupRef) -> int:
    """The unique r with t o incl = incl o r."""
    i, j = L.tok_dom[t], L.tok_cod[t]
    if Pstar not in L.obj_index or Qstar not in L.obj_index:
        raise PreconditionError("restriction object missing from the category")
    bi, bj = L.obj_index[Pstar], L.obj_index[Qstar]
    m = L.pi[t]
    if not Pstar.indices <= L.objects[i].indices:
        raise PreconditionError("P* is not a subgroup of the domain")
    if not Qstar.indices <= L.objects[j].indices:
        raise PreconditionError("Q* is not a subgroup of the codomain")
    if not frozenset(m.map(a) for a in Pstar.indices) <= Qstar.indices:
        raise PreconditionError("image of P* escapes Q*")
    left = L.compose_table[(t, L.delta[(bi, i, L.group.identity_index)])]
    incl_q = L.delta[(bj, j, L.group.identity_index)]
    found = [r for r in L.hom(bi, bj) if L.compose_table.get((incl_q, r)) == left]
    if len(found) != 1:
        raise VerificationError(f"restriction not unique: {len(found)} candidates")
    return found[0]


def extend_token(L: AugmentedCategory, t: int, Pbig: SubgroupRef, Qbig: SubgroupRef) -> int:
    """The unique extension of an iso token to normalizing overgroups."""
    if not L.is_iso_token(t):
        raise PreconditionError("only isomorphism tokens extend")
    i, j = L.tok_dom[t], L.tok_cod[t]
    P, Q = L.objects[i], L.objects[j]
    if Pbig not in L.obj_index or Qbig not in L.obj_index:
        raise PreconditionError("extension object missing from the category")
    bi, bj = L.obj_index[Pbig], L.obj_index[Qbig]
    if not (P.indices <= Pbig.indices and Pbig.indices <= _normalizer_indices(L, P)):
        raise PreconditionError("P is not normal in the requested overgroup")
    if not (Q.indices <= Qbig.indices and Qbig.indices <= _normalizer_indices(L, Q)):
        raise PreconditionError("Q is not normal in the requested overgroup")
    t_inv = L.inverse_token(t)
    dQbig = {L.delta[(j, j, q)] for q in Qbig.indices if (j, j, q) in L.delta}
    for pb in Pbig.sorted_indices:
        conj = L.compose_table[(L.compose_table[(t, L.delta[(i, i, pb)])], t_inv)]
        if conj not in dQbig:
            raise PreconditionError("conjugation condition fails for the overgroups")
    incl_p = L.delta[(i, bi, L.group.identity_index)]
    incl_q = L.delta[(j, bj, L.group.identity_index)]
    target = L.compose_table[(incl_q, t)]
    found = [tb for tb in L.hom(bi, bj) if L.compose_table.get((tb, incl_p)) == target]
    if len(found) != 1:
        raise VerificationError(f"extension not unique: {len(found)} candidates")
    if restrict_token(L, found[0], P, Q) != t:
        raise VerificationError("extension does not restrict back")
    return found[0]


def factor_token(L: AugmentedCategory, t: int) -> tuple[int, int]:
    """t = inclusion o iso; returns (iso token, inclusion token)."""
    i, j = L.tok_dom[t], L.tok_cod[t]
    m = L.pi[t]
    img = SubgroupRef(L.group, m.image_indices, _trusted=True)
    if img not in L.obj_index:
        raise VerificationError("image object missing: object set is not closed")
    k = L.obj_index[img]
    iso = restrict_token(L, t, L.objects[i], img)
    incl = L.delta[(k, j, L.group.identity_index)]
    if L.compose_table.get((incl, iso)) != t:
        raise VerificationError("factorization does not recompose")
    return iso, incl


def left_pseudolift(
    L: AugmentedCategory, h_tok: int, composite_tok: int, second_pair: Pair
) -> tuple[int, int]:
    """The unique g with g o h = composite.  Relative to the canonical lift g'
    of the declared second factor, g = g' o delta(z)^ for a unique z in
    phi(Z(P;X)).  Returns (g token, z element index)."""
    i, j = L.tok_dom[h_tok], L.tok_cod[h_tok]
    k = L.tok_cod[composite_tok]
    if L.tok_dom[composite_tok] != i:
        raise PreconditionError("tokens do not share a source")
    found = [g for g in L.hom(j, k) if L.compose_table.get((g, h_tok)) == composite_tok]
    if len(found) != 1:
        raise VerificationError(f"left pseudolifting not unique: {len(found)} candidates")
    g = found[0]
    fiber = [t for t in L.hom(j, k) if (L.pi[t].phi, L.pi[t].sigma) == second_pair]
    if not fiber:
        raise PreconditionError("declared second factor has no lift")
    g_prime = min(fiber)
    mh = L.pi[h_tok]
    P = L.objects[i]
    hits = []
    for z in X_center_of(L, P).sorted_indices:
        zq = mh.map(z)  # phi(z) lies in Q
        if L.compose_table.get((g_prime, L.delta[(j, j, zq)])) == g:
            hits.append(zq)
    if len(hits) != 1:
        raise VerificationError("pseudolift translation element is not unique")
    return g, hits[0]


def X_center_of(L: AugmentedCategory, P: SubgroupRef) -> SubgroupRef:
    from .permgroup import centralizer_in

    core = L.action.core(L.base)
    return intersect(centralizer_in(P, P), core)


# ---------------------------------------------------------------------------
# orbit categories


class OrbitCategory:
    """Hom-sets are orbits of the target-translation action: Q\\X(P,Q)."""

    def __init__(self, X: FusionActionSystem, objects: tuple[SubgroupRef, ...]):
        self.X = X
        self.objects = objects
        self.obj_index = {P: i for i, P in enumerate(objects)}
        self.classes: dict[tuple[int, int], tuple[frozenset[Pair], ...]] = {}
        for i, P in enumerate(objects):
            for j, Q in enumerate(objects):
                seen: set[Pair] = set()
                orbits = []
                for m in X.hom(P, Q):
                    key = (m.phi, m.sigma)
                    if key in seen:
                        continue
                    orbit = set()
                    for q in Q.sorted_indices:
                        qp = X.s_pair(q, Q)
                        phi = tuple(dict(zip(Q.sorted_indices, qp[0]))[b] for b in m.phi)
                        sigma = tuple(qp[1][x] for x in m.sigma)
                        orbit.add((phi, sigma))
                    seen |= orbit
                    orbits.append(frozenset(orbit))
                self.classes[(i, j)] = tuple(
                    sorted(orbits, key=lambda o: min(o))
                )
        self._verify_composition()

    def hom_size(self, i: int, j: int) -> int:
        return len(self.classes[(i, j)])

    def class_of(self, i: int, j: int, pair: Pair) -> int:
        for k, orbit in enumerate(self.classes[(i, j)]):
            if pair in orbit:
                return k
        raise PreconditionError("morphism not in the hom-set")

    def compose(self, i: int, j: int, k: int, g_cls: int, f_cls: int) -> int:
        """[g] o [f] for f: i -> j, g: j -> k."""
        f = min(self.classes[(i, j)][f_cls])
        g = min(self.classes[(j, k)][g_cls])
        P, Q, R = self.objects[i], self.objects[j], self.objects[k]
        gf = FAMorphism(Q, R, *g).compose(FAMorphism(P, Q, *f).with_codomain(Q))
        return self.class_of(i, k, (gf.phi, gf.sigma))

    def _verify_composition(self) -> None:
        # composition must not depend on orbit representatives
        for (i, j), fs in self.classes.items():
            for (j2, k), gs in self.classes.items():
                if j2 != j:
                    continue
                P, Q, R = self.objects[i], self.objects[j], self.objects[k]
                for fo in fs:
                    for go in gs:
                        results = set()
                        for f in fo:
                            for g in go:
                                gf = FAMorphism(Q, R, *g).compose(
                                    FAMorphism(P, Q, *f).with_codomain(Q)
                                )
                                results.add(self.class_of(i, k, (gf.phi, gf.sigma)))
                        if len(results) != 1:
                            raise VerificationError("orbit composition is ill-defined")


def orbit_category(X: FusionActionSystem, centric_only: bool = False) -> OrbitCategory:
    """The orbit category of X, optionally restricted to F-centric objects."""
    if centric_only:
        objects = tuple(P for P in X.subgroups if _f_centric(X, P))
    else:
        objects = X.subgroups
    return OrbitCategory(X, objects)


def x_centric_orbit_category(X: FusionActionSystem) -> OrbitCategory:
    return OrbitCategory(X, x_centric_objects(X))


def _f_centric(X: FusionActionSystem, P: SubgroupRef) -> bool:
    from .permgroup import centralizer_in

    for j in X.class_of(P):
        Q = X.subgroups[j]
        if X.z_s(Q).indices != centralizer_in(Q, Q).indices:
            return False
    return True


# ---------------------------------------------------------------------------
# theta: permutation representations of transporter systems


@dataclass
class ThetaMap:
    """Assignment token -> permutation of X, multiplicative, trivial on inclusions."""

    T: AugmentedCategory
    assignment: dict[int, tuple[int, ...]]

    def of(self, t: int) -> tuple[int, ...]:
        return self.assignment[t]

    def validate(self) -> None:
        for (g, h), gh in self.T.compose_table.items():
            a, b = self.assignment[g], self.assignment[h]
            if tuple(a[x] for x in b) != self.assignment[gh]:
                raise PreconditionError("theta does not send composition to multiplication")
        for (i, j, s), t in self.T.delta.items():
            if s == self.T.group.identity_index:
                if any(x != k for k, x in enumerate(self.assignment[t])):
                    raise PreconditionError("theta is nontrivial on an inclusion")


def induced_theta(T: AugmentedCategory) -> ThetaMap:
    """theta read off from the stored projections (the ambient action)."""
    return ThetaMap(T, {t: T.pi[t].sigma for t in range(T.n_tokens)})


@dataclass
class ObSaturationReport:
    object_count: int
    saturation_violations: list[tuple[str, str, str]]
    sylow_characterizations_ok: bool
    sylow_corollaries_ok: bool

    @property
    def verdict(self) -> bool:
        return (
            not self.saturation_violations
            and self.sylow_characterizations_ok
            and self.sylow_corollaries_ok
        )


def fusion_action_from_theta(
    T: AugmentedCategory, theta: ThetaMap, action: GroupAction | None = None
) -> tuple[FusionActionSystem, ObSaturationReport]:
    """The fusion action system with morphisms (c_t, theta(t)), closed under
    restriction; saturation is verified on the objects of T."""
    theta.validate()
    group, S, p = T.group, T.base, T.p
    set_size = len(next(iter(theta.assignment.values()))) if theta.assignment else 1
    if action is None:
        # the S-action through delta at the top object; other group elements
        # are never consulted by the system
        i_top = T.obj_index[S]
        sigma = [Perm.identity(set_size)] * group.order
        for s in S.sorted_indices:
            sigma[s] = Perm(theta.of(T.delta[(i_top, i_top, s)]))
        action = GroupAction(group, set_size, sigma)
    seeds = []
    for t in range(T.n_tokens):
        P = T.objects[T.tok_dom[t]]
        m = T.pi[t]
        seeds.append(FAMorphism(P, S, m.phi, theta.of(t)))
    X = fusion_action_from_seeds(group, S, p, action, seeds)
    report = _ob_saturation_report(T, theta, X)
    return X, report


def _ob_saturation_report(
    T: AugmentedCategory, theta: ThetaMap, X: FusionActionSystem
) -> ObSaturationReport:
    from .saturation import check_saturation_full
    from .fusact import automizer_diamond, classify_fully

    objset = set(T.objects)
    full = check_saturation_full(X, only=objset)
    # the four Sylow characterizations of the fully-* predicates inside T
    ok = True
    cor_ok = True
    id_sigma = tuple(range(X.set_size))
    for i, P in enumerate(T.objects):
        flags = classify_fully(X, P)
        toks = frozenset(T.autos(i))
        E = frozenset(t for t in toks if T.pi[t].phi == P.sorted_indices)
        K = frozenset(t for t in toks if theta.of(t) == id_sigma)
        dn = frozenset(T.delta[(i, i, s)] for s in X.n_s(P).sorted_indices)
        dz = frozenset(T.delta[(i, i, s)] for s in X.z_s(P).sorted_indices)
        dnx = frozenset(T.delta[(i, i, s)] for s in X.n_s_x(P).sorted_indices)
        dzx = frozenset(T.delta[(i, i, s)] for s in X.z_s_x(P).sorted_indices)
        if flags.normalized != sylow_in_set(dn, toks, X.p):
            ok = False
        if flags.centralized != sylow_in_set(dz, E, X.p):
            ok = False
        if flags.x_normalized != sylow_in_set(dnx, K, X.p):
            ok = False
        if flags.x_centralized != sylow_in_set(dzx, E & K, X.p):
            ok = False
        # corollaries: Sylow images under the projections
        dia = automizer_diamond(X, P)
        if flags.normalized:
            if not (
                len(dia.s_full) == p_part(len(dia.full), X.p)
                and len(dia.s_fusion) == p_part(len(dia.fusion), X.p)
                and len(dia.s_sigma) == p_part(len(dia.sigma), X.p)
            ):
                cor_ok = False
        if flags.x_normalized and len(dia.s_fusion0) != p_part(len(dia.fusion0), X.p):
            cor_ok = False
        if flags.centralized and len(dia.s_sigma0) != p_part(len(dia.sigma0), X.p):
            cor_ok = False
    return ObSaturationReport(
        object_count=len(T.objects),
        saturation_violations=full.violations,
        sylow_characterizations_ok=ok,
        sylow_corollaries_ok=cor_ok,
    )


def linking_from_theta(
    T: AugmentedCategory, theta: ThetaMap, X: FusionActionSystem
) -> AugmentedCategory:
    """Quotient T by the p'-kernels EK'(P) to produce a linking action system
    for the fusion action system X induced by theta."""
    centric = x_centric_objects(X)
    for P in centric:
        if P not in T.obj_index:
            raise PreconditionError("T is missing an X-centric object")
    id_sigma = tuple(range(X.set_size))
    ekprime: dict[int, frozenset[int]] = {}
    for P in centric:
        i = T.obj_index[P]
        toks = frozenset(T.autos(i))
        EK = frozenset(
            t
            for t in toks
            if T.pi[t].phi == P.sorted_indices and theta.of(t) == id_sigma
        )
        ident = T.identity_token(i)
        mul = lambda a, b: T.compose_table[(a, b)]
        prime = frozenset(
            t for t in EK if generic_order_of(t, mul, ident) % X.p != 0
        )
        if generic_closure(prime, mul, ident) != prime:
            raise PreconditionError("p'-elements of E(P) cap K(P) do not form a subgroup")
        zhat = frozenset(
            T.delta[(i, i, z)] for z in X.z_x(P).sorted_indices
        )
        if not zhat <= EK:
            raise VerificationError("central tokens escape E(P) cap K(P)")
        if zhat & prime != {ident} or len(zhat) * len(prime) != len(EK):
            raise PreconditionError("E(P) cap K(P) does not split as Z(P;X) x EK'(P)")
        for e in EK:
            inv_e = T.inverse_token(e)
            for x in prime:
                if mul(mul(e, x), inv_e) not in prime:
                    raise PreconditionError("EK'(P) is not normal")
        ekprime[i] = prime
    # build the quotient on centric objects
    obj_map = {T.obj_index[P]: k for k, P in enumerate(centric)}
    tok_dom: list[int] = []
    tok_cod: list[int] = []
    payload: list[frozenset] = []
    pi: dict[int, FAMorphism] = {}
    coset_of: dict[int, int] = {}
    for iT, P in ((T.obj_index[P], P) for P in centric):
        for jT in [T.obj_index[Q] for Q in centric]:
            seen: set[frozenset[int]] = set()
            for t in T.hom(iT, jT):
                coset = frozenset(T.compose_table[(t, e)] for e in ekprime[iT])
                if coset in seen:
                    continue
                seen.add(coset)
                nt = len(tok_dom)
                tok_dom.append(obj_map[iT])
                tok_cod.append(obj_map[jT])
                payload.append(frozenset(T.payload[x] for x in coset))
                rep = min(coset)
                pi[nt] = FAMorphism(
                    T.objects[iT], T.objects[jT], T.pi[rep].phi, theta.of(rep)
                )
                for x in coset:
                    coset_of[x] = nt
    compose_table: dict[tuple[int, int], int] = {}
    for (g, h), gh in T.compose_table.items():
        if g in coset_of and h in coset_of and gh in coset_of:
            key = (coset_of[g], coset_of[h])
            prev = compose_table.get(key)
            if prev is not None and prev != coset_of[gh]:
                raise VerificationError("quotient composition ill-defined")
            compose_table[key] = coset_of[gh]
    delta: dict[tuple[int, int, int], int] = {}
    for (i, j, s), t in T.delta.items():
        if t in coset_of:
            delta[(obj_map[i], obj_map[j], s)] = coset_of[t]
    return AugmentedCategory(
        T.group, T.base, T.p, X.action, centric,
        tok_dom, tok_cod, payload, compose_table, delta, pi,
    )


def categories_isomorphic(L1: AugmentedCategory, L2: AugmentedCategory) -> bool:
    """Hom-set bijections commuting with delta, pi, and composition, matched by
    flattened payloads (both categories must quotient the same atoms)."""
    if [P.indices for P in L1.objects] != [P.indices for P in L2.objects]:
        return False
    match: dict[int, int] = {}
    by_payload = {
        (L2.tok_dom[t], L2.tok_cod[t], L2.flat_payload(t)): t for t in range(L2.n_tokens)
    }
    if len(by_payload) != L2.n_tokens:
        return False
    for t in range(L1.n_tokens):
        key = (L1.tok_dom[t], L1.tok_cod[t], L1.flat_payload(t))
        if key not in by_payload:
            return False
        match[t] = by_payload[key]
    if len(set(match.values())) != L2.n_tokens or L1.n_tokens != L2.n_tokens:
        return False
    for (g, h), gh in L1.compose_table.items():
        if L2.compose_table.get((match[g], match[h])) != match[gh]:
            return False
    for key, t in L1.delta.items():
        if L2.delta.get(key) != match[t]:
            return False
    for t in range(L1.n_tokens):
        m1, m2 = L1.pi[t], L2.pi[match[t]]
        if (m1.phi, m1.sigma) != (m2.phi, m2.sigma):
            return False
    return True


# ---------------------------------------------------------------------------
# stabilizer linking systems


@dataclass
class StabilizerLinkingReport:
    category: AugmentedCategory
    fully_stabilized: bool
    sylow_criterion: bool
    image_concentration_ok: bool  # theta(Mor T) = theta(T(core))
    transporter_report: AxiomReport | None
    stabilizer_fusion_saturated: bool | None
    centric_hypothesis_ok: bool | None

    @property
    def verdict(self) -> bool:
        return (
            self.fully_stabilized
            and self.sylow_criterion
            and self.image_concentration_ok
            and self.transporter_report is not None
            and self.transporter_report.verdict
            and bool(self.stabilizer_fusion_saturated)
        )


def stabilizer_linking(
    L: AugmentedCategory, X: FusionActionSystem, x: int
) -> StabilizerLinkingReport:
    """The subcategory of tokens fixing x, on the X-centric subgroups of the
    stabilizer; verified as a transporter system over the stabilizer fusion
    system when x is fully stabilized."""
    if not X.is_transitive():
        raise PreconditionError("stabilizer linking systems need a transitive system")
    from .subsystems import stabilizer_subsystem
    from .fusact import underlying_fusion_system

    stab = stabilizer_subsystem(X, x)
    Sx = stab.stabilizer_group
    C = X.core()
    iC = L.obj_index[C]
    fix_c = frozenset(t for t in L.autos(iC) if L.pi[t].sigma[x] == x)
    sx_hat = frozenset(
        L.delta[(iC, iC, s)] for s in Sx.sorted_indices
    )
    sylow_criterion = sylow_in_set(sx_hat, fix_c, X.p)
    fully = stab.fully_stabilized_by_order

    # theta(Mor L) = theta(L(C)) (image concentration at the core)
    all_sigmas = {L.pi[t].sigma for t in range(L.n_tokens)}
    core_sigmas = {L.pi[t].sigma for t in L.autos(iC)}
    image_ok = all_sigmas == core_sigmas

    objects = tuple(P for P in L.objects if P.indices <= Sx.indices)
    keep = [
        t
        for t in range(L.n_tokens)
        if L.objects[L.tok_dom[t]] in objects
        and L.objects[L.tok_cod[t]] in objects
        and L.pi[t].sigma[x] == x
    ]
    remap = {t: k for k, t in enumerate(keep)}
    obj_remap = {L.obj_index[P]: k for k, P in enumerate(objects)}
    tok_dom = [obj_remap[L.tok_dom[t]] for t in keep]
    tok_cod = [obj_remap[L.tok_cod[t]] for t in keep]
    payload = [L.payload[t] for t in keep]
    pi = {remap[t]: L.pi[t] for t in keep}
    compose_table = {
        (remap[g], remap[h]): remap[gh]
        for (g, h), gh in L.compose_table.items()
        if g in remap and h in remap and gh in remap
    }
    delta = {
        (obj_remap[i], obj_remap[j], s): remap[t]
        for (i, j, s), t in L.delta.items()
        if i in obj_remap and j in obj_remap and t in remap
    }
    sub = AugmentedCategory(
        L.group, Sx, L.p, L.action, objects, tok_dom, tok_cod, payload,
        compose_table, delta, pi,
    )
    transporter_report = None
    fx_saturated = None
    hypothesis_ok = None
    Fx = underlying_fusion_system(stab.subsystem)
    transporter_report = verify_transporter_axioms(sub, Fx)
    if fully:
        from .fusion import is_saturated_fusion

        fx_saturated = is_saturated_fusion(Fx).verdict
        # hypothesis of the saturation criterion: fully centralized P with
        # Z_core(P) <= P are objects of L
        hypothesis_ok = True
        from .fusact import classify_fully

        for P in X.subgroups:
            if not classify_fully(X, P).centralized:
                continue
            if intersect(X.z_s(P), C).indices <= P.indices and P not in L.obj_index:
                hypothesis_ok = False
    return StabilizerLinkingReport(
        category=sub,
        fully_stabilized=fully,
        sylow_criterion=sylow_criterion,
        image_concentration_ok=image_ok,
        transporter_report=transporter_report,
        stabilizer_fusion_saturated=fx_saturated,
        centric_hypothesis_ok=hypothesis_ok,
    )


# ---------------------------------------------------------------------------
# serialization


def category_to_json(L: AugmentedCategory) -> str:
    """Adjacency-listed composition tables plus the ambient context."""
    data = {
        "schema": "fusactk/augmented-category/1",
        "degree": L.group.degree,
        "group_generators": [g.cycle_string() for g in L.group.generators],
        "prime": L.p,
        "set_size": L.action.set_size,
        "base": [L.group.elements[i].cycle_string() for i in L.base.sorted_indices],
        "action": [L.action.of(i).images for i in range(L.group.order)],
        "objects": [
            [L.group.elements[i].cycle_string() for i in P.sorted_indices]
            for P in L.objects
        ],
        "tokens": [
            {"dom": L.tok_dom[t], "cod": L.tok_cod[t],
             "pi_phi": [L.group.elements[b].cycle_string() for b in L.pi[t].phi],
             "pi_sigma": list(L.pi[t].sigma)}
            for t in range(L.n_tokens)
        ],
        "delta": [
            [i, j, L.group.elements[s].cycle_string(), t]
            for (i, j, s), t in sorted(L.delta.items())
        ],
        "compose": [[g, h, gh] for (g, h), gh in sorted(L.compose_table.items())],
    }
    return json.dumps(data, sort_keys=True)


def category_from_json(text: str) -> AugmentedCategory:
    data = json.loads(text)
    if data.get("schema") != "fusactk/augmented-category/1":
        raise ParseError("unknown category schema")
    degree = data["degree"]
    G = generate_group(degree, data["group_generators"])
    action = GroupAction(G, data["set_size"], [Perm(tuple(s)) for s in data["action"]])
    base = G.subgroup_of_perms([_parse(c, degree) for c in data["base"]], validate=False)
    objects = tuple(
        G.subgroup_of_perms(
            [_parse(c, degree) for c in obj], validate=False
        )
        for obj in data["objects"]
    )
    tok_dom, tok_cod, payload, pi = [], [], [], {}
    for t, tok in enumerate(data["tokens"]):
        i, j = tok["dom"], tok["cod"]
        tok_dom.append(i)
        tok_cod.append(j)
        payload.append(frozenset({t}))
        P, Q = objects[i], objects[j]
        phi = tuple(G.index[_parse(c, degree)] for c in tok["pi_phi"])
        pi[t] = FAMorphism(P, Q, phi, tuple(tok["pi_sigma"]))
    delta = {}
    for i, j, cyc, t in data["delta"]:
        delta[(i, j, G.index[_parse(cyc, degree)])] = t
    compose_table = {(g, h): gh for g, h, gh in data["compose"]}
    return AugmentedCategory(
        G, base, data["prime"], action, objects, tok_dom, tok_cod, payload,
        compose_table, delta, pi,
    )


def _parse(cycle: str, degree: int) -> Perm:
    from .permgroup import parse_cycles

    return parse_cycles(cycle, degree)
