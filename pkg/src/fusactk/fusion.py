"""Plain fusion systems: categories of injective maps between subgroups of a p-group.

Hom-sets are stored extensionally in iso-normal form: one record per map
(domain, image table), with the codomain-inflated variants materialized on
demand.  Divisibility (iso followed by inclusion, restrictions present) is a
data invariant of the store, not a recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import PreconditionError, VerificationError
from .permgroup import (
    PermGroup,
    SubgroupRef,
    all_subgroups,
    centralizer_in,
    intersect,
    is_sylow_in,
    normalizer_in,
    p_part,
    sylow_subgroup,
    transporter_set,
)


class InjectiveHom:
    """An injective group homomorphism between subgroups of one parent group.

    The map is a full element table: images[k] is the image of the k-th element
    of dom in canonical order.  Morphism equality is pointwise.
    """

    __slots__ = ("dom", "cod", "images", "_map")

    def __init__(self, dom: SubgroupRef, cod: SubgroupRef, images: tuple[int, ...], validate: bool = True):
        self.dom = dom
        self.cod = cod
        self.images = tuple(images)
        self._map: dict[int, int] | None = None
        if validate:
            self._validate()

    def _validate(self) -> None:
        if len(self.images) != self.dom.order:
            raise PreconditionError("image table length mismatch")
        if len(set(self.images)) != len(self.images):
            raise PreconditionError("map is not injective")
        if not set(self.images) <= self.cod.indices:
            raise PreconditionError("images escape the codomain")
        parent = self.dom.parent
        elems = self.dom.sorted_indices
        pos = {a: k for k, a in enumerate(elems)}
        for a, b in product(elems, repeat=2):
            if self.images[pos[parent.mul(a, b)]] != parent.mul(
                self.images[pos[a]], self.images[pos[b]]
            ):
                raise PreconditionError("map is not a homomorphism")

    def map(self, elem_idx: int) -> int:
        if self._map is None:
            self._map = dict(zip(self.dom.sorted_indices, self.images))
        return self._map[elem_idx]

    @property
    def image_indices(self) -> frozenset[int]:
        return frozenset(self.images)

    def image_subgroup(self) -> SubgroupRef:
        return SubgroupRef(self.dom.parent, self.image_indices, _trusted=True)

    def is_iso(self) -> bool:
        return self.image_indices == self.cod.indices

    @staticmethod
    def identity(P: SubgroupRef) -> "InjectiveHom":
        return InjectiveHom(P, P, P.sorted_indices, validate=False)

    @staticmethod
    def conjugation(g: int, P: SubgroupRef, cod: SubgroupRef | None = None) -> "InjectiveHom":
        """c_g restricted to P, into cod (default: the image)."""
        parent = P.parent
        images = tuple(parent.conj(g, a) for a in P.sorted_indices)
        target = cod if cod is not None else SubgroupRef(parent, frozenset(images), _trusted=True)
        return InjectiveHom(P, target, images, validate=False)

    def compose(self, first: "InjectiveHom") -> "InjectiveHom":
        """self o first."""
        if not first.image_indices <= self.dom.indices:
            raise PreconditionError("maps not composable")
        images = tuple(self.map(b) for b in first.images)
        return InjectiveHom(first.dom, self.cod, images, validate=False)

    def inverse(self) -> "InjectiveHom":
        if not self.is_iso():
            raise PreconditionError("only isomorphisms invert")
        back = dict(zip(self.images, self.dom.sorted_indices))
        return InjectiveHom(self.cod, self.dom, tuple(back[a] for a in self.cod.sorted_indices), validate=False)

    def restrict(self, R: SubgroupRef, cod: SubgroupRef | None = None) -> "InjectiveHom":
        if not R.indices <= self.dom.indices:
            raise PreconditionError("restriction domain not contained")
        images = tuple(self.map(a) for a in R.sorted_indices)
        target = cod if cod is not None else SubgroupRef(self.dom.parent, frozenset(images), _trusted=True)
        if cod is not None and not set(images) <= cod.indices:
            raise PreconditionError("restriction escapes requested codomain")
        return InjectiveHom(R, target, images, validate=False)

    def with_codomain(self, Q: SubgroupRef) -> "InjectiveHom":
        if not self.image_indices <= Q.indices:
            raise PreconditionError("codomain does not contain the image")
        return InjectiveHom(self.dom, Q, self.images, validate=False)

    def key(self) -> tuple:
        return (self.dom.sorted_indices, self.images)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InjectiveHom)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.images == other.images
        )

    def __hash__(self) -> int:
        return hash((self.dom.indices, self.cod.indices, self.images))

    def __repr__(self) -> str:
        return f"InjectiveHom(|dom|={self.dom.order}, |cod|={self.cod.order}, iso={self.is_iso()})"


class FusionSystem:
    """A fusion system on a p-group S, hom-sets stored in iso-normal form."""

    def __init__(self, group: PermGroup, base: SubgroupRef, p: int,
                 store: dict[SubgroupRef, set[tuple[int, ...]]],
                 subgroups: tuple[SubgroupRef, ...] | None = None):
        self.group = group
        self.base = base
        self.p = p
        self.subgroups = subgroups if subgroups is not None else all_subgroups(base)
        self.sub_index = {P: i for i, P in enumerate(self.subgroups)}
        # store[P] = set of image tables of maps with domain P (codomain = image)
        self.store = {P: set(v) for P, v in store.items()}
        for P in self.subgroups:
            self.store.setdefault(P, set())
        self._hom_cache: dict[tuple[int, int], tuple[InjectiveHom, ...]] = {}
        self._classes: tuple[tuple[int, ...], ...] | None = None

    # -- queries ------------------------------------------------------------

    def maps_from(self, P: SubgroupRef) -> list[tuple[int, ...]]:
        return sorted(self.store[P])

    def hom(self, P: SubgroupRef, Q: SubgroupRef) -> tuple[InjectiveHom, ...]:
        key = (self.sub_index[P], self.sub_index[Q])
        if key not in self._hom_cache:
            out = [
                InjectiveHom(P, Q, images, validate=False)
                for images in self.maps_from(P)
                if set(images) <= Q.indices
            ]
            self._hom_cache[key] = tuple(out)
        return self._hom_cache[key]

    def isos(self, P: SubgroupRef, Q: SubgroupRef) -> tuple[InjectiveHom, ...]:
        return tuple(h for h in self.hom(P, Q) if h.is_iso())

    def automorphisms(self, P: SubgroupRef) -> tuple[InjectiveHom, ...]:
        return self.isos(P, P)

    def contains(self, h: InjectiveHom) -> bool:
        return h.dom in self.store and h.images in self.store[h.dom] and h.image_indices <= h.cod.indices

    def classes(self) -> tuple[tuple[int, ...], ...]:
        """Conjugacy classes of subgroups, as index tuples into self.subgroups."""
        if self._classes is None:
            n = len(self.subgroups)
            parent_of = list(range(n))

            def find(i):
                while parent_of[i] != i:
                    parent_of[i] = parent_of[parent_of[i]]
                    i = parent_of[i]
                return i

            for i, P in enumerate(self.subgroups):
                for images in self.store[P]:
                    img = frozenset(images)
                    if len(img) == P.order:
                        j = self.sub_index[SubgroupRef(self.group, img, _trusted=True)]
                        ri, rj = find(i), find(j)
                        if ri != rj:
                            parent_of[max(ri, rj)] = min(ri, rj)
            groups: dict[int, list[int]] = {}
            for i in range(n):
                groups.setdefault(find(i), []).append(i)
            self._classes = tuple(tuple(sorted(v)) for _, v in sorted(groups.items()))
        return self._classes

    def class_of(self, P: SubgroupRef) -> tuple[int, ...]:
        i = self.sub_index[P]
        for cls in self.classes():
            if i in cls:
                return cls
        raise PreconditionError("subgroup not an object")  # pragma: no cover

    # -- local group data ----------------------------------------------------

    def aut_S(self, P: SubgroupRef) -> frozenset[tuple[int, ...]]:
        """Image tables of c_s restricted to P, s in N_S(P)."""
        N = normalizer_in(self.base, P)
        parent = self.group
        return frozenset(
            tuple(parent.conj(s, a) for a in P.sorted_indices) for s in N.sorted_indices
        )

    def aut_tables(self, P: SubgroupRef) -> frozenset[tuple[int, ...]]:
        return frozenset(t for t in self.store[P] if frozenset(t) == P.indices)

    def fully_normalized(self, P: SubgroupRef) -> bool:
        n = normalizer_in(self.base, P).order
        return all(
            normalizer_in(self.base, self.subgroups[j]).order <= n for j in self.class_of(P)
        )

    def fully_centralized(self, P: SubgroupRef) -> bool:
        z = centralizer_in(self.base, P).order
        return all(
            centralizer_in(self.base, self.subgroups[j]).order <= z for j in self.class_of(P)
        )

    def extender(self, phi: InjectiveHom) -> SubgroupRef:
        """N_phi: elements of N_S(P) whose conjugation transports through phi into Aut_S(Q)."""
        if not phi.is_iso():
            raise PreconditionError("extender is defined for isomorphisms")
        parent = self.group
        Q = phi.cod
        targets = self.aut_S(Q)
        members = []
        inv = phi.inverse()
        for n in normalizer_in(self.base, phi.dom).sorted_indices:
            table = tuple(phi.map(parent.conj(n, inv.map(b))) for b in Q.sorted_indices)
            if table in targets:
                members.append(n)
        return SubgroupRef(parent, frozenset(members), _trusted=True)

    def validate(self) -> None:
        """Well-formedness: S-conjugacy, divisibility/restriction closure, composition."""
        parent = self.group
        for s in self.base.sorted_indices:
            for P in self.subgroups:
                table = tuple(parent.conj(s, a) for a in P.sorted_indices)
                if table not in self.store[P]:
                    raise VerificationError("minimal fusion system not contained")
        subs_of: dict[SubgroupRef, tuple[SubgroupRef, ...]] = {}
        for P in self.subgroups:
            subs_of[P] = tuple(R for R in self.subgroups if R.indices <= P.indices)
        for P in self.subgroups:
            for images in self.store[P]:
                h = InjectiveHom(P, self.base, images, validate=False)
                h._validate()
                for R in subs_of[P]:
                    rest = tuple(h.map(a) for a in R.sorted_indices)
                    if rest not in self.store[R]:
                        raise VerificationError("restriction closure violated")
                img = SubgroupRef(parent, h.image_indices, _trusted=True)
                inv = InjectiveHom(P, img, images, validate=False).inverse()
                if inv.images not in self.store[img]:
                    raise VerificationError("induced isomorphism does not invert")
                for images2 in self.store[img]:
                    h2 = InjectiveHom(img, self.base, images2, validate=False)
                    comp = tuple(h2.map(b) for b in h.images)
                    if comp not in self.store[P]:
                        raise VerificationError("composition closure violated")


def ambient_fusion_system(G: PermGroup, S: SubgroupRef, p: int) -> FusionSystem:
    """The fusion system of G on its Sylow p-subgroup S: all c_g between subgroups."""
    if not is_sylow_in(S, G.whole(), p):
        raise PreconditionError("S is not a Sylow p-subgroup of G")
    subgroups = all_subgroups(S)
    store: dict[SubgroupRef, set[tuple[int, ...]]] = {}
    whole = G.whole()
    for P in subgroups:
        tables = set()
        for g in transporter_set(whole, P, S):
            tables.add(tuple(G.conj(g, a) for a in P.sorted_indices))
        store[P] = tables
    return FusionSystem(G, S, p, store, subgroups)


def fusion_system_from_seeds(
    group: PermGroup, base: SubgroupRef, p: int, seeds: list[InjectiveHom]
) -> FusionSystem:
    """The smallest fusion system on base containing the seeds: close under
    S-conjugation maps, restriction, and composition."""
    subgroups = all_subgroups(base)
    store: dict[SubgroupRef, set[tuple[int, ...]]] = {P: set() for P in subgroups}
    by_key = {P.indices: P for P in subgroups}

    def add(P: SubgroupRef, images: tuple[int, ...], queue: list) -> None:
        if images not in store[P]:
            store[P].add(images)
            queue.append((P, images))

    queue: list[tuple[SubgroupRef, tuple[int, ...]]] = []
    for s in base.sorted_indices:
        for P in subgroups:
            add(P, tuple(group.conj(s, a) for a in P.sorted_indices), queue)
    for h in seeds:
        if not h.image_indices <= base.indices or not h.dom.indices <= base.indices:
            raise PreconditionError("seed morphism leaves the base group")
        add(by_key[h.dom.indices], h.images, queue)
    while queue:
        P, images = queue.pop()
        h = InjectiveHom(P, base, images, validate=False)
        for R in subgroups:
            if R.indices < P.indices:
                add(R, tuple(h.map(a) for a in R.sorted_indices), queue)
        img = by_key[frozenset(images)]
        inv = InjectiveHom(P, img, images, validate=False).inverse()
        add(img, inv.images, queue)
        # close under composition on both sides
        for images2 in list(store[img]):
            h2 = InjectiveHom(img, base, images2, validate=False)
            add(P, tuple(h2.map(b) for b in images), queue)
        for Q in subgroups:
            for images0 in list(store[Q]):
                if frozenset(images0) == P.indices:
                    h0 = InjectiveHom(Q, base, images0, validate=False)
                    add(Q, tuple(h.map(b) for b in images0), queue)
    return FusionSystem(group, base, p, store, subgroups)


# ---------------------------------------------------------------------------
# saturation for plain fusion systems


@dataclass
class FusionSaturationReport:
    verdict: bool
    violations: list[tuple[str, str]] = field(default_factory=list)

    def add(self, axiom: str, detail: str) -> None:
        self.violations.append((axiom, detail))
        self.verdict = False


def is_saturated_fusion(F: FusionSystem) -> FusionSaturationReport:
    """Check the Sylow axioms on fully normalized subgroups and the extension
    axiom on isomorphisms into fully centralized subgroups."""
    report = FusionSaturationReport(verdict=True)
    p = F.p
    for P in F.subgroups:
        if F.fully_normalized(P):
            if not F.fully_centralized(P):
                report.add("sylow:normalized=>centralized", f"subgroup order {P.order}")
            autP = F.aut_tables(P)
            autS = F.aut_S(P)
            if not autS <= autP:
                report.add("sylow:aut_S inside", f"subgroup order {P.order}")
            elif p_part(len(autP), p) != len(autS):
                report.add("sylow:Aut_S(P) Sylow in F(P)", f"subgroup order {P.order}")
    for Q in F.subgroups:
        if not F.fully_centralized(Q):
            continue
        for cls_idx in F.class_of(Q):
            P = F.subgroups[cls_idx]
            for phi in F.isos(P, Q):
                N = F.extender(phi)
                extended = False
                for images in F.maps_from(N):
                    h = InjectiveHom(N, F.base, images, validate=False)
                    if all(h.map(a) == phi.map(a) for a in P.sorted_indices):
                        extended = True
                        break
                if not extended:
                    report.add(
                        "extension",
                        f"iso from order {P.order} into fully centralized order {Q.order} does not extend",
                    )
    return report


# ---------------------------------------------------------------------------
# translation and fusion-preserving automorphisms


def translate(gamma: InjectiveHom, eta: InjectiveHom) -> InjectiveHom:
    """t_gamma(eta) = gamma o eta o gamma^-1, defined on gamma(dom eta)."""
    if not (eta.dom.indices <= gamma.dom.indices and eta.cod.indices <= gamma.dom.indices):
        raise PreconditionError("translation needs eta inside the domain of gamma")
    new_dom = SubgroupRef(
        gamma.dom.parent, frozenset(gamma.map(a) for a in eta.dom.indices), _trusted=True
    )
    new_cod = SubgroupRef(
        gamma.dom.parent, frozenset(gamma.map(a) for a in eta.cod.indices), _trusted=True
    )
    images = tuple(gamma.map(eta.map(gamma_inv_map(gamma, b))) for b in new_dom.sorted_indices)
    return InjectiveHom(new_dom, new_cod, images, validate=False)


def gamma_inv_map(gamma: InjectiveHom, b: int) -> int:
    for a in gamma.dom.sorted_indices:
        if gamma.map(a) == b:
            return a
    raise PreconditionError("element not in the image")


def automorphism_group(P: SubgroupRef) -> tuple[InjectiveHom, ...]:
    """All group automorphisms of P, by brute-force extension of generator images."""
    parent = P.parent
    gens = P.gens()
    if not gens:
        return (InjectiveHom.identity(P),)
    orders = {g: parent.elements[g].order() for g in P.sorted_indices}
    candidates = {
        g: [h for h in P.sorted_indices if orders[h] == orders[g]] for g in gens
    }
    autos = []
    for images in product(*(candidates[g] for g in gens)):
        table = _extend_gen_images(P, gens, images)
        if table is not None:
            autos.append(InjectiveHom(P, P, table, validate=False))
    return tuple(sorted(autos, key=lambda h: h.images))


def _extend_gen_images(P: SubgroupRef, gens: tuple[int, ...], images: tuple[int, ...]) -> tuple[int, ...] | None:
    """Try to extend gens -> images to an automorphism; None if inconsistent or not onto."""
    parent = P.parent
    e = parent.identity_index
    mapping = {e: e}
    frontier = [e]
    while frontier:
        new = []
        for x in frontier:
            for g, img in zip(gens, images):
                y = parent.mul(x, g)
                fy = parent.mul(mapping[x], img)
                if y in mapping:
                    if mapping[y] != fy:
                        return None
                else:
                    mapping[y] = fy
                    new.append(y)
        frontier = new
    if len(mapping) != P.order or set(mapping.values()) != set(P.indices):
        return None
    return tuple(mapping[a] for a in P.sorted_indices)


@dataclass
class FusionAutGroups:
    """Fusion-preserving automorphisms of S, the inner ones, and coset data."""

    aut: tuple[InjectiveHom, ...]
    inn: tuple[InjectiveHom, ...]
    out_order: int
    coset_reps: tuple[InjectiveHom, ...]


def fusion_aut_groups(F: FusionSystem) -> FusionAutGroups:
    """Automorphisms of S whose translation preserves every hom-set of F."""
    S = F.base
    preserving = []
    for alpha in automorphism_group(S):
        if _preserves_fusion(F, alpha):
            preserving.append(alpha)
    inn = tuple(
        InjectiveHom(S, S, t, validate=False) for t in sorted(F.aut_tables(S))
    )
    inn_keys = {h.images for h in inn}
    if not inn_keys <= {h.images for h in preserving}:
        raise VerificationError("F(S) must consist of fusion-preserving maps")
    # Inn normal in Aut: verified by conjugating each inner map by each rep
    for alpha in preserving:
        inv = alpha.inverse()
        for h in inn:
            conj = alpha.compose(h).compose(inv)
            if conj.images not in inn_keys:
                raise VerificationError("Inn(F) is not normal in Aut(F)")
    reps: list[InjectiveHom] = []
    covered: set[tuple[int, ...]] = set()
    for alpha in preserving:
        if alpha.images in covered:
            continue
        reps.append(alpha)
        covered |= {alpha.compose(h).images for h in inn}
    return FusionAutGroups(
        aut=tuple(preserving),
        inn=inn,
        out_order=len(preserving) // len(inn),
        coset_reps=tuple(reps),
    )


def _preserves_fusion(F: FusionSystem, alpha: InjectiveHom) -> bool:
    by_key = {P.indices: P for P in F.subgroups}
    for P in F.subgroups:
        aP = by_key[frozenset(alpha.map(a) for a in P.indices)]
        got = set()
        for images in F.store[P]:
            h = InjectiveHom(P, F.base, images, validate=False)
            t = translate(alpha, h)
            got.add(t.images)
        if got != F.store[aP]:
            return False
    return True
