"""Fusion action systems: intertwined pairs (injective map, permutation of X).

A system stores, per domain subgroup P, the normal forms (phi table, sigma)
of its morphisms; a pair lives in every hom-set X(P, Q) with phi(P) <= Q.
This makes divisibility a storage invariant.  Everything is deterministic:
normal forms sort lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, VerificationError
from .fusion import FusionSystem, InjectiveHom
from .permgroup import (
    GroupAction,
    Perm,
    PermGroup,
    SubgroupRef,
    all_subgroups,
    centralizer_in,
    intersect,
    is_sylow_in,
    normalizer_in,
    p_part,
    sylow_in_set,
    transporter_set,
)

Pair = tuple[tuple[int, ...], tuple[int, ...]]  # (phi table, sigma images)


class FAMorphism:
    """A morphism (phi, sigma): P -> Q with sigma a permutation of X."""

    __slots__ = ("dom", "cod", "phi", "sigma", "_map")

    def __init__(self, dom: SubgroupRef, cod: SubgroupRef, phi: tuple[int, ...], sigma: tuple[int, ...]):
        self.dom = dom
        self.cod = cod
        self.phi = tuple(phi)
        self.sigma = tuple(sigma)
        self._map: dict[int, int] | None = None

    def map(self, elem_idx: int) -> int:
        if self._map is None:
            self._map = dict(zip(self.dom.sorted_indices, self.phi))
        return self._map[elem_idx]

    @property
    def image_indices(self) -> frozenset[int]:
        return frozenset(self.phi)

    def image_subgroup(self) -> SubgroupRef:
        return SubgroupRef(self.dom.parent, self.image_indices, _trusted=True)

    def is_iso(self) -> bool:
        return self.image_indices == self.cod.indices

    def sigma_perm(self) -> Perm:
        return Perm(self.sigma)

    def phi_hom(self) -> InjectiveHom:
        return InjectiveHom(self.dom, self.cod, self.phi, validate=False)

    def pair(self) -> Pair:
        return (self.phi, self.sigma)

    def compose(self, first: "FAMorphism") -> "FAMorphism":
        """self o first; needs image(first) inside dom(self)."""
        if not first.image_indices <= self.dom.indices:
            raise PreconditionError("morphisms not composable")
        phi = tuple(self.map(b) for b in first.phi)
        sigma = tuple(self.sigma[x] for x in first.sigma)
        return FAMorphism(first.dom, self.cod, phi, sigma)

    def inverse(self) -> "FAMorphism":
        if not self.is_iso():
            raise PreconditionError("only isomorphisms invert")
        back = dict(zip(self.phi, self.dom.sorted_indices))
        phi = tuple(back[b] for b in self.cod.sorted_indices)
        inv = [0] * len(self.sigma)
        for i, j in enumerate(self.sigma):
            inv[j] = i
        return FAMorphism(self.cod, self.dom, phi, tuple(inv))

    def restrict(self, R: SubgroupRef, cod: SubgroupRef | None = None) -> "FAMorphism":
        if not R.indices <= self.dom.indices:
            raise PreconditionError("restriction domain not contained")
        phi = tuple(self.map(a) for a in R.sorted_indices)
        target = cod if cod is not None else SubgroupRef(self.dom.parent, frozenset(phi), _trusted=True)
        if cod is not None and not set(phi) <= cod.indices:
            raise PreconditionError("restriction escapes requested codomain")
        return FAMorphism(R, target, phi, self.sigma)

    def with_codomain(self, Q: SubgroupRef) -> "FAMorphism":
        if not self.image_indices <= Q.indices:
            raise PreconditionError("codomain does not contain the image")
        return FAMorphism(self.dom, Q, self.phi, self.sigma)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FAMorphism)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.phi == other.phi
            and self.sigma == other.sigma
        )

    def __hash__(self) -> int:
        return hash((self.dom.indices, self.cod.indices, self.phi, self.sigma))

    def __repr__(self) -> str:
        return f"FAMorphism(|dom|={self.dom.order}, sigma={Perm(self.sigma).cycle_string()}, iso={self.is_iso()})"


def is_intertwined(phi: InjectiveHom, sigma: Perm, action: GroupAction) -> bool:
    """sigma l_p sigma^-1 == l_{phi(p)} for every p in the domain."""
    sinv = sigma.inverse()
    for a in phi.dom.sorted_indices:
        if sigma * action.of(a) * sinv != action.of(phi.map(a)):
            return False
    return True


class FusionActionSystem:
    """A fusion action system on S acting on X = {0..set_size-1}."""

    def __init__(
        self,
        group: PermGroup,
        base: SubgroupRef,
        p: int,
        action: GroupAction,
        store: dict[SubgroupRef, set[Pair]],
        subgroups: tuple[SubgroupRef, ...] | None = None,
    ):
        if action.set_size < 1:
            raise PreconditionError("the acted-on set must be nonempty")
        self.group = group
        self.base = base
        self.p = p
        self.action = action
        self.subgroups = subgroups if subgroups is not None else all_subgroups(base)
        self.sub_index = {P: i for i, P in enumerate(self.subgroups)}
        self.store: dict[SubgroupRef, set[Pair]] = {P: set(store.get(P, ())) for P in self.subgroups}
        self._by_sigma: dict[SubgroupRef, dict[tuple[int, ...], tuple[tuple[int, ...], ...]]] = {}
        self._hom_cache: dict[tuple[int, int], tuple[FAMorphism, ...]] = {}
        self._classes: tuple[tuple[int, ...], ...] | None = None
        self._norms: dict[SubgroupRef, SubgroupRef] = {}
        self._cents: dict[SubgroupRef, SubgroupRef] = {}
        self._core: SubgroupRef | None = None

    # -- structure ------------------------------------------------------------

    @property
    def set_size(self) -> int:
        return self.action.set_size

    def core(self) -> SubgroupRef:
        if self._core is None:
            self._core = self.action.core(self.base)
        return self._core

    def n_s(self, P: SubgroupRef) -> SubgroupRef:
        if P not in self._norms:
            self._norms[P] = normalizer_in(self.base, P)
        return self._norms[P]

    def z_s(self, P: SubgroupRef) -> SubgroupRef:
        if P not in self._cents:
            self._cents[P] = centralizer_in(self.base, P)
        return self._cents[P]

    def n_s_x(self, P: SubgroupRef) -> SubgroupRef:
        return intersect(self.n_s(P), self.core())

    def z_s_x(self, P: SubgroupRef) -> SubgroupRef:
        return intersect(self.z_s(P), self.core())

    def z_x(self, P: SubgroupRef) -> SubgroupRef:
        """Z(P;X) = Z(P) intersected with the core."""
        return intersect(centralizer_in(P, P), self.core())

    # -- morphism queries -------------------------------------------------------

    def maps_from(self, P: SubgroupRef) -> list[Pair]:
        return sorted(self.store[P])

    def by_sigma(self, P: SubgroupRef) -> dict[tuple[int, ...], tuple[tuple[int, ...], ...]]:
        if P not in self._by_sigma:
            acc: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
            for phi, sigma in sorted(self.store[P]):
                acc.setdefault(sigma, []).append(phi)
            self._by_sigma[P] = {s: tuple(v) for s, v in acc.items()}
        return self._by_sigma[P]

    def hom(self, P: SubgroupRef, Q: SubgroupRef) -> tuple[FAMorphism, ...]:
        key = (self.sub_index[P], self.sub_index[Q])
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(
                FAMorphism(P, Q, phi, sigma)
                for phi, sigma in self.maps_from(P)
                if set(phi) <= Q.indices
            )
        return self._hom_cache[key]

    def isos(self, P: SubgroupRef, Q: SubgroupRef) -> tuple[FAMorphism, ...]:
        return tuple(m for m in self.hom(P, Q) if m.is_iso())

    def automorphism_pairs(self, P: SubgroupRef) -> frozenset[Pair]:
        return frozenset(
            (phi, sigma) for phi, sigma in self.store[P] if frozenset(phi) == P.indices
        )

    def contains(self, m: FAMorphism) -> bool:
        return (
            m.dom in self.store
            and (m.phi, m.sigma) in self.store[m.dom]
            and m.image_indices <= m.cod.indices
        )

    def pair_mul(self, P: SubgroupRef, a: Pair, b: Pair) -> Pair:
        """(a o b) as automorphism pairs of P."""
        phi = tuple(a[0][P.pos_of(x)] for x in b[0])
        sigma = tuple(a[1][x] for x in b[1])
        return (phi, sigma)

    def identity_pair(self, P: SubgroupRef) -> Pair:
        return (P.sorted_indices, tuple(range(self.set_size)))

    # -- conjugation data --------------------------------------------------------

    def s_pair(self, s: int, P: SubgroupRef) -> Pair:
        group = self.group
        return (
            tuple(group.conj(s, a) for a in P.sorted_indices),
            self.action.of(s).images,
        )

    def aut_S_pairs(self, P: SubgroupRef) -> frozenset[Pair]:
        return frozenset(self.s_pair(n, P) for n in self.n_s(P).sorted_indices)

    # -- classes -------------------------------------------------------------------

    def classes(self) -> tuple[tuple[int, ...], ...]:
        if self._classes is None:
            n = len(self.subgroups)
            parent_of = list(range(n))

            def find(i):
                while parent_of[i] != i:
                    parent_of[i] = parent_of[parent_of[i]]
                    i = parent_of[i]
                return i

            for i, P in enumerate(self.subgroups):
                for phi, _ in self.store[P]:
                    img = frozenset(phi)
                    if len(img) == P.order:
                        j = self.sub_index[SubgroupRef(self.group, img, _trusted=True)]
                        ri, rj = find(i), find(j)
                        if ri != rj:
                            parent_of[max(ri, rj)] = min(ri, rj)
            acc: dict[int, list[int]] = {}
            for i in range(n):
                acc.setdefault(find(i), []).append(i)
            self._classes = tuple(tuple(sorted(v)) for _, v in sorted(acc.items()))
        return self._classes

    def class_of(self, P: SubgroupRef) -> tuple[int, ...]:
        i = self.sub_index[P]
        for cls in self.classes():
            if i in cls:
                return cls
        raise PreconditionError("subgroup is not an object")  # pragma: no cover

    # -- transitivity -------------------------------------------------------------

    def point_group(self) -> frozenset[tuple[int, ...]]:
        """The permutations of X appearing at the trivial subgroup."""
        triv = self.subgroups[0]
        if not triv.is_trivial():  # pragma: no cover - subgroups sorted by order
            raise VerificationError("first subgroup must be trivial")
        return frozenset(sigma for _, sigma in self.store[triv])

    def is_transitive(self) -> bool:
        seen = {0}
        frontier = [0]
        perms = self.point_group()
        while frontier:
            new = []
            for x in frontier:
                for sigma in perms:
                    y = sigma[x]
                    if y not in seen:
                        seen.add(y)
                        new.append(y)
            frontier = new
        return len(seen) == self.set_size

    # -- well-formedness ------------------------------------------------------------

    def validate(self, deep: bool = False) -> None:
        group = self.group
        if self.set_size < 1:
            raise VerificationError("empty set")
        for P in self.subgroups:
            minimal = self.aut_S_minimal_pairs(P)
            if not minimal <= self.store[P]:
                raise VerificationError("minimal fusion action system not contained")
        for P in self.subgroups:
            for phi, sigma in self.store[P]:
                m = FAMorphism(P, self.base, phi, sigma)
                if not is_intertwined(m.phi_hom(), Perm(sigma), self.action):
                    raise VerificationError("stored pair is not intertwined")
                if deep:
                    m.phi_hom()._validate()
                for R in self.subgroups:
                    if R.indices < P.indices:
                        rest = (tuple(m.map(a) for a in R.sorted_indices), sigma)
                        if rest not in self.store[R]:
                            raise VerificationError("restriction closure violated")
                img = SubgroupRef(group, frozenset(phi), _trusted=True)
                inv = FAMorphism(P, img, phi, sigma).inverse()
                if (inv.phi, inv.sigma) not in self.store[img]:
                    raise VerificationError("induced isomorphism does not invert")
                for phi2, sigma2 in self.store[img]:
                    m2 = FAMorphism(img, self.base, phi2, sigma2)
                    comp = (
                        tuple(m2.map(b) for b in phi),
                        tuple(sigma2[x] for x in sigma),
                    )
                    if comp not in self.store[P]:
                        raise VerificationError("composition closure violated")

    def aut_S_minimal_pairs(self, P: SubgroupRef) -> set[Pair]:
        """Pairs (c_s|_P, l_s) for s in S with sPs^-1 <= S (all s, since S is the base)."""
        return {self.s_pair(s, P) for s in self.base.sorted_indices}

    # -- extenders -------------------------------------------------------------------

    def extender(self, m: FAMorphism) -> SubgroupRef:
        """N_(phi,sigma) <= N_S(P): elements transporting through m into Aut_S(Q;X)."""
        if not m.is_iso():
            raise PreconditionError("extender is defined for isomorphisms")
        group = self.group
        P, Q = m.dom, m.cod
        targets = self.aut_S_pairs(Q)
        inv = m.inverse()
        sig = Perm(m.sigma)
        sig_inv = sig.inverse()
        members = []
        for n in self.n_s(P).sorted_indices:
            phi_conj = tuple(m.map(group.conj(n, inv.map(b))) for b in Q.sorted_indices)
            sigma_conj = (sig * self.action.of(n) * sig_inv).images
            if (phi_conj, sigma_conj) in targets:
                members.append(n)
        return SubgroupRef(group, frozenset(members), _trusted=True)

    def extension_exists(self, m: FAMorphism, N: SubgroupRef) -> bool:
        """Is there a stored (phi~, sigma) from N restricting to m on dom(m)?"""
        for phi in self.by_sigma(N).get(m.sigma, ()):  # same sigma required
            ext = FAMorphism(N, self.base, phi, m.sigma)
            if all(ext.map(a) == m.map(a) for a in m.dom.sorted_indices):
                return True
        return False

    # -- equality ---------------------------------------------------------------------

    def same_homs(self, other: "FusionActionSystem") -> bool:
        if [P.indices for P in self.subgroups] != [P.indices for P in other.subgroups]:
            return False
        return all(
            self.store[P] == other.store[Q]
            for P, Q in zip(self.subgroups, other.subgroups)
        )


# ---------------------------------------------------------------------------
# constructors


def ambient_fusion_action(
    G: PermGroup, S: SubgroupRef, action: GroupAction, p: int
) -> FusionActionSystem:
    """X_G: morphisms (c_g|_P, l_g) for g transporting P into S, deduplicated."""
    if action.group is not G:
        raise PreconditionError("action must be an action of G")
    if not is_sylow_in(S, G.whole(), p):
        raise PreconditionError("S is not a Sylow p-subgroup of G")
    subgroups = all_subgroups(S)
    whole = G.whole()
    store: dict[SubgroupRef, set[Pair]] = {}
    for P in subgroups:
        pairs: set[Pair] = set()
        for g in transporter_set(whole, P, S):
            pairs.add(
                (
                    tuple(G.conj(g, a) for a in P.sorted_indices),
                    action.of(g).images,
                )
            )
        store[P] = pairs
    return FusionActionSystem(G, S, p, action, store, subgroups)


def minimal_fusion_action(S_group: PermGroup, action: GroupAction, p: int) -> FusionActionSystem:
    """X_S for a standalone p-group with a chosen action."""
    return ambient_fusion_action(S_group, S_group.whole(), action, p)


def fusion_action_from_seeds(
    group: PermGroup,
    base: SubgroupRef,
    p: int,
    action: GroupAction,
    seeds: list[FAMorphism],
) -> FusionActionSystem:
    """Smallest fusion action system containing the seeds: closed under the
    minimal system, restriction, and composition.  Seeds must be intertwined."""
    subgroups = all_subgroups(base)
    by_key = {P.indices: P for P in subgroups}
    store: dict[SubgroupRef, set[Pair]] = {P: set() for P in subgroups}

    queue: list[tuple[SubgroupRef, Pair]] = []

    def add(P: SubgroupRef, pair: Pair) -> None:
        if pair not in store[P]:
            store[P].add(pair)
            queue.append((P, pair))

    dummy = FusionActionSystem(group, base, p, action, {P: set() for P in subgroups}, subgroups)
    for P in subgroups:
        for pair in dummy.aut_S_minimal_pairs(P):
            add(P, pair)
    for m in seeds:
        if not (m.dom.indices <= base.indices and m.image_indices <= base.indices):
            raise PreconditionError("seed morphism leaves the base group")
        if not is_intertwined(m.phi_hom(), Perm(m.sigma), action):
            raise PreconditionError("seed morphism is not intertwined")
        add(by_key[m.dom.indices], (m.phi, m.sigma))
    while queue:
        P, (phi, sigma) = queue.pop()
        m = FAMorphism(P, base, phi, sigma)
        for R in subgroups:
            if R.indices < P.indices:
                add(R, (tuple(m.map(a) for a in R.sorted_indices), sigma))
        img = by_key[frozenset(phi)]
        # the induced isomorphism inverts inside the system
        inv = FAMorphism(P, img, phi, sigma).inverse()
        add(img, (inv.phi, inv.sigma))
        for phi2, sigma2 in list(store[img]):
            m2 = FAMorphism(img, base, phi2, sigma2)
            add(P, (tuple(m2.map(b) for b in phi), tuple(sigma2[x] for x in sigma)))
        for Q in subgroups:
            for phi0, sigma0 in list(store[Q]):
                if frozenset(phi0) == P.indices:
                    add(Q, (tuple(m.map(b) for b in phi0), tuple(sigma[x] for x in sigma0)))
    return FusionActionSystem(group, base, p, action, store, subgroups)


def underlying_fusion_system(X: FusionActionSystem) -> FusionSystem:
    """First-coordinate projection of every hom-set."""
    store = {
        P: {phi for phi, _ in pairs} for P, pairs in X.store.items()
    }
    return FusionSystem(X.group, X.base, X.p, store, X.subgroups)


# ---------------------------------------------------------------------------
# automizer diamond


@dataclass
class AutomizerDiamond:
    """The five automizer groups of P plus their S-relative versions.

    full: pairs (phi, sigma); fusion / sigma: projections; fusion0 / sigma0:
    the two kernels.  Orders satisfy |full| = |sigma0| * |fusion| = |fusion0| * |sigma|.
    """

    full: frozenset[Pair]
    fusion: frozenset[tuple[int, ...]]
    sigma: frozenset[tuple[int, ...]]
    fusion0: frozenset[tuple[int, ...]]
    sigma0: frozenset[tuple[int, ...]]
    s_full: frozenset[Pair]
    s_fusion: frozenset[tuple[int, ...]]
    s_sigma: frozenset[tuple[int, ...]]
    s_fusion0: frozenset[tuple[int, ...]]
    s_sigma0: frozenset[tuple[int, ...]]

    def check_exactness(self) -> None:
        if len(self.full) != len(self.sigma0) * len(self.fusion):
            raise VerificationError("exactness |X(P)| = |Sigma0| |F(P)| fails")
        if len(self.full) != len(self.fusion0) * len(self.sigma):
            raise VerificationError("exactness |X(P)| = |F0| |Sigma(P)| fails")
        if len(self.s_full) != len(self.s_sigma0) * len(self.s_fusion):
            raise VerificationError("exactness fails for the S-versions")
        if len(self.s_full) != len(self.s_fusion0) * len(self.s_sigma):
            raise VerificationError("exactness fails for the S-versions")


def automizer_diamond(X: FusionActionSystem, P: SubgroupRef) -> AutomizerDiamond:
    full = X.automorphism_pairs(P)
    id_phi = P.sorted_indices
    id_sigma = tuple(range(X.set_size))
    fusion = frozenset(phi for phi, _ in full)
    sigma = frozenset(s for _, s in full)
    fusion0 = frozenset(phi for phi, s in full if s == id_sigma)
    sigma0 = frozenset(s for phi, s in full if phi == id_phi)
    s_full = X.aut_S_pairs(P)
    s_fusion = frozenset(phi for phi, _ in s_full)
    s_sigma = frozenset(s for _, s in s_full)
    s_fusion0 = frozenset(
        tuple(X.group.conj(n, a) for a in P.sorted_indices)
        for n in X.n_s_x(P).sorted_indices
    )
    s_sigma0 = frozenset(X.action.of(z).images for z in X.z_s(P).sorted_indices)
    diamond = AutomizerDiamond(
        full, fusion, sigma, fusion0, sigma0,
        s_full, s_fusion, s_sigma, s_fusion0, s_sigma0,
    )
    diamond.check_exactness()
    return diamond


# ---------------------------------------------------------------------------
# fully-* classification


@dataclass
class FullyFlags:
    normalized: bool
    centralized: bool
    x_normalized: bool
    x_centralized: bool
    automized: bool
    receiving: bool


def classify_fully(X: FusionActionSystem, P: SubgroupRef) -> FullyFlags:
    cls = [X.subgroups[j] for j in X.class_of(P)]
    n = X.n_s(P).order
    z = X.z_s(P).order
    nx = X.n_s_x(P).order
    zx = X.z_s_x(P).order
    flags = FullyFlags(
        normalized=all(X.n_s(Q).order <= n for Q in cls),
        centralized=all(X.z_s(Q).order <= z for Q in cls),
        x_normalized=all(X.n_s_x(Q).order <= nx for Q in cls),
        x_centralized=all(X.z_s_x(Q).order <= zx for Q in cls),
        automized=is_fully_automized(X, P),
        receiving=is_receiving(X, P),
    )
    return flags


def is_fully_automized(X: FusionActionSystem, P: SubgroupRef) -> bool:
    return sylow_in_set(X.aut_S_pairs(P), X.automorphism_pairs(P), X.p)


def is_receiving(X: FusionActionSystem, P: SubgroupRef) -> bool:
    """Every isomorphism into P extends to its extender."""
    for j in X.class_of(P):
        Q = X.subgroups[j]
        for m in X.isos(Q, P):
            if not X.extension_exists(m, X.extender(m)):
                return False
    return True


# ---------------------------------------------------------------------------
# centricity


@dataclass
class CentricFlags:
    p_centric_at_x: bool | None  # None when no ambient data given
    f_centric_at_x: bool
    p_centric: bool | None


def f_centric_at_x(X: FusionActionSystem, P: SubgroupRef) -> bool:
    """Z(Q;X) = Z_S(Q;X) for every conjugate Q of P."""
    for j in X.class_of(P):
        Q = X.subgroups[j]
        if X.z_x(Q).indices != X.z_s_x(Q).indices:
            return False
    return True


def x_centric_objects(X: FusionActionSystem) -> tuple[SubgroupRef, ...]:
    return tuple(P for P in X.subgroups if f_centric_at_x(X, P))


def x_centric_classify(
    X: FusionActionSystem, ambient: tuple[PermGroup, GroupAction] | None = None
) -> dict[SubgroupRef, CentricFlags]:
    """All three centricity flags per subgroup; with ambient data, the two
    X-centric notions are asserted to agree."""
    out: dict[SubgroupRef, CentricFlags] = {}
    for P in X.subgroups:
        fcx = f_centric_at_x(X, P)
        pcx = pc = None
        if ambient is not None:
            G, action = ambient
            whole = G.whole()
            core_g = action.core(whole)
            z_px = intersect(centralizer_in(P, P), core_g)
            z_gx = intersect(centralizer_in(whole, P), core_g)
            pcx = z_px.order == p_part(z_gx.order, X.p)
            z_p = centralizer_in(P, P)
            z_g = centralizer_in(whole, P)
            pc = z_p.order == p_part(z_g.order, X.p)
            if pcx != fcx:
                raise VerificationError(
                    "ambient and fusion-side X-centricity disagree; system is inconsistent"
                )
        out[P] = CentricFlags(p_centric_at_x=pcx, f_centric_at_x=fcx, p_centric=pc)
    return out


def intertwining_perms(phi: InjectiveHom, action: GroupAction) -> list[tuple[int, ...]]:
    """All permutations of X intertwining phi, found by backtracking.

    The constraint sigma(l_p(x)) = l_{phi(p)}(sigma(x)) is propagated from the
    generators of the domain, so the search prunes hard.
    """
    n = action.set_size
    gens = phi.dom.gens()
    pairs = [(action.of(g).images, action.of(phi.map(g)).images) for g in gens]
    out: list[tuple[int, ...]] = []
    sigma = [-1] * n
    used = [False] * n

    def assign(x: int, y: int, trail: list[int]) -> bool:
        stack = [(x, y)]
        while stack:
            a, b = stack.pop()
            if sigma[a] == b:
                continue
            if sigma[a] != -1 or used[b]:
                return False
            sigma[a] = b
            used[b] = True
            trail.append(a)
            for lp, lq in pairs:
                stack.append((lp[a], lq[b]))
        return True

    def undo(trail: list[int]) -> None:
        for a in trail:
            used[sigma[a]] = False
            sigma[a] = -1

    def search(x: int) -> None:
        while x < n and sigma[x] != -1:
            x += 1
        if x == n:
            out.append(tuple(sigma))
            return
        for y in range(n):
            if used[y]:
                continue
            trail: list[int] = []
            if assign(x, y, trail):
                search(x + 1)
            undo(trail)

    search(0)
    return sorted(out)


def aut_pair_group(P: SubgroupRef, action: GroupAction) -> frozenset[Pair]:
    """Aut(P;X): all intertwined pairs (group automorphism of P, perm of X)."""
    from .fusion import automorphism_group

    pairs: set[Pair] = set()
    for alpha in automorphism_group(P):
        for sigma in intertwining_perms(alpha, action):
            pairs.add((alpha.images, sigma))
    return frozenset(pairs)


def pair_mul_on(P: SubgroupRef):
    """Composition of automorphism pairs of P (first argument applied last)."""

    def mul(a: Pair, b: Pair) -> Pair:
        phi = tuple(a[0][P.pos_of(x)] for x in b[0])
        sigma = tuple(a[1][x] for x in b[1])
        return (phi, sigma)

    return mul


def pair_inverse_on(P: SubgroupRef):
    def inv(a: Pair) -> Pair:
        back = dict(zip(a[0], P.sorted_indices))
        phi = tuple(back[b] for b in P.sorted_indices)
        sig = [0] * len(a[1])
        for i, j in enumerate(a[1]):
            sig[j] = i
        return (phi, tuple(sig))

    return inv


def is_f_stable(action: GroupAction, F: FusionSystem) -> bool:
    """Fixed-point counts |X^P| agree across every conjugacy class of F."""
    counts = {P: len(action.fixed_points(P)) for P in F.subgroups}
    for cls in F.classes():
        vals = {counts[F.subgroups[j]] for j in cls}
        if len(vals) > 1:
            return False
    return True
