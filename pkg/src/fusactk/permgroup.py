"""Exact finite permutation groups with full element enumeration.

Groups are kept as explicitly sorted element lists (no stabilizer chains):
the point of the toolkit is exhaustive verification at desk scale, so brute
force with hard caps wins on auditability.  Canonical order everywhere is
lexicographic on image arrays, which makes every set-valued operation
deterministic.
"""

from __future__ import annotations

import os
from functools import reduce
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

from .errors import CapExceededError, ParseError, PreconditionError, VerificationError

DEFAULT_MAX_ORDER = 20_000
DEFAULT_MAX_PGROUP = 256

T = TypeVar("T")


def max_order_cap() -> int:
    """Closure cap; overridable through the FUSACTK_MAX_ORDER environment variable."""
    raw = os.environ.get("FUSACTK_MAX_ORDER")
    if raw is None:
        return DEFAULT_MAX_ORDER
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParseError(f"FUSACTK_MAX_ORDER must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ParseError("FUSACTK_MAX_ORDER must be positive")
    return value


# ---------------------------------------------------------------------------
# permutations


class Perm:
    """A permutation of {0..n-1}, stored as its image tuple.

    Composition is function composition: (p * q)(x) == p(q(x)).
    """

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        n = len(images)
        seen = [False] * n
        for i in images:
            if not isinstance(i, int) or not 0 <= i < n or seen[i]:
                raise ParseError(f"not a bijection of 0..{n - 1}: {images}")
            seen[i] = True
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("Perm is immutable")

    @staticmethod
    def identity(degree: int) -> "Perm":
        return Perm(range(degree))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Perm") -> "Perm":
        if len(self.images) != len(other.images):
            raise PreconditionError("degree mismatch in composition")
        img = self.images
        return Perm(tuple(img[j] for j in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(inv)

    def __pow__(self, n: int) -> "Perm":
        if n < 0:
            return self.inverse() ** (-n)
        result = Perm.identity(self.degree)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def order(self) -> int:
        k, q = 1, self
        e = Perm.identity(self.degree)
        while q != e:
            q = q * self
            k += 1
        return k

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each rotated to start at its least point, sorted."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            nxt = self.images[start]
            while nxt != start:
                cyc.append(nxt)
                seen[nxt] = True
                nxt = self.images[nxt]
            out.append(tuple(cyc))
        return sorted(out)

    def cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __lt__(self, other: "Perm") -> bool:
        return self.images < other.images

    def __le__(self, other: "Perm") -> bool:
        return self.images <= other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Perm{self.cycle_string()}"


def parse_cycles(text: str, degree: int) -> Perm:
    """Parse cycle notation like "(0 1 2)(3 4)"; the identity is "()".

    Points are 0-based and whitespace-separated inside each parenthesis pair.
    """
    s = text.strip()
    if not s:
        raise ParseError("empty permutation string")
    images = list(range(degree))
    moved: set[int] = set()
    i = 0
    saw_any = False
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        if ch != "(":
            raise ParseError(f"expected '(' at position {i} in {text!r}")
        j = s.find(")", i)
        if j < 0:
            raise ParseError(f"unbalanced '(' in {text!r}")
        body = s[i + 1 : j].strip()
        saw_any = True
        i = j + 1
        if not body:
            continue
        try:
            pts = [int(tok) for tok in body.split()]
        except ValueError as exc:
            raise ParseError(f"non-integer point in cycle {body!r}") from exc
        for p in pts:
            if not 0 <= p < degree:
                raise ParseError(f"point {p} out of range for degree {degree}")
            if p in moved:
                raise ParseError(f"point {p} repeated in {text!r}")
            moved.add(p)
        if len(pts) >= 2:
            for a, b in zip(pts, pts[1:]):
                images[a] = b
            images[pts[-1]] = pts[0]
    if not saw_any:
        raise ParseError(f"no cycles found in {text!r}")
    return Perm(images)


# ---------------------------------------------------------------------------
# groups


class PermGroup:
    """A finite permutation group with its full, canonically sorted element list."""

    def __init__(self, degree: int, generators: Iterable[Perm], max_order: int | None = None):
        gens = tuple(generators)
        for g in gens:
            if g.degree != degree:
                raise PreconditionError(f"generator degree {g.degree} != {degree}")
        cap = max_order if max_order is not None else max_order_cap()
        elems = _closure(gens, Perm.identity(degree), cap)
        self.degree = degree
        self.generators = gens
        self.elements: tuple[Perm, ...] = tuple(sorted(elems))
        self.index: dict[Perm, int] = {g: i for i, g in enumerate(self.elements)}
        self.identity_index = self.index[Perm.identity(degree)]
        self._inv = tuple(self.index[g.inverse()] for g in self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.index[self.elements[i] * self.elements[j]]

    def inv(self, i: int) -> int:
        return self._inv[i]

    def conj(self, g: int, a: int) -> int:
        """Index of g a g^-1."""
        ge = self.elements[g]
        return self.index[ge * self.elements[a] * self.elements[self._inv[g]]]

    def whole(self) -> "SubgroupRef":
        return SubgroupRef(self, frozenset(range(self.order)), _trusted=True)

    def trivial(self) -> "SubgroupRef":
        return SubgroupRef(self, frozenset({self.identity_index}), _trusted=True)

    def subgroup(self, indices: Iterable[int], validate: bool = True) -> "SubgroupRef":
        return SubgroupRef(self, frozenset(indices), _trusted=not validate)

    def subgroup_of_perms(self, perms: Iterable[Perm], validate: bool = True) -> "SubgroupRef":
        return self.subgroup((self.index[p] for p in perms), validate=validate)

    def closure_of(self, indices: Iterable[int]) -> "SubgroupRef":
        # words in the generators suffice: a finite set closed under product
        # containing 1 is a subgroup
        seed = sorted(set(indices) | {self.identity_index})
        members = {self.identity_index}
        frontier = [self.identity_index]
        while frontier:
            nxt = []
            for a in frontier:
                for b in seed:
                    c = self.mul(a, b)
                    if c not in members:
                        members.add(c)
                        nxt.append(c)
            frontier = nxt
        return SubgroupRef(self, frozenset(members), _trusted=True)

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


def _closure(gens: Sequence[Perm], identity: Perm, cap: int) -> set[Perm]:
    elems = {identity}
    frontier = [identity]
    while frontier:
        new: list[Perm] = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in elems:
                    elems.add(y)
                    if len(elems) > cap:
                        raise CapExceededError(f"group order exceeds cap {cap}")
                    new.append(y)
        frontier = new
    return elems


def generate_group(degree: int, generator_perms: Iterable[Perm | str], max_order: int | None = None) -> PermGroup:
    """Build a group from generators given as Perms or cycle-notation strings."""
    gens = [parse_cycles(g, degree) if isinstance(g, str) else g for g in generator_perms]
    return PermGroup(degree, gens, max_order=max_order)


class SubgroupRef:
    """A subgroup of a parent PermGroup, referenced by its member index set.

    Equality and hashing are by element set; two refs with equal element sets
    are the same subgroup.
    """

    __slots__ = ("parent", "indices", "sorted_indices", "_pos", "_gens", "_key")

    def __init__(self, parent: PermGroup, indices: frozenset[int], _trusted: bool = False):
        self.parent = parent
        self.indices = frozenset(indices)
        if not self.indices:
            raise PreconditionError("a subgroup is never empty")
        if parent.identity_index not in self.indices:
            raise PreconditionError("subgroup must contain the identity")
        self.sorted_indices: tuple[int, ...] = tuple(sorted(self.indices))
        self._pos: dict[int, int] | None = None
        self._gens: tuple[int, ...] | None = None
        self._key: tuple[tuple[int, ...], ...] | None = None
        if not _trusted:
            for a in self.sorted_indices:
                if parent.inv(a) not in self.indices:
                    raise PreconditionError("member set not closed under inverse")
                for b in self.sorted_indices:
                    if parent.mul(a, b) not in self.indices:
                        raise PreconditionError("member set not closed under composition")

    @property
    def order(self) -> int:
        return len(self.indices)

    def pos_of(self, idx: int) -> int:
        if self._pos is None:
            self._pos = {a: k for k, a in enumerate(self.sorted_indices)}
        return self._pos[idx]

    def gens(self) -> tuple[int, ...]:
        """A small generating set, found greedily in canonical order."""
        if self._gens is None:
            parent = self.parent
            chosen: list[int] = []
            have = {parent.identity_index}
            for idx in self.sorted_indices:
                if idx in have:
                    continue
                chosen.append(idx)
                have = set(parent.closure_of(chosen).indices)
                if len(have) == self.order:
                    break
            self._gens = tuple(chosen)
        return self._gens

    def elements(self) -> tuple[Perm, ...]:
        return tuple(self.parent.elements[i] for i in self.sorted_indices)

    def canonical_key(self) -> tuple[tuple[int, ...], ...]:
        if self._key is None:
            self._key = tuple(self.parent.elements[i].images for i in self.sorted_indices)
        return self._key

    def contains(self, other: "SubgroupRef") -> bool:
        return other.indices <= self.indices

    def is_trivial(self) -> bool:
        return self.order == 1

    def as_permgroup(self) -> PermGroup:
        """The same subgroup as a standalone PermGroup on the same points."""
        return PermGroup(self.parent.degree, self.elements(), max_order=self.order)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubgroupRef)
            and self.parent is other.parent
            and self.indices == other.indices
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.indices))

    def __repr__(self) -> str:
        return f"SubgroupRef(order={self.order})"


def conjugate_subgroup(g: int, H: SubgroupRef) -> SubgroupRef:
    parent = H.parent
    return SubgroupRef(parent, frozenset(parent.conj(g, a) for a in H.indices), _trusted=True)


def normalizer_in(universe: SubgroupRef, P: SubgroupRef) -> SubgroupRef:
    parent = universe.parent
    gens = P.gens() or (parent.identity_index,)
    members = [
        u
        for u in universe.sorted_indices
        if all(parent.conj(u, a) in P.indices for a in gens)
    ]
    return SubgroupRef(parent, frozenset(members), _trusted=True)


def centralizer_in(universe: SubgroupRef, P: SubgroupRef) -> SubgroupRef:
    parent = universe.parent
    gens = P.gens() or (parent.identity_index,)
    members = [
        u
        for u in universe.sorted_indices
        if all(parent.conj(u, a) == a for a in gens)
    ]
    return SubgroupRef(parent, frozenset(members), _trusted=True)


def intersect(A: SubgroupRef, B: SubgroupRef) -> SubgroupRef:
    return SubgroupRef(A.parent, A.indices & B.indices, _trusted=True)


def join(A: SubgroupRef, B: SubgroupRef) -> SubgroupRef:
    return A.parent.closure_of(A.indices | B.indices)


def transporter_set(universe: SubgroupRef, P: SubgroupRef, Q: SubgroupRef) -> tuple[int, ...]:
    """{g in universe | g P g^-1 <= Q}, canonically ordered by element index."""
    parent = universe.parent
    gens = P.gens()
    if not gens:
        return universe.sorted_indices
    return tuple(
        g
        for g in universe.sorted_indices
        if all(parent.conj(g, a) in Q.indices for a in gens)
    )


# ---------------------------------------------------------------------------
# Sylow subgroups and subgroup enumeration


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def sylow_subgroup(G: PermGroup | SubgroupRef, p: int) -> SubgroupRef:
    """A Sylow p-subgroup, grown greedily in canonical element order.

    Deterministic: at each step the least eligible p-element of the current
    normalizer is adjoined.
    """
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    U = G.whole() if isinstance(G, PermGroup) else G
    parent = U.parent
    target = p_part(U.order, p)
    H = SubgroupRef(parent, frozenset({parent.identity_index}), _trusted=True)
    while H.order < target:
        N = normalizer_in(U, H)
        for g in N.sorted_indices:
            if g in H.indices:
                continue
            if not is_p_power(parent.elements[g].order(), p):
                continue
            K = parent.closure_of(H.indices | {g})
            if is_p_power(K.order, p):
                H = K
                break
        else:  # pragma: no cover - Sylow theory guarantees progress
            raise VerificationError("p-subgroup growth stalled below Sylow order")
    return H


def is_sylow_in(H: SubgroupRef, U: SubgroupRef, p: int) -> bool:
    return H.indices <= U.indices and H.order == p_part(U.order, p)


def all_subgroups(S: SubgroupRef, max_group_order: int | None = None) -> tuple[SubgroupRef, ...]:
    """Every subgroup of S, deduplicated and canonically ordered.

    Enumeration is by cyclic extension: grow each known subgroup by adjoining
    the closure of one more element.  Cap guards |S|.
    """
    cap = max_group_order if max_group_order is not None else DEFAULT_MAX_PGROUP
    if S.order > cap:
        raise CapExceededError(f"subgroup enumeration capped at order {cap}, got {S.order}")
    parent = S.parent
    trivial = frozenset({parent.identity_index})
    seen: set[frozenset[int]] = {trivial}
    frontier: list[frozenset[int]] = [trivial]
    while frontier:
        new: list[frozenset[int]] = []
        for H in frontier:
            for g in S.sorted_indices:
                if g in H:
                    continue
                K = parent.closure_of(H | {g}).indices
                if K not in seen:
                    seen.add(K)
                    new.append(K)
        frontier = new
    refs = [SubgroupRef(parent, H, _trusted=True) for H in seen]
    refs.sort(key=lambda r: (r.order, r.canonical_key()))
    return tuple(refs)


# ---------------------------------------------------------------------------
# group actions


class GroupAction:
    """A homomorphism from a PermGroup to the symmetric group on {0..set_size-1}."""

    def __init__(self, group: PermGroup, set_size: int, sigma: Sequence[Perm]):
        if set_size < 1:
            raise PreconditionError("action set must be nonempty")
        if len(sigma) != group.order:
            raise PreconditionError("need one permutation per group element")
        self.group = group
        self.set_size = set_size
        self.sigma: tuple[Perm, ...] = tuple(sigma)
        for s in self.sigma:
            if s.degree != set_size:
                raise PreconditionError("action permutation degree mismatch")

    @staticmethod
    def natural(group: PermGroup) -> "GroupAction":
        return GroupAction(group, group.degree, group.elements)

    @staticmethod
    def point(group: PermGroup) -> "GroupAction":
        one = Perm.identity(1)
        return GroupAction(group, 1, [one] * group.order)

    @staticmethod
    def from_generator_images(group: PermGroup, set_size: int, images: Sequence[Perm | str]) -> "GroupAction":
        """Extend generator images to the whole group; errors if inconsistent."""
        imgs = [parse_cycles(x, set_size) if isinstance(x, str) else x for x in images]
        if len(imgs) != len(group.generators):
            raise PreconditionError("one image per generator required")
        sigma: dict[int, Perm] = {group.identity_index: Perm.identity(set_size)}
        frontier = [group.identity_index]
        gen_idx = [group.index[g] for g in group.generators]
        while frontier:
            new = []
            for x in frontier:
                for gi, gperm in zip(gen_idx, imgs):
                    y = group.mul(x, gi)
                    img = sigma[x] * gperm
                    if y in sigma:
                        if sigma[y] != img:
                            raise PreconditionError("generator images do not define a homomorphism")
                    else:
                        sigma[y] = img
                        new.append(y)
            frontier = new
        return GroupAction(group, set_size, [sigma[i] for i in range(group.order)])

    def of(self, idx: int) -> Perm:
        return self.sigma[idx]

    def core(self, within: SubgroupRef) -> SubgroupRef:
        """{g in within | sigma_g = id}; the kernel of the restricted action."""
        members = frozenset(i for i in within.indices if self.sigma[i].is_identity())
        return SubgroupRef(within.parent, members, _trusted=True)

    def orbit(self, point: int, within: SubgroupRef) -> frozenset[int]:
        seen = {point}
        frontier = [point]
        while frontier:
            new = []
            for x in frontier:
                for g in within.indices:
                    y = self.sigma[g](x)
                    if y not in seen:
                        seen.add(y)
                        new.append(y)
            frontier = new
        return frozenset(seen)

    def is_transitive(self, within: SubgroupRef) -> bool:
        return len(self.orbit(0, within)) == self.set_size

    def fixed_points(self, P: SubgroupRef) -> tuple[int, ...]:
        gens = P.gens()
        return tuple(
            x for x in range(self.set_size) if all(self.sigma[g](x) == x for g in gens)
        )

    def stabilizer(self, point: int, within: SubgroupRef) -> SubgroupRef:
        members = frozenset(g for g in within.indices if self.sigma[g](point) == point)
        return SubgroupRef(within.parent, members, _trusted=True)


def x_normalizer(universe: SubgroupRef, H: SubgroupRef, action: GroupAction) -> SubgroupRef:
    """N(H) intersected with the action core of the universe."""
    return intersect(normalizer_in(universe, H), action.core(universe))


def x_centralizer(universe: SubgroupRef, H: SubgroupRef, action: GroupAction) -> SubgroupRef:
    return intersect(centralizer_in(universe, H), action.core(universe))


# ---------------------------------------------------------------------------
# generic finite-group helpers over hashable elements (used for groups of
# morphism pairs, category automorphism sets, ...)


def generic_closure(seed: Iterable[T], mul: Callable[[T, T], T], identity: T) -> frozenset[T]:
    elems = {identity}
    frontier = [identity]
    seeds = list(seed)
    while frontier:
        new = []
        for x in frontier:
            for g in seeds:
                y = mul(x, g)
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return frozenset(elems)


def generic_order_of(x: T, mul: Callable[[T, T], T], identity: T) -> int:
    k, y = 1, x
    while y != identity:
        y = mul(y, x)
        k += 1
    return k


def generic_all_subgroups(
    elements: Iterable[T], mul: Callable[[T, T], T], identity: T
) -> tuple[frozenset[T], ...]:
    """All subgroups of a finite group given extensionally; cyclic extension BFS."""
    elems = sorted(set(elements))  # type: ignore[type-var]
    trivial = frozenset({identity})
    seen: set[frozenset[T]] = {trivial}
    frontier = [trivial]
    while frontier:
        new = []
        for H in frontier:
            for g in elems:
                if g in H:
                    continue
                K = generic_closure(set(H) | {g}, mul, identity)
                if K not in seen:
                    seen.add(K)
                    new.append(K)
        frontier = new
    return tuple(sorted(seen, key=lambda h: (len(h), sorted(h))))  # type: ignore[arg-type]


def sylow_in_set(H: frozenset, G: frozenset, p: int) -> bool:
    """|H| is the p-part of |G| and H is contained in G."""
    return H <= G and len(H) == p_part(len(G), p)
