"""The center functor on the X-centric orbit category and its higher limits,
computed from a normalized bar cochain complex over the integers."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import CapExceededError, PreconditionError, VerificationError
from .fusact import FAMorphism, FusionActionSystem
from .intmat import (
    Matrix,
    hstack,
    invariant_factors,
    kernel_basis,
    matmul,
    solve,
    zeros,
)
from .linking import OrbitCategory, x_centric_orbit_category
from .permgroup import SubgroupRef, all_subgroups

DEFAULT_MAX_CHAINS = 200_000


@dataclass
class AbelianPresentation:
    """Z^rank modulo the column span of the relation matrix."""

    rank: int
    relations: Matrix

    def invariants(self) -> tuple[int, ...]:
        return invariant_factors(self.relations, self.rank)

    def order(self) -> int:
        """Group order; 0 when infinite."""
        out = 1
        for d in self.invariants():
            if d == 0:
                return 0
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.order() == 1


@dataclass
class AbelianValue:
    """A finite abelian group of parent-group elements, with a chosen basis."""

    gens: tuple[int, ...]
    orders: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.gens)

    def size(self) -> int:
        out = 1
        for d in self.orders:
            out *= d
        return out


def decompose_abelian(A: SubgroupRef) -> AbelianValue:
    """A basis of independent generators with orders d_1 >= d_2 >= ..."""
    parent = A.parent
    if A.order == 1:
        return AbelianValue((), ())
    for a in A.sorted_indices:
        for b in A.sorted_indices:
            if parent.mul(a, b) != parent.mul(b, a):
                raise PreconditionError("value subgroup is not abelian")
    gens: list[int] = []
    orders: list[int] = []
    current = A
    while current.order > 1:
        top = max(parent.elements[g].order() for g in current.sorted_indices)
        best = min(
            g for g in current.sorted_indices if parent.elements[g].order() == top
        )
        cyc = parent.closure_of([best])
        gens.append(best)
        orders.append(cyc.order)
        current = _complement_in(current, cyc)
    return AbelianValue(tuple(gens), tuple(orders))


def _complement_in(A: SubgroupRef, C: SubgroupRef) -> SubgroupRef:
    """A subgroup B of A with B * C = A and trivial intersection (abelian A)."""
    parent = A.parent
    want = A.order // C.order
    for B in all_subgroups(A):
        if B.order == want and len(B.indices & C.indices) == 1:
            return B
    raise VerificationError("no complement found in an abelian group")  # pragma: no cover


def element_coordinates(A: AbelianValue, parent, elem: int) -> tuple[int, ...]:
    """Coordinates of an element with respect to the chosen basis."""
    if A.rank == 0:
        if elem != parent.identity_index:
            raise PreconditionError("nontrivial element of a trivial value")
        return ()
    for coeffs in product(*(range(d) for d in A.orders)):
        acc = parent.identity_index
        for g, c in zip(A.gens, coeffs):
            for _ in range(c):
                acc = parent.mul(acc, g)
        if acc == elem:
            return coeffs
    raise PreconditionError("element is outside the value subgroup")


@dataclass
class CoefficientFunctor:
    """A contravariant functor from an orbit category to finite abelian groups.

    maps[(i, j, cls)] sends coordinates at object j to coordinates at object i
    for the cls-th orbit class in the hom-set (i -> j)."""

    category: OrbitCategory
    values: tuple[AbelianValue, ...]
    maps: dict[tuple[int, int, int], Matrix]

    def value_rank(self, i: int) -> int:
        return self.values[i].rank

    def canon(self, i: int, M: Matrix) -> tuple:
        """Reduce matrix rows modulo the orders at object i for comparison."""
        orders = self.values[i].orders
        return tuple(
            tuple(entry % orders[r] for entry in row) for r, row in enumerate(M)
        )

    def verify_functorial(self) -> None:
        cat = self.category
        n = len(cat.objects)
        for i in range(n):
            ident = _identity_class(cat, i)
            if ident is not None:
                M = self.maps[(i, i, ident)]
                eye = [[1 if r == c else 0 for c in range(self.value_rank(i))]
                       for r in range(self.value_rank(i))]
                if self.canon(i, M) != self.canon(i, eye):
                    raise VerificationError("identity does not map to the identity matrix")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for f_cls in range(cat.hom_size(i, j)):
                        for g_cls in range(cat.hom_size(j, k)):
                            gf = cat.compose(i, j, k, g_cls, f_cls)
                            lhs = matmul(self.maps[(i, j, f_cls)], self.maps[(j, k, g_cls)])
                            if self.canon(i, lhs) != self.canon(i, self.maps[(i, k, gf)]):
                                raise VerificationError("functor breaks on a composite")


def _identity_class(cat: OrbitCategory, i: int) -> int | None:
    P = cat.objects[i]
    ident = (P.sorted_indices, tuple(range(cat.X.set_size)))
    for k, orbit in enumerate(cat.classes[(i, i)]):
        if ident in orbit:
            return k
    return None


def center_functor(X: FusionActionSystem, check_saturation: bool = True) -> CoefficientFunctor:
    """Values Z(P;X) on the X-centric orbit category; the map of an orbit class
    is inverse transport along any lift, checked independent of the lift."""
    if check_saturation:
        from .saturation import check_saturation_rs

        if not check_saturation_rs(X).verdict:
            raise PreconditionError("the center functor needs a saturated system")
    cat = x_centric_orbit_category(X)
    parent = X.group
    values = tuple(decompose_abelian(X.z_x(P)) for P in cat.objects)
    coords: dict[int, dict[int, tuple[int, ...]]] = {}
    for i, P in enumerate(cat.objects):
        table = {}
        for elem in X.z_x(P).sorted_indices:
            table[elem] = element_coordinates(values[i], parent, elem)
        coords[i] = table
    maps: dict[tuple[int, int, int], Matrix] = {}
    for (i, j), orbits in cat.classes.items():
        P, Q = cat.objects[i], cat.objects[j]
        for cls, orbit in enumerate(orbits):
            canon_matrix = None
            for phi, sigma in sorted(orbit):
                m = FAMorphism(P, Q, phi, sigma)
                M = _inverse_transport_matrix(X, values, coords, i, j, m)
                reduced = tuple(
                    tuple(e % values[i].orders[r] for e in row) if values[i].orders else ()
                    for r, row in enumerate(M)
                )
                if canon_matrix is None:
                    canon_matrix = (M, reduced)
                elif canon_matrix[1] != reduced:
                    raise VerificationError(
                        "center functor map depends on the lift; object leak"
                    )
            maps[(i, j, cls)] = canon_matrix[0] if canon_matrix else []
    F = CoefficientFunctor(cat, values, maps)
    F.verify_functorial()
    return F


def _inverse_transport_matrix(
    X: FusionActionSystem,
    values: tuple[AbelianValue, ...],
    coords: dict[int, dict[int, tuple[int, ...]]],
    i: int,
    j: int,
    m: FAMorphism,
) -> Matrix:
    """Matrix of phi^-1 : Z(Q;X) -> Z(P;X) in the chosen bases (rank_i x rank_j)."""
    P = m.dom
    ri = values[i].rank
    rj = values[j].rank
    M = zeros(ri, rj)
    back = {m.map(a): a for a in P.sorted_indices}
    for col, gen in enumerate(values[j].gens):
        if gen not in back:
            raise VerificationError("X-center of the target escapes the image")
        pre = back[gen]
        if pre not in coords[i]:
            raise VerificationError("inverse transport leaves the X-center")
        for row, c in enumerate(coords[i][pre]):
            M[row][col] = c
    return M


# ---------------------------------------------------------------------------
# normalized bar cochain complex

Chain = tuple  # (c_0, (cls_1, c_1), ..., (cls_n, c_n))


@dataclass
class CochainComplex:
    """Free modules over normalized composable chains with torsion relations."""

    functor: CoefficientFunctor
    top_degree: int
    chains: list[list[Chain]]  # per degree
    basis: list[list[tuple[int, int]]]  # per degree: (chain index, generator index)
    differentials: list[Matrix]  # d_n : C^n -> C^{n+1}

    def degree_rank(self, n: int) -> int:
        return len(self.basis[n])

    def relations(self, n: int) -> Matrix:
        """Diagonal torsion relations of C^n."""
        rank = self.degree_rank(n)
        rel = zeros(rank, rank)
        for idx, (ci, g) in enumerate(self.basis[n]):
            chain = self.chains[n][ci]
            obj = chain[0]
            rel[idx][idx] = self.functor.values[obj].orders[g]
        return rel

    def verify_d_squared(self) -> None:
        for n in range(self.top_degree):
            prod = matmul(self.differentials[n + 1], self.differentials[n])
            for r, row in enumerate(prod):
                ci, g = self.basis[n + 2][r]
                d = self.functor.values[self.chains[n + 2][ci][0]].orders[g]
                for e in row:
                    if e % d:
                        raise VerificationError("d o d is nonzero")


def build_cochain_complex(
    F: CoefficientFunctor, top_degree: int, max_chains: int = DEFAULT_MAX_CHAINS
) -> CochainComplex:
    cat = F.category
    n_obj = len(cat.objects)
    nonid: dict[tuple[int, int], list[int]] = {}
    for (i, j), orbits in cat.classes.items():
        keep = []
        for cls in range(len(orbits)):
            if i == j and cls == _identity_class(cat, i):
                continue
            keep.append(cls)
        nonid[(i, j)] = keep
    chains: list[list[Chain]] = [[(i,) for i in range(n_obj)]]
    for n in range(1, top_degree + 2):
        nxt: list[Chain] = []
        for chain in chains[-1]:
            last = chain[0] if n == 1 else chain[-1][1]
            for j in range(n_obj):
                for cls in nonid[(last, j)]:
                    nxt.append(chain + ((cls, j),))
                    if len(nxt) > max_chains:
                        raise CapExceededError("chain count exceeds the cap")
        chains.append(nxt)
    basis: list[list[tuple[int, int]]] = []
    index: list[dict[tuple[int, int], int]] = []
    for n in range(top_degree + 2):
        bs = []
        idx = {}
        for ci, chain in enumerate(chains[n]):
            for g in range(F.values[chain[0]].rank):
                idx[(ci, g)] = len(bs)
                bs.append((ci, g))
        basis.append(bs)
        index.append(idx)
    chain_pos: list[dict[Chain, int]] = [
        {c: k for k, c in enumerate(cs)} for cs in chains
    ]
    diffs: list[Matrix] = []
    for n in range(top_degree + 1):
        D = zeros(len(basis[n + 1]), len(basis[n]))
        for ti, tau in enumerate(chains[n + 1]):
            _add_differential_terms(F, cat, chains, chain_pos, index, D, n, ti, tau)
        diffs.append(D)
    return CochainComplex(F, top_degree, chains, basis, diffs)


def _add_differential_terms(F, cat, chains, chain_pos, index, D, n, ti, tau) -> None:
    """Contributions of the (n+1)-chain tau to the differential from degree n."""
    obj0 = tau[0]
    arrows = tau[1:]  # ((cls_1, c_1), ..., (cls_{n+1}, c_{n+1}))
    # face 0: drop the first arrow and transport along it
    d0 = (arrows[0][1],) + arrows[1:]
    if d0 in chain_pos[n]:
        k = chain_pos[n][d0]
        M = F.maps[(obj0, arrows[0][1], arrows[0][0])]
        src = arrows[0][1]
        for g in range(F.values[src].rank):
            col = index[n][(k, g)]
            for r in range(F.values[obj0].rank):
                D[index[n + 1][(ti, r)]][col] += M[r][g]
    # middle faces: compose adjacent arrows
    prev_obj = obj0
    for pos in range(len(arrows) - 1):
        i_obj = prev_obj
        j_obj = arrows[pos][1]
        k_obj = arrows[pos + 1][1]
        comp = cat.compose(i_obj, j_obj, k_obj, arrows[pos + 1][0], arrows[pos][0])
        if i_obj == k_obj and comp == _identity_class(cat, i_obj):
            new_chain = None  # degenerate: dies in the normalized complex
        else:
            new_chain = (
                tau[:1 + pos] + ((comp, k_obj),) + arrows[pos + 2:]
            )
        if new_chain is not None and new_chain in chain_pos[n]:
            k = chain_pos[n][new_chain]
            sign = -1 if (pos + 1) % 2 else 1
            for g in range(F.values[obj0].rank):
                D[index[n + 1][(ti, g)]][index[n][(k, g)]] += sign
        prev_obj = arrows[pos][1]
    # last face: drop the final arrow
    dl = tau[:-1]
    if dl in chain_pos[n]:
        k = chain_pos[n][dl]
        sign = -1 if (len(arrows)) % 2 else 1
        for g in range(F.values[obj0].rank):
            D[index[n + 1][(ti, g)]][index[n][(k, g)]] += sign


def higher_limits(
    F: CoefficientFunctor, max_degree: int = 3, max_chains: int = DEFAULT_MAX_CHAINS
) -> list[AbelianPresentation]:
    """lim^0 .. lim^max_degree as abelian presentations (invariant factors via SNF)."""
    if max_degree < 0:
        raise PreconditionError("degree must be nonnegative")
    complex_ = build_cochain_complex(F, max_degree, max_chains)
    complex_.verify_d_squared()
    out = []
    for n in range(max_degree + 1):
        out.append(_cohomology_at(complex_, n))
    return out


def _cohomology_at(cx: CochainComplex, n: int) -> AbelianPresentation:
    rank_n = cx.degree_rank(n)
    if rank_n == 0:
        return AbelianPresentation(0, [])
    D_n = cx.differentials[n]
    rel_next = cx.relations(n + 1)
    stacked = hstack(D_n, rel_next)
    kb = kernel_basis(stacked)
    # kernel lattice of x -> D_n x mod relations, projected to the x block
    W_cols = [vec[:rank_n] for vec in kb]
    W = transpose_cols(W_cols, rank_n)
    gens_img: list[list[int]] = []
    if n > 0:
        Dprev = cx.differentials[n - 1]
        for c in range(cx.degree_rank(n - 1)):
            gens_img.append([Dprev[r][c] for r in range(rank_n)])
    rel_n = cx.relations(n)
    for c in range(rank_n):
        gens_img.append([rel_n[r][c] for r in range(rank_n)])
    Y_cols: list[list[int]] = []
    for b in gens_img:
        y = solve(W, b)
        if y is None:
            raise VerificationError("image does not lie in the cocycle lattice")
        Y_cols.append(y)
    k = len(W_cols)
    for kv in kernel_basis(W):
        Y_cols.append(kv)
    relations = transpose_cols(Y_cols, k)
    return AbelianPresentation(k, relations)


def transpose_cols(cols: list[list[int]], rows: int) -> Matrix:
    M = zeros(rows, len(cols))
    for c, col in enumerate(cols):
        for r in range(rows):
            M[r][c] = col[r]
    return M


def inverse_limit_direct(F: CoefficientFunctor, cap: int = 1_000_000) -> list[tuple[tuple[int, ...], ...]]:
    """All compatible families, by depth-first assignment with pruning."""
    cat = F.category
    n = len(cat.objects)
    domains = [
        list(product(*(range(d) for d in F.values[i].orders))) for i in range(n)
    ]
    families: list[tuple[tuple[int, ...], ...]] = []
    assignment: list[tuple[int, ...] | None] = [None] * n

    def compatible(i: int) -> bool:
        for j in range(n):
            if assignment[j] is None:
                continue
            for a, b in ((i, j), (j, i)):
                if assignment[a] is None or assignment[b] is None:
                    continue
                for cls in range(cat.hom_size(a, b)):
                    M = F.maps[(a, b, cls)]
                    got = apply_matrix(M, assignment[b], F.values[a].orders)
                    if got != assignment[a]:
                        return False
        return True

    def rec(i: int) -> None:
        if i == n:
            families.append(tuple(assignment))  # type: ignore[arg-type]
            if len(families) > cap:
                raise CapExceededError("inverse limit enumeration exceeded the cap")
            return
        for val in domains[i]:
            assignment[i] = val
            if compatible(i):
                rec(i + 1)
        assignment[i] = None

    rec(0)
    return families


def apply_matrix(M: Matrix, coords: tuple[int, ...], orders: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(
        sum(M[r][c] * coords[c] for c in range(len(coords))) % orders[r]
        for r in range(len(orders))
    )


def family_group_invariants(families: list[tuple[tuple[int, ...], ...]], F: CoefficientFunctor) -> tuple[int, ...]:
    """Invariant factors of the group of compatible families under addition."""
    if not families:
        raise VerificationError("the zero family is always compatible")
    n = len(F.category.objects)

    def add(a, b):
        return tuple(
            tuple((x + y) % d for x, y, d in zip(a[i], b[i], F.values[i].orders))
            for i in range(n)
        )

    zero = tuple(tuple(0 for _ in F.values[i].orders) for i in range(n))
    fams = set(families)
    # the element-order multiset pins down a finite abelian group
    orders = sorted(_elem_order(f, add, zero) for f in fams)
    if orders == [1]:
        return ()
    return _search_type(len(orders), orders)


def _elem_order(f, add, zero) -> int:
    k, acc = 1, f
    while acc != zero:
        acc = add(acc, f)
        k += 1
    return k


def _search_type(total: int, orders: list[int]) -> tuple[int, ...]:
    candidates: list[tuple[int, ...]] = []

    def divisor_chains(nleft: int, maxd: int, acc: list[int]):
        if nleft == 1:
            candidates.append(tuple(acc))
            return
        d = 2
        while d <= min(maxd, nleft):
            if nleft % d == 0:
                divisor_chains(nleft // d, d, acc + [d])
            d += 1

    divisor_chains(total, total, [])
    for cand in candidates:
        # cand sorted descending-compatible chain? require d_{i+1} | d_i
        ok = all(cand[i] % cand[i + 1] == 0 for i in range(len(cand) - 1))
        if not ok:
            continue
        got = sorted(_orders_of_type(cand))
        if got == orders:
            return cand
    raise VerificationError("could not identify the abelian group type")


def _orders_of_type(factors: tuple[int, ...]) -> list[int]:
    from math import lcm

    out = []
    for combo in product(*(range(d) for d in factors)):
        out.append(lcm(*(d // gcd_int(d, c) if c else 1 for d, c in zip(factors, combo))))
    return out


def gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
