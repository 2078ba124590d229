"""Independent brute-force oracles used for differential testing.

These deliberately avoid the library's algorithms: closure is by repeated
full product-table passes, transporters by whole-subgroup conjugation,
subgroup enumeration by closing small subsets.
"""

from __future__ import annotations

from itertools import combinations

from fusactk.permgroup import Perm, PermGroup, SubgroupRef


def naive_closure(degree: int, gens: list[Perm]) -> frozenset[Perm]:
    elems = set(gens) | {Perm.identity(degree)}
    while True:
        prods = {a * b for a in elems for b in elems}
        if prods <= elems:
            return frozenset(elems)
        elems |= prods


def transporter_scan(G: PermGroup, P: SubgroupRef, Q: SubgroupRef) -> tuple[int, ...]:
    out = []
    qset = set(Q.elements())
    for gi, g in enumerate(G.elements):
        ginv = g.inverse()
        if all((g * a * ginv) in qset for a in P.elements()):
            out.append(gi)
    return tuple(out)


def subgroups_by_subset_closure(S: SubgroupRef, max_rank: int) -> set[frozenset[int]]:
    """All subgroups generated by <= max_rank elements; complete whenever every
    subgroup of S has a generating set that small (checked by the caller's choice
    of test groups)."""
    parent = S.parent
    found = {frozenset({parent.identity_index})}
    pts = S.sorted_indices
    for r in range(1, max_rank + 1):
        for combo in combinations(pts, r):
            found.add(parent.closure_of(combo).indices)
    return found


def kernel_scan(action, within: SubgroupRef) -> frozenset[int]:
    return frozenset(
        i for i in within.indices if action.of(i).is_identity()
    )
