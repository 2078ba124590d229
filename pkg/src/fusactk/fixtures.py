"""Built-in example systems used by the CLI and the verification suite."""

from __future__ import annotations

from .fusact import FusionActionSystem, ambient_fusion_action
from .permgroup import GroupAction, Perm, PermGroup, SubgroupRef, generate_group, parse_cycles

FIXTURE_NAMES = ("FIX-T", "FIX-B", "FIX-A", "FIX-C", "FIX-P")


def fixture_jobs() -> dict[str, dict]:
    """Job specifications for the built-in fixtures (see the JobSpec schema)."""
    return {
        "FIX-T": {
            "degree": 2,
            "group_generators": ["(0 1)"],
            "prime": 2,
            "action": "natural",
            "commands": [],
        },
        "FIX-B": {
            "degree": 3,
            "group_generators": ["(0 1)", "(0 1 2)"],
            "prime": 2,
            "action": "natural",
            "commands": [],
        },
        "FIX-A": {
            "degree": 4,
            "group_generators": ["(0 1 2 3)", "(0 1)"],
            "prime": 2,
            "action": "natural",
            "commands": [],
        },
        "FIX-C": {
            "degree": 4,
            "group_generators": ["(0 1 2 3)", "(0 1)"],
            "prime": 2,
            "action": {"set_size": 3, "generator_images": ["(0 2)", "(1 2)"]},
            "commands": [],
        },
        "FIX-P": {
            "degree": 4,
            "group_generators": ["(0 1 2 3)", "(0 1)"],
            "prime": 2,
            "action": {"set_size": 1, "generator_images": ["()", "()"]},
            "commands": [],
        },
    }


def build_ambient(job: dict) -> tuple[PermGroup, SubgroupRef, GroupAction, int]:
    """Group, Sylow subgroup, action, and prime for a job specification."""
    degree = job["degree"]
    G = generate_group(degree, job["group_generators"])
    p = job["prime"]
    spec = job["action"]
    if spec == "natural":
        action = GroupAction.natural(G)
    else:
        action = GroupAction.from_generator_images(
            G, spec["set_size"], spec["generator_images"]
        )
    S = _preferred_sylow(G, p)
    return G, S, action, p


def _preferred_sylow(G: PermGroup, p: int):
    """The fixture Sylow: pinned explicitly so the documented subgroup names
    (the dihedral group containing (0 1 2 3); the reflection (0 1)) stay stable."""
    from .permgroup import sylow_subgroup

    if G.degree == 4 and G.order == 24 and p == 2:
        return G.closure_of(
            [G.index[parse_cycles("(0 1 2 3)", 4)], G.index[parse_cycles("(0 2)", 4)]]
        )
    if G.degree == 3 and G.order == 6 and p == 2:
        return G.closure_of([G.index[parse_cycles("(0 1)", 3)]])
    return sylow_subgroup(G, p)


def build_fixture_with_ambient(name: str):
    """(G, S, action, p, system) sharing one parent group."""
    jobs = fixture_jobs()
    if name not in jobs:
        raise KeyError(f"unknown fixture {name!r}; have {', '.join(FIXTURE_NAMES)}")
    G, S, action, p = build_ambient(jobs[name])
    return G, S, action, p, ambient_fusion_action(G, S, action, p)


def build_fixture(name: str) -> FusionActionSystem:
    return build_fixture_with_ambient(name)[4]


def _gl3f2_generators() -> list[Perm]:
    """GL(3,2) acting on the 7 nonzero vectors of F_2^3."""
    vectors = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)][1:]
    index = {v: i for i, v in enumerate(vectors)}

    def apply(mat, v):
        return tuple(
            (mat[r][0] * v[0] + mat[r][1] * v[1] + mat[r][2] * v[2]) % 2 for r in range(3)
        )

    mats = [
        ((1, 1, 0), (0, 1, 0), (0, 0, 1)),  # transvection
        ((0, 0, 1), (1, 0, 0), (0, 1, 0)),  # cyclic basis rotation
    ]
    return [Perm([index[apply(m, v)] for v in vectors]) for m in mats]


def extra_ambient_triples() -> list[tuple[str, PermGroup, int, GroupAction]]:
    """Additional ambient (G, p, action) triples, |G| <= 2000, for bulk checks."""
    out: list[tuple[str, PermGroup, int, GroupAction]] = []

    s5 = generate_group(5, ["(0 1 2 3 4)", "(0 1)"])
    out.append(("S5 natural p=2", s5, 2, GroupAction.natural(s5)))
    out.append(("S5 natural p=5", s5, 5, GroupAction.natural(s5)))

    a5 = generate_group(5, ["(0 1 2)", "(0 1 2 3 4)"])
    out.append(("A5 natural p=2", a5, 2, GroupAction.natural(a5)))
    out.append(("A5 natural p=5", a5, 5, GroupAction.natural(a5)))

    a4 = generate_group(4, ["(0 1 2)", "(0 1)(2 3)"])
    out.append(("A4 natural p=2", a4, 2, GroupAction.natural(a4)))
    out.append(("A4 natural p=3", a4, 3, GroupAction.natural(a4)))

    d12 = generate_group(6, ["(0 1 2 3 4 5)", "(1 5)(2 4)"])
    out.append(("D12 hexagon p=2", d12, 2, GroupAction.natural(d12)))
    out.append(("D12 hexagon p=3", d12, 3, GroupAction.natural(d12)))

    s3s3 = generate_group(6, ["(0 1)", "(0 1 2)", "(3 4)", "(3 4 5)"])
    out.append(("S3xS3 p=3", s3s3, 3, GroupAction.natural(s3s3)))

    gl32 = PermGroup(7, _gl3f2_generators())
    out.append(("GL(3,2) on F_2^3-0 p=2", gl32, 2, GroupAction.natural(gl32)))
    out.append(("GL(3,2) on F_2^3-0 p=7", gl32, 7, GroupAction.natural(gl32)))

    # S4 acting through the sign map: a heavily non-faithful S-action
    s4 = generate_group(4, ["(0 1 2 3)", "(0 1)"])
    sign = GroupAction.from_generator_images(s4, 2, ["(0 1)", "(0 1)"])
    out.append(("S4 sign action p=2", s4, 2, sign))

    # big dihedral group, tiny Sylow: stresses the order cap side
    n = 999
    rot = Perm([(i + 1) % n for i in range(n)])
    flip = Perm([(-i) % n for i in range(n)])
    d1998 = PermGroup(n, [rot, flip])
    out.append(("D1998 p=2", d1998, 2, GroupAction.natural(d1998)))

    return out
