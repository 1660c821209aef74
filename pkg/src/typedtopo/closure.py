"""Chain-restricted closure, unsupported points, density, and minimum dense sets.

A point joins the closure of a set when every member of its chain base
meets the set; points with an empty base join every closure vacuously and
form the unsupported region, which any dense set must absorb wholesale.
The minimum dense size is the number of unsupported points plus the number
of inclusion-maximal distinct base families, and a witness picks one
representative per maximal family. The formula is re-checked against the
exhaustive oracle on small spaces and a disagreement raises instead of
passing quietly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import chains as chains_mod, space as space_mod
from .chains import TypeChain
from .errors import InvariantViolationError, PreconditionError, UnknownPointError
from .space import TypedSpace

ORACLE_CROSS_CHECK_MAX_POINTS = 12


@dataclass(frozen=True, eq=False)
class ClosureReport:
    space: TypedSpace
    chain: TypeChain
    start: frozenset
    members: frozenset
    witnesses: dict  # point -> ("core", ids) | ("vacuous",)

    def ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True, eq=False)
class DensityReport:
    space: TypedSpace
    chain: TypeChain
    unsupported: frozenset
    classes: tuple[tuple[str, ...], ...]
    maximal_classes: tuple[tuple[str, ...], ...]
    density: int
    witness: frozenset

    def witness_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.witness))


def _point_families(space: TypedSpace, chain: TypeChain) -> dict:
    pool = chains_mod.chain_base_pool(space, chain)
    fams = {}
    for i, p in enumerate(space.points):
        bit = 1 << i
        fams[p] = frozenset(m for m in pool if m & bit)
    return fams


def unsupported_points(space: TypedSpace, chain: TypeChain) -> frozenset:
    """Points whose chain base is empty.

    These never touch any base member: the union of the base families of the
    supported points misses them entirely, and the region is closed under
    the chain closure. Both facts are re-derived here and enforced.
    """
    fams = _point_families(space, chain)
    out = frozenset(p for p, fam in fams.items() if not fam)
    touched = 0
    for p, fam in fams.items():
        if p not in out:
            for m in fam:
                touched |= m
    bare = frozenset(space.ids_of(space.full_mask & ~touched))
    if bare != out:
        raise InvariantViolationError(
            "unsupported region disagrees with the uncovered remainder",
            witness=sorted(bare ^ out),
        )
    closed = chain_closure(space, out, chain, _assert_core=False)
    if closed.members != out:
        raise InvariantViolationError(
            "unsupported region is not closed", witness=sorted(closed.members - out)
        )
    return out


def chain_closure(
    space: TypedSpace,
    start,
    chain: TypeChain,
    _assert_core: bool = True,
) -> ClosureReport:
    """Points all of whose base neighborhoods meet ``start``.

    For supported points the definitional test is re-derived from the common
    core of the base family (membership iff the core meets ``start``); the
    two must agree, which holds exactly when every base family has a least
    member.
    """
    space_mod.require_strict(space)
    start_set = frozenset(start)
    for p in start_set:
        space.point_index(p)
    start_mask = space.mask_of(start_set)
    fams = _point_families(space, chain)
    members = set()
    witnesses = {}
    for p in space.points:
        fam = fams[p]
        if not fam:
            members.add(p)
            witnesses[p] = ("vacuous",)
            continue
        inside = all(m & start_mask for m in fam)
        if _assert_core:
            core = space.full_mask
            for m in fam:
                core &= m
            by_core = bool(core & start_mask)
            if by_core != inside:
                raise InvariantViolationError(
                    "definitional closure disagrees with the common-core test",
                    witness=(p, sorted(start_set)),
                )
        if inside:
            members.add(p)
            if _assert_core:
                witnesses[p] = ("core", space.ids_of(core))
    return ClosureReport(space, chain, start_set, frozenset(members), witnesses)


def neighborhood_classes(space: TypedSpace, chain: TypeChain) -> tuple[tuple[str, ...], ...]:
    """Partition of the supported points by equal base families."""
    fams = _point_families(space, chain)
    groups: dict[frozenset, list[str]] = {}
    for p in space.points:
        if fams[p]:
            groups.setdefault(fams[p], []).append(p)
    return tuple(sorted(tuple(sorted(g)) for g in groups.values()))


def is_chain_dense(space: TypedSpace, dense, region, chain: TypeChain) -> bool:
    """Density of ``dense`` inside ``region``.

    Unsupported region points must be included outright; every supported
    region point needs each of its base neighborhoods to meet ``dense``.
    The sufficient family-domination test (some dense point's family covers
    the point's family) is recomputed and may never contradict a negative
    definitional answer.
    """
    dense_set, region_set = frozenset(dense), frozenset(region)
    if not dense_set <= region_set:
        raise PreconditionError("the dense candidate must sit inside the region")
    for p in region_set:
        space.point_index(p)
    fams = _point_families(space, chain)
    dense_mask = space.mask_of(dense_set)
    verdict = True
    for p in region_set:
        fam = fams[p]
        if not fam:
            if p not in dense_set:
                verdict = False
                break
        elif not all(m & dense_mask for m in fam):
            verdict = False
            break
    dominated = all(
        (p in dense_set)
        if not fams[p]
        else any(fams[p] <= fams[q] for q in dense_set if fams[q])
        for p in region_set
    )
    if dominated and not verdict:
        raise InvariantViolationError(
            "family domination asserted density but the definition refused",
            witness=sorted(dense_set),
        )
    return verdict


def min_chain_dense(space: TypedSpace, chain: TypeChain) -> DensityReport:
    """Smallest dense set: unsupported points plus one point per maximal class.

    Representatives are the smallest point id of each maximal class, which
    Cor-style interchangeability makes as good as any other choice. On
    spaces of at most twelve points the arithmetic is compared against the
    exhaustive search; a mismatch raises with the witness attached.
    """
    space_mod.require_strict(space)
    fams = _point_families(space, chain)
    unsupported = frozenset(p for p in space.points if not fams[p])
    groups: dict[frozenset, list[str]] = {}
    for p in space.points:
        if fams[p]:
            groups.setdefault(fams[p], []).append(p)
    classes = tuple(sorted(tuple(sorted(g)) for g in groups.values()))
    distinct = list(groups)
    maximal = [
        f for f in distinct if not any(g != f and f < g for g in distinct)
    ]
    maximal_classes = tuple(sorted(tuple(sorted(groups[f])) for f in maximal))
    density = len(unsupported) + len(maximal)
    witness = frozenset(unsupported | {cls[0] for cls in maximal_classes})
    if not is_chain_dense(space, witness, space.points, chain):
        raise InvariantViolationError(
            "constructed witness is not dense", witness=sorted(witness)
        )
    if len(space.points) <= ORACLE_CROSS_CHECK_MAX_POINTS:
        from . import oracle

        size, _ = oracle.exhaustive_min_dense(
            space, chain, oracle.SearchBudget(max_points=ORACLE_CROSS_CHECK_MAX_POINTS)
        )
        if size != density:
            raise InvariantViolationError(
                f"density formula gives {density} but exhaustive search gives {size}",
                witness={"unsupported": sorted(unsupported), "classes": classes},
            )
    return DensityReport(
        space, chain, unsupported, classes, maximal_classes, density, witness
    )


def idempotence_gap(space: TypedSpace, start, chain: TypeChain) -> frozenset:
    """Points gained by closing twice; informational only.

    Nothing guarantees the closure operator is idempotent, so callers may
    report a nonempty gap but must not treat it as an error.
    """
    once = chain_closure(space, start, chain).members
    twice = chain_closure(space, once, chain).members
    return frozenset(twice - once)


def reach_equivalence(space: TypedSpace, chain: TypeChain, x: str, y: str) -> tuple[bool, bool, bool]:
    """Three readings of 'x is reachable from y' that must agree.

    (1) the base family of ``x`` is contained in that of ``y``;
    (2) ``x`` lies in the closure of every set containing ``y`` (exhausted
        up to twelve points, single additions beyond);
    (3) ``x`` lies in the closure of ``{y}``.
    """
    if x == y:
        raise PreconditionError("reach equivalence needs two distinct points")
    for p in (x, y):
        space.point_index(p)
    fams = _point_families(space, chain)
    if not fams[x] or not fams[y]:
        raise PreconditionError("both points must be supported by the chain")
    cond1 = fams[x] <= fams[y]

    ybit = space.point_bit(y)
    xfam = fams[x]
    n = len(space.points)

    def x_in_closure(mask: int) -> bool:
        return all(m & mask for m in xfam)

    if n <= ORACLE_CROSS_CHECK_MAX_POINTS:
        candidates = [a | ybit for a in range(1 << n)]
    else:
        candidates = [ybit] + [ybit | (1 << i) for i in range(n)]
    cond2 = all(x_in_closure(mask) for mask in candidates)
    cond3 = x_in_closure(ybit)
    if not (cond1 == cond2 == cond3):
        raise InvariantViolationError(
            "reach readings disagree", witness=(x, y, cond1, cond2, cond3)
        )
    return (cond1, cond2, cond3)
