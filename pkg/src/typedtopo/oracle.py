"""Brute-force reference searches and the whole-space property checker.

These functions are the trusted side of every dual-route check in the test
suite. They re-derive answers by exhaustive enumeration from the family
definitions and deliberately share none of the counting or graph-search
logic of the operations they judge:

* `exhaustive_min_dense` enumerates candidate subsets by increasing size
  with a self-contained density predicate (independent of the maximal-class
  formula in `closure.min_chain_dense`);
* `exhaustive_connected` enumerates all supported subsets through two
  points (independent of the overlap-graph search in `connect`);
* `check_space` replays the structural theorems of the domain over a whole
  space, listing each check with its quantifier ranges and counterexamples.

Budgets make the exponential cost explicit: exceeding one raises
`OracleSkip`, never a silent pass.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Optional

from . import basis, chains as chains_mod, connect as connect_mod, lattice
from . import closure as closure_mod, space as space_mod
from .chains import TypeChain
from .errors import OracleSkip
from .space import TypedSpace, realized_types

DEFAULT_DENSE_POINTS = 12
DEFAULT_CONNECT_POINTS = 10


def _env_points(default: int) -> int:
    raw = os.environ.get("TTS_BUDGET_POINTS")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


@dataclass(frozen=True)
class SearchBudget:
    """Hard limits for the exhaustive searches."""

    max_points: int = field(default_factory=lambda: _env_points(DEFAULT_DENSE_POINTS))
    max_subsets: int = 1 << 20
    max_valuations: int = 1 << 20

    def __post_init__(self):
        if self.max_points <= 0 or self.max_subsets <= 0 or self.max_valuations <= 0:
            raise OracleSkip("budgets must be positive")


def exhaustive_min_dense(
    space: TypedSpace, chain: TypeChain, budget: Optional[SearchBudget] = None
) -> tuple[int, tuple[tuple[str, ...], ...]]:
    """Minimum dense size by subset enumeration, with every optimal witness.

    Density is decided directly from the base families: unsupported points
    must be in the candidate, supported points need each family member hit.
    """
    budget = budget or SearchBudget()
    n = len(space.points)
    if n > budget.max_points:
        raise OracleSkip(f"{n} points exceed the dense-search budget of {budget.max_points}")
    pool = chains_mod.chain_base_pool(space, chain)
    fams = []
    forced = 0
    for i in range(n):
        fam = [m for m in pool if m >> i & 1]
        fams.append(fam)
        if not fam:
            forced |= 1 << i
    if (1 << n) > budget.max_subsets:
        raise OracleSkip("subset budget exceeded")

    def dense(mask: int) -> bool:
        if (forced & ~mask) != 0:
            return False
        for i in range(n):
            if fams[i] and any(not (m & mask) for m in fams[i]):
                return False
        return True

    for size in range(n + 1):
        witnesses = []
        for combo in itertools.combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if dense(mask):
                witnesses.append(space.ids_of(mask))
        if witnesses:
            return size, tuple(sorted(witnesses))
    raise AssertionError("the full point set is always dense")  # pragma: no cover


def exhaustive_connected(
    space: TypedSpace,
    chain: TypeChain,
    x: str,
    y: str,
    budget: Optional[SearchBudget] = None,
) -> bool:
    """Whether any supported subset through both points is chain-connected.

    The search ranges over subsets of the union of the chain's open pool:
    points outside it lie in no pool member, so a set containing one is
    never covered by two pool opens and the separation test degenerates;
    restricting to supported subsets keeps the notion meaningful.
    """
    budget = budget or SearchBudget(max_points=_env_points(DEFAULT_CONNECT_POINTS))
    n = len(space.points)
    if n > budget.max_points:
        raise OracleSkip(
            f"{n} points exceed the connectivity budget of {budget.max_points}"
        )
    xbit, ybit = space.point_bit(x), space.point_bit(y)
    supported = 0
    for m in chains_mod.chain_pool(space, chain):
        supported |= m
    if (xbit | ybit) & ~supported:
        return False
    free = supported & ~(xbit | ybit)
    free_bits = [1 << i for i in range(n) if free >> i & 1]
    if (1 << len(free_bits)) > budget.max_subsets:
        raise OracleSkip("subset budget exceeded")
    for r in range(len(free_bits) + 1):
        for combo in itertools.combinations(free_bits, r):
            mask = xbit | ybit
            for b in combo:
                mask |= b
            ok, _ = connect_mod.is_chain_connected(space, space.ids_of(mask), chain)
            if ok:
                return True
    return False


# ---------------------------------------------------------------------------
# whole-space theorem replay
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    scope: str
    passed: bool
    counterexamples: tuple = ()


@dataclass(frozen=True)
class CheckReport:
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> tuple[CheckResult, ...]:
        return tuple(r for r in self.results if not r.passed)


def _realized_chains(space: TypedSpace, max_len: int = 3):
    """Ascending level tuples (length 2 and 3) over the realized types."""
    rt = realized_types(space)
    n = len(rt)
    usable = [i for i in range(n) if not (rt.terms[i].is_bottom or rt.terms[i].is_top)]
    for i in usable:
        for j in usable:
            if rt.leq(i, j):
                yield TypeChain((rt.terms[i], rt.terms[j]))
    if max_len >= 3:
        for i in usable:
            for j in usable:
                if not rt.leq(i, j):
                    continue
                for k in usable:
                    if rt.leq(j, k):
                        yield TypeChain((rt.terms[i], rt.terms[j], rt.terms[k]))


def check_space(space: TypedSpace, max_chain_len: int = 3) -> CheckReport:
    """Replay the structural properties of a typed space and its chains.

    Covers: topology closure, the three type-mapping conditions, the meet
    and join bounds, incompatibility of forcing, self-irreducibility of every
    open at its own type, the anchored decomposition identity for every
    realized anchor, the base property and the pure-family membership claim
    for realized chains, the closure core identity, the unsupported-region
    identities, and the three connectivity statements.
    """
    results = []
    sig = space.sigma
    ids = space.ids_of

    report = space_mod.validate_type_mapping(space)
    results.append(
        CheckResult(
            "type-mapping",
            f"all {len(space.opens)}^2 open pairs",
            report.ok,
            tuple((f.code,) + tuple(f.witness) for f in report.failures[:5]),
        )
    )
    strictness = space_mod.is_strictly_typed(space)
    results.append(
        CheckResult(
            "strictly-typed",
            "all nested nonempty open pairs",
            strictness.strict,
            (strictness.witness,) if strictness.witness else (),
        )
    )
    if not (report.ok and strictness.strict):
        return CheckReport(tuple(results))

    rt = realized_types(space)
    nonempty = space.nonempty_opens()

    # incompatible forcing: disjoint-typed realized pairs never share a point
    bad = []
    for i in range(len(rt)):
        for j in range(i + 1, len(rt)):
            if not lattice.meet(rt.terms[i], rt.terms[j]).is_bottom:
                continue
            for u in rt.opens_by_type[i]:
                for v in rt.opens_by_type[j]:
                    if u & v:
                        bad.append((ids(u), ids(v)))
    results.append(
        CheckResult(
            "incompatible-forcing",
            f"{len(rt)} realized types, disjoint-meet pairs",
            not bad,
            tuple(bad[:5]),
        )
    )

    # every open is join-irreducible at its own type
    bad = []
    for m in nonempty:
        if not basis.is_join_irreducible(space, m, sig[m]):
            bad.append((ids(m),))
    results.append(
        CheckResult(
            "self-irreducible",
            f"all {len(nonempty)} nonempty opens",
            not bad,
            tuple(bad[:5]),
        )
    )

    # anchored decomposition: irreducible members inside any anchored open cover it
    bad = []
    for i, p in enumerate(rt.terms):
        fam = sorted(basis.opens_above(space, p).members)
        base = basis.irreducibles_above(space, p).members
        for u in fam:
            covered = 0
            for m in base:
                if (m & u) == m:
                    covered |= m
            if covered != u:
                bad.append((lattice.format_term(p), ids(u)))
    results.append(
        CheckResult(
            "anchored-decomposition",
            f"all {len(rt)} realized anchors x their families",
            not bad,
            tuple(bad[:5]),
        )
    )

    chain_list = list(_realized_chains(space, max_chain_len))

    # base property: every sandwiched neighborhood contains a base member
    bad = []
    for chain in chain_list:
        pool = chains_mod.chain_pool(space, chain)
        base = chains_mod.chain_base_pool(space, chain)
        for i, x in enumerate(space.points):
            bit = 1 << i
            for u in pool:
                if not (u & bit):
                    continue
                if not any((v & u) == v and (v & bit) for v in base):
                    bad.append((chain.text(), x, ids(u)))
    results.append(
        CheckResult(
            "neighborhood-base",
            f"{len(chain_list)} realized chains x {len(space.points)} points",
            not bad,
            tuple(bad[:5]),
        )
    )

    # pure-family membership: every single-generator neighborhood is a base
    # member of the two-level chain it generates
    bad = []
    for gen in sorted(space.poset.elements):
        top = lattice.normalize(space.ctx, [lattice.clause_of(gens=[gen])])
        for x in space.points:
            fam = chains_mod.generator_neighborhoods(space, x, [gen], cross_check=False)
            for m in fam.members:
                t = sig[m]
                if lattice.term_eq(t, top):
                    chain = TypeChain((t, t))
                else:
                    chain = TypeChain((t, top))
                if m not in chains_mod.chain_base(space, x, chain).members:
                    bad.append((gen, x, ids(m)))
    results.append(
        CheckResult(
            "pure-family-base",
            "all generators x points x family members",
            not bad,
            tuple(bad[:5]),
        )
    )

    # closure core identity: every nonempty base family has a least member
    bad = []
    for chain in chain_list:
        base = chains_mod.chain_base_pool(space, chain)
        for i, x in enumerate(space.points):
            fam = [m for m in base if m >> i & 1]
            if not fam:
                continue
            core = space.full_mask
            for m in fam:
                core &= m
            if core not in fam:
                bad.append((chain.text(), x))
    results.append(
        CheckResult(
            "closure-core",
            f"{len(chain_list)} realized chains x supported points",
            not bad,
            tuple(bad[:5]),
        )
    )

    # unsupported region: uncovered remainder identity and closedness
    bad = []
    for chain in chain_list:
        base = chains_mod.chain_base_pool(space, chain)
        empty = {x for i, x in enumerate(space.points) if not any(m >> i & 1 for m in base)}
        covered = 0
        for i, x in enumerate(space.points):
            if x in empty:
                continue
            for m in base:
                if m >> i & 1:
                    covered |= m
        remainder = set(ids(space.full_mask & ~covered))
        if remainder != empty:
            bad.append((chain.text(), "remainder", tuple(sorted(remainder ^ empty))))
            continue
        for i, x in enumerate(space.points):
            if x in empty:
                continue
            fam = [m for m in base if m >> i & 1]
            empty_mask = space.mask_of(empty)
            if all(m & empty_mask for m in fam):
                bad.append((chain.text(), "not-closed", x))
    results.append(
        CheckResult(
            "unsupported-region",
            f"{len(chain_list)} realized chains",
            not bad,
            tuple(bad[:5]),
        )
    )

    # connectivity of irreducible base members, anchored family members, and
    # pure single-generator members
    bad_base, bad_anchor, bad_pure = [], [], []
    for chain in chain_list:
        pool = sorted(chains_mod.chain_pool(space, chain))
        disjoint = [
            (u, v) for u, v in itertools.combinations(pool, 2) if not (u & v)
        ]

        def separated(mask: int) -> Optional[tuple]:
            for u, v in disjoint:
                if (mask & ~(u | v)) == 0 and (mask & u) and (mask & v):
                    return (ids(u), ids(v))
            return None

        p0 = chain.levels[0]
        anchored0 = chains_mod.anchored_pool(space, chain, p0)
        for m in chains_mod.chain_base_pool(space, chain):
            if chains_mod.is_irreducible_in(anchored0, m) and (m in anchored0):
                w = separated(m)
                if w:
                    bad_base.append((chain.text(), ids(m), w))
        for m in anchored0:
            if chains_mod.is_irreducible_in(anchored0, m):
                w = separated(m)
                if w:
                    bad_anchor.append((chain.text(), ids(m), w))
    results.append(
        CheckResult(
            "base-connectivity",
            f"{len(chain_list)} realized chains x first-level-irreducible base members",
            not bad_base,
            tuple(bad_base[:5]),
        )
    )
    results.append(
        CheckResult(
            "anchored-connectivity",
            f"{len(chain_list)} realized chains x first-level irreducibles",
            not bad_anchor,
            tuple(bad_anchor[:5]),
        )
    )
    for gen in sorted(space.poset.elements):
        top = lattice.normalize(space.ctx, [lattice.clause_of(gens=[gen])])
        members = set()
        for x in space.points:
            members |= chains_mod.generator_neighborhoods(
                space, x, [gen], cross_check=False
            ).members
        for m in members:
            t = sig[m]
            chain = TypeChain((t, t)) if lattice.term_eq(t, top) else TypeChain((t, top))
            ok, w = connect_mod.is_chain_connected(space, ids(m), chain)
            if not ok:
                bad_pure.append((gen, ids(m), (w.left, w.right)))
    results.append(
        CheckResult(
            "pure-family-connectivity",
            "all generators x pure family members",
            not bad_pure,
            tuple(bad_pure[:5]),
        )
    )

    return CheckReport(tuple(results))
