"""Chains of types: sandwiched neighborhoods, their bases, and chain covers.

A chain ``p_0 <= ... <= p_{k-1}`` restricts the neighborhoods of a point to
opens whose type is sandwiched between two consecutive levels. Every chain
query is confined to the sub-universe of opens whose types live in the
sublattice generated by the chain's own generators; an open whose type
mentions a foreign generator is invisible to the chain even when its type
happens to sit below the top level. That confinement is what makes a
right-neighbor chain see only the right rays of a street and not every
interval that sits under ``right`` in the order.

The base of a sandwiched family keeps the members that are join-irreducible
above at least one lower level, with candidate covers drawn from the same
confined universe. Covering the realized types with few chains (a minimum
chain partition via bipartite matching) recovers the full neighborhood
system of every point.
"""
from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass
from typing import Iterable, Optional

from . import lattice, space as space_mod
from .errors import InvariantViolationError, PreconditionError
from .lattice import Context, TypeTerm
from .space import TypedSpace, realized_types
from .basis import TypedFamily


@dataclass(frozen=True)
class TypeChain:
    """An ascending chain of at least two lattice levels, none extreme."""

    levels: tuple[TypeTerm, ...]

    def __post_init__(self):
        if len(self.levels) < 2:
            raise PreconditionError("a chain needs at least two levels")
        for t in self.levels:
            if t.is_bottom or t.is_top:
                raise PreconditionError("chain levels must avoid BOT and TOP")
        for lo, hi in zip(self.levels, self.levels[1:]):
            if not lattice.leq(lo, hi):
                raise PreconditionError(
                    f"chain levels out of order: {lattice.format_term(lo)!r} "
                    f"!<= {lattice.format_term(hi)!r}"
                )

    @property
    def k(self) -> int:
        return len(self.levels)

    def pairs(self) -> tuple[tuple[TypeTerm, TypeTerm], ...]:
        return tuple(zip(self.levels, self.levels[1:]))

    def support(self) -> frozenset:
        """Generators the chain may talk about."""
        out = frozenset()
        for t in self.levels:
            out |= t.generators()
        return out

    def text(self) -> str:
        return " ; ".join(lattice.format_term(t) for t in self.levels)


def parse_chain(text: str, ctx: Context) -> TypeChain:
    """Parse a semicolon-separated list of type expressions into a chain."""
    parts = [p.strip() for p in text.split(";")]
    if any(not p for p in parts):
        raise PreconditionError("empty chain level")
    return TypeChain(tuple(lattice.parse_type_expr(p, ctx) for p in parts))


class _SpaceIndex:
    """Per-space memo: realized-type vectors and irreducible pools.

    Chains reduce to lookups here: every open knows its realized-type index,
    every chain level gets one below/above vector over the realized types,
    and the irreducible subset of an anchored pool is computed once per
    (level, support) pair.
    """

    def __init__(self, space: TypedSpace):
        self.space = space
        rt = realized_types(space)
        self.terms = rt.terms
        self.key_to_idx = {t.sort_key(): i for i, t in enumerate(rt.terms)}
        self.type_of_open = {
            m: self.key_to_idx[space.sigma[m].sort_key()] for m in space.opens if m
        }
        self.gens_of_type = [t.generators() for t in rt.terms]
        self._rt = rt
        self.level_vectors: dict = {}
        self.irr_cache: dict = {}

    def vectors_for(self, level: TypeTerm):
        key = level.sort_key()
        got = self.level_vectors.get(key)
        if got is None:
            i = self.key_to_idx.get(key)
            n = len(self.terms)
            if i is not None:
                below = tuple(self._rt.leq(i, j) for j in range(n))
                above = tuple(self._rt.leq(j, i) for j in range(n))
            else:
                below = tuple(lattice.leq(level, t) for t in self.terms)
                above = tuple(lattice.leq(t, level) for t in self.terms)
            got = (below, above)
            self.level_vectors[key] = got
        return got


_space_index: "weakref.WeakKeyDictionary[TypedSpace, _SpaceIndex]" = (
    weakref.WeakKeyDictionary()
)


def _index(space: TypedSpace) -> _SpaceIndex:
    idx = _space_index.get(space)
    if idx is None:
        idx = _SpaceIndex(space)
        _space_index[space] = idx
    return idx


def _pool_members(space: TypedSpace, chain: TypeChain) -> list[int]:
    idx = _index(space)
    support = chain.support()
    vecs = [(idx.vectors_for(lo)[0], idx.vectors_for(hi)[1]) for lo, hi in chain.pairs()]
    out = []
    for m in space.opens:
        if not m:
            continue
        ti = idx.type_of_open[m]
        if not idx.gens_of_type[ti] <= support:
            continue
        if any(below[ti] and above[ti] for below, above in vecs):
            out.append(m)
    return out


def chain_neighborhoods(space: TypedSpace, x: str, chain: TypeChain) -> TypedFamily:
    """Visible opens through ``x`` sandwiched by some consecutive level pair."""
    space_mod.require_strict(space)
    bit = space.point_bit(x)
    members = {m for m in _pool_members(space, chain) if m & bit}
    return TypedFamily(space, chain, frozenset(members), x)


def chain_pool(space: TypedSpace, chain: TypeChain) -> frozenset:
    """All sandwiched visible opens: the union of every point's neighborhoods."""
    space_mod.require_strict(space)
    return frozenset(_pool_members(space, chain))


def anchored_pool(space: TypedSpace, chain: TypeChain, level: TypeTerm) -> frozenset:
    """Visible opens whose type dominates ``level`` (irreducibility universe)."""
    idx = _index(space)
    support = chain.support()
    below = idx.vectors_for(level)[0]
    return frozenset(
        m
        for m in space.opens
        if m
        and idx.gens_of_type[idx.type_of_open[m]] <= support
        and below[idx.type_of_open[m]]
    )


def is_irreducible_in(pool: frozenset, mask: int) -> bool:
    """No two other pool members union to ``mask``."""
    inside = [m for m in pool if m != mask and (m & mask) == m]
    return not any((w | v) == mask for w, v in itertools.combinations(inside, 2))


def _irreducible_pool(space: TypedSpace, chain: TypeChain, level: TypeTerm) -> frozenset:
    idx = _index(space)
    key = (level.sort_key(), chain.support())
    got = idx.irr_cache.get(key)
    if got is None:
        pool = anchored_pool(space, chain, level)
        got = frozenset(m for m in pool if is_irreducible_in(pool, m))
        idx.irr_cache[key] = got
    return got


def chain_base_pool(space: TypedSpace, chain: TypeChain) -> frozenset:
    """Sandwiched visible opens irreducible above some lower chain level.

    The irreducibility level ranges over every lower level whose value lies
    below the member's type; it is not tied to the sandwiching index.
    """
    idx = _index(space)
    members = set()
    lower = [
        (idx.vectors_for(lo)[0], _irreducible_pool(space, chain, lo))
        for lo in chain.levels[:-1]
    ]
    for m in chain_pool(space, chain):
        ti = idx.type_of_open[m]
        for below, irr in lower:
            if below[ti] and m in irr:
                members.add(m)
                break
    return frozenset(members)


def chain_base(space: TypedSpace, x: str, chain: TypeChain) -> TypedFamily:
    """The members of `chain_base_pool` that contain ``x``."""
    space_mod.require_strict(space)
    bit = space.point_bit(x)
    members = {m for m in chain_base_pool(space, chain) if m & bit}
    return TypedFamily(space, chain, frozenset(members), x)


def is_generator_chain(chain: TypeChain, gen: str, ctx: Context) -> bool:
    """Levels confined to one generator's sublattice, topping out at it."""
    if gen not in ctx.poset.elements:
        return False
    if not all(t.uses_only({gen}) for t in chain.levels):
        return False
    top = lattice.normalize(ctx, [lattice.clause_of(gens=[gen])])
    return lattice.term_eq(chain.levels[-1], top)


def generator_neighborhoods(
    space: TypedSpace,
    x: str,
    gens: Iterable[str],
    cross_check: bool = True,
) -> TypedFamily:
    """Opens through ``x`` typed purely in ``gens`` and below their join.

    For a single generator this family equals the union of the sandwiched
    neighborhoods over every chain inside that generator's sublattice
    topping out at the generator; with ``cross_check`` the equality is
    re-derived from realized-level chains and enforced.
    """
    space_mod.require_strict(space)
    gen_list = sorted(set(gens))
    if not gen_list:
        raise PreconditionError("need at least one generator")
    for g in gen_list:
        if g not in space.poset.elements:
            raise PreconditionError(f"unknown generator {g!r}")
    ctx = space.ctx
    bound = lattice.join_all(
        ctx, [lattice.normalize(ctx, [lattice.clause_of(gens=[g])]) for g in gen_list]
    )
    bit = space.point_bit(x)
    members = set()
    for m in space.opens:
        if not (m & bit):
            continue
        t = space.sigma[m]
        if t.uses_only(gen_list) and lattice.leq(t, bound):
            members.add(m)
    fam = TypedFamily(space, bound, frozenset(members), x)
    if cross_check and len(gen_list) == 1:
        union = _union_over_generator_chains(space, x, gen_list[0])
        if union != fam.members:
            raise InvariantViolationError(
                "single-generator family disagrees with its chain union",
                witness=(
                    x,
                    gen_list[0],
                    sorted(space.ids_of(m) for m in union ^ fam.members),
                ),
            )
    return fam


def _union_over_generator_chains(space: TypedSpace, x: str, gen: str) -> frozenset:
    """Union of sandwiched neighborhoods over realized-level generator chains.

    Any such chain decomposes into consecutive level pairs drawn from the
    generator's sublattice, so scanning pairs ``q <= r`` over realized
    in-sublattice levels (plus the generator itself on top) is exhaustive.
    """
    ctx = space.ctx
    top = lattice.normalize(ctx, [lattice.clause_of(gens=[gen])])
    levels = [top]
    seen = {top.sort_key()}
    for t in realized_types(space).terms:
        if t.uses_only({gen}) and lattice.leq(t, top) and not (t.is_bottom or t.is_top):
            if t.sort_key() not in seen:
                seen.add(t.sort_key())
                levels.append(t)
    bit = space.point_bit(x)
    out = set()
    for lo in levels:
        for hi in levels:
            if not lattice.leq(lo, hi):
                continue
            for m in _pool_members(space, TypeChain((lo, hi))):
                if m & bit:
                    out.add(m)
    return frozenset(out)


# ---------------------------------------------------------------------------
# chain covers of the realized types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainCover:
    """Chains over the realized types covering every one of them."""

    chains: tuple[TypeChain, ...]
    width: int


def chain_cover(space: TypedSpace) -> ChainCover:
    """Minimum chain partition of the realized-type order.

    Uses the split-node bipartite reduction: a maximum matching on strict
    order edges glues types into chains, and the chain count equals the
    width of the realized order. Single-type chains are padded by repeating
    the level, which the sandwich test treats as selecting exactly that type.
    """
    space_mod.require_strict(space)
    rt = realized_types(space)
    n = len(rt)
    succ_candidates: dict[int, list[int]] = {
        i: [j for j in range(n) if i != j and rt.leq(i, j)] for i in range(n)
    }
    match_right: dict[int, int] = {}
    match_left: dict[int, int] = {}

    def try_augment(i: int, seen: set) -> bool:
        for j in succ_candidates[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_right or try_augment(match_right[j], seen):
                match_right[j] = i
                match_left[i] = j
                return True
        return False

    for i in range(n):
        try_augment(i, set())

    starts = [i for i in range(n) if i not in match_right]
    chains = []
    covered = 0
    for s in starts:
        seq = [s]
        while seq[-1] in match_left:
            seq.append(match_left[seq[-1]])
        covered += len(seq)
        levels = [rt.terms[i] for i in seq]
        if len(levels) == 1:
            levels = levels * 2
        chains.append(TypeChain(tuple(levels)))
    if covered != n:  # pragma: no cover - matching always yields a partition
        raise InvariantViolationError("chain partition missed some realized types")
    return ChainCover(tuple(chains), len(starts))
