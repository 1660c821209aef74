"""Typed topological spaces on finite point sets.

A space couples a finite topology (stored as bit-set opens) with a type
mapping into the generator lattice: the empty set alone has type Bottom,
no open has type Top, and inclusion of opens never decreases the type.
Spaces are built from named generator families; the induced type of a
generated open is the join, over all generator bundles whose intersection
fits inside it, of the bundle's meet type. That extension is the least
monotone one dominating the declared generator types.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import lattice
from .errors import (
    NotStrictlyTypedError,
    PreconditionError,
    SpaceValidationError,
    UnknownPointError,
)
from .lattice import Clause, Context, Poset, TypeTerm, clause_of

DEFAULT_MAX_POINTS = 64


@dataclass(frozen=True)
class GeneratorSpec:
    """A named open set with its declared type."""

    name: str
    members: frozenset
    type_term: TypeTerm

    def __post_init__(self):
        if self.members and self.type_term.is_bottom:
            raise PreconditionError(f"generator {self.name!r}: nonempty set typed BOT")
        if self.type_term.is_top:
            raise PreconditionError(f"generator {self.name!r}: TOP is not a legal type")


@dataclass(frozen=True, eq=False)
class TypedSpace:
    """Immutable (points, opens, type mapping, poset, generators) bundle."""

    points: tuple[str, ...]
    opens: frozenset  # of int bit masks over ``points``
    sigma: dict  # mask -> TypeTerm
    poset: Poset
    generators: tuple[GeneratorSpec, ...]

    @property
    def ctx(self) -> Context:
        return Context(self.poset, self.points)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.points)) - 1

    def point_index(self, point: str) -> int:
        try:
            return self.points.index(point)
        except ValueError:
            raise UnknownPointError(f"unknown point {point!r}") from None

    def point_bit(self, point: str) -> int:
        return 1 << self.point_index(point)

    def mask_of(self, ids: Iterable[str]) -> int:
        m = 0
        for p in ids:
            m |= self.point_bit(p)
        return m

    def ids_of(self, mask: int) -> tuple[str, ...]:
        return tuple(sorted(p for i, p in enumerate(self.points) if mask >> i & 1))

    def sigma_of(self, mask: int) -> TypeTerm:
        return self.sigma[mask]

    def nonempty_opens(self) -> tuple[int, ...]:
        return tuple(sorted(m for m in self.opens if m))

    def sorted_opens(self) -> tuple[int, ...]:
        return tuple(sorted(self.opens, key=lambda m: self.ids_of(m)))


@dataclass(frozen=True)
class Failure:
    code: str
    detail: str
    witness: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple[Failure, ...]

    def by_code(self, code: str) -> tuple[Failure, ...]:
        return tuple(f for f in self.failures if f.code == code)


@dataclass(frozen=True)
class StrictnessReport:
    strict: bool
    witness: Optional[tuple] = None  # (ids(U), ids(V)) with U subset of V


def _structure_failures(space: TypedSpace) -> list[Failure]:
    out: list[Failure] = []
    opens = space.opens
    if 0 not in opens:
        out.append(Failure("empty-open-missing", "the empty set must be open"))
    if space.full_mask not in opens:
        out.append(Failure("whole-set-missing", "the whole point set must be open"))
    for u in opens:
        for v in opens:
            if (u | v) not in opens:
                out.append(Failure(
                    "union-closure", "union of opens is not open",
                    (space.ids_of(u), space.ids_of(v)),
                ))
            if (u & v) not in opens:
                out.append(Failure(
                    "intersection-closure", "intersection of opens is not open",
                    (space.ids_of(u), space.ids_of(v)),
                ))
    missing = [m for m in opens if m not in space.sigma]
    for m in missing:
        out.append(Failure("type-missing", "open has no assigned type", (space.ids_of(m),)))
    return out


def validate_type_mapping(space: TypedSpace) -> ValidationReport:
    """Exhaustive check of the type-mapping contract plus its consequences.

    Conditions checked: Bottom exactly on the empty set, Top nowhere,
    monotone along inclusion, topology closed under union/intersection,
    and the derived bounds ``sigma(U & V) <= sigma(U) ^ sigma(V)`` and
    ``sigma(U) v sigma(V) <= sigma(U | V)``.
    """
    failures = _structure_failures(space)
    if failures and any(f.code == "type-missing" for f in failures):
        return ValidationReport(False, tuple(failures))
    sig = space.sigma
    if 0 in sig and not sig[0].is_bottom:
        failures.append(Failure("bottom-on-empty", "empty set must have type BOT", ((),)))
    for m in space.opens:
        t = sig[m]
        if m and t.is_bottom:
            failures.append(Failure(
                "bottom-off-empty", "nonempty open typed BOT", (space.ids_of(m),)))
        if t.is_top:
            failures.append(Failure("top-forbidden", "open typed TOP", (space.ids_of(m),)))
    opens = sorted(space.opens)
    for u in opens:
        for v in opens:
            if u != v and (u & v) == u and not lattice.leq(sig[u], sig[v]):
                failures.append(Failure(
                    "monotone", "inclusion with non-increasing types",
                    (space.ids_of(u), space.ids_of(v)),
                ))
    for i, u in enumerate(opens):
        for v in opens[i:]:
            if (u & v) in sig and not lattice.leq(sig[u & v], lattice.meet(sig[u], sig[v])):
                failures.append(Failure(
                    "meet-bound", "type of intersection exceeds meet of types",
                    (space.ids_of(u), space.ids_of(v)),
                ))
            if (u | v) in sig and not lattice.leq(lattice.join(sig[u], sig[v]), sig[u | v]):
                failures.append(Failure(
                    "join-bound", "join of types exceeds type of union",
                    (space.ids_of(u), space.ids_of(v)),
                ))
    return ValidationReport(not failures, tuple(failures))


def is_strictly_typed(space: TypedSpace) -> StrictnessReport:
    """Proper inclusion of nonempty opens must strictly increase the type."""
    sig = space.sigma
    opens = sorted(m for m in space.opens if m)
    for u in opens:
        for v in opens:
            if u != v and (u & v) == u:
                if not lattice.leq(sig[u], sig[v]) or lattice.leq(sig[v], sig[u]):
                    return StrictnessReport(False, (space.ids_of(u), space.ids_of(v)))
    return StrictnessReport(True)


_strict_cache: dict[int, bool] = {}


def require_strict(space: TypedSpace) -> None:
    key = id(space)
    cached = _strict_cache.get(key)
    if cached is None:
        cached = is_strictly_typed(space).strict
        _strict_cache[key] = cached
    if not cached:
        raise NotStrictlyTypedError("operation requires a strictly typed space")


def _induced_type_entries(
    ctx: Context, specs: Sequence[GeneratorSpec], masks: Sequence[int]
) -> dict[int, TypeTerm]:
    """Map each nonempty generator-bundle intersection to its best meet type.

    Depth-first over bundles; empty intersections prune the whole branch
    since further meets only shrink the set.
    """
    entries: dict[int, TypeTerm] = {}
    m = len(specs)
    types = [s.type_term for s in specs]

    def record(mask: int, term: TypeTerm) -> None:
        if term.is_bottom:
            return
        prev = entries.get(mask)
        entries[mask] = term if prev is None else lattice.join(prev, term)

    def rec(start: int, mask: int, term: TypeTerm) -> None:
        for j in range(start, m):
            nm = mask & masks[j]
            if nm == 0:
                continue
            nt = lattice.meet(term, types[j])
            record(nm, nt)
            if not nt.is_bottom:
                rec(j + 1, nm, nt)

    rec(0, (1 << len(ctx.points)) - 1, ctx.top())
    return entries


def generate_topology(
    specs: Sequence[GeneratorSpec],
    poset: Poset,
    points: Sequence[str],
    max_points: int = DEFAULT_MAX_POINTS,
) -> TypedSpace:
    """Generate the typed topology spanned by the given generator families.

    Opens are the unions of nonempty generator intersections (plus the empty
    set and, when not already covered, the whole point set, which then takes
    the join of all generator types). Raises `SpaceValidationError` when the
    induced mapping breaks any contract condition.
    """
    pts = tuple(points)
    if len(pts) > max_points:
        raise PreconditionError(f"{len(pts)} points exceed the limit of {max_points}")
    ctx = Context(poset, pts)
    seen = set()
    for s in specs:
        if s.name in seen:
            raise PreconditionError(f"duplicate generator name {s.name!r}")
        seen.add(s.name)
        if s.type_term.ctx != ctx:
            raise PreconditionError(f"generator {s.name!r} typed in a foreign context")
        for p in s.members:
            if p not in ctx.point_set:
                raise UnknownPointError(f"generator {s.name!r} uses unknown point {p!r}")
        if not s.members:
            raise PreconditionError(f"generator {s.name!r} has an empty member set")

    bit = {p: 1 << i for i, p in enumerate(pts)}
    masks = [sum(bit[p] for p in s.members) for s in specs]
    entries = _induced_type_entries(ctx, specs, masks)

    opens = {0}
    frontier = set(entries)
    opens |= frontier
    while True:
        new = set()
        for a in frontier:
            for b in opens:
                u = a | b
                if u not in opens:
                    new.add(u)
        if not new:
            break
        opens |= new
        frontier = new
    full = (1 << len(pts)) - 1
    opens.add(full)

    entry_items = sorted(entries.items())
    sigma: dict[int, TypeTerm] = {0: ctx.bottom()}
    for u in opens:
        if u == 0:
            continue
        parts = [t for m, t in entry_items if (m & u) == m]
        sigma[u] = lattice.join_all(ctx, parts)

    space = TypedSpace(pts, frozenset(opens), sigma, poset, tuple(specs))
    report = validate_type_mapping(space)
    if not report.ok:
        raise SpaceValidationError(
            f"generated space violates the type-mapping contract: "
            f"{report.failures[0].code}",
            report,
        )
    return space


def strictify(space: TypedSpace) -> TypedSpace:
    """Force strictly increasing types along proper inclusions.

    Every proper nonempty open ``U`` gets ``sigma(U) v (N_U ^ sigma(X))``
    where ``N_U`` is the meet of the negated literals of the points outside
    ``U``. Meeting with ``sigma(X)`` keeps the added clause below the type of
    the whole set, so monotonicity survives; the whole set itself is left
    alone (an empty negative meet would be Top). The result is re-validated
    and re-checked for strictness; failures raise, never pass silently.
    """
    ctx = space.ctx
    full = space.full_mask
    top_type = space.sigma[full]
    sigma = dict(space.sigma)
    for m in space.opens:
        if m == 0 or m == full:
            continue
        absent = [p for i, p in enumerate(space.points) if not (m >> i & 1)]
        tag = lattice.normalize(ctx, [clause_of(neg=absent)])
        sigma[m] = lattice.join(space.sigma[m], lattice.meet(tag, top_type))
    out = TypedSpace(space.points, space.opens, sigma, space.poset, space.generators)
    report = validate_type_mapping(out)
    if not report.ok:
        raise SpaceValidationError(
            f"strictness repair broke the type mapping: {report.failures[0].code}", report
        )
    strictness = is_strictly_typed(out)
    if not strictness.strict:
        raise SpaceValidationError(
            f"strictness repair failed on pair {strictness.witness}", report
        )
    return out


def forces(space: TypedSpace, p: TypeTerm, x: str) -> bool:
    """True when some open of type exactly ``p`` contains ``x``."""
    bit = space.point_bit(x)
    return any(
        m & bit and lattice.term_eq(space.sigma[m], p) for m in space.opens if m
    )


@dataclass(frozen=True, eq=False)
class RealizedTypes:
    """The distinct types of nonempty opens with their induced order."""

    space: TypedSpace
    terms: tuple[TypeTerm, ...]
    opens_by_type: dict  # index -> tuple of masks
    _leq: dict  # (i, j) -> bool

    def index_of(self, t: TypeTerm) -> Optional[int]:
        for i, u in enumerate(self.terms):
            if u.clauses == t.clauses:
                return i
        return None

    def leq(self, i: int, j: int) -> bool:
        return self._leq[(i, j)]

    def __len__(self):
        return len(self.terms)


def realized_types(space: TypedSpace) -> RealizedTypes:
    buckets: dict[tuple, list[int]] = {}
    keyed: dict[tuple, TypeTerm] = {}
    for m in space.opens:
        if not m:
            continue
        t = space.sigma[m]
        k = t.sort_key()
        keyed[k] = t
        buckets.setdefault(k, []).append(m)
    keys = sorted(keyed)
    terms = tuple(keyed[k] for k in keys)
    opens_by_type = {i: tuple(sorted(buckets[k])) for i, k in enumerate(keys)}
    rel = {
        (i, j): lattice.leq(a, b)
        for i, a in enumerate(terms)
        for j, b in enumerate(terms)
    }
    return RealizedTypes(space, terms, opens_by_type, rel)


# ---------------------------------------------------------------------------
# JSON space schema
# ---------------------------------------------------------------------------


def space_to_json(space: TypedSpace) -> dict:
    poset_pairs = sorted((a, b) for a, b in space.poset.pairs if a != b)
    return {
        "points": list(space.points),
        "poset": {
            "elements": sorted(space.poset.elements),
            "leq": [list(p) for p in poset_pairs],
        },
        "opens": [
            {"set": list(space.ids_of(m)), "type": lattice.term_to_json(space.sigma[m])}
            for m in space.sorted_opens()
        ],
        "generators": [
            {
                "name": g.name,
                "set": sorted(g.members),
                "type": lattice.term_to_json(g.type_term),
            }
            for g in space.generators
        ],
    }


def space_from_json(obj: dict) -> TypedSpace:
    try:
        points = tuple(obj["points"])
        poset = Poset(obj["poset"]["elements"], [tuple(p) for p in obj["poset"]["leq"]])
    except KeyError as exc:
        raise SpaceValidationError(f"space document missing field {exc}") from None
    ctx = Context(poset, points)
    bit = {p: 1 << i for i, p in enumerate(points)}
    sigma: dict[int, TypeTerm] = {}
    opens = set()
    for entry in obj.get("opens", []):
        mask = 0
        for p in entry["set"]:
            if p not in bit:
                raise UnknownPointError(f"open uses unknown point {p!r}")
            mask |= bit[p]
        if mask in opens:
            raise SpaceValidationError(f"duplicate open {sorted(entry['set'])}")
        opens.add(mask)
        sigma[mask] = lattice.term_from_json(ctx, entry["type"])
    generators = []
    for entry in obj.get("generators", []):
        members = frozenset(entry["set"])
        generators.append(
            GeneratorSpec(entry["name"], members, lattice.term_from_json(ctx, entry["type"]))
        )
    space = TypedSpace(points, frozenset(opens), sigma, poset, tuple(generators))
    report = validate_type_mapping(space)
    if not report.ok:
        raise SpaceValidationError(
            f"space document fails validation: {report.failures[0].code}", report
        )
    return space


def load_space(path) -> TypedSpace:
    with open(path, "r", encoding="utf-8") as fh:
        return space_from_json(json.load(fh))


def dump_space(space: TypedSpace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(space_to_json(space), fh, indent=2, sort_keys=True)
        fh.write("\n")
