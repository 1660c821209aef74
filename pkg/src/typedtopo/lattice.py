"""Canonical terms and order for the bounded distributive type lattice.

The lattice is generated by a finite poset of named generators together with
two complemented literals per point (``@x`` and ``~@x``, glued by
``@x & ~@x = BOT`` and ``@x | ~@x = TOP``). A term is a join of clauses,
each clause a meet of literals. Canonical form keeps, for every term, exactly
its maximal implicant clauses:

* inside a clause, generators are reduced to the minimal antichain and a
  clause containing both ``@x`` and ``~@x`` is dropped;
* the clause set is closed under consensus on complemented point literals
  and then thinned to an antichain under clause implication.

With that, structural equality coincides with semantic equality over all
admissible valuations (monotone on the generator poset, complement-consistent
on points), and the clause-witnessing order test below is exact.  The
valuation machinery (`evaluate`, `enumerate_valuations`) stays an independent
decision procedure used to cross-check the syntactic one in the test suite.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .errors import (
    BoundExceededError,
    ContextMismatchError,
    ExprSyntaxError,
    PreconditionError,
    UnknownSymbolError,
)

DEFAULT_VALUATION_BOUND = 20

GEN = "gen"
POS = "pos"
NEG = "neg"


@dataclass(frozen=True)
class Literal:
    """One meet factor: a generator, a point, or a negated point."""

    kind: str  # GEN | POS | NEG
    name: str

    def sort_key(self) -> tuple:
        rank = {GEN: 0, POS: 1, NEG: 2}[self.kind]
        # generators first by name, then point literals by id, positive first
        if self.kind == GEN:
            return (0, self.name, 0)
        return (1, self.name, rank)


class Poset:
    """Finite partial order on generator names.

    The stored relation is reflexive and transitively closed; antisymmetry is
    checked on construction.
    """

    __slots__ = ("elements", "_pairs", "_hash")

    def __init__(self, elements: Iterable[str], pairs: Iterable[tuple[str, str]] = ()):
        elems = frozenset(elements)
        rel = {(a, a) for a in elems}
        for a, b in pairs:
            if a not in elems or b not in elems:
                raise UnknownSymbolError(f"order pair ({a!r}, {b!r}) uses undeclared generator")
            rel.add((a, b))
        # transitive closure (tiny posets; cubic is fine)
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(tuple(rel), tuple(rel)):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise PreconditionError(f"order is not antisymmetric: {a!r} <= {b!r} <= {a!r}")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "_pairs", frozenset(rel))
        object.__setattr__(self, "_hash", hash((elems, frozenset(rel))))

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self._pairs

    @property
    def pairs(self) -> frozenset:
        return self._pairs

    def minimal(self, names: Iterable[str]) -> frozenset:
        """Antichain of the <=-minimal members of ``names``."""
        ns = set(names)
        return frozenset(a for a in ns if not any(b != a and self.leq(b, a) for b in ns))

    def restricted(self, names: Iterable[str]) -> "Poset":
        sub = frozenset(names) & self.elements
        return Poset(sub, [(a, b) for (a, b) in self._pairs if a in sub and b in sub])

    def upsets(self) -> Iterator[frozenset]:
        """All upward-closed subsets of the poset (monotone 0/1 assignments)."""
        elems = sorted(self.elements)
        for bits in itertools.product((0, 1), repeat=len(elems)):
            chosen = {e for e, b in zip(elems, bits) if b}
            if all(b in chosen for a in chosen for b in elems if self.leq(a, b)):
                yield frozenset(chosen)

    def __eq__(self, other):
        return (
            isinstance(other, Poset)
            and self.elements == other.elements
            and self._pairs == other._pairs
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        strict = sorted((a, b) for (a, b) in self._pairs if a != b)
        return f"Poset({sorted(self.elements)!r}, {strict!r})"


@dataclass(frozen=True)
class Context:
    """Ambient generator poset plus the ordered point universe."""

    poset: Poset
    points: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise PreconditionError("duplicate point ids in context")
        clash = self.poset.elements & set(self.points)
        if clash:
            raise PreconditionError(f"names used as both generator and point: {sorted(clash)}")

    @property
    def point_set(self) -> frozenset:
        return frozenset(self.points)

    def bottom(self) -> "TypeTerm":
        return TypeTerm(self, frozenset())

    def top(self) -> "TypeTerm":
        return TypeTerm(self, frozenset({Clause(frozenset(), frozenset(), frozenset())}))


@dataclass(frozen=True)
class Clause:
    """Meet of literals: generator antichain plus signed point sets."""

    gens: frozenset
    pos: frozenset
    neg: frozenset

    def literals(self) -> tuple[Literal, ...]:
        lits = [Literal(GEN, g) for g in self.gens]
        lits += [Literal(POS, x) for x in self.pos]
        lits += [Literal(NEG, x) for x in self.neg]
        return tuple(sorted(lits, key=Literal.sort_key))

    def is_empty(self) -> bool:
        return not (self.gens or self.pos or self.neg)

    def sort_key(self) -> tuple:
        return tuple(l.sort_key() for l in self.literals())


def clause_of(gens=(), pos=(), neg=()) -> Clause:
    return Clause(frozenset(gens), frozenset(pos), frozenset(neg))


def _reduce_clause(poset: Poset, c: Clause) -> Optional[Clause]:
    """Minimal-antichain generator part; ``None`` for a contradictory clause."""
    if c.pos & c.neg:
        return None
    return Clause(poset.minimal(c.gens), c.pos, c.neg)


def _clause_implies(c: Clause, d: Clause, poset: Poset) -> bool:
    """True when satisfaction of ``c`` forces satisfaction of ``d`` (c <= d)."""
    if not (d.pos <= c.pos and d.neg <= c.neg):
        return False
    return all(any(poset.leq(g, h) for g in c.gens) for h in d.gens)


def _absorb(poset: Poset, clauses: set[Clause]) -> set[Clause]:
    """Keep only clauses not implying another clause (the maximal antichain)."""
    out: set[Clause] = set()
    for c in clauses:
        if any(d != c and _clause_implies(c, d, poset) for d in clauses):
            continue
        out.add(c)
    return out


def _consensus_closure(poset: Poset, clauses: set[Clause]) -> set[Clause]:
    work = _absorb(poset, clauses)
    while True:
        fresh: set[Clause] = set()
        items = tuple(work)
        for c, d in itertools.combinations(items, 2):
            for x in (c.pos & d.neg) | (d.pos & c.neg):
                merged = Clause(
                    poset.minimal(c.gens | d.gens),
                    (c.pos | d.pos) - {x},
                    (c.neg | d.neg) - {x},
                )
                if merged.pos & merged.neg:
                    continue
                if not any(_clause_implies(merged, e, poset) for e in work):
                    fresh.add(merged)
        if not fresh:
            return work
        work = _absorb(poset, work | fresh)


@dataclass(frozen=True)
class TypeTerm:
    """A lattice element in canonical join-of-meets form.

    ``clauses`` empty means Bottom; the presence of the empty clause means
    Top (and canonically Top is exactly the singleton empty clause).
    Construct terms through `normalize`, `meet`, `join`, or the parser;
    the constructor itself trusts its input.
    """

    ctx: Context
    clauses: frozenset

    @property
    def is_bottom(self) -> bool:
        return not self.clauses

    @property
    def is_top(self) -> bool:
        return any(c.is_empty() for c in self.clauses)

    def sorted_clauses(self) -> tuple[Clause, ...]:
        return tuple(sorted(self.clauses, key=Clause.sort_key))

    def sort_key(self) -> tuple:
        return tuple(c.sort_key() for c in self.sorted_clauses())

    def generators(self) -> frozenset:
        return frozenset(g for c in self.clauses for g in c.gens)

    def point_ids(self) -> frozenset:
        return frozenset(x for c in self.clauses for x in (c.pos | c.neg))

    def uses_only(self, gens: Iterable[str]) -> bool:
        """True when every clause draws its generators from ``gens``."""
        allowed = frozenset(gens)
        return all(c.gens <= allowed for c in self.clauses)

    def __repr__(self):
        return f"TypeTerm({format_term(self)!r})"


def _require_same_context(a: TypeTerm, b: TypeTerm) -> None:
    if a.ctx != b.ctx:
        raise ContextMismatchError("terms come from different contexts")


def _check_symbols(ctx: Context, clauses: Iterable[Clause]) -> None:
    for c in clauses:
        for g in c.gens:
            if g not in ctx.poset.elements:
                raise UnknownSymbolError(f"unknown generator {g!r}")
        for x in c.pos | c.neg:
            if x not in ctx.point_set:
                raise UnknownSymbolError(f"unknown point {x!r}")


def normalize(ctx: Context, clauses: Iterable[Clause]) -> TypeTerm:
    """Canonicalize a raw clause collection into a `TypeTerm`.

    Contradictory clauses vanish, generator parts become antichains, the
    clause set is consensus-closed and thinned to clause-order maximal
    members. Semantically equal inputs come out structurally identical.
    """
    _check_symbols(ctx, clauses)
    reduced: set[Clause] = set()
    for c in clauses:
        rc = _reduce_clause(ctx.poset, c)
        if rc is not None:
            reduced.add(rc)
    if not reduced:
        return ctx.bottom()
    closed = _consensus_closure(ctx.poset, reduced)
    if any(c.is_empty() for c in closed):
        return ctx.top()
    return TypeTerm(ctx, frozenset(closed))


def meet(a: TypeTerm, b: TypeTerm) -> TypeTerm:
    _require_same_context(a, b)
    products = [
        Clause(ca.gens | cb.gens, ca.pos | cb.pos, ca.neg | cb.neg)
        for ca in a.clauses
        for cb in b.clauses
    ]
    return normalize(a.ctx, products)


def join(a: TypeTerm, b: TypeTerm) -> TypeTerm:
    _require_same_context(a, b)
    return normalize(a.ctx, set(a.clauses) | set(b.clauses))


def meet_all(ctx: Context, terms: Iterable[TypeTerm]) -> TypeTerm:
    acc = ctx.top()
    for t in terms:
        acc = meet(acc, t)
    return acc


def join_all(ctx: Context, terms: Iterable[TypeTerm]) -> TypeTerm:
    acc = ctx.bottom()
    for t in terms:
        acc = join(acc, t)
    return acc


def leq(a: TypeTerm, b: TypeTerm) -> bool:
    """Quotient order: every clause of ``a`` implies some clause of ``b``.

    On canonical forms this clause-witnessing test agrees with the valuation
    semantics (each clause of ``a`` is an implicant of ``a`` hence of ``b``,
    and canonical ``b`` lists all maximal implicants); the agreement is
    exercised wholesale by the acceptance suite.
    """
    _require_same_context(a, b)
    poset = a.ctx.poset
    return all(
        any(_clause_implies(ca, cb, poset) for cb in b.clauses) for ca in a.clauses
    )


def term_eq(a: TypeTerm, b: TypeTerm) -> bool:
    _require_same_context(a, b)
    return a.clauses == b.clauses


@dataclass(frozen=True)
class Valuation:
    """Admissible 0/1 assignment on a sub-context.

    ``gens_true`` must be an up-set of the restricted poset; a negated point
    literal evaluates to the complement of its point bit, which encodes the
    two gluing identities of the lattice.
    """

    gens: tuple[str, ...]
    points: tuple[str, ...]
    gens_true: frozenset
    points_true: frozenset
    true_literals: frozenset = field(default=frozenset(), compare=False, repr=False)

    @staticmethod
    def make(gens, points, gens_true, points_true) -> "Valuation":
        lits = {Literal(GEN, g) for g in gens_true}
        lits |= {Literal(POS, x) for x in points_true}
        lits |= {Literal(NEG, x) for x in points if x not in points_true}
        return Valuation(
            tuple(gens), tuple(points), frozenset(gens_true), frozenset(points_true),
            frozenset(lits),
        )


def evaluate(t: TypeTerm, v: Valuation) -> int:
    """Join-of-meets evaluation of ``t`` under ``v`` (0 or 1)."""
    for c in t.clauses:
        if frozenset(c.literals()) <= v.true_literals:
            return 1
    return 0


def enumerate_valuations(
    ctx: Context,
    gens: Optional[Iterable[str]] = None,
    points: Optional[Iterable[str]] = None,
    bound: int = DEFAULT_VALUATION_BOUND,
) -> Iterator[Valuation]:
    """Yield every admissible valuation on the chosen sub-context.

    Generator parts range over up-sets of the restricted poset, point parts
    are free. Raises `BoundExceededError` when the sub-context has more than
    ``bound`` literals; narrow the query instead of raising the bound.
    """
    gen_list = sorted(ctx.poset.elements if gens is None else frozenset(gens))
    point_list = sorted(ctx.point_set if points is None else frozenset(points))
    for g in gen_list:
        if g not in ctx.poset.elements:
            raise UnknownSymbolError(f"unknown generator {g!r}")
    for x in point_list:
        if x not in ctx.point_set:
            raise UnknownSymbolError(f"unknown point {x!r}")
    if len(gen_list) + len(point_list) > bound:
        raise BoundExceededError(
            f"{len(gen_list)} generators + {len(point_list)} points exceed the "
            f"valuation bound of {bound}; restrict the query to fewer literals"
        )
    sub = ctx.poset.restricted(gen_list)
    for upset in sub.upsets():
        for k in range(len(point_list) + 1):
            for chosen in itertools.combinations(point_list, k):
                yield Valuation.make(gen_list, point_list, upset, frozenset(chosen))


def relevant_valuations(*terms: TypeTerm, bound: int = DEFAULT_VALUATION_BOUND) -> Iterator[Valuation]:
    """Valuations on the literals occurring in any of ``terms``."""
    ctx = terms[0].ctx
    gens: set[str] = set()
    points: set[str] = set()
    for t in terms:
        _require_same_context(terms[0], t)
        gens |= t.generators()
        points |= t.point_ids()
    return enumerate_valuations(ctx, gens, points, bound=bound)


def leq_by_valuations(a: TypeTerm, b: TypeTerm, bound: int = DEFAULT_VALUATION_BOUND) -> bool:
    """Order decided by exhaustive evaluation; the semantic reference."""
    return all(evaluate(a, v) <= evaluate(b, v) for v in relevant_valuations(a, b, bound=bound))


def is_join_irreducible(t: TypeTerm, bound: int = DEFAULT_VALUATION_BOUND) -> bool:
    """True when the satisfying valuations of ``t`` have one minimal element.

    Valuations compare pointwise over all literal coordinates, so two are
    comparable only with identical point parts. The enumeration runs over the
    occurring generators and the *whole* ambient point set; the equivalent
    structural reading (a single clause mentioning every point) is computed
    as a fast path and the two must agree.
    """
    if t.is_bottom:
        return False
    ctx = t.ctx
    gens = sorted(t.generators())
    points = sorted(ctx.point_set)
    if len(gens) + len(points) > bound:
        raise BoundExceededError(
            f"join-irreducibility check needs {len(gens) + len(points)} literals, "
            f"over the bound of {bound}"
        )
    structural = False
    if len(t.clauses) == 1:
        (c,) = t.clauses
        structural = (c.pos | c.neg) == ctx.point_set
    by_points: dict[frozenset, list[frozenset]] = {}
    for v in enumerate_valuations(ctx, gens, points, bound=bound):
        if evaluate(t, v):
            by_points.setdefault(v.points_true, []).append(v.gens_true)
    minima = 0
    for gsets in by_points.values():
        minima += sum(
            1 for g in gsets if not any(h != g and h <= g for h in gsets)
        )
    semantic = minima == 1
    if semantic != structural:  # pragma: no cover - would witness a canonicity bug
        raise AssertionError(f"irreducibility fast path disagrees on {t!r}")
    return semantic


def upward_filter(t: TypeTerm, candidates: Sequence[TypeTerm]) -> list[TypeTerm]:
    """All candidates lying above ``t``; the principal filter on a list."""
    if t.is_bottom:
        raise PreconditionError("filters never contain the bottom element")
    return [q for q in candidates if leq(t, q)]


# ---------------------------------------------------------------------------
# parsing and serialization
# ---------------------------------------------------------------------------

_RESERVED = {"BOT", "TOP"}


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "&|()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch == "~":
            if text[i : i + 2] != "~@":
                raise ExprSyntaxError("expected '@' after '~'", i)
            j = i + 2
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 2:
                raise ExprSyntaxError("missing point id after '~@'", i)
            tokens.append(("neg", text[i + 2 : j], i))
            i = j
            continue
        if ch == "@":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise ExprSyntaxError("missing point id after '@'", i)
            tokens.append(("pos", text[i + 1 : j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ctx = ctx

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> TypeTerm:
        t = self.term()
        kind, _, at = self.peek()
        if kind != "end":
            raise ExprSyntaxError("trailing input after expression", at)
        return t

    def term(self) -> TypeTerm:
        t = self.clause()
        while self.peek()[0] == "|":
            self.advance()
            t = join(t, self.clause())
        return t

    def clause(self) -> TypeTerm:
        t = self.literal()
        while self.peek()[0] == "&":
            self.advance()
            t = meet(t, self.literal())
        return t

    def literal(self) -> TypeTerm:
        kind, value, at = self.advance()
        if kind == "(":
            t = self.term()
            k2, _, at2 = self.advance()
            if k2 != ")":
                raise ExprSyntaxError("expected ')'", at2)
            return t
        if kind == "pos":
            if value not in self.ctx.point_set:
                raise UnknownSymbolError(f"unknown point {value!r}")
            return normalize(self.ctx, [clause_of(pos=[value])])
        if kind == "neg":
            if value not in self.ctx.point_set:
                raise UnknownSymbolError(f"unknown point {value!r}")
            return normalize(self.ctx, [clause_of(neg=[value])])
        if kind == "name":
            if value == "BOT":
                return self.ctx.bottom()
            if value == "TOP":
                return self.ctx.top()
            if value not in self.ctx.poset.elements:
                raise UnknownSymbolError(f"unknown generator {value!r}")
            return normalize(self.ctx, [clause_of(gens=[value])])
        raise ExprSyntaxError("expected a literal", at)


def parse_type_expr(text: str, ctx: Context) -> TypeTerm:
    """Parse ``gen & @x | ~@y``-style expressions into a canonical term."""
    return _Parser(text, ctx).parse()


def format_term(t: TypeTerm) -> str:
    """Render a canonical term back into the expression grammar."""
    if t.is_bottom:
        return "BOT"
    if t.is_top:
        return "TOP"
    parts = []
    for c in t.sorted_clauses():
        bits = []
        for lit in c.literals():
            if lit.kind == GEN:
                bits.append(lit.name)
            elif lit.kind == POS:
                bits.append(f"@{lit.name}")
            else:
                bits.append(f"~@{lit.name}")
        parts.append(" & ".join(bits))
    return " | ".join(parts)


def term_to_json(t: TypeTerm):
    if t.is_top:
        return {"top": True}
    clauses = []
    for c in t.sorted_clauses():
        lits = []
        for lit in c.literals():
            lits.append({lit.kind: lit.name})
        clauses.append(lits)
    return {"clauses": clauses}


def term_from_json(ctx: Context, obj) -> TypeTerm:
    if not isinstance(obj, dict):
        raise PreconditionError(f"bad term encoding: {obj!r}")
    if obj.get("top"):
        return ctx.top()
    clauses = []
    for lits in obj.get("clauses", []):
        gens, pos, neg = set(), set(), set()
        for entry in lits:
            if GEN in entry:
                gens.add(entry[GEN])
            elif POS in entry:
                pos.add(entry[POS])
            elif NEG in entry:
                neg.add(entry[NEG])
            else:
                raise PreconditionError(f"bad literal encoding: {entry!r}")
        clauses.append(clause_of(gens, pos, neg))
    return normalize(ctx, clauses)
