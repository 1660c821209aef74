import itertools
import json
import random

import pytest

from typedtopo import lattice, space
from typedtopo.errors import (
    PreconditionError,
    SpaceValidationError,
    UnknownPointError,
)
from typedtopo.lattice import Context, Poset, clause_of, format_term, normalize, parse_type_expr
from typedtopo.space import (
    GeneratorSpec,
    TypedSpace,
    generate_topology,
    is_strictly_typed,
    realized_types,
    space_from_json,
    space_to_json,
    strictify,
    validate_type_mapping,
)


def test_genealogy_topology_values(genealogy5):
    g = genealogy5
    assert len(g.opens) == 32
    assert format_term(g.sigma[g.mask_of(["B", "S", "H", "C"])]) == "anc & @W"
    assert (
        format_term(g.sigma[g.mask_of(["W"])]) == "desc & @B & @C & @H & @S"
    )


def test_generate_topology_rejects_empty_spec_list():
    poset = Poset({"g"})
    with pytest.raises(SpaceValidationError):
        generate_topology([], poset, ("x", "y"))


def test_generate_topology_single_full_generator():
    poset = Poset({"anc"})
    pts = ("x", "y")
    ctx = Context(poset, pts)
    t = parse_type_expr("anc", ctx)
    sp = generate_topology([GeneratorSpec("g", frozenset(pts), t)], poset, pts)
    assert sp.opens == frozenset({0, sp.full_mask})
    assert lattice.term_eq(sp.sigma[sp.full_mask], t)


def test_generate_topology_point_bound():
    poset = Poset({"g"})
    pts = tuple(f"x{i}" for i in range(70))
    ctx = Context(poset, pts)
    spec = GeneratorSpec("g0", frozenset(pts), parse_type_expr("g", ctx))
    with pytest.raises(PreconditionError):
        generate_topology([spec], poset, pts)


def test_validation_passes_on_fixtures(genealogy5, street5, street2x3):
    for sp in (genealogy5, street5, street2x3):
        assert validate_type_mapping(sp).ok


def _with_sigma(sp: TypedSpace, replacements: dict) -> TypedSpace:
    sigma = dict(sp.sigma)
    sigma.update(replacements)
    return TypedSpace(sp.points, sp.opens, sigma, sp.poset, sp.generators)


def test_validation_flags_top_type(genealogy5):
    m = genealogy5.mask_of(["C"])
    broken = _with_sigma(genealogy5, {m: genealogy5.ctx.top()})
    report = validate_type_mapping(broken)
    assert not report.ok
    assert report.by_code("top-forbidden")


def test_validation_flags_typed_empty_set(genealogy5):
    broken = _with_sigma(
        genealogy5, {0: parse_type_expr("anc", genealogy5.ctx)}
    )
    report = validate_type_mapping(broken)
    assert not report.ok
    assert report.by_code("bottom-on-empty")


def test_validation_flags_monotonicity(genealogy5):
    g = genealogy5
    broken = _with_sigma(g, {g.mask_of(["C"]): g.sigma[g.mask_of(["C", "W"])]})
    report = validate_type_mapping(broken)
    assert not report.ok
    assert report.by_code("monotone")


def test_meet_join_bounds_hold_exhaustively(street5):
    sig = street5.sigma
    for u, v in itertools.combinations(sorted(street5.opens), 2):
        assert lattice.leq(sig[u & v], lattice.meet(sig[u], sig[v]))
        assert lattice.leq(lattice.join(sig[u], sig[v]), sig[u | v])


def test_strictness_on_fixtures(genealogy5, street5):
    assert is_strictly_typed(genealogy5).strict
    assert is_strictly_typed(street5).strict


def _degenerate_space() -> TypedSpace:
    poset = Poset({"g"})
    pts = ("x", "y", "z")
    ctx = Context(poset, pts)
    gx = parse_type_expr("g & @x", ctx)
    sigma = {0: ctx.bottom(), 1: gx, 3: gx, 7: parse_type_expr("g", ctx)}
    return TypedSpace(pts, frozenset(sigma), sigma, poset, ())


def test_strictness_counterexample():
    res = is_strictly_typed(_degenerate_space())
    assert not res.strict
    assert res.witness == (("x",), ("x", "y"))


def test_strictify_repairs_degenerate_space():
    sp = _degenerate_space()
    fixed = strictify(sp)
    assert is_strictly_typed(fixed).strict
    assert validate_type_mapping(fixed).ok
    assert format_term(fixed.sigma[1]) == "g & @x | g & ~@y & ~@z"
    assert format_term(fixed.sigma[3]) == "g & @x | g & ~@z"
    assert format_term(fixed.sigma[7]) == "g"


def test_strictify_preserves_already_strict(street5):
    fixed = strictify(street5)
    assert is_strictly_typed(fixed).strict
    assert validate_type_mapping(fixed).ok


def test_strictify_cannot_fix_top_level_tie():
    poset = Poset({"g"})
    pts = ("x", "y")
    ctx = Context(poset, pts)
    g = parse_type_expr("g", ctx)
    sigma = {0: ctx.bottom(), 1: g, 3: g}
    sp = TypedSpace(pts, frozenset(sigma), sigma, poset, ())
    assert not is_strictly_typed(sp).strict
    with pytest.raises(SpaceValidationError):
        strictify(sp)


def test_forces_examples(genealogy5):
    g = genealogy5
    assert space.forces(g, parse_type_expr("anc & @W", g.ctx), "C")
    assert not space.forces(g, parse_type_expr("desc", g.ctx), "W")
    assert not space.forces(g, g.ctx.bottom(), "B")
    with pytest.raises(UnknownPointError):
        space.forces(g, parse_type_expr("anc", g.ctx), "Q")


def test_realized_types_counts(genealogy5):
    rt = realized_types(genealogy5)
    assert len(rt) == len(genealogy5.opens) - 1 == 31


def test_realized_types_singleton_space():
    poset = Poset({"anc"})
    pts = ("x",)
    ctx = Context(poset, pts)
    sp = generate_topology(
        [GeneratorSpec("g", frozenset(pts), parse_type_expr("anc", ctx))], poset, pts
    )
    assert len(realized_types(sp)) == 1


def test_incompatible_types_never_share_a_point(genealogy5):
    rt = realized_types(genealogy5)
    for i in range(len(rt)):
        for j in range(i + 1, len(rt)):
            if not lattice.meet(rt.terms[i], rt.terms[j]).is_bottom:
                continue
            for u in rt.opens_by_type[i]:
                for v in rt.opens_by_type[j]:
                    assert u & v == 0


def test_space_json_round_trip(genealogy5, street2x3):
    for sp in (genealogy5, street2x3):
        doc = space_to_json(sp)
        again = space_from_json(json.loads(json.dumps(doc)))
        assert space_to_json(again) == doc


def test_space_json_rejects_duplicate_open(street5):
    doc = space_to_json(street5)
    doc["opens"].append(doc["opens"][-1])
    with pytest.raises(SpaceValidationError):
        space_from_json(doc)


def test_induced_types_are_minimal_extension():
    """The induced mapping sits below every qualifying monotone extension."""
    rng = random.Random(11)
    checked = 0
    attempts = 0
    while checked < 3 and attempts < 200:
        attempts += 1
        poset = Poset({"g", "h"})
        pts = ("x", "y", "z")
        ctx = Context(poset, pts)
        specs = []
        for k in range(2):
            members = frozenset(rng.sample(pts, rng.randint(1, 3)))
            term = normalize(
                ctx, [clause_of(gens=[rng.choice(["g", "h"])], pos=[])]
            )
            specs.append(GeneratorSpec(f"s{k}", members, term))
        try:
            sp = generate_topology(specs, poset, pts)
        except SpaceValidationError:
            continue
        opens = [m for m in sorted(sp.opens) if m]
        if len(opens) > 5:
            continue
        checked += 1
        gen_masks = [sp.mask_of(s.members) for s in specs]
        pool = []
        for picks in itertools.product([0, 1], repeat=len(specs)):
            chosen = [i for i, b in enumerate(picks) if b]
            if not chosen:
                continue
            inter = sp.full_mask
            for i in chosen:
                inter &= gen_masks[i]
            if inter:
                pool.append(lattice.meet_all(ctx, [specs[i].type_term for i in chosen]))
        values = []
        for sub in itertools.product([0, 1], repeat=len(pool)):
            values.append(
                lattice.join_all(ctx, [t for t, b in zip(pool, sub) if b])
            )
        distinct = {t.sort_key(): t for t in values}
        candidates = list(distinct.values())
        for assignment in itertools.product(candidates, repeat=len(opens)):
            sigma = dict(zip(opens, assignment))
            ok = True
            for u in opens:
                for v in opens:
                    if (u & v) == u and not lattice.leq(sigma[u], sigma[v]):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                for i, gm in enumerate(gen_masks):
                    if not lattice.leq(specs[i].type_term, sigma[gm]):
                        ok = False
                        break
            if ok:
                for u in opens:
                    assert lattice.leq(sp.sigma[u], sigma[u])
    assert checked == 3
