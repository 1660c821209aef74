import itertools
import random

import pytest

from typedtopo import chains, ingest, space as space_mod
from typedtopo.errors import SpaceValidationError
from typedtopo.lattice import Context, Poset, clause_of, normalize
from typedtopo.space import GeneratorSpec, generate_topology

C_RIGHT5 = "right & @r1 & @r2 & @r3 & @r4 & @r5 ; right"
C_ANC5 = "anc & @B & @S & @H & @C & @W ; anc"
C_RIGHT6 = "right & @a1 & @a2 & @a3 & @b1 & @b2 & @b3 ; right"


@pytest.fixture(scope="session")
def genealogy5():
    return ingest.fixture("GENEALOGY5")


@pytest.fixture(scope="session")
def street5():
    return ingest.fixture("STREET5")


@pytest.fixture(scope="session")
def street2x3():
    return ingest.fixture("STREET2X3")


@pytest.fixture(scope="session")
def c_right5(street5):
    return chains.parse_chain(C_RIGHT5, street5.ctx)


@pytest.fixture(scope="session")
def c_anc5(genealogy5):
    return chains.parse_chain(C_ANC5, genealogy5.ctx)


@pytest.fixture(scope="session")
def c_right6(street2x3):
    return chains.parse_chain(C_RIGHT6, street2x3.ctx)


def random_generated_space(rng: random.Random, max_points: int = 8):
    """One random strictly typed space, or None when the draw is unusable."""
    npts = rng.randint(3, max_points)
    pts = tuple(f"x{i}" for i in range(npts))
    ngen = rng.randint(1, 3)
    gnames = [f"g{i}" for i in range(ngen)]
    pairs = []
    for a, b in itertools.combinations(gnames, 2):
        if rng.random() < 0.25:
            pairs.append((a, b) if rng.random() < 0.5 else (b, a))
    try:
        poset = Poset(gnames, pairs)
    except Exception:
        poset = Poset(gnames)
    ctx = Context(poset, pts)
    specs = []
    for k in range(rng.randint(2, 5)):
        members = frozenset(rng.sample(pts, rng.randint(1, npts)))
        extra = [p for p in members if rng.random() < 0.3]
        term = normalize(ctx, [clause_of(gens=[rng.choice(gnames)], pos=extra)])
        specs.append(GeneratorSpec(f"s{k}", members, term))
    try:
        built = generate_topology(specs, poset, pts)
    except SpaceValidationError:
        return None
    if not space_mod.is_strictly_typed(built).strict:
        try:
            built = space_mod.strictify(built)
        except SpaceValidationError:
            return None
    return built


def random_realized_chain(rng: random.Random, sp):
    """A 2- or 3-level chain over the realized types, or None."""
    rt = space_mod.realized_types(sp)
    n = len(rt)
    order = list(range(n))
    rng.shuffle(order)
    for i in order:
        lows = [j for j in range(n) if rt.leq(j, i)]
        if not lows:
            continue
        j = rng.choice(lows)
        levels = [rt.terms[j], rt.terms[i]]
        if rng.random() < 0.4:
            mids = [k for k in range(n) if rt.leq(j, k) and rt.leq(k, i)]
            if mids:
                levels = [rt.terms[j], rt.terms[rng.choice(mids)], rt.terms[i]]
        try:
            return chains.TypeChain(tuple(levels))
        except Exception:
            continue
    return None
