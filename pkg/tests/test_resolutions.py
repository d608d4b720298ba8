from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from cyclichyp.chains import Chain, TwistedSimplex, boundary, translate
from cyclichyp.groups import CayleyBall, FiniteCyclic, FreeGroup, FreeProduct, InfiniteDihedral, InvalidInput
from cyclichyp.resolutions import (
    Bicombing,
    MarginExhausted,
    Nabla,
    RipsProjection,
    Theta,
    bicombing_witness,
    canonical_translate,
    diameter,
    drop_degenerate,
    from_oriented,
    oriented_boundary,
    rips_cliques,
    rips_clique_number,
    stabilizer,
    theta_witnesses,
    thetaprime_constants,
    to_oriented,
)

from conftest import MODEL_IDS, all_models

F = FreeGroup(2)
G = FreeProduct((2, 3))


def simplices_of(model, radius=2):
    els = CayleyBall(model, radius).elements

    @st.composite
    def draw(draw_, max_degree=3):
        n = draw_(st.integers(0, max_degree))
        return tuple(draw_(st.sampled_from(els)) for _ in range(n + 1))

    return draw


F_SIMPLEX = simplices_of(F)
G_SIMPLEX = simplices_of(G)


def brute_clique_number(model, R):
    """Largest subset of the R-ball around e, plus e, with pairwise distance ≤ R."""
    pts = [x for x in CayleyBall(model, R).elements if not x.is_identity()]
    for size in range(len(pts), 0, -1):
        for sub in combinations(pts, size):
            if all(model.distance(x, y) <= R for x, y in combinations(sub, 2)):
                return size + 1
    return 1


# -- bicombing ------------------------------------------------------------------

def test_bicombing_on_tree_is_the_geodesic():
    g = F.parse("abA")
    c = Bicombing(F)(F.identity, g)
    assert c == Chain({(F.identity, F.parse("a")): 1, (F.parse("a"), F.parse("ab")): 1,
                       (F.parse("ab"), g): 1})


def test_bicombing_averages_geodesics():
    Z = FiniteCyclic(4)
    c = Bicombing(Z)(Z.identity, Z.parse("tt"))
    assert set(c.values()) == {Fraction(1, 2)}
    assert len(c) == 4


def test_bicombing_laws(model):
    els = CayleyBall(model, 3).elements
    rng = random.Random(0)
    w = bicombing_witness(Bicombing(model), [(rng.choice(els), rng.choice(els)) for _ in range(100)])
    assert w.boundary_exact
    assert w.lam == 0
    assert w.mu <= 1


# -- Θ --------------------------------------------------------------------------

@given(F_SIMPLEX())
def test_theta_chain_map_free(verts):
    theta = Theta(Bicombing(F))
    c = Chain.basis(verts)
    assert boundary(theta(c)) == theta(boundary(c))


@given(G_SIMPLEX())
def test_theta_chain_map_free_product(verts):
    theta = Theta(Bicombing(G))
    c = Chain.basis(verts)
    assert boundary(theta(c)) == theta(boundary(c))


@given(F_SIMPLEX(max_degree=2), st.sampled_from(CayleyBall(F, 2).elements))
def test_theta_equivariant(verts, g):
    theta = Theta(Bicombing(F))
    moved = tuple(F.multiply(g, x) for x in verts)
    assert theta(Chain.basis(moved)) == translate(g, theta(Chain.basis(verts)))


def test_theta_witnesses():
    theta = Theta(Bicombing(G))
    rng = random.Random(1)
    els = CayleyBall(G, 2).elements
    sims = [tuple(rng.choice(els) for _ in range(rng.randint(1, 3) + 1)) for _ in range(40)]
    wit = theta_witnesses(theta, sims)
    assert all(w.chain_map_exact for w in wit.values())
    assert all(w.lam == 0 for w in wit.values())


# -- oriented simplices -----------------------------------------------------------

@given(st.lists(st.sampled_from(CayleyBall(F, 2).elements), min_size=1, max_size=4, unique=True))
def test_oriented_round_trip(pts):
    key = tuple(sorted(pts, key=lambda g: g.key))
    c = Chain.basis(key, 3)
    assert to_oriented(from_oriented(c)) == c
    assert to_oriented(boundary(from_oriented(c))) == oriented_boundary(c)


@given(st.lists(st.sampled_from(CayleyBall(G, 2).elements), min_size=1, max_size=4, unique=True))
def test_canonical_translate(pts):
    key = tuple(sorted(pts, key=lambda g: g.key))
    t, g, sgn = canonical_translate(key)
    moved = to_oriented(translate(g, from_oriented(Chain.basis(key))))
    assert moved == Chain.basis(t, sgn)
    assert any(x.is_identity() for x in t)


def test_stabilizer_of_torsion_simplex():
    Z = FiniteCyclic(3)
    key = tuple(sorted(CayleyBall(Z, 1).elements, key=lambda g: g.key))
    stab = stabilizer(key)
    assert len(stab) == 3
    # a 3-cycle of the vertices is an even permutation
    assert all(s == 1 for _, s in stab)


def test_rips_cliques():
    pts = CayleyBall(F, 1).elements
    assert len(rips_cliques(pts, 2, 1)) == 4
    assert len(rips_cliques(pts, 2, 2)) == 10
    assert rips_cliques([], 1, 1) == []


@pytest.mark.parametrize("model_, R", [(F, 1), (F, 2), (InfiniteDihedral(), 1), (InfiniteDihedral(), 2),
                                       (G, 1), (G, 2), (FiniteCyclic(4), 1), (FiniteCyclic(4), 2)],
                         ids=lambda x: getattr(x, "name", str(x)))
def test_clique_number_matches_brute_force(model_, R):
    assert rips_clique_number(model_, R) == brute_clique_number(model_, R)


def test_clique_number_free_group_r4():
    # [DERIVED] Bron–Kerbosch on the radius-4 ball, frozen
    assert rips_clique_number(F, 4) == 17


def test_diameter():
    assert diameter([F.identity]) == 0
    assert diameter([F.parse("a"), F.parse("B"), F.parse("ab")]) == 3


# -- Θ′ ---------------------------------------------------------------------------

@pytest.mark.parametrize("model_, R", [(F, 1), (F, 2), (F, 4), (InfiniteDihedral(), 1), (G, 1), (G, 2)],
                         ids=lambda x: getattr(x, "name", str(x)))
def test_rips_projection_small_R(model_, R):
    tp = RipsProjection(Theta(Bicombing(model_)), R)
    els = CayleyBall(model_, 2).elements
    rng = random.Random(0)
    d = tp.vanishing_degree
    for _ in range(60):
        n = rng.randint(1, 3)
        verts = tuple(rng.choice(els) for _ in range(n + 1))
        c = Chain.basis(verts)
        img = tp(c)
        assert boundary(img) == tp(boundary(c))
        assert all(diameter(k) <= R for k in img)
        if n >= d:
            assert not img


def test_rips_projection_no_filling_on_square():
    # the Rips-1 complex of Z/4 is a square, so its 1-cycle has no filling
    Z = FiniteCyclic(4)
    tp = RipsProjection(Theta(Bicombing(Z)), 1, max_margin=2)
    with pytest.raises(MarginExhausted):
        tp(Chain.basis((Z.identity, Z.parse("t"), Z.parse("tt"))))


def test_rips_projection_rejects_zero_R():
    with pytest.raises(InvalidInput):
        RipsProjection(Theta(Bicombing(F)), 0)


@pytest.mark.parametrize("i", range(6), ids=MODEL_IDS)
def test_thetaprime_normalization(i):
    model_ = all_models()[i]
    tp = RipsProjection(Theta(Bicombing(model_)), 4)
    els = CayleyBall(model_, 2).elements
    for x in els:
        assert tp(Chain.basis((x,))) == Chain.basis((x,))
        assert not tp(Chain.basis((x, x)))
        assert not tp(Chain.basis((x, x, els[-1])))
    rng = random.Random(2)
    sims = [tuple(rng.choice(els) for _ in range(rng.randint(1, 3) + 1)) for _ in range(30)]
    pc = thetaprime_constants(tp, sims)
    assert pc.chain_map_exact
    assert pc.max_diameter <= 4


# -- ∇̃ ----------------------------------------------------------------------------

@pytest.mark.parametrize("i", range(6), ids=MODEL_IDS)
def test_nabla_homotopy_identity(i):
    model_ = all_models()[i]
    nb = Nabla(RipsProjection(Theta(Bicombing(model_)), 4))
    nbr = Nabla(nb.tp, reduced=True)
    els = CayleyBall(model_, 2).elements
    twists = CayleyBall(model_, 1).elements
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(0, 3)
        a = Chain.basis(TwistedSimplex(tuple(rng.choice(els) for _ in range(n + 1)), rng.choice(twists)))
        assert boundary(nb(a)) + nb(boundary(a)) == a - nb.theta_prime(a)
        lhs = drop_degenerate(boundary(nbr(a)) + nbr(boundary(a)))
        assert lhs == drop_degenerate(a - nbr.theta_prime(a))


def test_nabla_on_an_edge():
    # Θ′[e, a] = ½([e, a] − [a, e]), so h(Θ′, Id)[e, a] = [e, e, a] − ½[e, a, a] + ½[a, e, a]
    nb = Nabla(RipsProjection(Theta(Bicombing(F)), 4))
    e, a = F.identity, F.parse("a")
    img = nb(Chain.basis(TwistedSimplex((e, a), e)))
    half = Fraction(1, 2)
    assert img == Chain({TwistedSimplex((e, e, a), e): 1, TwistedSimplex((e, a, a), e): -half,
                         TwistedSimplex((a, e, a), e): half})
