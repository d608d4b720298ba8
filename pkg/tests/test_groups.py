from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from cyclichyp.groups import (
    CayleyBall,
    FiniteCyclic,
    FreeGroup,
    FreeProduct,
    InfiniteDihedral,
    InvalidInput,
    ResourceLimit,
    bfs_distances,
    model_from_spec,
)


def free_reduce(word: str) -> str:
    """Oracle: cancel x X pairs on a stack."""
    out = []
    for ch in word:
        if out and out[-1] != ch and out[-1].lower() == ch.lower():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


words = st.text(alphabet="aAbB", max_size=12)


@given(words, words)
def test_free_group_product_matches_stack_reduction(u, v):
    F = FreeGroup(2)
    assert str(F.parse(u) * F.parse(v)) == (free_reduce(u + v) or "e")


@given(words, words, words)
def test_multiplication_is_associative(u, v, w):
    F = FreeGroup(2)
    x, y, z = F.parse(u), F.parse(v), F.parse(w)
    assert (x * y) * z is x * (y * z)


@given(st.lists(st.integers(0, 3), max_size=12))
def test_finite_cyclic_is_addition_mod_n(exps):
    Z = FiniteCyclic(4)
    t = Z.parse("t")
    g = Z.identity
    for k in exps:
        g = g * (t ** k)
    assert g is t ** (sum(exps) % 4)


@pytest.mark.parametrize("text", ["aab", "abAB", "aBBa"])
def test_inverse_cancels(text):
    F = FreeGroup(2)
    g = F.parse(text)
    assert (g * g.inverse()).is_identity()
    assert g.inverse().inverse() is g


def test_elements_are_interned():
    F = FreeGroup(2)
    assert F.parse("ab") is F.parse("aBbb")


@pytest.mark.parametrize("r", range(5))
def test_free_group_ball_sizes(r):
    # 1 + 4(3^r − 1)/2 elements
    assert len(CayleyBall(FreeGroup(2), r)) == 1 + 2 * (3 ** r - 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_finite_cyclic_ball_is_whole_group(n):
    assert len(CayleyBall(FiniteCyclic(n), n)) == n


def test_dihedral_ball_sizes():
    # two words of each positive length
    assert [len(CayleyBall(InfiniteDihedral(), r)) for r in range(5)] == [1, 3, 5, 7, 9]


def test_ball_is_shortlex_sorted(model):
    els = CayleyBall(model, 3).elements
    assert [g.key for g in els] == sorted(g.key for g in els)


def test_word_length_is_graph_distance(model):
    ball = CayleyBall(model, 4)
    d = bfs_distances(ball, model.identity)
    assert all(d[g] == g.length for g in ball.elements)


def test_ball_cap_raises():
    with pytest.raises(ResourceLimit):
        CayleyBall(FreeGroup(2), 8, cap=100)


def test_negative_radius_rejected():
    with pytest.raises(InvalidInput):
        CayleyBall(FreeGroup(2), -1)


@pytest.mark.parametrize("spec, name", [
    ({"kind": "FreeGroup", "rank": 2}, "FreeGroup(2)"),
    ({"kind": "FiniteCyclic", "order": 3}, "FiniteCyclic(3)"),
    ({"kind": "InfiniteDihedral"}, "InfiniteDihedral"),
    ({"kind": "FreeProduct", "factors": [2, 3]}, "FreeProduct(Z/2,Z/3)"),
])
def test_model_from_spec(spec, name):
    assert model_from_spec(spec).name == name


@pytest.mark.parametrize("spec", [{}, {"kind": "Torus"}, {"kind": "FreeGroup"}, "FreeGroup"])
def test_model_from_spec_rejects(spec):
    with pytest.raises(InvalidInput):
        model_from_spec(spec)


@pytest.mark.parametrize("model_, word, order", [
    (FreeGroup(2), "ab", None),
    (FiniteCyclic(4), "tt", 2),
    (FiniteCyclic(4), "t", 4),
    (FreeProduct((2, 3)), "a", 2),
    (FreeProduct((2, 3)), "baB", 2),
    (FreeProduct((2, 3)), "bab", None),
    (FreeProduct((2, 3)), "ab", None),
    (InfiniteDihedral(), "ab", None),
])
def test_order(model_, word, order):
    assert model_.order(model_.parse(word)) == order


@given(words)
def test_conjugacy_rep_witness(u):
    F = FreeGroup(2)
    g = F.parse(u)
    rep, c = F.conjugacy_rep(g)
    assert F.conjugate(c, rep) is g
    assert rep.length <= g.length


@given(words, words)
def test_conjugacy_rep_is_class_invariant(u, c):
    F = FreeGroup(2)
    g = F.parse(u)
    assert F.conjugacy_rep(g)[0] is F.conjugacy_rep(F.conjugate(F.parse(c), g))[0]


@pytest.mark.parametrize("word, root, k", [("abab", "ab", 2), ("aaa", "a", 3), ("ab", "ab", 1)])
def test_primitive_root(word, root, k):
    F = FreeGroup(2)
    assert F.primitive_root(F.parse(word)) == (F.parse(root), k)


def test_torsion_class_reps():
    assert [str(g) for g in FreeProduct((2, 3)).torsion_class_reps()] == ["e", "a", "b", "B"]
    assert [str(g) for g in FreeGroup(2).torsion_class_reps()] == ["e"]


def test_distance_matrix_symmetric():
    ball = CayleyBall(FreeProduct((2, 3)), 2)
    m = ball.distance_matrix()
    n = len(ball)
    assert all(m[i][j] == m[j][i] == ball.dist(ball.elements[i], ball.elements[j])
               for i in range(n) for j in range(n))
