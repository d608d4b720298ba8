from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cyclichyp.conjugacy import (
    Section,
    centralizer,
    class_of,
    class_table_rows,
    conjugacy_classes,
    section_equivariance_constant,
    sigma_prime_exact,
    sigma_section,
    stable_length,
)
from cyclichyp.groups import BoundaryTruncation, CayleyBall, FiniteCyclic, FreeGroup, FreeProduct, InvalidInput

F = FreeGroup(2)
G = FreeProduct((2, 3))


def brute_classes(model, radius, conj_radius):
    """Partition a ball by searching conjugators in a larger ball."""
    els = CayleyBall(model, radius).elements
    conj = CayleyBall(model, conj_radius).elements
    inside = set(els)
    parts, seen = [], set()
    for g in els:
        if g in seen:
            continue
        orbit = {model.conjugate(c, g) for c in conj} & inside
        seen |= orbit
        parts.append(frozenset(orbit))
    return set(parts)


@pytest.mark.parametrize("model_", [F, G, FiniteCyclic(4)], ids=lambda m: m.name)
def test_classes_match_brute_force(model_):
    # in these models two words of length ≤ 3 are conjugate by a word of length ≤ 4
    got = {frozenset(c.members) for c in conjugacy_classes(CayleyBall(model_, 3))}
    assert got == brute_classes(model_, 3, 4)


def test_class_counts():
    # [DERIVED] brute-force partition above, frozen
    assert len(conjugacy_classes(CayleyBall(F, 3))) == 25
    rows = class_table_rows(conjugacy_classes(CayleyBall(G, 3)))
    assert [(r["rep"], r["order"], r["size_in_ball"]) for r in rows] == [
        ("e", 1, 1), ("a", 2, 3), ("b", 3, 2), ("B", 3, 2), ("ab", "inf", 3), ("aB", "inf", 3)]


def test_class_witnesses():
    for cls in conjugacy_classes(CayleyBall(G, 4)):
        for g, c in cls.members.items():
            assert G.conjugate(c, cls.rep) is g


def test_work_radius_below_ball_radius():
    with pytest.raises(InvalidInput):
        conjugacy_classes(CayleyBall(F, 3), work_radius=2)


@pytest.mark.parametrize("model_, w", [(F, "ab"), (F, "b"), (F, "aab"), (G, "ab"), (G, "a"), (G, "b"),
                                       (FiniteCyclic(4), "tt")])
def test_section_conjugates_and_is_minimal(model_, w):
    v = model_.parse(w)
    sec = Section(v)
    search = CayleyBall(model_, 5).elements
    for u in CayleyBall(model_, 4).elements:
        if class_of(u) is not class_of(v):
            continue
        s = sec(u)
        assert model_.conjugate(s, v) is u
        best = min(c.length for c in search if model_.conjugate(c, v) is u)
        assert s.length == best


def test_section_rejects_other_class():
    sec = Section(F.parse("ab"))
    with pytest.raises(BoundaryTruncation):
        sec(F.parse("a"))
    assert F.parse("a") in sec.missing


def test_section_of_identity():
    assert Section(F.identity)(F.identity) is F.identity


def test_section_excess_and_equivariance():
    # [DERIVED] measured on the radius-5 members of ⟨ab⟩, frozen
    v = F.parse("ab")
    sec = sigma_section(v, CayleyBall(F, 4))
    for u in CayleyBall(F, 5).elements:
        if class_of(u) is class_of(v):
            sec(u)
    assert sec.excess() == 0
    rng = random.Random(0)
    els = CayleyBall(F, 2).elements
    members = list(sec.table)
    pairs = [(rng.choice(els), rng.choice(members)) for _ in range(200)]
    assert section_equivariance_constant(sec, pairs) <= 0


@pytest.mark.parametrize("w, reps", [("ab", ["e"]), ("abab", ["e", "ab"]), ("aaa", ["e", "a", "aa"])])
def test_sigma_prime(w, reps):
    v = F.parse(w)
    assert [str(x) for x in sigma_prime_exact(v)] == reps
    cd = centralizer(v, CayleyBall(F, 4))
    assert cd.quotient_size == len(reps)
    assert cd.complete
    for z in cd.elements:
        assert F.multiply(z, v) is F.multiply(v, z)


def test_centralizer_of_torsion():
    v = G.parse("a")
    cd = centralizer(v, CayleyBall(G, 3))
    assert [str(z) for z in cd.elements] == ["e", "a"]


def cyclic_length(w: str) -> int:
    """Free-group oracle: cancel matching inverse letters at both ends."""
    while len(w) > 1 and w[0] != w[-1] and w[0].lower() == w[-1].lower():
        w = w[1:-1]
    return len(w)


@given(st.text(alphabet="aAbB", min_size=1, max_size=8))
def test_stable_length_in_free_group(w):
    g = F.parse(w)
    if g.is_identity():
        return
    sl = stable_length(g, 8)
    assert sl.exact == cyclic_length(str(g))
    assert all(x >= y for x, y in zip(sl.profile, sl.profile[1:]))
    assert sl.profile[-1] >= sl.exact


def test_stable_length_example():
    sl = stable_length(F.parse("aBA"))
    assert sl.value == Fraction(9, 8)
    assert sl.exact == 1
    with pytest.raises(InvalidInput):
        stable_length(F.parse("a"), 0)


@pytest.mark.parametrize("model_, w, order", [(G, "a", 2), (G, "b", 3), (G, "ab", None), (G, "baB", 2),
                                              (FiniteCyclic(4), "tt", 2)])
def test_class_order(model_, w, order):
    assert model_.order(model_.parse(w)) == order
