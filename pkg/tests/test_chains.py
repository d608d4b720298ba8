from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cyclichyp.chains import (
    UNIT,
    Chain,
    TwistedSimplex,
    boundary,
    chi,
    connes_B,
    contraction_s,
    cyclic_T,
    cyclic_normal_form,
    from_text,
    hochschild_b,
    invert_one_minus_T,
    kernel_decomposition,
    lifted_B,
    lifted_T,
    nu_v,
    one_minus_T,
    p_map,
    pi_as,
    q_map,
    reduce_forms,
    s_split,
    shifted_boundary,
    signed_permutations,
    to_text,
    translate,
    weight,
)
from cyclichyp.conjugacy import Section, sigma_prime_exact
from cyclichyp.groups import FiniteCyclic, FreeGroup, FreeProduct, InvalidInput
from cyclichyp.homology import ClassForms

F = FreeGroup(2)
word = st.text(alphabet="aAbB", max_size=4).map(F.parse)
nonunit = st.text(alphabet="aAbB", min_size=1, max_size=3).map(F.parse).filter(lambda g: not g.is_identity())


@st.composite
def forms(draw, max_degree=3):
    n = draw(st.integers(0, max_degree))
    return (draw(word),) + tuple(draw(nonunit) for _ in range(n))


@st.composite
def tensors(draw, max_degree=3):
    n = draw(st.integers(0, max_degree))
    return tuple(draw(word) for _ in range(n + 1))


@st.composite
def twisted(draw, max_degree=3, twist=None):
    n = draw(st.integers(0, max_degree))
    v = twist if twist is not None else draw(word)
    return TwistedSimplex(tuple(draw(word) for _ in range(n + 1)), v)


def b_prime(c):
    """Bar differential b′: the Hochschild sum without its wrap-around term."""
    out = Chain()
    for key, coef in c.items():
        n = len(key) - 1
        for i in range(n):
            out.add_term(key[:i] + (key[i] * key[i + 1],) + key[i + 2:], coef if i % 2 == 0 else -coef)
    return out


# -- forms --------------------------------------------------------------------

def test_b_on_degree_one():
    a, b = F.parse("a"), F.parse("b")
    assert hochschild_b(Chain.basis((a, b))) == Chain({(F.parse("ab"),): 1, (F.parse("ba"),): -1})


def test_B_on_degree_zero():
    g = F.parse("ab")
    assert connes_B(Chain.basis((g,))) == Chain.basis((UNIT, g))
    assert connes_B(Chain.basis((UNIT, g))) == Chain()


@given(forms())
def test_b_squared_zero(f):
    c = Chain.basis(f)
    assert not hochschild_b(hochschild_b(c, reduced=True), reduced=True)


@given(forms())
def test_B_squared_and_anticommutator(f):
    c = Chain.basis(f)
    B = connes_B(c, reduced=True)
    assert not connes_B(B, reduced=True)
    assert not (connes_B(hochschild_b(c, reduced=True), reduced=True) + hochschild_b(B, reduced=True))


@given(tensors())
def test_T_has_order_n_plus_one(t):
    c = Chain.basis(t)
    d = c
    for _ in range(len(t)):
        d = cyclic_T(d)
    assert d == c


@given(tensors())
def test_b_intertwines_one_minus_T(t):
    # b(1 − T) = (1 − T)b′ on the unreduced tensor complex
    c = Chain.basis(t)
    lhs = hochschild_b(c - cyclic_T(c))
    bp = b_prime(c)
    assert lhs == bp - cyclic_T(bp)


@given(tensors())
def test_cyclic_normal_form_kills_image_of_one_minus_T(t):
    c = Chain.basis(t)
    assert not cyclic_normal_form(c - cyclic_T(c))


@given(tensors())
def test_b_descends_to_coinvariants(t):
    c = Chain.basis(t)
    assert not cyclic_normal_form(hochschild_b(c - cyclic_T(c)))


def test_reduce_forms_drops_unit_differentials():
    e, a = F.identity, F.parse("a")
    assert reduce_forms(Chain.basis((a, e))) == Chain()
    assert reduce_forms(Chain.basis((UNIT, a))) == Chain.basis((e, a))


# -- Bar complex and twisted chains ---------------------------------------------

@given(twisted())
def test_bar_boundary_squared(k):
    assert not boundary(boundary(Chain.basis(k)))


@given(tensors())
def test_contraction_identity(t):
    c = Chain.basis(t)
    e = F.identity
    assert boundary(contraction_s(e, c), augmented=True) + contraction_s(e, boundary(c, augmented=True)) == c


@given(tensors())
def test_chi_contracts_shifted_complex(t):
    c = Chain.basis(t)
    assert shifted_boundary(chi(c)) + chi(shifted_boundary(c)) == c


@given(forms())
def test_p_inverts_q(f):
    c = Chain.basis(f)
    assert p_map(q_map(c)) == c


@given(twisted())
def test_p_intertwines_T(k):
    c = Chain.basis(k)
    assert p_map(lifted_T(c)) == cyclic_T(p_map(c))


@given(twisted())
def test_p_intertwines_boundary(k):
    c = Chain.basis(k)
    assert p_map(boundary(c)) == hochschild_b(p_map(c))


@given(twisted())
def test_p_intertwines_B(k):
    c = Chain.basis(k)
    assert p_map(lifted_B(c), reduced=True) == connes_B(p_map(c, reduced=True), reduced=True)


@given(twisted(max_degree=2), word)
def test_weight_invariant_under_T_and_translation(k, g):
    w = weight(k)
    assert all(weight(x) == w for x in lifted_T(Chain.basis(k)))
    v = k.twist
    if F.multiply(g, v) is F.multiply(v, g):
        assert all(weight(x) == w for x in translate(g, Chain.basis(k)))
    assert all(weight(x) <= w for x in boundary(Chain.basis(k)))


@given(twisted(max_degree=2))
def test_T_power_is_inverse_twist_translation(k):
    c = Chain.basis(k)
    d = c
    for _ in range(k.degree + 1):
        d = lifted_T(d)
    assert d == translate(k.twist.inverse(), c)


# -- kernel of the coinvariant projection ---------------------------------------

@given(twisted(max_degree=2, twist=F.parse("ab")))
def test_invert_one_minus_T(k):
    x = Chain.basis(k)
    c = one_minus_T(x)
    y = invert_one_minus_T(c)
    assert one_minus_T(y) == c


def test_kernel_decomposition_rejects_non_kernel():
    k = TwistedSimplex((F.identity, F.parse("a")), F.parse("b"))
    with pytest.raises(InvalidInput):
        kernel_decomposition(Chain.basis(k))


def test_kernel_decomposition_rejects_torsion_twist():
    Z = FiniteCyclic(3)
    k = TwistedSimplex((Z.identity,), Z.parse("t"))
    with pytest.raises(InvalidInput):
        kernel_decomposition(Chain.basis(k) - lifted_T(Chain.basis(k)))


# -- splitting for infinite-order classes ---------------------------------------

@pytest.mark.parametrize("w", ["b", "ab", "aab"])
def test_splitting_identity_and_chain_map(w):
    v = F.parse(w)
    sec, sp = Section(v), sigma_prime_exact(v)
    cf = ClassForms(F, v, v.length + 2)
    for n in range(3):
        for f in cf.forms(n)[:40]:
            c = cyclic_normal_form(Chain.basis(f))
            if not c:
                continue
            s = s_split(c, sec, sp)
            assert cyclic_normal_form(p_map(s)) == c
            assert boundary(s) == s_split(cyclic_normal_form(hochschild_b(c)), sec, sp)


# -- averaging for torsion classes ------------------------------------------------

@pytest.mark.parametrize("m", range(1, 5))
def test_signed_permutations(m):
    perms = signed_permutations(m)
    assert len(perms) == [1, 1, 2, 6, 24][m]
    assert sum(s for _, s in perms) == (1 if m == 1 else 0)


@given(tensors())
def test_pi_as_idempotent(t):
    c = Chain.basis(t)
    once = pi_as(c)
    assert pi_as(once) == once


@pytest.mark.parametrize("model_, w", [(FiniteCyclic(3), "t"), (FreeProduct((2, 3)), "a"),
                                        (FreeProduct((2, 3)), "b")])
def test_nu_is_chain_map(model_, w):
    v = model_.parse(w)
    sec = Section(v)
    cf = ClassForms(model_, v, 4)
    for n in range(3):
        for f in cf.forms(n):
            c = Chain.basis(f)
            lhs = hochschild_b(nu_v(c, v, sec), reduced=True)
            rhs = nu_v(hochschild_b(c, reduced=True) + connes_B(c, reduced=True), v, sec)
            assert lhs == rhs


def test_nu_rejects_infinite_order():
    v = F.parse("ab")
    with pytest.raises(InvalidInput):
        nu_v(Chain.basis((v,)), v, Section(v))


# -- serialization ----------------------------------------------------------------

@given(st.lists(st.tuples(twisted(max_degree=2), st.fractions(max_denominator=5)), max_size=4))
def test_text_round_trip(terms):
    c = Chain()
    for k, q in terms:
        c.add_term(k, q)
    assert from_text(to_text(c), F) == c


def test_chain_algebra():
    k = (F.parse("a"),)
    c = Chain.basis(k, 2)
    assert c - c == Chain()
    assert (c * Fraction(1, 2))[k] == 1
    assert Chain.basis(k, 0) == Chain()
