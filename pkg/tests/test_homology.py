from __future__ import annotations

import json

import pytest

from cyclichyp.chains import Chain
from cyclichyp.groups import FiniteCyclic, FreeGroup, FreeProduct, InfiniteDihedral, InvalidInput
from cyclichyp.homology import (
    BettiTable,
    ClassForms,
    ClassHomology,
    ConsistencyError,
    FiniteComplex,
    TruncationError,
    TruncationSpec,
    bar_coinvariants,
    burghelea_check,
    full_homology,
    full_weight_cap,
    gamma_tors_report,
    group_homology_rips,
    homology,
    hp_from_hc,
    per_class_homology,
    truncate_complex,
)

from conftest import MODEL_IDS, all_models
from oracles import cyclic_class, hochschild_class

F = FreeGroup(2)


# -- finite complexes -----------------------------------------------------------

def test_point():
    assert full_homology(FiniteComplex.from_matrices([1], {})) == [1]


def test_circle():
    # one vertex, one loop edge with ∂ = v − v = 0
    assert full_homology(FiniteComplex.from_matrices([1, 1], {})) == [1, 1]


def test_triangle_boundary():
    # three vertices, edges 01, 12, 02
    m = {1: {(1, 0): 1, (0, 0): -1, (2, 1): 1, (1, 1): -1, (2, 2): 1, (0, 2): -1}}
    cx = FiniteComplex.from_matrices([3, 3], m)
    assert full_homology(cx) == [1, 1]
    assert homology(cx) == [1]
    assert cx.rank(1) == 2


def test_filled_triangle():
    m = {1: {(1, 0): 1, (0, 0): -1, (2, 1): 1, (1, 1): -1, (2, 2): 1, (0, 2): -1},
         2: {(1, 0): 1, (2, 0): -1, (0, 0): 1}}
    assert full_homology(FiniteComplex.from_matrices([3, 3, 1], m)) == [1, 0, 0]


def test_truncation_error_names_element():
    cx = FiniteComplex({0: ["x"], 1: ["y"]}, lambda k: Chain.basis("z") if k == "y" else Chain(), "demo")
    with pytest.raises(TruncationError, match="demo"):
        homology(cx, degrees=0)


def test_consistency_error():
    m = {1: {(0, 0): 1}, 2: {(0, 0): 1}}
    with pytest.raises(ConsistencyError):
        full_homology(FiniteComplex.from_matrices([1, 1, 1], m))


def test_truncation_spec_validation():
    with pytest.raises(InvalidInput):
        TruncationSpec(-1)
    with pytest.raises(InvalidInput):
        TruncationSpec(2, weight_cap=2.5)


def test_betti_table_serialization():
    t = BettiTable()
    t.add("<b>", [1, 0], [True, False])
    t.add("<e>", [1], None)
    assert t.labels() == ["<b>", "<e>"]
    assert t.dims("<b>") == [1, 0]
    assert t.flags("<b>") == [True, False]
    assert t.to_csv() == "class,degree,dimension,stable\n<b>,0,1,true\n<b>,1,0,false\n<e>,0,1,\n"
    assert json.loads(json.dumps(t.to_json()))[2] == {"class": "<e>", "degree": 0, "dimension": 1, "stable": None}


# -- group homology -----------------------------------------------------------------

@pytest.mark.parametrize("i, expected", list(zip(range(6), [[1, 2, 0], [1, 0, 0], [1, 0, 0], [1, 0, 0],
                                                              [1, 0, 0], [1, 0, 0]])), ids=MODEL_IDS)
def test_group_homology_rips(i, expected):
    # free products add reduced rational homology; finite factors contribute none, Z contributes b1 = 1
    model_ = all_models()[i]
    assert group_homology_rips(model_, 4, 2).dims(model_.name) == expected


def test_ordered_route_agrees():
    assert group_homology_rips(F, 4, 1, route="ordered").dims(F.name) == [1, 2]
    with pytest.raises(InvalidInput):
        group_homology_rips(F, 4, 1, route="simplicial")


def test_certification_flags():
    Z = FiniteCyclic(4)
    assert group_homology_rips(Z, 4, 1).flags(Z.name) == [True, True]
    assert group_homology_rips(F, 4, 1).flags(F.name) == [None, None]
    assert group_homology_rips(F, 4, 1, delta=0).flags(F.name) == [True, True]


@pytest.mark.parametrize("n", [2, 3])
def test_bar_coinvariants(n):
    assert homology(bar_coinvariants(FiniteCyclic(n), 4)) == [1, 0, 0, 0]


def test_truncate_complex_kinds():
    spec = TruncationSpec(1, 3, 2)
    for kind in ("bar", "rips", "rips-alternating", "hochschild", "cyclic", "connes"):
        model_ = FiniteCyclic(2) if kind == "bar" else F
        truncate_complex(kind, model_, spec).audit()
    with pytest.raises(InvalidInput):
        truncate_complex("simplicial", F, spec)
    with pytest.raises(InvalidInput):
        truncate_complex("rips", F, TruncationSpec(1, 3))


def test_full_weight_cap():
    assert full_weight_cap(FiniteCyclic(4), 3) == 10
    assert full_weight_cap(F, 3) is None
    assert full_weight_cap(InfiniteDihedral(), 3) is None


def test_class_forms_respect_cap():
    cf = ClassForms(F, F.parse("b"), 5)
    for n in range(3):
        for f in cf.forms(n):
            assert sum(a.length for a in f) <= 5
            assert all(not a.is_identity() for a in f[1:])


# -- per-class homology against the dense oracle ----------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_cyclic_groups_against_oracle(n):
    Z = FiniteCyclic(n)
    spec = TruncationSpec(3, None)
    t = Z.parse("t")
    for k in range(n):
        v = Z.power(t, k)
        hh = per_class_homology(Z, v, "HH", spec)
        assert hh.dims == hochschild_class(n, k, 3)
        for route in ("bicomplex", "connes"):
            hc = per_class_homology(Z, v, "HC", spec, route=route)
            assert hc.dims == cyclic_class(n, k, 3)
        hp = per_class_homology(Z, v, "HP", spec)
        assert hp.dims == [1, 0]
        assert hp.extra["from_hc"]["even"] == 1 and hp.extra["from_hc"]["odd"] == 0


def test_free_group_class_b():
    # [DERIVED] both HC routes agree at caps (3, 5)
    spec = TruncationSpec(1, 5)
    hh = per_class_homology(F, F.parse("b"), "HH", spec)
    assert hh.dims == [1, 1] and all(hh.stable)
    for route in ("bicomplex", "connes"):
        assert per_class_homology(F, F.parse("b"), "HC", spec, route=route).dims == [1, 0]


def test_hp_from_hc():
    hc = ClassHomology("x", "HC", [1, 0, 1, 0], [True] * 4, (9,))
    assert hp_from_hc(hc) == {"even": 1, "odd": 0, "s_degenerate": True, "stable": True}
    short = ClassHomology("x", "HC", [1, 0], [True, False], (5, 7))
    assert hp_from_hc(short) == {"even": 1, "odd": 0, "s_degenerate": False, "stable": False}


def test_unknown_theory():
    with pytest.raises(InvalidInput):
        per_class_homology(F, F.parse("b"), "HX", TruncationSpec(1, 3))


def test_infinite_group_needs_weight_cap():
    with pytest.raises(InvalidInput):
        per_class_homology(F, F.parse("b"), "HH", TruncationSpec(1))


# -- comparisons ----------------------------------------------------------------------

@pytest.mark.parametrize("model_", [FiniteCyclic(3), FreeProduct((2, 3)), InfiniteDihedral()],
                         ids=lambda m: m.name)
def test_burghelea(model_):
    rep = burghelea_check(model_, TruncationSpec(1, 6))
    assert rep["pass"]
    assert all(c["mismatch_degrees"] == [] for c in rep["classes"])


def test_gamma_tors_z2():
    rep = gamma_tors_report(FiniteCyclic(2), TruncationSpec(1, 6))
    assert rep["left"] == rep["right"] == [2, 0]
    assert rep["agree"] and rep["hyperbolic"] == []
