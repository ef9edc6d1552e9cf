import itertools

import pytest

from leftcircle.errors import WindowTruncated
from leftcircle.generate import assemble, generate_corpus
from leftcircle.leafspace import leaf_space, zigzag
from leftcircle.master import (SymbolicPoint, base_zigzag, check_e_identification,
                               check_master_finite, f_end, i_map, is_ql_extremal, master_sets,
                               psi, ql_implies_master)
from leftcircle.model import MINUS, PLUS, LeafEnd, load_fixture
from leftcircle.current import base
from leftcircle.sections import FiberPoint, Section, special_section

from conftest import component_oracle


def test_m1_master_set():
    ms = master_sets(load_fixture("M1"))
    assert ms.nontrivial() == {"ms:s1": ("s1", "s2", "u0")}


def test_fit_free_chain_free_model_has_only_singletons():
    ms = master_sets(load_fixture("M0"))
    assert all(len(v) == 1 for v in ms.classes.values())


def test_psi_and_i():
    m = load_fixture("M1")
    assert psi(m, FiberPoint("u1", "s1")) == "s1"
    assert psi(m, FiberPoint("u0", None)) == LeafEnd("u0", PLUS)
    assert i_map(m, FiberPoint("u2", "s1")) == i_map(m, FiberPoint("u0", None)) == SymbolicPoint("ms:s1")
    m0 = load_fixture("M0")
    assert len({i_map(m0, FiberPoint(u, "s1")) for u in m0.unstable}) == 1


def test_end_choice_does_not_change_class():
    for m in generate_corpus(3, 10, 20):
        for u in m.unstable:
            p = FiberPoint(u, None)
            assert i_map(m, p, PLUS) == i_map(m, p, MINUS)


def test_f_end():
    m2 = load_fixture("M2")
    lo, hi = f_end(m2, "tau-"), f_end(m2, "tau+")
    assert lo != hi
    assert master_sets(m2).class_of["end:tau-"] == lo.id
    # the top gap of the single-chart window joins the marker escaping through it
    assert f_end(load_fixture("M1e"), "top") == SymbolicPoint("ms:s1")


def test_f_end_reports_a_window_that_cannot_separate_two_ends():
    m = assemble(["u0", "u1"], {"s": ["u0", "u1"]}, {"s": 0},
                 ends=[("bot", "u0", "down"), ("top", "u1", "up")], name="column")
    with pytest.raises(WindowTruncated):
        f_end(m, "top")


def test_e_identification_against_graph_oracle():
    models = [load_fixture(n) for n in ("M0", "M1", "M1e", "M2", "M3", "M4")]
    models += [m for m in generate_corpus(1, 100, 50) if len(m.unstable) <= 20]
    pairs = 0
    for m in models:
        ms = master_sets(m)
        comp = component_oracle(m)
        ends = [LeafEnd(x, s) for x in list(m.unstable) + list(m.stable) for s in (PLUS, MINUS)]
        for a, b in itertools.combinations(ends, 2):
            same_point = ms.point(a.leaf) == ms.point(b.leaf)
            assert same_point == (comp[a.leaf] == comp[b.leaf])
            pairs += 1
        assert check_e_identification(m) == []
    assert pairs > 10000


def test_master_sets_finite_on_m4():
    assert check_master_finite(load_fixture("M4")) == []


def test_ql_extremal_across_the_m1_base():
    m = load_fixture("M1")
    s = special_section(m, FiberPoint("u0", None))
    z = base_zigzag(m, base(m, s))
    assert is_ql_extremal(m, s, z).ok
    rec = ql_implies_master(m, s, z)
    assert rec.ok and rec.value == SymbolicPoint("ms:s1")


def _fan():
    # three markers over u1 all pinching to u0's plus end from above
    return assemble(["u0", "u1"], {"z": ["u0", "u1"], "a": ["u1"], "b": ["u1"], "c": ["u1"]},
                    {"z": 0, "a": 1, "b": 2, "c": 3},
                    fits=[(s, MINUS, "u0", PLUS) for s in "abc"], name="fan")


def test_interior_marker_of_a_pinching_family_fails_condition_one():
    m = _fan()
    z = zigzag(leaf_space(m), "u0", "u1")
    rep = is_ql_extremal(m, Section({"u0": None, "u1": "b"}), z)
    assert not rep.ok and rep.conditions() == [1]
    for edge in ("a", "c"):
        assert is_ql_extremal(m, Section({"u0": None, "u1": edge}), z).ok
    with pytest.raises(ValueError):
        ql_implies_master(m, Section({"u0": None, "u1": "b"}), z)


def test_nonmarker_run_fails_condition_two():
    m = load_fixture("M1")
    s = special_section(m, FiberPoint("u-1", None))
    rep = is_ql_extremal(m, s, zigzag(leaf_space(m), "u-2", "u-1"))
    assert rep.conditions() == [2]


def test_marker_at_a_breakpoint_fails_condition_three():
    m = load_fixture("M3")
    z = zigzag(leaf_space(m), "nu0", "nu12")
    s = special_section(m, FiberPoint("nu0", None))
    vals = dict(s.values)
    vals["nu3"] = m.crossings_along_unstable["nu3"][0]
    assert 3 in is_ql_extremal(m, Section(vals), z).conditions()
