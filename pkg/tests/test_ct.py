import pytest

from leftcircle.ct import (INCONCLUSIVE, OK, CTMap, CTValue, check_core_compat, check_well_defined,
                           continuity_sample, ct)
from leftcircle.current import base
from leftcircle.errors import NoStabilization
from leftcircle.master import SymbolicPoint, f_end, i_map
from leftcircle.model import load_fixture
from leftcircle.sections import (FiberPoint, all_fiber_points, circular_order,
                                 limit_section_at_end, special_section)


def test_m1_leftmost_maps_to_its_master_set():
    m = load_fixture("M1")
    s = special_section(m, FiberPoint("u0", None))
    assert ct(m, s) == CTValue(SymbolicPoint("ms:s1"))
    assert check_well_defined(m, s).ok


def test_m2_limit_uses_the_end_class():
    m = load_fixture("M2")
    s = limit_section_at_end(m, "tau-")
    assert ct(m, s).point == f_end(m, "tau-")


def test_m0_constant_marker():
    m = load_fixture("M0")
    s = special_section(m, FiberPoint("u0", "s1"))
    b = base(m, s)
    assert {i_map(m, s.point(x)) for x in b.leaves} == {ct(m, s).point}
    assert ct(m, s).point == SymbolicPoint("ms:s1")


def test_single_leaf_base_is_vacuous():
    m = load_fixture("M2")
    singles = [s for s in (special_section(m, p) for p in all_fiber_points(m))
               if base(m, s).kind == "leaves" and len(base(m, s).leaves) == 1]
    assert singles
    assert all(check_well_defined(m, s).ok for s in singles)


def test_nonmarker_run_is_inconclusive_not_a_value():
    m = load_fixture("M1")
    v = ct(m, special_section(m, FiberPoint("u-1", None)))
    assert v.status == INCONCLUSIVE and v.point is None


def test_core_compat_on_m1():
    m = load_fixture("M1")
    secs = [special_section(m, FiberPoint(u, None)) for u in ("u-2", "u0", "u2")]
    rep = check_core_compat(m, circular_order(m, secs), "u0")
    # all three are nonmarker at u0, so none is alone in its fiber value
    assert rep.ok and rep.checked == [] and rep.skipped == []
    secs = [special_section(m, p) for p in all_fiber_points(m)]
    for leaf in m.unstable:
        rep = check_core_compat(m, circular_order(m, secs), leaf)
        assert rep.ok


def test_core_compat_on_m3_checks_something():
    m = load_fixture("M3")
    secs = [special_section(m, p) for p in all_fiber_points(m)]
    order = circular_order(m, secs)
    checked = 0
    for leaf in m.unstable:
        rep = check_core_compat(m, order, leaf)
        assert rep.ok
        checked += len(rep.checked)
    assert checked > 0


@pytest.mark.parametrize("name,end", [("M2", "tau-"), ("M2", "tau+"), ("M1e", "top"),
                                      ("M4", "top"), ("M4", "bottom")])
def test_continuity_on_fixtures(name, end):
    m = load_fixture(name)
    rep = continuity_sample(m, end)
    target = ct(m, limit_section_at_end(m, end))
    assert rep.target == target and target.status == OK
    k = rep.leaves.index(rep.stable_from)
    assert all(v == target for v in rep.values[k:])


def test_m2_descending_family_settles_near_the_end():
    rep = continuity_sample(load_fixture("M2"), "tau-")
    assert rep.stable_from == "u-9"
    assert str(rep.target) == "ms:p0"


def test_m4_family_is_stable_within_one_period():
    # M4's shift moves each leaf one step, so the period is one leaf
    rep = continuity_sample(load_fixture("M4"), "top")
    assert rep.leaves.index(rep.stable_from) <= 1


def test_no_stabilization_is_reported():
    from leftcircle.generate import generate_corpus
    # frozen case: a seven-leaf window whose bottom family never settles
    m = generate_corpus(1, 20, 20)[11]
    assert len(m.unstable) == 7
    with pytest.raises(NoStabilization) as info:
        continuity_sample(m, "bot_u0")
    assert info.value.leaf == "u0"


def test_ctmap_facade():
    m = load_fixture("M1")
    secs = [special_section(m, FiberPoint("u0", None)), special_section(m, FiberPoint("u1", "s1"))]
    cm = CTMap().fit(m)
    assert [v.point for v in cm.transform(secs)] == [SymbolicPoint("ms:s1")] * 2
    assert cm.get_params() == {"strict": False}
    strict = CTMap().set_params(strict=True).fit(m)
    with pytest.raises(ValueError):
        strict.transform([special_section(m, FiberPoint("u-1", None))])
