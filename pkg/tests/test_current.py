import random

from hypothesis import given, settings, strategies as st

from leftcircle.current import (base, base_definitional, check_base_shape,
                                check_change_at_cataclysm, check_lu_or_rd, check_marker_sat,
                                check_no_sink_global, check_up_sat, classify, coloring,
                                is_with_current, lu_region, no_sink_by_paths, rd_region)
from leftcircle.leafspace import leaf_space, zigzag
from leftcircle.model import load_fixture
from leftcircle.sections import (FiberPoint, Section, all_fiber_points, limit_section_at_end,
                                 special_section)

from conftest import small_corpus

ALL_M1 = {"u-2", "u-1", "u0", "u1", "u2"}


def test_m1_colours_and_base():
    m = load_fixture("M1")
    s = special_section(m, FiberPoint("u0", None))
    col = coloring(m, s)
    assert col.lu == col.rd == ALL_M1
    b = base(m, s)
    assert b.kind == "leaves" and set(b.leaves) == ALL_M1
    assert classify(m, s) == "S"


def test_m1_every_zigzag_from_u0_flows_with_the_current():
    m = load_fixture("M1")
    s = special_section(m, FiberPoint("u0", None))
    ls = leaf_space(m)
    for b in ls.leaves:
        assert is_with_current(m, s, zigzag(ls, "u0", b)) == (True, None)


def test_m2_limit_at_tau_minus():
    m = load_fixture("M2")
    s = limit_section_at_end(m, "tau-")
    assert lu_region(m, s) == set(m.unstable)
    assert rd_region(m, s) == set()
    b = base(m, s)
    assert b.kind == "end" and b.end == "tau-"
    assert classify(m, s) == "E"
    assert classify(m, limit_section_at_end(m, "tau+")) == "E"


def test_reversed_path_runs_against_exclusive_colours():
    m = load_fixture("M2")
    s = limit_section_at_end(m, "tau-")
    ls = leaf_space(m)
    up = zigzag(ls, "u-11", "u0")
    assert is_with_current(m, s, up) == (True, None)
    assert is_with_current(m, s, up.reversed()) == (False, 0)


def _first_offending_segment(m, sec, z):
    lu, rd = lu_region(m, sec), rd_region(m, sec)
    for k, (seg, o) in enumerate(zip(z.segments, z.orientations)):
        region = lu if o == "up" else rd
        if not set(seg) <= region:
            return k
    return None


def test_m3_mixed_paths_report_the_first_bad_interval():
    m = load_fixture("M3")
    ls = leaf_space(m)
    z = zigzag(ls, "nu0", "nu12")
    found = 0
    for p in all_fiber_points(m):
        s = special_section(m, p)
        ok, k = is_with_current(m, s, z)
        assert k == _first_offending_segment(m, s, z)
        found += not ok
    assert found > 0


def _above(ls, x):
    out, todo = set(), [x]
    while todo:
        for y in ls.up[todo.pop()]:
            if y not in out:
                out.add(y)
                todo.append(y)
    return out


def test_lu_matches_leafwise_definition_on_small_models():
    for m in small_corpus():
        ls = leaf_space(m)
        for p in all_fiber_points(m)[:12]:
            s = special_section(m, p)
            want = set()
            for x in ls.leaves:
                other = special_section(m, s.point(x))
                if all(s.values[y] == other.values[y] for y in _above(ls, x) | {x}):
                    want.add(x)
            assert lu_region(m, s) == want


def test_lemma_checks_and_dual_base_on_corpus():
    for m in small_corpus():
        for p in all_fiber_points(m):
            s = special_section(m, p)
            for check in (check_lu_or_rd, check_up_sat, check_change_at_cataclysm,
                          check_marker_sat, check_no_sink_global):
                assert check(m, s) == [], (m.name, p, check.__name__)
            b = base(m, s)
            assert b == base_definitional(m, s)
            assert check_base_shape(m, s, b) == []
            assert classify(m, s) == "S"


def test_limit_sections_are_type_e():
    for name in ("M1e", "M2", "M4"):
        m = load_fixture(name)
        for e in m.ends:
            s = limit_section_at_end(m, e.id)
            assert base(m, s).kind == "end"
            assert classify(m, s) == "E"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 29), st.integers(0, 2 ** 32 - 1))
def test_current_propagation_two_routes_agree_on_random_sections(k, seed):
    m = small_corpus()[k]
    rng = random.Random(seed)
    vals = {u: rng.choice([None] + list(m.crossings_along_unstable[u])) for u in m.unstable}
    s = Section(vals)
    assert check_no_sink_global(m, s) == no_sink_by_paths(m, s)


def test_random_sections_do_hit_violations_and_both_routes_see_them():
    rng = random.Random(5)
    hits = 0
    for m in small_corpus():
        for _ in range(20):
            vals = {u: rng.choice([None] + list(m.crossings_along_unstable[u])) for u in m.unstable}
            fast = check_no_sink_global(m, Section(vals))
            assert fast == no_sink_by_paths(m, Section(vals))
            hits += bool(fast)
    assert hits > 0
