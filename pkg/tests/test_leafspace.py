from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from leftcircle.errors import LeafSpaceError
from leftcircle.leafspace import (ABOVE, BELOW, EQUAL, INCOMPARABLE, comparable, hausdorffify,
                                  leaf_space, order_witness, zigzag, zigzag_ray)
from leftcircle.model import load_fixture

from conftest import medium_corpus, mutated


def bfs_path(m, a, b):
    """Shortest leaf sequence using consecutive crossings and jumps inside a chain."""
    adj = {u: set() for u in m.unstable}
    for us in m.crossings_along_stable.values():
        for x, y in zip(us, us[1:]):
            adj[x].add(y)
            adj[y].add(x)
    for ch in m.chains:
        for x in ch.leaves:
            adj[x].update(y for y in ch.leaves if y != x)
    prev = {a: None}
    todo = deque([a])
    while todo:
        x = todo.popleft()
        for y in sorted(adj[x]):
            if y not in prev:
                prev[y] = x
                todo.append(y)
    out = [b]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    return tuple(reversed(out))


def test_m1_single_chart():
    ls = leaf_space(load_fixture("M1"))
    assert [list(c) for c in ls.charts()] == [["u-2", "u-1", "u0", "u1", "u2"]]
    assert not ls.cataclysms
    assert comparable(ls, "u-1", "u1") == BELOW
    assert comparable(ls, "u1", "u-1") == ABOVE
    assert comparable(ls, "u0", "u0") == EQUAL


def test_m3_broken_path():
    ls = leaf_space(load_fixture("M3"))
    z = zigzag(ls, "nu0", "nu12")
    assert z.breakpoints == ("nu0", "nu1", "nu2", "nu3", "nu4", "nu4", "nu6", "nu7", "nu8",
                             "nu9", "nu10", "nu10", "nu12", "nu12")
    assert z.orientations == ("up", "down", "up", "down", "up", "down", "up")
    assert z.launching == ("nu1", "nu3", "nu4", "nu7", "nu9", "nu10")
    assert z.landing == ("nu2", "nu4", "nu6", "nu8", "nu10", "nu12")
    members = {x for c in ls.cataclysms for x in c.members}
    assert {"nu4", "nu10", "nu12"} <= members
    assert comparable(ls, "nu1", "nu2") == INCOMPARABLE


def test_chain_contradicted_by_crossings_is_an_error():
    def add(d):
        d["stable"].append("x")
        d["crossings_along_stable"]["x"] = ["nu1", "nu2"]
        d["crossings_along_unstable"]["nu1"].append("x")
        d["crossings_along_unstable"]["nu2"].append("x")
    with pytest.raises(LeafSpaceError):
        leaf_space(mutated("M3", add))


def test_degenerate_path():
    z = zigzag(leaf_space(load_fixture("M1")), "u0", "u0")
    assert z.breakpoints == ("u0",) and z.segments == ()


def test_rays():
    z = zigzag_ray(leaf_space(load_fixture("M1e")), "u0", "top")
    assert z.segments == (("u0", "u1", "u2"),) and z.end == "top"
    z = zigzag_ray(leaf_space(load_fixture("M2")), "u0", "tau-")
    assert z.orientations == ("down",) and z.leaves[-1] == "u-11"


def test_ray_restricted_to_its_leaves_is_the_zigzag():
    for m in medium_corpus():
        ls = leaf_space(m)
        for e in m.ends:
            for a in ls.leaves[:5]:
                try:
                    ray = zigzag_ray(ls, a, e.id)
                except LeafSpaceError:
                    continue
                leaves = ray.leaves
                for k, b in enumerate(leaves):
                    assert zigzag(ls, a, b).leaves == leaves[:k + 1]


def test_zigzag_matches_bfs_oracle_on_corpus():
    for m in medium_corpus():
        ls = leaf_space(m)
        for a in ls.leaves:
            for b in ls.leaves:
                assert zigzag(ls, a, b).leaves == bfs_path(m, a, b), (m.name, a, b)


def test_zigzag_reverse_and_alternation_on_corpus():
    for m in medium_corpus():
        ls = leaf_space(m)
        for a in ls.leaves:
            for b in ls.leaves:
                z = zigzag(ls, a, b)
                assert zigzag(ls, b, a).reversed() == z
                assert all(x != y for x, y in zip(z.orientations, z.orientations[1:]))


def test_hausdorffification():
    assert len(hausdorffify(leaf_space(load_fixture("M1")))) == 5
    ls = leaf_space(load_fixture("M3"))
    q = hausdorffify(ls)
    for c in ls.cataclysms:
        assert len({q.class_of[x] for x in c.members}) == 1
    # nu10 sits in two cataclysms, so nu9, nu10 and nu12 share one class
    assert q.class_of["nu9"] == q.class_of["nu12"]


def test_quotient_count_oracle_on_corpus():
    for m in medium_corpus():
        ls = leaf_space(m)
        assert len(hausdorffify(ls)) == len(ls.leaves) - sum(len(c.leaves) - 1 for c in m.chains)


def test_order_witness():
    m = load_fixture("M1")
    w = order_witness(m, "u-2", "u2")
    assert [x[1] for x in w] == ["u-2", "u-1", "u0", "u1"]
    assert all(m.crosses(s, lo) and m.crosses(s, hi) for s, lo, hi in w)
    assert order_witness(m, "u2", "u-2") is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 19), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_comparability_is_antisymmetric(k, i, j):
    m = medium_corpus()[k]
    ls = leaf_space(m)
    a, b = ls.leaves[i % len(ls.leaves)], ls.leaves[j % len(ls.leaves)]
    flip = {BELOW: ABOVE, ABOVE: BELOW, EQUAL: EQUAL, INCOMPARABLE: INCOMPARABLE}
    assert comparable(ls, b, a) == flip[comparable(ls, a, b)]
