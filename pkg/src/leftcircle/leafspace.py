"""The unstable leaf space of a window: order, cataclysms, zigzags, ends."""

from collections import deque
from dataclasses import dataclass

import networkx as nx

from .errors import LeafSpaceError, ModelError
from .model import DOWN, FROM_ABOVE, FROM_BELOW, UNSTABLE, UP

BELOW = "below"
ABOVE = "above"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Cataclysm:
    side: str
    members: tuple
    common: str
    links: tuple


@dataclass(frozen=True)
class ZigzagPath:
    """Breakpoints nu_0..nu_n with monotone segments between jumps.

    segments[k] runs from breakpoints[2k] to breakpoints[2k+1] and lists
    every leaf it passes; orientations[k] is 'up' or 'down' and is stored
    even for a one-leaf segment.  A ray carries the id of its end and its
    last segment runs on toward that end.
    """
    breakpoints: tuple
    segments: tuple
    orientations: tuple
    end: str = None

    @property
    def leaves(self):
        return tuple(x for seg in self.segments for x in seg) or self.breakpoints[:1]

    @property
    def launching(self):
        return self.breakpoints[1:-1:2] if self.end is None else self.breakpoints[1::2]

    @property
    def landing(self):
        return self.breakpoints[2::2]

    def jumps(self):
        return [(self.segments[k][-1], self.segments[k + 1][0]) for k in range(len(self.segments) - 1)]

    def reversed(self):
        if self.end is not None:
            raise ValueError("a ray has no reverse inside the window")
        flip = {UP: DOWN, DOWN: UP}
        return ZigzagPath(self.breakpoints[::-1],
                          tuple(seg[::-1] for seg in self.segments[::-1]),
                          tuple(flip[o] for o in self.orientations[::-1]))


class LeafSpace:
    def __init__(self, leaves, up, down, cataclysms, ends):
        self.leaves = tuple(sorted(leaves))
        self.up = up
        self.down = down
        self.cataclysms = tuple(cataclysms)
        self.ends = tuple(ends)
        self._by_common = {(c.common, c.side): c for c in cataclysms}
        self._above = {}
        self._below = {}
        for x in self.leaves:
            self._above[x] = self._reach(x, up)
            self._below[x] = self._reach(x, down)
        self._parents = {}

    @staticmethod
    def _reach(x, nbrs):
        seen = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for z in nbrs[y]:
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        return frozenset(seen)

    def neighbors(self, x):
        return self.down[x] + self.up[x]

    def above_set(self, x):
        """Leaves >= x, including x."""
        return self._above[x]

    def below_set(self, x):
        return self._below[x]

    def is_below(self, a, b):
        return a != b and b in self._above[a]

    def cataclysm_at(self, common, side):
        return self._by_common.get((common, side))

    def charts(self):
        """Maximal monotone chains of the order (one list per maximal chain)."""
        mins = [x for x in self.leaves if not self.down[x]]
        out = []

        def walk(path):
            x = path[-1]
            if not self.up[x]:
                out.append(tuple(path))
                return
            for y in self.up[x]:
                walk(path + [y])

        for x in mins:
            walk([x])
        return out

    def frontier(self, direction):
        nbrs = self.up if direction == UP else self.down
        return [x for x in self.leaves if not nbrs[x]]

    def tree_path(self, a, b):
        par = self._parents.get(a)
        if par is None:
            par = {a: None}
            q = deque([a])
            while q:
                x = q.popleft()
                for y in self.neighbors(x):
                    if y not in par:
                        par[y] = x
                        q.append(y)
            self._parents[a] = par
        if b not in par:
            raise LeafSpaceError(f"{b} is not reachable from {a}")
        path = [b]
        while path[-1] != a:
            path.append(par[path[-1]])
        return path[::-1]

    def step_direction(self, x, y):
        if y in self.up[x]:
            return UP
        if y in self.down[x]:
            return DOWN
        raise LeafSpaceError(f"{x} and {y} are not adjacent")

    def end_decl(self, end_id):
        for e in self.ends:
            if e.id == end_id:
                return e
        raise ModelError(f"unknown end {end_id!r}")


def _unstable_chains(m):
    return [c for c in m.chains if c.family == UNSTABLE]


def derive_leaf_space(m):
    """Order the unstable leaves by consecutive stable crossings.

    Raises LeafSpaceError when the order has a cycle, is disconnected,
    contradicts a declared chain, or branches where no chain is declared.
    """
    g = nx.DiGraph()
    g.add_nodes_from(m.unstable)
    for s in sorted(m.crossings_along_stable):
        us = m.crossings_along_stable[s]
        for lo, hi in zip(us, us[1:]):
            g.add_edge(lo, hi)
    if not nx.is_directed_acyclic_graph(g):
        cyc = nx.find_cycle(g)
        raise LeafSpaceError(f"order not simply connected: cycle through {[e[0] for e in cyc]}")
    red = nx.transitive_reduction(g)
    und = red.to_undirected()
    if len(m.unstable) > 1 and not nx.is_connected(und):
        raise LeafSpaceError("leaf space is not connected inside the window")
    if not nx.is_forest(und):
        cyc = nx.find_cycle(und)
        raise LeafSpaceError(f"order not simply connected: cycle through {[e[0] for e in cyc]}")

    up = {x: sorted(red.successors(x)) for x in m.unstable}
    down = {x: sorted(red.predecessors(x)) for x in m.unstable}
    anc = {x: nx.ancestors(g, x) for x in m.unstable}

    cataclysms = []
    covered = set()
    for ch in _unstable_chains(m):
        for a in ch.leaves:
            for b in ch.leaves:
                if a != b and a in anc[b]:
                    raise LeafSpaceError(
                        f"derived order puts {a} below {b} but a chain declares them nonseparated")
        nb = up if ch.side == FROM_ABOVE else down
        common = set(nb[ch.leaves[0]])
        for x in ch.leaves[1:]:
            common &= set(nb[x])
        if len(common) != 1:
            raise LeafSpaceError(f"chain {list(ch.leaves)} has no common neighbour on the {ch.side} side")
        w = common.pop()
        if (w, ch.side) in covered:
            raise LeafSpaceError(f"two chains branch at {w}")
        covered.add((w, ch.side))
        cataclysms.append(Cataclysm(ch.side, ch.leaves, w, ch.links))

    for ca in cataclysms:
        for cb in cataclysms:
            if ca.side == FROM_ABOVE and cb.side == FROM_BELOW \
                    and cb.common in ca.members and ca.common in cb.members:
                raise LeafSpaceError(f"{ca.common} and {cb.common} branch at each other")
    for x in m.unstable:
        for nb, side in ((down, FROM_ABOVE), (up, FROM_BELOW)):
            if len(nb[x]) > 1:
                c = next((c for c in cataclysms if c.common == x and c.side == side), None)
                if c is None or set(c.members) != set(nb[x]):
                    raise LeafSpaceError(f"{x} branches without a matching {side} chain")
    return LeafSpace(m.unstable, up, down, cataclysms, m.ends)


def leaf_space(m):
    ls = m._cache.get("leafspace")
    if ls is None:
        ls = derive_leaf_space(m)
        m._cache["leafspace"] = ls
    return ls


def comparable(ls, a, b):
    if a not in ls.up or b not in ls.up:
        raise ModelError(f"unknown leaf in ({a}, {b})")
    if a == b:
        return EQUAL
    if ls.is_below(a, b):
        return BELOW
    if ls.is_below(b, a):
        return ABOVE
    return INCOMPARABLE


def order_witness(m, a, b):
    """Stable leaves whose consecutive crossings climb from a to b."""
    ls = leaf_space(m)
    if not ls.is_below(a, b):
        return None
    path = ls.tree_path(a, b)
    out = []
    for lo, hi in zip(path, path[1:]):
        s = next(s for s in sorted(m.crossings_along_stable)
                 if _consecutive(m.crossings_along_stable[s], lo, hi, ls))
        out.append((s, lo, hi))
    return out


def _consecutive(us, lo, hi, ls):
    if lo not in us or hi not in us:
        return False
    i, j = us.index(lo), us.index(hi)
    return i < j and all(ls.is_below(lo, x) and ls.is_below(x, hi) for x in us[i + 1:j])


def zigzag(ls, a, b):
    path = ls.tree_path(a, b)
    if len(path) == 1:
        return ZigzagPath((a,), (), ())
    dirs = [ls.step_direction(x, y) for x, y in zip(path, path[1:])]
    pieces = [[path[0]]]
    turns = []
    for i in range(1, len(path)):
        node = path[i]
        turning = i < len(path) - 1 and dirs[i - 1] != dirs[i]
        if turning:
            side = FROM_ABOVE if dirs[i - 1] == UP else FROM_BELOW
            cat = ls.cataclysm_at(node, side)
            if cat is None or path[i - 1] not in cat.members or path[i + 1] not in cat.members:
                raise LeafSpaceError(f"path turns at {node} without a cataclysm")
            turns.append(side)
            pieces.append([])
        else:
            pieces[-1].append(node)
    orients = []
    for k, piece in enumerate(pieces):
        if len(piece) > 1:
            orients.append(ls.step_direction(piece[0], piece[1]))
        elif k < len(turns):
            orients.append(UP if turns[k] == FROM_ABOVE else DOWN)
        else:
            orients.append(DOWN if turns[k - 1] == FROM_ABOVE else UP)
    bps = [a]
    for k in range(len(pieces) - 1):
        bps += [pieces[k][-1], pieces[k + 1][0]]
    bps.append(b)
    return ZigzagPath(tuple(bps), tuple(tuple(p) for p in pieces), tuple(orients))


def zigzag_ray(ls, a, end_id):
    e = ls.end_decl(end_id)
    z = zigzag(ls, a, e.attachment)
    if not z.segments:
        return ZigzagPath((a,), ((a,),), (e.direction,), end=end_id)
    if z.orientations[-1] != e.direction:
        raise LeafSpaceError(f"ray to {end_id} arrives against the end's direction")
    return ZigzagPath(z.breakpoints, z.segments, z.orientations, end=end_id)


@dataclass(frozen=True)
class Quotient:
    classes: tuple
    class_of: dict

    def __len__(self):
        return len(self.classes)


def hausdorffify(ls):
    """Collapse each cataclysm to a point."""
    parent = {x: x for x in ls.leaves}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in ls.cataclysms:
        r = find(c.members[0])
        for x in c.members[1:]:
            parent[find(x)] = r
    groups = {}
    for x in ls.leaves:
        groups.setdefault(find(x), []).append(x)
    classes = tuple(sorted(tuple(sorted(v)) for v in groups.values()))
    class_of = {x: cls for cls in classes for x in cls}
    return Quotient(classes, class_of)


def dump(ls):
    lines = ["charts:"]
    for ch in ls.charts():
        lines.append("  " + " < ".join(ch))
    lines.append("cataclysms:")
    for c in ls.cataclysms:
        lines.append(f"  {c.side} at {c.common}: {', '.join(c.members)}")
    lines.append("ends:")
    for e in ls.ends:
        lines.append(f"  {e.id}: {e.direction} from {e.attachment}")
    return "\n".join(lines)
