"""Fiber points, admissible sections, special and end-limit sections.

A fiber over an unstable leaf is the circle made of its crossing stable
leaves, read from the leaf's minus end to its plus end, closed up by a
single nonmarker point.  Sections are dense maps leaf -> marker or None
(None is the nonmarker point).  Each section also records, per declared
end, whether it flows out into that end ("flow") or is fed from it
("source").
"""

from dataclasses import dataclass, field

from .errors import CrossingSections, ModelError, NoStabilization
from .leafspace import leaf_space, zigzag, zigzag_ray
from .model import DOWN, FROM_ABOVE, FROM_BELOW, MINUS, PLUS, UP

FLOW = "flow"
SOURCE = "source"
NM = None


@dataclass(frozen=True)
class FiberPoint:
    leaf: str
    marker: str = None

    @property
    def is_marker(self):
        return self.marker is not None

    def __str__(self):
        return f"{self.leaf}:{self.marker}" if self.marker else f"{self.leaf}:NM"


def parse_fiber_point(m, text):
    """'LEAF' for the nonmarker point, 'LEAF:STABLE' for a marker."""
    leaf, _, marker = text.partition(":")
    if leaf not in m.crossings_along_unstable:
        raise ModelError(f"unknown unstable leaf {leaf!r}")
    marker = marker or None
    if marker in ("NM", "nm"):
        marker = None
    if marker is not None and not m.crosses(marker, leaf):
        raise ModelError(f"{marker} does not cross {leaf}")
    return FiberPoint(leaf, marker)


@dataclass(frozen=True)
class Quadrant:
    vertical: str
    horizontal: str

    def __str__(self):
        return f"{self.vertical}-{self.horizontal}"


@dataclass(eq=False)
class Section:
    values: dict
    tags: dict = field(default_factory=dict)
    label: str = ""

    def __call__(self, leaf):
        return self.values[leaf]

    def point(self, leaf):
        return FiberPoint(leaf, self.values[leaf])

    def key(self):
        # sections are treated as immutable, so the key is computed once
        k = self.__dict__.get("_key")
        if k is None:
            k = (tuple(sorted(self.values.items(), key=lambda kv: kv[0])),
                 tuple(sorted(self.tags.items())))
            self.__dict__["_key"] = k
        return k

    def __eq__(self, other):
        return isinstance(other, Section) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def lines(self):
        return [f"{leaf} → {v if v is not None else 'NM'}" for leaf, v in sorted(self.values.items())]


@dataclass(frozen=True)
class MarkerInterval:
    stable: str
    leaves: tuple
    lower: str
    upper: str


def marker_interval(m, s):
    if s not in m.crossings_along_stable:
        raise ModelError(f"unknown stable leaf {s!r}")
    flags = {}
    for sign in (MINUS, PLUS):
        fits = [pf for pf in m.fits_of_stable(s) if pf.stable_sign == sign]
        flags[sign] = ",".join(f"perfect_fit({pf.unstable})" for pf in sorted(fits)) or "escapes_window"
    return MarkerInterval(s, tuple(m.crossings_along_stable[s]), flags[MINUS], flags[PLUS])


def quadrant_of(m, pf):
    memo = m._cache.setdefault("quadrant", {})
    if pf not in memo:
        memo[pf] = _quadrant(m, pf)
    return memo[pf]


def _quadrant(m, pf):
    if pf not in m.perfect_fits:
        raise ModelError(f"undeclared perfect fit {pf}")
    ls = leaf_space(m)
    crossed = m.crossings_along_stable.get(pf.stable, ())
    if crossed and all(ls.is_below(pf.unstable, u) for u in crossed):
        vertical = "upper"
    elif crossed and all(ls.is_below(u, pf.unstable) for u in crossed):
        vertical = "lower"
    else:
        vertical = "upper" if pf.stable_sign == MINUS else "lower"
    horizontal = "left" if pf.unstable_sign == MINUS else "right"
    return Quadrant(vertical, horizontal)


def fiber_position(m, leaf, value):
    order = m.crossings_along_unstable[leaf]
    return len(order) if value is None else order.index(value)


def _fit_markers(m, x, sign, target):
    """Stable leaves fitting end `sign` of x and crossing target."""
    return [pf.stable for pf in m.fits_at(x, sign) if m.crosses(pf.stable, target)]


def up_step(m, value, x, y):
    """Leftmost continuation from leaf x to the leaf y just above it."""
    if value is not None:
        return value if m.crosses(value, y) else None
    cands = _fit_markers(m, x, MINUS, y)
    if not cands:
        return None
    order = m.crossings_along_unstable[y]
    return min(cands, key=order.index)


def down_step(m, value, x, y):
    """Rightmost continuation from leaf x to the leaf y just below it."""
    if value is not None:
        return value if m.crosses(value, y) else None
    cands = _fit_markers(m, x, PLUS, y)
    if not cands:
        return None
    order = m.crossings_along_unstable[y]
    return max(cands, key=order.index)


def _propagate(m, start, value):
    """Values reached from (start, value) along every zigzag from start."""
    ls = leaf_space(m)
    values = {start: value}
    # stack items: (node, value, how we got here, previous node)
    stack = [(start, value, None, None)]
    while stack:
        x, v, came, prev = stack.pop()
        jump_side = None
        if came == UP:
            jump_side = FROM_ABOVE
        elif came == DOWN:
            jump_side = FROM_BELOW
        cat = ls.cataclysm_at(x, jump_side) if jump_side else None
        for y in ls.neighbors(x):
            if y == prev or y in values:
                continue
            if cat is not None and y in cat.members:
                # jump between nonseparated leaves: land on the nonmarker point
                values[y] = None
                stack.append((y, None, DOWN if jump_side == FROM_ABOVE else UP, x))
                continue
            d = ls.step_direction(x, y)
            w = up_step(m, v, x, y) if d == UP else down_step(m, v, x, y)
            values[y] = w
            stack.append((y, w, d, x))
    return values


def special_section(m, p):
    if p.leaf not in m.crossings_along_unstable:
        raise ModelError(f"unknown unstable leaf {p.leaf!r}")
    if p.marker is not None and not m.crosses(p.marker, p.leaf):
        raise ModelError(f"{p.marker} does not cross {p.leaf}")
    cache = m._cache.setdefault("special", {})
    sec = cache.get(p)
    if sec is None:
        vals = _propagate(m, p.leaf, p.marker)
        sec = Section(vals, {e.id: FLOW for e in m.ends}, label=f"special {p}")
        cache[p] = sec
    return sec


def all_fiber_points(m, markers=True):
    pts = []
    for u in sorted(m.unstable):
        pts.append(FiberPoint(u, None))
        if markers:
            pts.extend(FiberPoint(u, s) for s in m.crossings_along_unstable[u])
    return pts


def is_admissible(m, sec, require_total=True):
    """(True, None) or (False, first violation as text)."""
    ls = leaf_space(m)
    vals = sec.values
    if require_total:
        missing = [u for u in sorted(m.unstable) if u not in vals]
        if missing:
            return False, f"section undefined at {missing[0]}"
    for u, v in sorted(vals.items(), key=lambda kv: kv[0]):
        if u not in ls.up:
            return False, f"{u} is not an unstable leaf"
        if v is not None and not m.crosses(v, u):
            return False, f"marker {v} does not cross {u}"
    for x in ls.leaves:
        for y in ls.up[x]:
            if x not in vals or y not in vals:
                continue
            a, b = vals[x], vals[y]
            for lo, hi, v, other in ((x, y, a, b), (y, x, b, a)):
                if v is None:
                    continue
                if m.crosses(v, hi):
                    if other != v:
                        return False, f"leaves marker {v} between {lo} and {hi}"
                elif other is not None:
                    return False, f"marker {v} ends between {lo} and {hi} but the section is not nonmarker at {hi}"
    bad = _strict_crossing(m, vals)
    if bad:
        return False, bad
    return True, None


def _strict_crossing(m, vals):
    for s in sorted(m.crossings_along_stable):
        us = [u for u in m.crossings_along_stable[s] if u in vals]
        side = None
        for u in us:
            v = vals[u]
            if v is None:
                side = None
                continue
            order = m.crossings_along_unstable[u]
            d = order.index(v) - order.index(s)
            if d == 0:
                side = None
                continue
            here = "left" if d < 0 else "right"
            if side is not None and side != here:
                return f"crosses marker {s} at {u}"
            side = here
    return None


def _seed(m, e):
    order = m.crossings_along_unstable[e.attachment]
    if not order:
        return None
    # fed from below the section climbs leftmost; fed from above it descends rightmost
    return order[0] if e.direction == DOWN else order[-1]


def limit_section_at_end(m, end_id, check=True):
    """Section fed from the end, checked against the approaching family.

    The family is special_section at the limit's own values along a
    zigzag ray to the end.  A leaf stabilizes when the last two family
    members at or beyond its junction with the ray agree with the limit.
    """
    e = m.end(end_id)
    cache = m._cache.setdefault("limit", {})
    if end_id in cache and not check:
        return cache[end_id]
    vals = _propagate(m, e.attachment, _seed(m, e))
    tags = {x.id: FLOW for x in m.ends}
    tags[end_id] = SOURCE
    sec = Section(vals, tags, label=f"limit {end_id}")
    if check:
        leaf = first_unstable_leaf(m, sec, end_id)
        if leaf is not None:
            raise NoStabilization(leaf)
    cache[end_id] = sec
    return sec


def ray_start(m, end_id):
    ls = leaf_space(m)
    e = m.end(end_id)
    far = max(ls.leaves, key=lambda x: (len(ls.tree_path(e.attachment, x)), x))
    return far


def end_family(m, end_id, limit=None):
    """(ray leaves toward the end, special sections based on the limit there)."""
    ls = leaf_space(m)
    ray = zigzag_ray(ls, ray_start(m, end_id), end_id)
    if limit is None:
        limit = limit_section_at_end(m, end_id, check=False)
    leaves = ray.leaves
    return leaves, [special_section(m, limit.point(x)) for x in leaves]


def first_unstable_leaf(m, sec, end_id):
    ls = leaf_space(m)
    leaves, family = end_family(m, end_id, sec)
    index = {x: i for i, x in enumerate(leaves)}
    attach = m.end(end_id).attachment
    for mu in ls.leaves:
        path = ls.tree_path(mu, attach)
        junction = next(index[x] for x in path if x in index)
        tail = [f for i, f in enumerate(family) if i >= junction][-2:]
        if any(f.values[mu] != sec.values[mu] for f in tail):
            return mu
    return None


def brute_force_special(m, p, max_leaves=8, limit=200000):
    """Leftmost-up / rightmost-down admissible section through p, by search.

    Leaves are visited in order of tree distance from the basepoint and each
    leaf's candidate values are tried by rank, ranked by the direction in
    which the zigzag from the basepoint reaches it.  A branch is cut as soon
    as the partial section stops being admissible, which is exact here since
    every prefix covers a subtree, so the first total section reached is the
    lexicographic minimum over all admissible sections through p.
    """
    ls = leaf_space(m)
    if len(ls.leaves) > max_leaves:
        raise ValueError("too many leaves for exhaustive search")
    a = p.leaf
    order = sorted(ls.leaves, key=lambda x: (len(ls.tree_path(a, x)), x))
    options = []
    for x in order:
        if x == a:
            options.append([p.marker])
        else:
            rank = _rank_table(m, ls, a, x)
            options.append(sorted([None] + list(m.crossings_along_unstable[x]),
                                  key=lambda v, rank=rank: (rank(v), str(v))))
    visits = 0
    vals = {}

    def search(i):
        nonlocal visits
        if i == len(order):
            return True
        for v in options[i]:
            visits += 1
            if visits > limit:
                raise ValueError("search space too large")
            vals[order[i]] = v
            if is_admissible(m, Section(dict(vals)), require_total=False)[0] and search(i + 1):
                return True
            del vals[order[i]]
        return False

    if not search(0):
        return None
    return Section(dict(vals), {e.id: FLOW for e in m.ends}, label=f"oracle {p}")


def _rank_table(m, ls, a, x):
    z = zigzag(ls, a, x)
    last = z.segments[-1]
    order = m.crossings_along_unstable[x]
    if len(last) == 1 and len(z.segments) > 1:
        # landing leaf of a jump: nonmarker first
        return lambda v: 0 if v is None else 1 + order.index(v)
    prev = last[-2]
    if z.orientations[-1] == UP:
        fits = set(_fit_markers(m, prev, MINUS, x))
        def rank(v):
            if v is None:
                return 1000
            if v in fits:
                return order.index(v)
            return 2000 + order.index(v)
    else:
        fits = set(_fit_markers(m, prev, PLUS, x))
        def rank(v):
            if v is None:
                return 1000
            if v in fits:
                return len(order) - order.index(v)
            return 2000 + order.index(v)
    return rank


@dataclass
class CircleOrder:
    sections: list
    cyclic: list = None
    degenerate: bool = False

    def position(self, i):
        return self.cyclic.index(i) if self.cyclic is not None else None


def _cyc(p, q, r):
    """Orientation of three distinct positions on a circle."""
    if len({p, q, r}) < 3:
        return 0
    return 1 if (p < q < r) or (q < r < p) or (r < p < q) else -1


def triple_orientation(m, a, b, c, leaves=None):
    """+1/-1 from the fiber order at every leaf where the three differ; 0 if no such leaf.

    Raises CrossingSections if two witnesses disagree.
    """
    seen = None
    witness = None
    for u in (leaves or sorted(m.unstable)):
        if u not in a.values or u not in b.values or u not in c.values:
            continue
        va, vb, vc = a.values[u], b.values[u], c.values[u]
        if len({va, vb, vc}) < 3:
            continue
        o = _cyc(fiber_position(m, u, va), fiber_position(m, u, vb), fiber_position(m, u, vc))
        if seen is None:
            seen, witness = o, u
        elif o != seen:
            raise CrossingSections(f"orientation at {witness} and {u} disagree: sections cross")
    return seen or 0


def circular_order(m, secs):
    """Cyclic arrangement of the given sections, built from resolvable triples.

    Sections are inserted one at a time wherever every resolvable triple
    with already placed sections agrees; the result is flagged degenerate
    when some section cannot be placed uniquely.
    """
    secs = list(secs)
    n = len(secs)
    distinct = []
    for i, s in enumerate(secs):
        if all(s != secs[j] for j in distinct):
            distinct.append(i)
    if len(distinct) < 3:
        return CircleOrder(secs, None, True)
    memo = {}

    def orient(i, j, k):
        key = (i, j, k)
        if key not in memo:
            memo[key] = triple_orientation(m, secs[i], secs[j], secs[k])
        return memo[key]

    placed = None
    for i, j, k in _triples(distinct):
        o = orient(i, j, k)
        if o:
            placed = [i, j, k] if o > 0 else [i, k, j]
            break
    if placed is None:
        return CircleOrder(secs, None, True)
    remaining = [i for i in distinct if i not in placed]
    while remaining:
        progress = False
        for x in list(remaining):
            slots = _consistent_slots(placed, x, orient)
            if len(slots) == 1:
                placed.insert(slots[0], x)
                remaining.remove(x)
                progress = True
        if not progress:
            return CircleOrder(secs, placed, True)
    dup = [i for i in range(n) if i not in distinct]
    degenerate = bool(dup)
    for i in dup:
        twin = next(j for j in distinct if secs[j] == secs[i])
        placed.insert(placed.index(twin) + 1, i)
    return CircleOrder(secs, placed, degenerate)


def _triples(idx):
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            for c in range(b + 1, len(idx)):
                yield idx[a], idx[b], idx[c]


def _consistent_slots(placed, x, orient):
    good = []
    informative = False
    for slot in range(len(placed)):
        trial = placed[:slot + 1] + [x] + placed[slot + 1:]
        pos = {v: i for i, v in enumerate(trial)}
        ok = True
        for a in range(len(placed)):
            for b in range(a + 1, len(placed)):
                i, j = placed[a], placed[b]
                o = orient(i, j, x)
                if o == 0:
                    continue
                informative = True
                if _cyc(pos[i], pos[j], pos[x]) != o:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            good.append(slot + 1)
    return good if informative else []
