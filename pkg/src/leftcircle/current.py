"""Leftmost-up / rightmost-down regions, the current they induce, and bases."""

from dataclasses import dataclass

from .errors import AmbiguousAgainstCurrent, LeafSpaceError, TypeIViolation, WindowTruncated
from .leafspace import leaf_space, zigzag
from .model import DOWN, FROM_ABOVE, FROM_BELOW, UP
from .sections import FLOW, SOURCE, marker_interval, special_section


@dataclass(frozen=True)
class RegionColoring:
    lu: frozenset
    rd: frozenset

    def color(self, leaf):
        a, b = leaf in self.lu, leaf in self.rd
        return "BOTH" if a and b else "LU" if a else "RD" if b else "NONE"


@dataclass(frozen=True)
class Base:
    kind: str
    leaves: tuple = ()
    end: str = None

    def __str__(self):
        if self.kind == "end":
            return f"end({self.end})"
        return "leaves{" + ", ".join(self.leaves) + "}"


def _agrees(sec, special, leaves):
    sv, pv = sec.values, special.values
    return all(sv.get(x) == pv[x] for x in leaves)


def _region(m, sec, direction):
    ls = leaf_space(m)
    out = set()
    for lam in ls.leaves:
        if lam not in sec.values:
            continue
        special = special_section(m, sec.point(lam))
        reach = ls.above_set(lam) if direction == UP else ls.below_set(lam)
        if not _agrees(sec, special, reach):
            continue
        ends = [e for e in m.ends if e.direction == direction and e.attachment in reach]
        if all(sec.tags.get(e.id, FLOW) == special.tags[e.id] for e in ends):
            out.add(lam)
    return frozenset(out)


def coloring(m, sec):
    memo = m._cache.setdefault("coloring", {})
    key = sec.key()
    col = memo.get(key)
    if col is None:
        col = RegionColoring(_region(m, sec, UP), _region(m, sec, DOWN))
        memo[key] = col
    return col


def lu_region(m, sec):
    return coloring(m, sec).lu


def rd_region(m, sec):
    return coloring(m, sec).rd


def is_with_current(m, sec, z):
    """(True, None) or (False, index of the first offending segment)."""
    col = coloring(m, sec)
    for k, (seg, o) in enumerate(zip(z.segments, z.orientations)):
        region = col.lu if o == UP else col.rd
        if any(x not in region for x in seg):
            return False, k
        if z.end is not None and k == len(z.segments) - 1 and sec.tags.get(z.end, FLOW) != FLOW:
            return False, k
    return True, None


def _current_from(m, sec, col, b):
    """Which zigzags from b are with the current: (per leaf, per end)."""
    ls = leaf_space(m)

    def cond(x, d):
        return x in (col.lu if d == UP else col.rd)

    ok_to = {b: True}
    stack = []
    for y in ls.neighbors(b):
        d = ls.step_direction(b, y)
        ok_b = cond(b, d)
        ok_to[y] = ok_b and cond(y, d)
        stack.append((y, d, b, ok_to[y], ok_b))
    while stack:
        x, d_in, prev, ok_x, ok_before = stack.pop()
        side = FROM_ABOVE if d_in == UP else FROM_BELOW
        cat = ls.cataclysm_at(x, side)
        for y in ls.neighbors(x):
            if y == prev:
                continue
            if cat is not None and y in cat.members:
                nd = DOWN if side == FROM_ABOVE else UP
                ok_to[y] = ok_before and cond(y, nd)
                stack.append((y, nd, x, ok_to[y], ok_before))
            else:
                d = ls.step_direction(x, y)
                ok_to[y] = ok_x and cond(y, d)
                stack.append((y, d, x, ok_to[y], ok_x))
    ends_ok = {}
    for e in m.ends:
        if e.attachment == b:
            ok = cond(b, e.direction)
        else:
            ok = ok_to[e.attachment]
        ends_ok[e.id] = ok and sec.tags.get(e.id, FLOW) == FLOW
    return ok_to, ends_ok


def base_definitional(m, sec):
    """Base from the characterization: every zigzag out of it runs with the current."""
    ls = leaf_space(m)
    col = coloring(m, sec)
    pts = []
    for b in ls.leaves:
        ok_to, ends_ok = _current_from(m, sec, col, b)
        if all(ok_to.values()) and all(ends_ok.values()):
            pts.append(b)
    if pts:
        return Base("leaves", tuple(pts))
    found = []
    for e in m.ends:
        if sec.tags.get(e.id, FLOW) != SOURCE:
            continue
        a = e.attachment
        away = DOWN if e.direction == UP else UP
        if a not in (col.lu if away == UP else col.rd):
            continue
        ok_to, ends_ok = _current_from(m, sec, col, a)
        others = [ok for eid, ok in ends_ok.items() if eid != e.id]
        if all(ok_to[x] for x in ok_to if x != a) and all(others):
            found.append(e.id)
    if len(found) == 1:
        return Base("end", (), found[0])
    return None


def _against_candidates(m, sec, col, lam):
    ls = leaf_space(m)
    in_lu, in_rd = lam in col.lu, lam in col.rd
    cands = []
    if in_lu:
        cands += [("leaf", v) for v in ls.down[lam] if v in col.lu]
        cat = next((c for c in ls.cataclysms if c.side == FROM_BELOW and lam in c.members), None)
        if cat:
            cands += [("leaf", v) for v in cat.members if v != lam and v in col.rd]
        cands += [("end", e.id) for e in m.ends
                  if e.attachment == lam and e.direction == DOWN and sec.tags.get(e.id) == SOURCE]
        frontier = not ls.down[lam]
    else:
        cands += [("leaf", v) for v in ls.up[lam] if v in col.rd]
        cat = next((c for c in ls.cataclysms if c.side == FROM_ABOVE and lam in c.members), None)
        if cat:
            cands += [("leaf", v) for v in cat.members if v != lam and v in col.lu]
        cands += [("end", e.id) for e in m.ends
                  if e.attachment == lam and e.direction == UP and sec.tags.get(e.id) == SOURCE]
        frontier = not ls.up[lam]
    return cands, frontier


def flow_against_current(m, sec, start=None):
    """Follow the current backwards until a source leaf or an end is reached."""
    ls = leaf_space(m)
    col = coloring(m, sec)
    lam = start or ls.leaves[0]
    seen = [lam]
    while True:
        if lam not in col.lu and lam not in col.rd:
            raise ValueError(f"{lam} is in neither region")
        cands, frontier = _against_candidates(m, sec, col, lam)
        if not cands:
            ends_here = [e for e in m.ends if e.attachment == lam]
            if frontier and not ends_here:
                raise WindowTruncated(f"current comes in through the undeclared frontier at {lam}")
            return Base("leaves", (lam,))
        if len(cands) > 1:
            raise AmbiguousAgainstCurrent(lam, [c[1] for c in cands])
        kind, target = cands[0]
        if kind == "end":
            return Base("end", (), target)
        if target in seen:
            raise LeafSpaceError(f"against-current walk revisits {target}")
        seen.append(target)
        lam = target


def base(m, sec):
    col = coloring(m, sec)
    both = col.lu & col.rd
    if both:
        return Base("leaves", tuple(sorted(both)))
    return flow_against_current(m, sec)


def classify(m, sec):
    col = coloring(m, sec)
    if col.lu & col.rd:
        return "S"
    b = base(m, sec)
    if b.kind == "end":
        return "E"
    raise TypeIViolation(f"section {sec.label or ''} has no LU∩RD yet its base is {b}: "
                         "a type (I) outcome, which cannot occur for genuine flows")


# -- properties ------------------------------------------------------------

def check_lu_or_rd(m, sec):
    col = coloring(m, sec)
    return [x for x in sorted(m.unstable) if x not in col.lu and x not in col.rd]


def check_up_sat(m, sec):
    ls = leaf_space(m)
    col = coloring(m, sec)
    bad = []
    for x in sorted(col.lu):
        bad += [(x, y) for y in sorted(ls.above_set(x)) if y not in col.lu]
    for x in sorted(col.rd):
        bad += [(x, y) for y in sorted(ls.below_set(x)) if y not in col.rd]
    return bad


def check_change_at_cataclysm(m, sec):
    ls = leaf_space(m)
    col = coloring(m, sec)
    bad = []
    for c in ls.cataclysms:
        region = col.lu if c.side == FROM_ABOVE else col.rd
        inside = [x for x in c.members if x in region]
        if len(inside) > 1:
            bad.append((c.side, tuple(inside)))
    return bad


def check_marker_sat(m, sec):
    col = coloring(m, sec)
    bad = []
    for lam, v in sorted(sec.values.items()):
        if v is None:
            continue
        span = marker_interval(m, v).leaves
        for region, name in ((col.lu, "LU"), (col.rd, "RD")):
            if lam in region:
                bad += [(name, lam, v, x) for x in span if x not in region]
    return bad


def check_no_sink_global(m, sec, starts=None):
    """Zigzags that start with a real with-current interval stay with it.

    One walk over the tree per start leaf; each state carries whether the
    path so far runs with the current and whether its first interval did.
    """
    ls = leaf_space(m)
    col = coloring(m, sec)

    def cond(x, d):
        return x in (col.lu if d == UP else col.rd)

    bad = []
    for a in (starts or ls.leaves):
        # (leaf, direction in, previous leaf, ok here, ok before, first ok here, first ok before)
        stack = []
        for y in ls.neighbors(a):
            d = ls.step_direction(a, y)
            ok = cond(a, d) and cond(y, d)
            stack.append((y, d, a, ok, cond(a, d), ok, False))
        while stack:
            x, d_in, prev, ok_x, ok_prev, first_x, first_prev = stack.pop()
            if first_x and not ok_x:
                bad.append((a, x))
            side = FROM_ABOVE if d_in == UP else FROM_BELOW
            cat = ls.cataclysm_at(x, side)
            for y in ls.neighbors(x):
                if y == prev:
                    continue
                if cat is not None and y in cat.members:
                    nd = DOWN if side == FROM_ABOVE else UP
                    ok = ok_prev and cond(y, nd)
                    stack.append((y, nd, x, ok, ok_prev, first_prev, first_prev))
                else:
                    d = ls.step_direction(x, y)
                    stack.append((y, d, x, ok_x and cond(y, d), ok_x, first_x, first_x))
    return sorted(bad)


def no_sink_by_paths(m, sec, starts=None):
    """Slow twin of check_no_sink_global: builds every zigzag explicitly."""
    ls = leaf_space(m)
    bad = []
    for a in (starts or ls.leaves):
        for b in ls.leaves:
            z = zigzag(ls, a, b)
            if not z.segments or len(z.segments[0]) < 2:
                continue
            first_ok, _ = is_with_current(m, sec, type(z)(z.breakpoints[:2], z.segments[:1], z.orientations[:1]))
            if first_ok and not is_with_current(m, sec, z)[0]:
                bad.append((a, b))
    return sorted(bad)


def check_base_shape(m, sec, b):
    """Empty list when the base has the shape the theory predicts."""
    ls = leaf_space(m)
    problems = []
    if b.kind == "leaves":
        pts = list(b.leaves)
        if not pts:
            return ["empty base"]
        for i, x in enumerate(pts):
            for y in pts[i + 1:]:
                if x != y and not (ls.is_below(x, y) or ls.is_below(y, x)):
                    problems.append(f"{x} and {y} are not on one line")
        lo = min(pts, key=lambda x: len(ls.below_set(x)))
        hi = max(pts, key=lambda x: len(ls.below_set(x)))
        inside = ls.above_set(lo) & ls.below_set(hi)
        if not problems and set(inside) != set(pts):
            problems.append("base is not an interval")
        if special_section(m, sec.point(pts[0])) != _as_flow(sec):
            problems.append("leaf base but the section is not special")
    else:
        if sec.tags.get(b.end) != SOURCE:
            problems.append("end base but the section is not fed from that end")
    return problems


def _as_flow(sec):
    from .sections import Section
    return Section(sec.values, {k: FLOW for k in sec.tags})
