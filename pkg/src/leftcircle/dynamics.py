"""Action of a window automorphism on sections, and fixed points on the circle."""

from dataclasses import dataclass

from .ct import ct
from .errors import SampleTooSparse
from .leafspace import leaf_space
from .master import SymbolicPoint, master_sets
from .model import IDENTITY, automorphism_power
from .sections import Section, circular_order, limit_section_at_end, special_section, triple_orientation

ATTRACTOR = "attractor"
REPELLOR = "repellor"
UNDETERMINED = "undetermined"

FRONTIER_MARGIN = 2


def _power_map(m, g, k):
    if g == IDENTITY:
        return automorphism_power(m, g, 1)
    return automorphism_power(m, g, k)


def act_on_section(m, g, sec, k=1):
    """The section g^k . sec, defined wherever g^k reaches inside the window."""
    mp = _power_map(m, g, k)
    vals = {}
    for leaf, v in sec.values.items():
        if leaf not in mp:
            continue
        if v is not None and v not in mp:
            continue
        vals[mp[leaf]] = None if v is None else mp[v]
    tags = {mp.get(e, e): t for e, t in sec.tags.items()}
    return Section(vals, tags, label=f"{g}^{k} {sec.label}".strip())


def act_on_point(m, g, p, k=1):
    """g acting on a symbolic point through any member of its master set."""
    mp = _power_map(m, g, k)
    ms = master_sets(m)
    for x in ms.classes.get(p.id, ()):
        key = x[4:] if x.startswith("end:") else x
        if key in mp:
            img = mp[key]
            return SymbolicPoint(ms.class_of[f"end:{img}" if x.startswith("end:") else img])
    return None


def _interior(m):
    """Leaves at distance more than FRONTIER_MARGIN from the ends of the window."""
    ls = leaf_space(m)
    edge = [x for x in ls.leaves if len(ls.neighbors(x)) <= 1]
    dist = {x: 0 for x in edge}
    queue = list(edge)
    while queue:
        x = queue.pop(0)
        for y in ls.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return {x for x in ls.leaves if dist.get(x, 0) > FRONTIER_MARGIN}


def agree_on_overlap(m, a, b, leaves=None):
    keep = _interior(m) if leaves is None else set(leaves)
    shared = [x for x in a.values if x in b.values and x in keep]
    if not shared and leaves is None:
        # window too short for a margin: compare wherever both are defined
        shared = [x for x in a.values if x in b.values]
    if not shared:
        return False
    if any(a.values[x] != b.values[x] for x in shared):
        return False
    return all(a.tags.get(e) == b.tags.get(e) for e in a.tags if e in b.tags)


def is_fixed(m, g, k, sec):
    return agree_on_overlap(m, act_on_section(m, g, sec, k), sec)


def check_equivariance(m, g, p):
    """special_section at g(p) agrees with g . special_section(p) away from the frontier."""
    mp = _power_map(m, g, 1)
    if p.leaf not in mp or (p.marker is not None and p.marker not in mp):
        return None
    from .sections import FiberPoint
    gp = FiberPoint(mp[p.leaf], None if p.marker is None else mp[p.marker])
    return agree_on_overlap(m, special_section(m, gp), act_on_section(m, g, special_section(m, p)))


def equivariance_failures(m, g, p):
    """Identities special/colouring/base/ct that g breaks at p, away from the frontier.

    Returns None when g does not reach p inside the window.
    """
    from .current import base, coloring
    from .sections import FiberPoint
    mp = _power_map(m, g, 1)
    if p.leaf not in mp or (p.marker is not None and p.marker not in mp):
        return None
    gp = FiberPoint(mp[p.leaf], None if p.marker is None else mp[p.marker])
    sec, gsec = special_section(m, p), special_section(m, gp)
    inner = _interior(m)
    pairs = [(x, mp[x]) for x in sorted(inner) if x in mp and mp[x] in inner]
    bad = []
    if not agree_on_overlap(m, gsec, act_on_section(m, g, sec)):
        bad.append("special")
    col, gcol = coloring(m, sec), coloring(m, gsec)
    if any(col.color(x) != gcol.color(y) for x, y in pairs):
        bad.append("lu/rd")
    b, gb = base(m, sec), base(m, gsec)
    if b.kind != gb.kind:
        bad.append("base")
    elif b.kind == "end":
        if mp.get(b.end, b.end) != gb.end:
            bad.append("base")
    elif any((x in b.leaves) != (y in gb.leaves) for x, y in pairs):
        bad.append("base")
    c, gc = ct(m, sec), ct(m, gsec)
    if c.status == gc.status == "ok":
        moved = act_on_point(m, g, c.point)
        if moved is not None and moved != gc.point:
            bad.append("ct")
    return bad


@dataclass
class FixedPointRecord:
    section: Section
    ct: object
    classification: str
    position: int

    def line(self):
        return f"{self.position}: {self.section.label or '-'}  ct={self.ct}  {self.classification}"


def fixed_end_sections(m, g, k):
    mp = _power_map(m, g, k)
    return [limit_section_at_end(m, e.id, check=False) for e in m.ends if mp.get(e.id) == e.id]


def periodic_sections(m, g, k, sample):
    """Sections fixed by g^k among the sample and the end limits, with their dynamics."""
    secs = list(getattr(sample, "sections", sample))
    for s in fixed_end_sections(m, g, k):
        if s not in secs:
            secs.append(s)
    circle = circular_order(m, secs)
    if circle.cyclic is None:
        raise SampleTooSparse("no three sections could be ordered")
    cyc = list(circle.cyclic)
    fixed = {i for i in cyc if is_fixed(m, g, k, secs[i])}
    records = []
    for i in cyc:
        if i not in fixed:
            continue
        pos = cyc.index(i)
        p = secs[i]
        verdicts = []
        for step in (1, -1):
            for off in range(1, len(cyc)):
                j = cyc[(pos + step * off) % len(cyc)]
                if j in fixed:
                    break
                moved = act_on_section(m, g, secs[j], k)
                if step == 1:
                    o = triple_orientation(m, p, moved, secs[j])
                else:
                    o = triple_orientation(m, secs[j], moved, p)
                if o:
                    verdicts.append(o)
                    break
        kind = UNDETERMINED
        if verdicts and all(v == 1 for v in verdicts):
            kind = ATTRACTOR
        elif verdicts and all(v == -1 for v in verdicts):
            kind = REPELLOR
        records.append(FixedPointRecord(p, ct(m, p), kind, pos))
    return records


def alternates(records):
    kinds = [r.classification for r in sorted(records, key=lambda r: r.position)]
    if len(kinds) < 2 or UNDETERMINED in kinds:
        return True
    return all(x != y for x, y in zip(kinds, kinds[1:] + kinds[:1]))
