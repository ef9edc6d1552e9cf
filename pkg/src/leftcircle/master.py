"""Master sets, symbolic boundary points, the maps psi / i / f_end, ql-extremality."""

from dataclasses import dataclass, field

from .errors import WindowTruncated
from .leafspace import leaf_space
from .model import MINUS, PLUS, LeafEnd, automorphism_power
from .sections import _seed, quadrant_of


def gap_label(end_id):
    return f"end:{end_id}"


@dataclass(frozen=True)
class SymbolicPoint:
    """A point of the sphere at infinity, known only by its master set."""
    id: str

    def __str__(self):
        return self.id


@dataclass
class MasterSets:
    classes: dict                 # id -> sorted tuple of leaf ids and end-gap labels
    class_of: dict                # leaf id or gap label -> id
    boundary: dict = field(default_factory=dict)   # id -> sorted LeafEnds and gap labels

    def point(self, x):
        return SymbolicPoint(self.class_of[x])

    def nontrivial(self):
        return {k: v for k, v in self.classes.items() if len(v) > 1}


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=str)] = min(ra, rb, key=str)


def master_sets(m):
    """Components of the shared-endpoint graph on leaf ends and frontier gaps.

    The two ends of one leaf are always identified, since a leaf and its
    endpoints land on one point of the sphere.  A declared end's gap joins
    its boundary hint, or failing that the marker escaping through it.
    """
    cached = m._cache.get("master")
    if cached is not None:
        return cached
    uf = _UnionFind()
    leaves = list(m.unstable) + list(m.stable)
    for x in leaves:
        uf.add(LeafEnd(x, MINUS))
        uf.add(LeafEnd(x, PLUS))
        uf.union(LeafEnd(x, MINUS), LeafEnd(x, PLUS))
    for pf in m.perfect_fits:
        uf.union(pf.stable_end, pf.unstable_end)
    for c in m.chains:
        for a, b in zip(c.leaves, c.leaves[1:]):
            uf.union(LeafEnd(a, PLUS), LeafEnd(b, MINUS))
    for e in m.ends:
        g = gap_label(e.id)
        uf.add(g)
        anchor = e.boundary_hint or _seed(m, e)
        if anchor is not None:
            uf.union(g, LeafEnd(anchor, PLUS))
    groups = {}
    for node in uf.parent:
        groups.setdefault(uf.find(node), []).append(node)
    classes, class_of, boundary = {}, {}, {}
    for nodes in groups.values():
        names = sorted({n.leaf if isinstance(n, LeafEnd) else n for n in nodes})
        leaf_names = [n for n in names if not n.startswith("end:")]
        cid = f"ms:{leaf_names[0]}" if leaf_names else names[0]
        classes[cid] = tuple(names)
        boundary[cid] = tuple(sorted(nodes, key=str))
        for n in names:
            class_of[n] = cid
    ms = MasterSets(dict(sorted(classes.items())), class_of, boundary)
    m._cache["master"] = ms
    return ms


def psi(m, p, sign=PLUS):
    """Marker -> its stable leaf; nonmarker -> an end of the unstable leaf."""
    if p.marker is not None:
        return p.marker
    return LeafEnd(p.leaf, sign)


def i_map(m, p, sign=PLUS):
    target = psi(m, p, sign)
    ms = master_sets(m)
    return ms.point(target.leaf if isinstance(target, LeafEnd) else target)


def f_end(m, end_id):
    """Boundary class an end converges to.

    Raises WindowTruncated when that class also swallows another end's gap,
    which means the window cannot tell the two ends apart.
    """
    e = m.end(end_id)
    ms = master_sets(m)
    cid = ms.class_of[gap_label(e.id)]
    others = [x for x in ms.classes[cid] if x.startswith("end:") and x != gap_label(e.id)]
    if others:
        raise WindowTruncated(f"{end_id} and {others[0][4:]} land in one class {cid}")
    return SymbolicPoint(cid)


def i_hat(m, end_id):
    return f_end(m, end_id)


def check_e_identification(m):
    """Leaf ends share a symbolic point exactly when they share a master set."""
    ms = master_sets(m)
    bad = []
    for cid, nodes in ms.boundary.items():
        for n in nodes:
            name = n.leaf if isinstance(n, LeafEnd) else n
            if ms.class_of[name] != cid:
                bad.append((str(n), cid))
    for pf in m.perfect_fits:
        if ms.class_of[pf.stable] != ms.class_of[pf.unstable]:
            bad.append((pf.stable, pf.unstable))
    return bad


def check_master_finite(m):
    """Tripwire: an automorphism moving a master set onto an overlapping one."""
    ms = master_sets(m)
    bad = []
    for g in sorted(m.automorphisms):
        mp = automorphism_power(m, g, 1)
        for cid, members in ms.classes.items():
            leaves = [x for x in members if x in mp]
            img = {mp[x] for x in leaves}
            if img & set(members) and not img <= set(members):
                bad.append((g, cid))
    return bad


@dataclass
class QLReport:
    ok: bool
    failures: list

    def conditions(self):
        return sorted({f[0] for f in self.failures})

    def lines(self):
        if self.ok:
            return ["ql-extremal: yes"]
        return ["ql-extremal: no"] + [f"  condition ({c}) at {leaf}: {why}" for c, leaf, why in self.failures]


def _extremal_marker(m, s, leaf):
    """Is s left- or rightmost at leaf among markers pinching to one of its endpoints?"""
    order = m.crossings_along_unstable[leaf]
    for pf in m.fits_of_stable(s):
        q = quadrant_of(m, pf)
        rivals = [f.stable for f in m.fits_at(pf.unstable, pf.unstable_sign)
                  if quadrant_of(m, f).vertical == q.vertical and f.stable in order]
        if len(rivals) < 2:
            continue
        pos = sorted(order.index(r) for r in rivals)
        if order.index(s) not in (pos[0], pos[-1]):
            return f"{s} is interior among {sorted(rivals)} pinching to {pf.unstable_end}"
    return None


def is_ql_extremal(m, sec, z):
    failures = []
    for seg in z.segments:
        for x in seg:
            v = sec.values.get(x)
            if v is not None:
                why = _extremal_marker(m, v, x)
                if why:
                    failures.append((1, x, why))
        for a, b in zip(seg, seg[1:]):
            if sec.values.get(a) is None and sec.values.get(b) is None:
                failures.append((2, a, f"nonmarker on the whole interval [{a}, {b}]"))
    # a ray's last breakpoint is where it leaves the window, not a turn
    for x in z.breakpoints[1:-1]:
        if sec.values.get(x) is not None:
            failures.append((3, x, f"on marker {sec.values[x]} at a breakpoint"))
    return QLReport(not failures, failures)


@dataclass
class QLMasterRecord:
    ok: bool
    value: SymbolicPoint
    witnesses: list


def ql_implies_master(m, sec, z):
    """Check that a ql-extremal section maps every leaf of z to one master set."""
    rep = is_ql_extremal(m, sec, z)
    if not rep.ok:
        raise ValueError("section is not ql-extremal over this zigzag: " + "; ".join(rep.lines()[1:]))
    pts = [(x, i_map(m, sec.point(x))) for x in z.leaves]
    first = pts[0][1]
    odd = [(x, p) for x, p in pts if p != first]
    return QLMasterRecord(not odd, first, [(pts[0][0], first)] + odd[:1])


def base_zigzag(m, b):
    """Zigzag spanning a leaf-kind base, from its lowest leaf to its highest."""
    from .leafspace import zigzag
    ls = leaf_space(m)
    lo = min(b.leaves, key=lambda x: (len(ls.below_set(x)), x))
    hi = max(b.leaves, key=lambda x: (len(ls.below_set(x)), x))
    return zigzag(ls, lo, hi)
