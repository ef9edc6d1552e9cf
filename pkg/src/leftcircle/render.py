"""Static SVG pictures: the orbit window, a coloured leaf space, and the circle of sections.

Output is plain text built in a fixed order with rounded coordinates, so
identical inputs give byte-identical files.
"""

import math
from xml.sax.saxutils import escape

from .current import coloring
from .leafspace import leaf_space
from .sections import circular_order

STABLE = "#1f4fd1"       # blue
UNSTABLE = "#d12a1f"     # red
NONMARKER = "#f08a00"    # orange
LU_COLOR = "#f2d43a"     # yellow
RD_COLOR = "#3aa655"     # green
GRAY = "#888888"

UNIT = 48
PAD = 40


def _f(x):
    return f"{x:.1f}".rstrip("0").rstrip(".")


class _Svg:
    def __init__(self, width, height, title):
        self.width, self.height = width, height
        self.parts = [f"<title>{escape(title)}</title>"]

    def line(self, x1, y1, x2, y2, color, width=2, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                          f'stroke="{color}" stroke-width="{width}"{d}/>')

    def circle(self, x, y, r, fill, stroke="none"):
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}" stroke="{stroke}"/>')

    def half(self, x, y, r, left, right):
        self.parts.append(f'<path d="M {_f(x)} {_f(y - r)} A {_f(r)} {_f(r)} 0 0 0 {_f(x)} {_f(y + r)} Z" fill="{left}"/>')
        self.parts.append(f'<path d="M {_f(x)} {_f(y - r)} A {_f(r)} {_f(r)} 0 0 1 {_f(x)} {_f(y + r)} Z" fill="{right}"/>')

    def path(self, points, color, width=2):
        d = " ".join(("M" if i == 0 else "L") + f" {_f(x)} {_f(y)}" for i, (x, y) in enumerate(points))
        self.parts.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="{width}"/>')

    def text(self, x, y, s, size=11, anchor="middle", color="#000"):
        self.parts.append(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" font-family="monospace" '
                          f'text-anchor="{anchor}" fill="{color}">{escape(str(s))}</text>')

    def render(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, f'<rect width="100%" height="100%" fill="white"/>'] + self.parts + ["</svg>"]) + "\n"


def _heights(ls):
    """Longest chain from a minimal leaf, so every edge climbs at least one row."""
    h = {}
    for x in sorted(ls.leaves, key=lambda x: len(ls.below_set(x))):
        h[x] = max((h[y] + 1 for y in ls.down[x]), default=0)
    return h


def _stable_columns(m):
    """A left-to-right order on stable leaves compatible with every crossing order."""
    after = {s: set() for s in m.stable}
    for u in m.unstable:
        row = m.crossings_along_unstable[u]
        for a, b in zip(row, row[1:]):
            after[a].add(b)
    indeg = {s: 0 for s in m.stable}
    for a in after:
        for b in after[a]:
            indeg[b] += 1
    ready = sorted(s for s in m.stable if indeg[s] == 0)
    out = []
    while ready:
        s = ready.pop(0)
        out.append(s)
        for b in sorted(after[s]):
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
        ready.sort()
    out += sorted(s for s in m.stable if s not in out)
    return {s: i for i, s in enumerate(out)}


def render_orbit(m):
    """Stable leaves as blue columns, unstable leaves as red rows, fits dashed."""
    ls = leaf_space(m)
    h = _heights(ls)
    col = _stable_columns(m)
    top = max(h.values(), default=0)
    width = PAD * 2 + UNIT * max(len(col), 1)
    height = PAD * 2 + UNIT * (top + 1)
    svg = _Svg(width, height, f"orbit window {m.name}")

    def X(i):
        return PAD + UNIT * (i + 0.5)

    def Y(k):
        return height - PAD - UNIT * (k + 0.5)

    span = {}
    for u in sorted(m.unstable):
        xs = [col[s] for s in m.crossings_along_unstable[u]]
        lo, hi = (min(xs), max(xs)) if xs else (0, 0)
        span[u] = (X(lo) - UNIT * 0.4, X(hi) + UNIT * 0.4)
        svg.line(span[u][0], Y(h[u]), span[u][1], Y(h[u]), UNSTABLE, 3)
        svg.text(span[u][0] - 4, Y(h[u]) + 4, u, anchor="end", color=UNSTABLE)
    ends_at = {}
    for s in sorted(m.stable):
        us = m.crossings_along_stable[s]
        lo, hi = min(h[u] for u in us), max(h[u] for u in us)
        y1, y2 = Y(lo) + UNIT * 0.35, Y(hi) - UNIT * 0.35
        ends_at[s] = (y1, y2)
        svg.line(X(col[s]), y1, X(col[s]), y2, STABLE, 2)
        svg.text(X(col[s]), y2 - 4, s, color=STABLE)
    for pf in sorted(m.perfect_fits):
        sx = X(col[pf.stable])
        sy = ends_at[pf.stable][0] if pf.stable_sign == "minus" else ends_at[pf.stable][1]
        ux = span[pf.unstable][0] if pf.unstable_sign == "minus" else span[pf.unstable][1]
        svg.line(sx, sy, ux, Y(h[pf.unstable]), GRAY, 1, dash="3,3")
    return svg.render()


def _tree_layout(ls):
    h = _heights(ls)
    rows = {}
    for x in sorted(ls.leaves):
        rows.setdefault(h[x], []).append(x)
    pos = {}
    for k, xs in rows.items():
        for i, x in enumerate(xs):
            pos[x] = (i, k)
    return pos, max(len(v) for v in rows.values()), max(rows)


def render_coloring(m, sec):
    """Leaf space with each leaf filled yellow (LU), green (RD), or split for both."""
    ls = leaf_space(m)
    col = coloring(m, sec)
    pos, wide, top = _tree_layout(ls)
    width = PAD * 2 + UNIT * wide
    height = PAD * 2 + UNIT * (top + 1)
    svg = _Svg(width, height, f"LU/RD colouring on {m.name}: {sec.label}")

    def P(x):
        i, k = pos[x]
        return PAD + UNIT * (i + 0.5), height - PAD - UNIT * (k + 0.5)

    for x in ls.leaves:
        for y in sorted(ls.up[x]):
            (x1, y1), (x2, y2) = P(x), P(y)
            svg.line(x1, y1, x2, y2, GRAY, 2)
    for c in ls.cataclysms:
        pts = sorted(P(x) for x in c.members)
        svg.line(pts[0][0], pts[0][1], pts[-1][0], pts[-1][1], GRAY, 1, dash="2,4")
    for x in ls.leaves:
        cx, cy = P(x)
        c = col.color(x)
        left = LU_COLOR if c in ("LU", "BOTH") else "white"
        right = RD_COLOR if c in ("RD", "BOTH") else "white"
        if c == "LU":
            right = LU_COLOR
        if c == "RD":
            left = RD_COLOR
        svg.half(cx, cy, 12, left, right)
        svg.circle(cx, cy, 12, "none", stroke="#333")
        v = sec.values.get(x)
        svg.text(cx, cy + 26, f"{x}:{'NM' if v is None else v}", size=9)
    return svg.render()


def _arc(cx, cy, r, a0, a1):
    x0, y0 = cx + r * math.cos(a0), cy + r * math.sin(a0)
    x1, y1 = cx + r * math.cos(a1), cy + r * math.sin(a1)
    large = 1 if a1 - a0 > math.pi else 0
    return f"M {_f(x0)} {_f(y0)} A {_f(r)} {_f(r)} 0 {large} 1 {_f(x1)} {_f(y1)}"


def render_circle(m, sections, values=None):
    """Sections placed around a circle in their cyclic order.

    Each point is drawn blue if the section sits on a marker at the first
    unstable leaf and orange if it is the nonmarker point there.  With ct
    values given, consecutive sections sharing a value are joined by a
    gray arc outside the circle labelled with that value.
    """
    circle = circular_order(m, sections)
    order = circle.cyclic if circle.cyclic is not None else list(range(len(sections)))
    size = 2 * PAD + 420
    svg = _Svg(size, size, f"circle of sections on {m.name}")
    cx = cy = size / 2
    r = 150
    step = 2 * math.pi / max(len(order), 1)
    angle = [step * slot - math.pi / 2 for slot in range(len(order))]
    svg.circle(cx, cy, r, "none", stroke=UNSTABLE)
    if values is not None and order:
        runs = []
        for slot, i in enumerate(order):
            v = values[i]
            key = str(v) if getattr(v, "status", "ok") == "ok" else "undecided"
            if runs and runs[-1][0] == key:
                runs[-1][2] = slot
            else:
                runs.append([key, slot, slot])
        for key, lo, hi in runs:
            a0, a1 = angle[lo] - step * 0.4, angle[hi] + step * 0.4
            svg.parts.append(f'<path d="{_arc(cx, cy, r + 14, a0, a1)}" fill="none" '
                             f'stroke="{GRAY}" stroke-width="4"/>')
            mid = (a0 + a1) / 2
            svg.text(cx + (r + 34) * math.cos(mid), cy + (r + 34) * math.sin(mid) + 4, key, size=9)
    first = m.unstable[0] if m.unstable else None
    for slot, i in enumerate(order):
        a = angle[slot]
        x, y = cx + r * math.cos(a), cy + r * math.sin(a)
        s = sections[i]
        on_marker = first is not None and s.values.get(first) is not None
        svg.circle(x, y, 5, STABLE if on_marker else NONMARKER)
        svg.text(cx + (r - 16) * math.cos(a), cy + (r - 16) * math.sin(a) + 3,
                 s.label.replace("special ", "") or str(i), size=7)
    if circle.degenerate:
        svg.text(cx, cy, "order partly unresolved", size=10, color=GRAY)
    return svg.render()


VIEWS = ("orbit", "coloring", "circle")


def render_views(m, views, coloring_section=None, sections=None, values=None):
    """{view name: svg text} for the requested views, in the order given."""
    out = {}
    for v in views:
        if v == "orbit":
            out[v] = render_orbit(m)
        elif v == "coloring":
            if coloring_section is None:
                raise ValueError("the coloring view needs a section")
            out[v] = render_coloring(m, coloring_section)
        elif v == "circle":
            out[v] = render_circle(m, sections or [], values)
        else:
            raise ValueError(f"unknown view {v!r}")
    return out
