"""Assembling windows from spans, and the seeded random corpus."""

import random

from .leafspace import leaf_space
from .model import (DOWN, FROM_ABOVE, FROM_BELOW, MINUS, PLUS, UNSTABLE, UP, Chain,
                    EndDecl, OrbitModel, PerfectFit, validate_model)
from .errors import ModelError


def assemble(unstable, spans, keys, fits=(), chains=(), ends=(), automorphisms=None, name=""):
    """Build a model from stable spans and a left-to-right key per stable leaf.

    spans maps each stable leaf to the unstable leaves it crosses, bottom to
    top; keys gives its horizontal position, which fixes the crossing order
    along every unstable leaf.
    """
    along_u = {u: [] for u in unstable}
    for s in sorted(spans, key=lambda s: (keys[s], s)):
        for u in spans[s]:
            along_u[u].append(s)
    return OrbitModel(
        unstable=tuple(unstable),
        stable=tuple(spans),
        crossings_along_stable={s: list(us) for s, us in spans.items()},
        crossings_along_unstable=along_u,
        perfect_fits=tuple(PerfectFit(*f) for f in fits),
        chains=tuple(Chain(UNSTABLE, tuple(c[0]), c[1], tuple(c[2])) for c in chains),
        ends=tuple(EndDecl(*e) for e in ends),
        automorphisms=dict(automorphisms or {}),
        name=name,
    )


def periodic_line(n, name="line"):
    """A line of n leaves, each pinching one marker above-left and one below-right.

    The shift u_k -> u_(k+1) is declared as the automorphism "g".
    """
    u = [f"u{k}" for k in range(n)]
    spans, keys, fits = {"bb": list(u), "tb": list(u)}, {"bb": -1, "tb": 1}, []
    for k in range(n - 1):
        spans[f"a{k}"] = u[k + 1:]
        keys[f"a{k}"] = -10 - k
        fits.append((f"a{k}", MINUS, u[k], MINUS))
    for k in range(1, n):
        spans[f"b{k}"] = u[:k]
        keys[f"b{k}"] = 10 * n - k
        fits.append((f"b{k}", PLUS, u[k], PLUS))
    shift = {u[k]: u[k + 1] for k in range(n - 1)}
    shift.update({f"a{k}": f"a{k + 1}" for k in range(n - 2)})
    shift.update({f"b{k}": f"b{k + 1}" for k in range(1, n - 1)})
    shift.update({"bb": "bb", "tb": "tb", "bottom": "bottom", "top": "top"})
    ends = [("bottom", u[0], DOWN), ("top", u[-1], UP)]
    return assemble(u, spans, keys, fits, ends=ends, automorphisms={"g": shift}, name=name)


class _Grid:
    """Grows a window one height at a time.

    Stable leaves are vertical columns and each unstable leaf is a run of
    adjacent columns at one height.  Going up, a run is kept, split around
    one of its columns, or stopped; neighbouring runs from different
    components may merge through a new column; the outermost runs may gain
    or lose a column.  Any column end that is not at the edge of the window
    is given a perfect fit, so no marker escapes through the interior.
    """

    def __init__(self, rng, max_leaves, chains):
        self.rng = rng
        self.max_leaves = max_leaves
        self.chains_ok = chains
        self.keys, self.spans = {}, {}
        self.fits, self.chains = [], []
        self.leaves, self.parent = [], {}

    def column(self, key):
        s = f"s{len(self.keys)}"
        self.keys[s] = key
        self.spans[s] = []
        return s

    def leaf(self, cols, comp=None):
        u = f"u{len(self.leaves)}"
        self.leaves.append(u)
        self.parent[u] = comp or u
        for c in cols:
            self.spans[c].append(u)
        return u

    def find(self, u):
        while self.parent[u] != u:
            u = self.parent[u]
        return u

    def components(self, leaves):
        return {self.find(u) for u in leaves}

    def first_row(self):
        runs, x = [], 0.0
        for _ in range(1 if self.max_leaves < 4 else self.rng.randint(1, 2)):
            cols = []
            for _ in range(self.rng.randint(2, 4)):
                cols.append(self.column(x))
                x += 1.0
            x += 1.0
            runs.append((cols, self.leaf(cols)))
        return runs

    def next_row(self, runs):
        rng = self.rng
        room = self.max_leaves - len(self.leaves)
        pieces = []          # dicts: cols, below, split (gap column) or None
        single = len(self.components(u for _, u in runs)) == 1
        for cols, u in runs:
            r = rng.random()
            if self.chains_ok and len(cols) >= 3 and r < 0.35:
                gap = rng.randint(1, len(cols) - 2)
                pieces.append({"cols": cols[:gap], "below": u, "split": cols[gap]})
                pieces.append({"cols": cols[gap + 1:], "below": u, "split": cols[gap]})
            elif r > 0.93 and len(runs) > 1 and single:
                continue
            else:
                pieces.append({"cols": list(cols), "below": u, "split": None})
        if not pieces or len(pieces) > room:
            return None
        merged = [pieces[0]]
        for pc in pieces[1:]:
            prev = merged[-1]
            if (self.chains_ok and prev["split"] is None and pc["split"] is None
                    and "members" not in prev
                    and self.find(prev["below"]) != self.find(pc["below"])
                    and rng.random() < 0.6):
                g = self.column((self.keys[prev["cols"][-1]] + self.keys[pc["cols"][0]]) / 2)
                merged[-1] = {"cols": prev["cols"] + [g] + pc["cols"], "below": prev["below"],
                              "split": None, "members": [prev["below"], pc["below"]], "link": g}
            else:
                merged.append(pc)
        pieces = merged
        first, last = pieces[0], pieces[-1]
        plain = lambda pc: pc["split"] is None and "members" not in pc
        edge_l = plain(first) and first["below"] == runs[0][1] and first["cols"][0] == runs[0][0][0]
        right_below = last.get("members", [last["below"]])[-1]
        edge_r = plain(last) and right_below == runs[-1][1] and last["cols"][-1] == runs[-1][0][-1]
        grown, dropped = [], []
        if edge_l and rng.random() < 0.25:
            c = self.column(min(self.keys.values()) - 1.0)
            first["cols"].insert(0, c)
            grown.append((c, first["below"], MINUS))
        elif edge_l and len(first["cols"]) >= 3 and rng.random() < 0.25:
            dropped.append((first["cols"].pop(0), first, MINUS))
        if edge_r and rng.random() < 0.25:
            c = self.column(max(self.keys.values()) + 1.0)
            last["cols"].append(c)
            grown.append((c, right_below, PLUS))
        elif (edge_r and len(last["cols"]) >= 3
              and not (last is first and dropped) and rng.random() < 0.25):
            dropped.append((last["cols"].pop(), last, PLUS))
        out = []
        for pc in pieces:
            pc["leaf"] = self.leaf(pc["cols"], self.find(pc["below"]))
            if "members" in pc:
                a, b = pc["members"]
                self.parent[self.find(b)] = self.find(a)
                self.fits += [(pc["link"], MINUS, a, PLUS), (pc["link"], MINUS, b, MINUS)]
                self.chains.append(([a, b], FROM_ABOVE, [pc["link"]]))
            out.append((pc["cols"], pc["leaf"]))
        for c, below, sign in grown:
            self.fits.append((c, MINUS, below, sign))
        for c, pc, sign in dropped:
            self.fits.append((c, PLUS, pc["leaf"], sign))
        for a, b in zip(pieces, pieces[1:]):
            if a["split"] is not None and a["split"] == b["split"]:
                self.fits += [(a["split"], PLUS, a["leaf"], PLUS), (a["split"], PLUS, b["leaf"], MINUS)]
                self.chains.append(([a["leaf"], b["leaf"]], FROM_BELOW, [a["split"]]))
        return out

    def build(self, name):
        runs = self.first_row()
        while len(self.leaves) < self.max_leaves:
            nxt = self.next_row(runs)
            if nxt is None or (len(self.leaves) >= 6 and self.rng.random() < 0.08):
                break
            runs = nxt
        m = assemble(self.leaves, self.spans, self.keys, self.fits, self.chains, name=name)
        ls = leaf_space(m)
        ends = []
        for u in ls.leaves:
            if not ls.up[u]:
                ends.append((f"top_{u}", u, UP))
            if not ls.down[u]:
                ends.append((f"bot_{u}", u, DOWN))
        return assemble(self.leaves, self.spans, self.keys, self.fits, self.chains, ends, name=name)


def _connected(m):
    ls = leaf_space(m)
    seen, todo = {ls.leaves[0]}, [ls.leaves[0]]
    while todo:
        for y in ls.neighbors(todo.pop()):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(ls.leaves)


def generate_corpus(seed, count, max_leaves):
    """count valid random windows with at most max_leaves unstable leaves.

    Deterministic in seed.  Chains need a few leaves to be interesting, so
    below six leaves the windows are chain-free.  Every tenth model (when
    there is room) is a periodic line carrying a shift automorphism.
    """
    if count < 1 or max_leaves < 3:
        raise ValueError("need count >= 1 and max_leaves >= 3")
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        name = f"gen{seed}_{len(out)}"
        if max_leaves >= 6 and len(out) % 10 == 9:
            out.append(periodic_line(rng.randint(4, min(max_leaves, 12)), name))
            continue
        grid = _Grid(rng, max_leaves, chains=max_leaves >= 6)
        try:
            m = grid.build(name)
            ok = _connected(m) and not validate_model(m)
        except (ModelError, ValueError):
            ok = False
        if ok:
            out.append(m)
    return out
