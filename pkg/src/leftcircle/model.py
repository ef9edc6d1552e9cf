"""Orbit-space window models: types, model files, validation, automorphisms."""

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations

from .errors import ModelError

UNSTABLE = "unstable"
STABLE = "stable"
PLUS = "plus"
MINUS = "minus"
FROM_ABOVE = "from_above"
FROM_BELOW = "from_below"
UP = "up"
DOWN = "down"
IDENTITY = "identity"


@dataclass(frozen=True, order=True)
class LeafEnd:
    leaf: str
    sign: str

    def __str__(self):
        return f"{self.leaf}{'+' if self.sign == PLUS else '-'}"


@dataclass(frozen=True, order=True)
class PerfectFit:
    stable: str
    stable_sign: str
    unstable: str
    unstable_sign: str

    @property
    def stable_end(self):
        return LeafEnd(self.stable, self.stable_sign)

    @property
    def unstable_end(self):
        return LeafEnd(self.unstable, self.unstable_sign)

    def to_json(self):
        return {"stable": self.stable, "stable_sign": self.stable_sign,
                "unstable": self.unstable, "unstable_sign": self.unstable_sign}


@dataclass(frozen=True)
class Chain:
    """Nonseparated unstable leaves, listed left to right.

    `links[i]` is the stable leaf making perfect fits with leaves[i] and
    leaves[i+1].
    """
    family: str
    leaves: tuple
    side: str
    links: tuple = ()

    def to_json(self):
        return {"family": self.family, "leaves": list(self.leaves),
                "side": self.side, "links": list(self.links)}


@dataclass(frozen=True)
class EndDecl:
    id: str
    attachment: str
    direction: str
    boundary_hint: str = None

    def to_json(self):
        out = {"id": self.id, "attachment": self.attachment, "direction": self.direction}
        if self.boundary_hint is not None:
            out["boundary_hint"] = self.boundary_hint
        return out


@dataclass(eq=False)
class OrbitModel:
    unstable: tuple
    stable: tuple
    crossings_along_stable: dict
    crossings_along_unstable: dict
    perfect_fits: tuple = ()
    chains: tuple = ()
    ends: tuple = ()
    automorphisms: dict = field(default_factory=dict)
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, OrbitModel):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return id(self)

    def family(self, leaf):
        if leaf in self._leaf_families():
            return self._leaf_families()[leaf]
        raise ModelError(f"unknown leaf {leaf!r}")

    def _leaf_families(self):
        fam = self._cache.get("families")
        if fam is None:
            fam = {u: UNSTABLE for u in self.unstable}
            fam.update({s: STABLE for s in self.stable})
            self._cache["families"] = fam
        return fam

    def crosses(self, s, u):
        pairs = self._cache.get("pairs")
        if pairs is None:
            pairs = {(a, b) for a, us in self.crossings_along_stable.items() for b in us}
            self._cache["pairs"] = pairs
        return (s, u) in pairs

    def fits_at(self, u, sign):
        """Perfect fits attached to the given end of unstable leaf u."""
        idx = self._cache.get("fits_by_end")
        if idx is None:
            idx = {}
            for pf in self.perfect_fits:
                idx.setdefault((pf.unstable, pf.unstable_sign), []).append(pf)
            self._cache["fits_by_end"] = idx
        return idx.get((u, sign), [])

    def fits_of_stable(self, s):
        return [pf for pf in self.perfect_fits if pf.stable == s]

    def end(self, end_id):
        for e in self.ends:
            if e.id == end_id:
                return e
        raise ModelError(f"unknown end {end_id!r}")

    def to_json(self):
        return {
            "unstable": sorted(self.unstable),
            "stable": sorted(self.stable),
            "crossings_along_stable": {k: list(v) for k, v in sorted(self.crossings_along_stable.items())},
            "crossings_along_unstable": {k: list(v) for k, v in sorted(self.crossings_along_unstable.items())},
            "perfect_fits": [pf.to_json() for pf in sorted(self.perfect_fits)],
            "chains": [c.to_json() for c in sorted(self.chains, key=lambda c: (c.side, c.leaves))],
            "ends": [e.to_json() for e in sorted(self.ends, key=lambda e: e.id)],
            "automorphisms": {g: dict(sorted(mp.items())) for g, mp in sorted(self.automorphisms.items())},
        }


def serialize_model(m):
    return json.dumps(m.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _no_duplicate_keys(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ModelError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def _expect(cond, message, location):
    if not cond:
        raise ModelError(message, location)


def _id_list(value, location):
    _expect(isinstance(value, list), "expected an array", location)
    for i, x in enumerate(value):
        _expect(isinstance(x, str), "identifiers must be strings", f"{location}[{i}]")
    return value


def parse_model(text, name=""):
    """Build an OrbitModel from model-file text (str or bytes).

    Only structural checks happen here; use validate_model for the rest.
    A crossing recorded on one side only is treated as a structural hole
    and rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ModelError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    _expect(isinstance(raw, dict), "top level must be an object", "$")
    required = ["unstable", "stable", "crossings_along_stable", "crossings_along_unstable"]
    for key in required:
        _expect(key in raw, "missing field", key)
    known = set(required) | {"perfect_fits", "chains", "ends", "automorphisms"}
    for key in raw:
        _expect(key in known, "unknown field", key)

    unstable = _id_list(raw["unstable"], "unstable")
    stable = _id_list(raw["stable"], "stable")
    seen = set()
    for fam, ids in (("unstable", unstable), ("stable", stable)):
        for i, x in enumerate(ids):
            _expect(x not in seen, f"duplicate identifier {x!r}", f"{fam}[{i}]")
            seen.add(x)

    along_s = raw["crossings_along_stable"]
    along_u = raw["crossings_along_unstable"]
    _expect(isinstance(along_s, dict), "expected an object", "crossings_along_stable")
    _expect(isinstance(along_u, dict), "expected an object", "crossings_along_unstable")
    cs = {}
    for s, us in along_s.items():
        _id_list(us, f"crossings_along_stable.{s}")
        _expect(s in stable, f"{s!r} is not a stable leaf", "crossings_along_stable")
        for u in us:
            _expect(u in unstable, f"{u!r} is not an unstable leaf", f"crossings_along_stable.{s}")
        cs[s] = tuple(us)
    cu = {}
    for u, ss in along_u.items():
        _id_list(ss, f"crossings_along_unstable.{u}")
        _expect(u in unstable, f"{u!r} is not an unstable leaf", "crossings_along_unstable")
        for s in ss:
            _expect(s in stable, f"{s!r} is not a stable leaf", f"crossings_along_unstable.{u}")
        cu[u] = tuple(ss)
    for s in stable:
        cs.setdefault(s, ())
    for u in unstable:
        cu.setdefault(u, ())
    for s, us in cs.items():
        for u in us:
            _expect(s in cu[u], f"crossing ({s}, {u}) missing along {u}",
                    f"crossings_along_stable.{s}")
    for u, ss in cu.items():
        for s in ss:
            _expect(u in cs[s], f"crossing ({s}, {u}) missing along {s}",
                    f"crossings_along_unstable.{u}")

    fits = []
    for i, pf in enumerate(raw.get("perfect_fits", [])):
        loc = f"perfect_fits[{i}]"
        _expect(isinstance(pf, dict), "expected an object", loc)
        for key in ("stable", "stable_sign", "unstable", "unstable_sign"):
            _expect(isinstance(pf.get(key), str), f"missing string field {key!r}", loc)
        _expect(pf["stable"] in stable, "stable_end must be on a stable leaf", loc)
        _expect(pf["unstable"] in unstable, "unstable_end must be on an unstable leaf", loc)
        for key in ("stable_sign", "unstable_sign"):
            _expect(pf[key] in (PLUS, MINUS), f"{key} must be plus or minus", loc)
        fit = PerfectFit(pf["stable"], pf["stable_sign"], pf["unstable"], pf["unstable_sign"])
        _expect(fit not in fits, "duplicate perfect fit", loc)
        fits.append(fit)

    chains = []
    for i, ch in enumerate(raw.get("chains", [])):
        loc = f"chains[{i}]"
        _expect(isinstance(ch, dict), "expected an object", loc)
        _expect(ch.get("side") in (FROM_ABOVE, FROM_BELOW), "side must be from_above or from_below", loc)
        fam = ch.get("family", UNSTABLE)
        _expect(fam in (UNSTABLE, STABLE), "bad family", loc)
        leaves = _id_list(ch.get("leaves"), f"{loc}.leaves")
        links = _id_list(ch.get("links", []), f"{loc}.links")
        chains.append(Chain(fam, tuple(leaves), ch["side"], tuple(links)))

    ends = []
    for i, e in enumerate(raw.get("ends", [])):
        loc = f"ends[{i}]"
        _expect(isinstance(e, dict), "expected an object", loc)
        _expect(isinstance(e.get("id"), str), "missing id", loc)
        _expect(e.get("attachment") in unstable, "attachment must be an unstable leaf", loc)
        _expect(e.get("direction") in (UP, DOWN), "direction must be up or down", loc)
        hint = e.get("boundary_hint")
        _expect(hint is None or hint in seen, "boundary_hint must name a leaf", loc)
        _expect(e["id"] not in seen and e["id"] not in [x.id for x in ends],
                f"duplicate identifier {e['id']!r}", loc)
        ends.append(EndDecl(e["id"], e["attachment"], e["direction"], hint))

    autos = {}
    raw_autos = raw.get("automorphisms", {})
    _expect(isinstance(raw_autos, dict), "expected an object", "automorphisms")
    for g, mp in raw_autos.items():
        loc = f"automorphisms.{g}"
        _expect(g != IDENTITY, "the identity is built in", loc)
        _expect(isinstance(mp, dict), "expected an object", loc)
        for k, v in mp.items():
            _expect(isinstance(v, str), "images must be identifiers", f"{loc}.{k}")
        autos[g] = dict(mp)

    return OrbitModel(tuple(unstable), tuple(stable), cs, cu, tuple(fits), tuple(chains),
                      tuple(ends), autos, name=name)


def load_model(path):
    with open(path, "rb") as fh:
        data = fh.read()
    name = str(path).rsplit("/", 1)[-1].removesuffix(".json")
    return parse_model(data, name=name)


FIXTURE_NAMES = ("M0", "M1", "M1e", "M2", "M3", "M4")


def load_fixture(name):
    data = resources.files("leftcircle").joinpath("fixtures").joinpath(f"{name}.json").read_bytes()
    return parse_model(data, name=name)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witness: tuple = ()


class ValidationReport(list):
    """List of Violation records; empty means the model is admitted."""

    @property
    def ok(self):
        return not self

    def codes(self):
        return sorted({v.code for v in self})


def _order_sign(seq, a, b):
    return 1 if seq.index(a) < seq.index(b) else -1


def validate_model(m):
    rep = ValidationReport()
    cs, cu = m.crossings_along_stable, m.crossings_along_unstable
    stable, unstable = set(m.stable), set(m.unstable)

    # (a) both directions agree
    for s, us in cs.items():
        for u in us:
            if s not in cu.get(u, ()):
                rep.append(Violation("a_crossing_consistency", f"({s},{u}) only along {s}", (s, u)))
    for u, ss in cu.items():
        for s in ss:
            if u not in cs.get(s, ()):
                rep.append(Violation("a_crossing_consistency", f"({s},{u}) only along {u}", (s, u)))

    # (b) same-family leaves never cross; orders list each leaf once
    for s, us in cs.items():
        if s in unstable or any(u in stable for u in us) or len(set(us)) != len(us):
            rep.append(Violation("b_same_family", f"bad crossing list along {s}", (s,)))
    for u, ss in cu.items():
        if u in stable or any(s in unstable for s in ss) or len(set(ss)) != len(ss):
            rep.append(Violation("b_same_family", f"bad crossing list along {u}", (u,)))

    # (c) planarity: shared pairs keep their relative order
    first_seen = {}
    for s in sorted(cs):
        us = cs[s]
        for a, b in combinations(us, 2):
            key = (a, b) if a < b else (b, a)
            sign = _order_sign(us, *key)
            if key in first_seen and first_seen[key][0] != sign:
                rep.append(Violation("c_planarity",
                                     f"{key[0]},{key[1]} ordered differently along {first_seen[key][1]} and {s}",
                                     (first_seen[key][1], s, key[0], key[1])))
            first_seen.setdefault(key, (sign, s))
    first_seen = {}
    for u in sorted(cu):
        ss = cu[u]
        for a, b in combinations(ss, 2):
            key = (a, b) if a < b else (b, a)
            sign = _order_sign(ss, *key)
            if key in first_seen and first_seen[key][0] != sign:
                rep.append(Violation("c_planarity",
                                     f"{key[0]},{key[1]} ordered differently along {first_seen[key][1]} and {u}",
                                     (first_seen[key][1], u, key[0], key[1])))
            first_seen.setdefault(key, (sign, u))

    # perfect fits: the two leaves must be disjoint
    for pf in m.perfect_fits:
        if pf.unstable in cs.get(pf.stable, ()):
            rep.append(Violation("fit", f"{pf.stable} crosses {pf.unstable} and also fits it",
                                 (pf.stable, pf.unstable)))

    # chains
    for ch in m.chains:
        if len(ch.leaves) < 2 or len(set(ch.leaves)) != len(ch.leaves):
            rep.append(Violation("chain", "a chain needs at least two distinct leaves", ch.leaves))
            continue
        fam_set = unstable if ch.family == UNSTABLE else stable
        if any(x not in fam_set for x in ch.leaves):
            rep.append(Violation("chain", "chain leaves must share its family", ch.leaves))
            continue
        if ch.family == UNSTABLE:
            if len(ch.links) != len(ch.leaves) - 1:
                rep.append(Violation("chain", "need one link per adjacent pair", ch.leaves))
                continue
            lk_sign = MINUS if ch.side == FROM_ABOVE else PLUS
            for i, link in enumerate(ch.links):
                left, right = ch.leaves[i], ch.leaves[i + 1]
                want = {PerfectFit(link, lk_sign, left, PLUS), PerfectFit(link, lk_sign, right, MINUS)}
                if link not in stable or not want <= set(m.perfect_fits):
                    rep.append(Violation("chain", f"link {link} must fit {left}+ and {right}-",
                                         (link, left, right)))

    if not rep:
        from .leafspace import derive_leaf_space
        try:
            derive_leaf_space(m)
        except ValueError as exc:
            rep.append(Violation("leafspace", str(exc), ()))

    if not rep:
        from .leafspace import leaf_space
        ls = leaf_space(m)
        for e in m.ends:
            nbrs = ls.up[e.attachment] if e.direction == UP else ls.down[e.attachment]
            if nbrs:
                rep.append(Violation("end", f"{e.id} is not attached on the frontier", (e.id,)))
        for pf in m.perfect_fits:
            q = fit_vertical(m, pf)
            expected = "upper" if pf.stable_sign == MINUS else "lower"
            if q is not None and q != expected:
                rep.append(Violation("fit", f"{pf.stable} lies {q} of {pf.unstable} but fits with its "
                                            f"{pf.stable_sign} end", (pf.stable, pf.unstable)))

    rep.extend(_check_automorphisms(m))
    return rep


def fit_vertical(m, pf):
    """'upper' or 'lower' from where the stable leaf's crossings sit."""
    from .leafspace import leaf_space
    ls = leaf_space(m)
    crossed = m.crossings_along_stable.get(pf.stable, ())
    if not crossed:
        return None
    if all(ls.is_below(pf.unstable, u) for u in crossed):
        return "upper"
    if all(ls.is_below(u, pf.unstable) for u in crossed):
        return "lower"
    return None


def _check_automorphisms(m):
    out = []
    fam = {u: UNSTABLE for u in m.unstable}
    fam.update({s: STABLE for s in m.stable})
    for g, mp in sorted(m.automorphisms.items()):
        end_ids = {e.id for e in m.ends}
        bad = False
        for x, y in mp.items():
            if x in end_ids or y in end_ids:
                if not (x in end_ids and y in end_ids):
                    out.append(Violation("d_automorphism", f"{g} mixes an end and a leaf", (g, x, y)))
                    bad = True
                continue
            if x not in fam or y not in fam or fam[x] != fam[y]:
                out.append(Violation("d_automorphism", f"{g} does not preserve family at {x}", (g, x, y)))
                bad = True
        if len(set(mp.values())) != len(mp):
            out.append(Violation("d_automorphism", f"{g} is not injective", (g,)))
            bad = True
        if bad:
            continue
        for s, us in m.crossings_along_stable.items():
            for u in us:
                if s in mp and u in mp and not m.crosses(mp[s], mp[u]):
                    out.append(Violation("d_automorphism", f"{g} breaks crossing ({s},{u})", (g, s, u)))
        signs = set()
        for s, us in m.crossings_along_stable.items():
            if s not in mp:
                continue
            img = m.crossings_along_stable.get(mp[s], ())
            for a, b in combinations(us, 2):
                if a in mp and b in mp and mp[a] in img and mp[b] in img:
                    signs.add(_order_sign(us, a, b) * _order_sign(img, mp[a], mp[b]))
        if len(signs) > 1:
            out.append(Violation("d_automorphism", f"{g} scrambles crossing orders", (g,)))
        flip = -1 in signs
        fits = set(m.perfect_fits)
        for pf in m.perfect_fits:
            if pf.stable in mp and pf.unstable in mp:
                usign = pf.unstable_sign
                if flip:
                    usign = PLUS if usign == MINUS else MINUS
                img = PerfectFit(mp[pf.stable], pf.stable_sign, mp[pf.unstable], usign)
                if img not in fits:
                    out.append(Violation("d_automorphism", f"{g} breaks fit {pf}", (g, pf.stable, pf.unstable)))
        chains = {(c.side, c.leaves) for c in m.chains}
        for c in m.chains:
            if all(x in mp for x in c.leaves):
                img = tuple(mp[x] for x in c.leaves)
                if flip:
                    img = img[::-1]
                if (c.side, img) not in chains:
                    out.append(Violation("d_automorphism", f"{g} breaks chain {c.leaves}", (g,) + c.leaves))
    return out


def apply_automorphism(m, g, x):
    """Image of leaf (or end id) x under the named automorphism.

    Raises ModelError for an unknown automorphism or a leaf the map does
    not reach (maps are partial on a finite window).
    """
    known = set(m.unstable) | set(m.stable) | {e.id for e in m.ends}
    if x not in known:
        raise ModelError(f"unknown leaf {x!r}")
    if g == IDENTITY:
        return x
    if g not in m.automorphisms:
        raise ModelError(f"unknown automorphism {g!r}")
    mp = m.automorphisms[g]
    if x not in mp:
        raise ModelError(f"{g} is undefined at {x!r} inside this window")
    return mp[x]


def automorphism_power(m, g, k):
    """Partial map for g^k as a dict."""
    if g == IDENTITY:
        ids = list(m.unstable) + list(m.stable) + [e.id for e in m.ends]
        return {x: x for x in ids}
    if g not in m.automorphisms:
        raise ModelError(f"unknown automorphism {g!r}")
    mp = m.automorphisms[g]
    out = {}
    for x in mp:
        y = x
        for _ in range(k):
            if y not in mp:
                y = None
                break
            y = mp[y]
        if y is not None:
            out[x] = y
    return out
