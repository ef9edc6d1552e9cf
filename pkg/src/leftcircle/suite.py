"""Run every property check over fixtures and generated corpora.

The report is a sorted list of records, one per (model, invariant), each
with a status and the first witness found.  Statuses:

  pass      every instance held
  fail      some instance broke the property
  skip      nothing to check, or the window cannot decide

Skips are counted by reason in the witness column, so an invariant that
passes on some instances and is undecidable on others stays visible.
"""

import json
from collections import Counter
from dataclasses import asdict, dataclass, field

from .ct import OK, check_core_compat, continuity_sample, ct
from .current import (base, base_definitional, check_base_shape, check_change_at_cataclysm,
                      check_lu_or_rd, check_marker_sat, check_no_sink_global, check_up_sat,
                      classify)
from .dynamics import alternates, equivariance_failures, periodic_sections
from .errors import (AmbiguousAgainstCurrent, CrossingSections, NoStabilization,
                     SampleTooSparse, TypeIViolation, WindowTruncated)
from .generate import generate_corpus
from .leafspace import hausdorffify, leaf_space, order_witness, zigzag, zigzag_ray
from .master import (base_zigzag, check_e_identification, check_master_finite, f_end, i_map,
                     is_ql_extremal, master_sets, ql_implies_master)
from .model import (FIXTURE_NAMES, MINUS, PLUS, load_fixture, parse_model, serialize_model,
                    validate_model)
from .sections import (FiberPoint, _seed, all_fiber_points, brute_force_special, circular_order,
                       fiber_position, is_admissible, limit_section_at_end, special_section,
                       triple_orientation)

PASS, FAIL, SKIP = "pass", "fail", "skip"

INVARIANTS = (
    "validate", "model.round_trip",
    "leafspace.zigzag_reverse", "leafspace.alternation", "leafspace.quotient_count",
    "leafspace.order_witness",
    "sections.admissible", "sections.oracle", "sections.turning_corners", "sections.monotone",
    "sections.noncrossing",
    "current.lu_or_rd", "current.up_sat", "current.change_at_cataclysm", "current.marker_sat",
    "current.no_sink_global", "current.base_nonempty", "current.base_shape", "current.base_dual",
    "current.no_type_i", "current.no_ambiguity",
    "master.e_identification", "master.finite", "master.connected", "master.ql_constancy",
    "master.sign_independence", "master.f_injective",
    "ct.well_defined", "ct.core_compat", "ct.continuity", "ct.ql_bridge", "ct.convergence_bridge",
    "dynamics.equivariance", "dynamics.alternation",
)


@dataclass
class Record:
    model: str
    invariant: str
    status: str
    checked: int = 0
    failed: int = 0
    witness: str = ""


@dataclass
class _Tally:
    checked: int = 0
    failed: int = 0
    skipped: int = 0
    witness: str = ""
    notes: Counter = field(default_factory=Counter)

    def ok(self, good=True, witness=""):
        self.checked += 1
        if not good:
            self.failed += 1
            if not self.witness:
                self.witness = str(witness)

    def skip(self, why=""):
        self.skipped += 1
        self.notes[why] += 1

    def status(self):
        if self.failed:
            return FAIL
        return PASS if self.checked else SKIP


@dataclass
class RunConfig:
    fixtures: tuple = FIXTURE_NAMES
    seed: int = None
    count: int = 100
    max_leaves: int = 50
    oracle_leaves: int = 8
    models: tuple = ()


def _sections_of(m):
    """All special sections at every fiber point plus every constructible end limit."""
    secs = [special_section(m, p) for p in all_fiber_points(m)]
    limits, truncated = [], []
    for e in m.ends:
        try:
            lim = limit_section_at_end(m, e.id)
            ct(m, lim)
        except WindowTruncated:
            truncated.append(e.id)
            continue
        limits.append(lim)
    return secs, limits, truncated


def check_model(m, oracle_leaves=8):
    t = {name: _Tally() for name in INVARIANTS}
    rep = validate_model(m)
    t["validate"].ok(not rep, rep[0] if rep else "")
    if rep:
        return t
    text = serialize_model(m)
    t["model.round_trip"].ok(serialize_model(parse_model(text, m.name)) == text, m.name)
    ls = leaf_space(m)

    landing = {a: set() for a in ls.leaves}
    for a in ls.leaves:
        for b in ls.leaves:
            z, back = zigzag(ls, a, b), zigzag(ls, b, a)
            landing[a].update(z.landing)
            t["leafspace.zigzag_reverse"].ok(back.reversed() == z, f"{a}->{b}")
            t["leafspace.alternation"].ok(
                all(x != y for x, y in zip(z.orientations, z.orientations[1:])), f"{a}->{b}")
            if ls.is_below(a, b):
                w = order_witness(m, a, b)
                good = w is not None and all(m.crosses(s, lo) and m.crosses(s, hi) for s, lo, hi in w)
                t["leafspace.order_witness"].ok(good, f"{a}<{b}")
    expected = len(ls.leaves) - sum(len(c.members) - 1 for c in ls.cataclysms)
    t["leafspace.quotient_count"].ok(len(hausdorffify(ls)) == expected, len(hausdorffify(ls)))

    specials, limits, truncated = _sections_of(m)
    for eid in truncated:
        for name in ("current.lu_or_rd", "ct.continuity"):
            t[name].skip("window_truncated")

    points = all_fiber_points(m)
    for p, sec in zip(points, specials):
        ok, why = is_admissible(m, sec)
        t["sections.admissible"].ok(ok, f"{sec.label}: {why}")
        off = sorted(y for y in landing[p.leaf] if sec.values[y] is not None)
        t["sections.turning_corners"].ok(not off, f"{sec.label}: on a marker at {off[:1]}")
    for sec in limits:
        ok, why = is_admissible(m, sec)
        t["sections.admissible"].ok(ok, f"{sec.label}: {why}")
    if len(ls.leaves) <= oracle_leaves:
        for p in all_fiber_points(m):
            want = brute_force_special(m, p)
            t["sections.oracle"].ok(want == special_section(m, p), p)

    for sec in specials + limits:
        tag = sec.label
        for name, fn in (("current.lu_or_rd", check_lu_or_rd), ("current.up_sat", check_up_sat),
                         ("current.change_at_cataclysm", check_change_at_cataclysm),
                         ("current.marker_sat", check_marker_sat),
                         ("current.no_sink_global", check_no_sink_global)):
            bad = fn(m, sec)
            t[name].ok(not bad, f"{tag}: {bad[:1]}")
        try:
            b = base(m, sec)
        except AmbiguousAgainstCurrent as exc:
            t["current.no_ambiguity"].ok(False, f"{tag}: {exc}")
            continue
        t["current.no_ambiguity"].ok(True)
        t["current.base_nonempty"].ok(b.kind == "end" or bool(b.leaves), tag)
        shape = check_base_shape(m, sec, b)
        t["current.base_shape"].ok(not shape, f"{tag}: {shape[:1]}")
        t["current.base_dual"].ok(base_definitional(m, sec) == b, f"{tag}: {b}")
        try:
            classify(m, sec)
            t["current.no_type_i"].ok(True)
        except TypeIViolation as exc:
            t["current.no_type_i"].ok(False, f"{tag}: {exc}")
        try:
            v = ct(m, sec)
            if v.status == OK:
                t["ct.well_defined"].ok(True)
            else:
                t["ct.well_defined"].skip("nonmarker_run")
        except ValueError as exc:
            v = None
            t["ct.well_defined"].ok(False, f"{tag}: {exc}")
        if b.kind == "leaves" and len(b.leaves) >= 2:
            z = base_zigzag(m, b)
            qle = is_ql_extremal(m, sec, z)
            if qle.ok:
                rec = ql_implies_master(m, sec, z)
                t["master.ql_constancy"].ok(rec.ok, f"{tag}: {rec.witnesses}")
                t["ct.ql_bridge"].ok(v is not None and v.point == rec.value, f"{tag}: ct {v}, ql {rec.value}")
            elif qle.conditions() == [2]:
                t["ct.ql_bridge"].skip("nonmarker_run")
            else:
                t["ct.ql_bridge"].ok(False, f"{tag}: {qle.lines()[1:2]}")

    bad = check_e_identification(m)
    t["master.e_identification"].ok(not bad, bad[:1])
    bad = check_master_finite(m)
    t["master.finite"].ok(not bad, bad[:1])
    ms = master_sets(m)
    for cid, members in ms.classes.items():
        t["master.connected"].ok(_connected_class(m, members), cid)
    for u in sorted(m.unstable):
        p = FiberPoint(u, None)
        t["master.sign_independence"].ok(i_map(m, p, PLUS) == i_map(m, p, MINUS), u)
    resolved = {}
    for e in m.ends:
        try:
            resolved[e.id] = f_end(m, e.id)
        except WindowTruncated:
            t["master.f_injective"].skip("window_truncated")
    ids = sorted(resolved)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            t["master.f_injective"].ok(resolved[a] != resolved[b], f"{a}, {b} -> {resolved[a]}")

    if specials:
        circle = circular_order_checked(m, specials, t)
        if circle is not None:
            for leaf in sorted(m.unstable):
                rep = check_core_compat(m, circle, leaf)
                t["ct.core_compat"].ok(rep.ok, f"{leaf}: {rep.mismatches[:1]}")

    for e in m.ends:
        if e.id in truncated:
            continue
        try:
            rep = continuity_sample(m, e.id)
        except NoStabilization:
            t["ct.continuity"].skip("no_stabilization")
            continue
        t["ct.continuity"].ok(True)
        lim = limit_section_at_end(m, e.id)
        q = is_ql_extremal(m, lim, zigzag_ray(ls, rep.stable_from, e.id))
        t["ct.convergence_bridge"].ok(q.ok, f"{e.id}: {q.lines()[1:2]}")

    for g in sorted(m.automorphisms):
        for p in all_fiber_points(m):
            bad = equivariance_failures(m, g, p)
            if bad is None:
                continue
            t["dynamics.equivariance"].ok(not bad, f"{g} at {p}: {bad}")
        try:
            recs = periodic_sections(m, g, 1, specials)
        except SampleTooSparse:
            t["dynamics.alternation"].skip("sample_too_sparse")
            continue
        t["dynamics.alternation"].ok(bool(recs) and alternates(recs), [r.line() for r in recs])
    return t


NONCROSSING_SAMPLE = 14


def circular_order_checked(m, secs, t):
    """Circular order plus the noncrossing and monotone-projection checks on it."""
    uniq = list({s.key(): s for s in secs}.values())[:NONCROSSING_SAMPLE]
    for i, a in enumerate(uniq):
        for j in range(i + 1, len(uniq)):
            for c in uniq[j + 1:]:
                try:
                    triple_orientation(m, a, uniq[j], c)
                    t["sections.noncrossing"].ok(True)
                except CrossingSections as exc:
                    t["sections.noncrossing"].ok(False, exc)
    try:
        circle = circular_order(m, secs)
    except CrossingSections as exc:
        t["sections.noncrossing"].ok(False, exc)
        return None
    if circle.cyclic is None:
        t["sections.monotone"].skip("order_unresolved")
        return circle
    for u in sorted(m.unstable):
        pos = [fiber_position(m, u, secs[i].values[u]) for i in circle.cyclic]
        descents = sum(1 for k in range(len(pos)) if pos[k] > pos[(k + 1) % len(pos)])
        t["sections.monotone"].ok(descents <= 1, f"{u}: {descents} descents")
    return circle


def _connected_class(m, members):
    """Members of a master set are linked by fits, chains and shared leaves."""
    members = set(members)
    adj = {x: set() for x in members}

    def link(a, b):
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)

    for pf in m.perfect_fits:
        link(pf.stable, pf.unstable)
    for c in m.chains:
        for a, b in zip(c.leaves, c.leaves[1:]):
            link(a, b)
    for e in m.ends:
        link(f"end:{e.id}", e.boundary_hint or _seed(m, e))
    start = next(iter(members))
    seen, todo = {start}, [start]
    while todo:
        for y in adj[todo.pop()]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen == members


def records_for(m, tallies):
    out = []
    for name in INVARIANTS:
        tl = tallies[name]
        skips = ", ".join(f"skipped {k}={v}" for k, v in sorted(tl.notes.items()))
        out.append(Record(m.name, name, tl.status(), tl.checked, tl.failed, tl.witness or skips))
    return out


def collect_models(cfg):
    models = [load_fixture(n) for n in cfg.fixtures]
    models += list(cfg.models)
    if cfg.seed is not None:
        models += generate_corpus(cfg.seed, cfg.count, cfg.max_leaves)
    return models


def run_suites(cfg):
    """(exit status, sorted records).  Status 1 iff a check failed or a tripwire fired."""
    records = []
    for m in collect_models(cfg):
        records += records_for(m, check_model(m, cfg.oracle_leaves))
    records.sort(key=lambda r: (r.model, r.invariant))
    failed = any(r.status == FAIL for r in records)
    return (1 if failed else 0), records


def summary(records):
    """Per-invariant pass/fail/skip counts over models."""
    out = {}
    for r in records:
        out.setdefault(r.invariant, Counter())[r.status] += 1
    return {k: dict(sorted(v.items())) for k, v in sorted(out.items())}


def report_json(records):
    return json.dumps({"records": [asdict(r) for r in records], "summary": summary(records)},
                      indent=1, sort_keys=True)


def report_text(records):
    lines = [f"{r.model}\t{r.invariant}\t{r.status}\t{r.checked}\t{r.failed}\t{r.witness}"
             for r in records]
    lines.append("")
    for inv, counts in summary(records).items():
        lines.append(f"{inv}: " + " ".join(f"{k}={v}" for k, v in counts.items()))
    return "\n".join(lines) + "\n"
