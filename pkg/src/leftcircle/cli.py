"""Command-line front end.

Exit status: 0 on success, 1 when a check fails or the model is invalid,
2 for bad input (unknown leaf, unreadable file, missing option).
"""

import json
import sys
from pathlib import Path

import click

from . import ct as ctmod
from .current import base, classify, coloring
from .dynamics import alternates, periodic_sections
from .errors import ModelError
from .generate import generate_corpus
from .leafspace import dump, hausdorffify, leaf_space, zigzag, zigzag_ray
from .master import base_zigzag, f_end, is_ql_extremal, master_sets, ql_implies_master
from .model import FIXTURE_NAMES, load_fixture, load_model, serialize_model, validate_model
from .render import VIEWS, render_views
from .sections import (FiberPoint, all_fiber_points, circular_order, limit_section_at_end, parse_fiber_point,
                       special_section)
from .suite import RunConfig, report_json, report_text, run_suites


class Ctx:
    def __init__(self, model, as_json, seed, out):
        self.model_arg = model
        self.as_json = as_json
        self.seed = seed
        self.out = out

    def model(self):
        if not self.model_arg:
            raise click.UsageError("--model is required for this command")
        arg = self.model_arg
        if arg in FIXTURE_NAMES:
            return load_fixture(arg)
        try:
            return load_model(arg)
        except OSError as exc:
            raise click.UsageError(f"cannot read model {arg}: {exc}")

    def emit(self, payload, lines):
        if self.as_json:
            click.echo(json.dumps(payload, indent=1, sort_keys=True, default=str))
        else:
            for line in lines:
                click.echo(line)


def _section(m, text):
    """'LEAF', 'LEAF:STABLE' or 'end:ID' (the limit section at a declared end)."""
    if text.startswith("end:"):
        return limit_section_at_end(m, text[4:])
    return special_section(m, parse_fiber_point(m, text))


@click.group()
@click.option("--model", "-m", help="Model file, or a fixture name (M0, M1, M1e, M2, M3, M4).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--seed", type=int, default=None, help="Corpus seed.")
@click.option("--out", type=click.Path(), default=None, help="Output file or directory.")
@click.pass_context
def main(ctx, model, as_json, seed, out):
    """Leftmost universal circle sections on finite orbit-space windows."""
    ctx.obj = Ctx(model, as_json, seed, out)


@main.command()
@click.pass_obj
def validate(c):
    """Structural checks on a model."""
    rep = validate_model(c.model())
    c.emit([{"code": v.code, "message": v.message} for v in rep],
           [f"{v.code}: {v.message}" for v in rep] or ["ok"])
    sys.exit(1 if rep else 0)


@main.command()
@click.option("--from", "a", default=None)
@click.option("--to", "b", default=None)
@click.option("--end", default=None)
@click.pass_obj
def leafspace(c, a, b, end):
    """Dump charts and cataclysms, or the zigzag between two leaves."""
    m = c.model()
    ls = leaf_space(m)
    if a is None:
        q = hausdorffify(ls)
        c.emit({"charts": ls.charts(), "cataclysms": [(x.side, x.members, x.common) for x in ls.cataclysms],
                "quotient_classes": len(q)}, dump(ls).splitlines() + [f"quotient classes: {len(q)}"])
        return
    for x in (a, b):
        if x is not None and x not in ls.up:
            raise click.UsageError(f"unknown unstable leaf {x}")
    z = zigzag_ray(ls, a, end) if end else zigzag(ls, a, b or a)
    c.emit({"breakpoints": z.breakpoints, "segments": z.segments, "orientations": z.orientations,
            "end": z.end},
           [f"breakpoints: {' '.join(z.breakpoints)}"]
           + [f"  {o}: {' '.join(seg)}" for seg, o in zip(z.segments, z.orientations)]
           + ([f"  -> end {z.end}"] if z.end else []))


@main.command()
@click.option("--section", "--base", "-s", default=None,
              help="LEAF, LEAF:STABLE or end:ID; all special sections if omitted.")
@click.pass_obj
def sections(c, section):
    """Special or limit sections and their values."""
    m = c.model()
    secs = [_section(m, section)] if section else [special_section(m, p) for p in all_fiber_points(m)]
    c.emit([{"label": s.label, "values": s.values, "tags": s.tags} for s in secs],
           [f"{s.label}: " + " ".join(f"{k}={v or 'NM'}" for k, v in sorted(s.values.items())) for s in secs])


@main.command("base")
@click.option("--section", "-s", required=True)
@click.pass_obj
def base_cmd(c, section):
    """LU/RD colouring, base and type of a section."""
    m = c.model()
    sec = _section(m, section)
    col = coloring(m, sec)
    b = base(m, sec)
    kind = classify(m, sec)
    c.emit({"lu": sorted(col.lu), "rd": sorted(col.rd), "base": str(b), "type": kind},
           [f"LU: {' '.join(sorted(col.lu))}", f"RD: {' '.join(sorted(col.rd))}", f"base: {b}",
            f"type: {kind}"])


@main.command()
@click.option("--end", default=None, help="Report the boundary class of this end.")
@click.pass_obj
def master(c, end):
    """Master sets (classes of leaves sharing ideal points)."""
    m = c.model()
    ms = master_sets(m)
    if end:
        p = f_end(m, end)
        c.emit({"end": end, "point": str(p)}, [f"{end} -> {p}"])
        return
    c.emit(ms.classes, [f"{cid}: {' '.join(v)}" for cid, v in ms.classes.items()])


@main.command()
@click.option("--section", "-s", required=True)
@click.option("--from", "a", default=None, help="Zigzag start (default: across the base).")
@click.option("--to", "b", default=None)
@click.pass_obj
def ql(c, section, a, b):
    """Quadrant-local extremality of a section over a zigzag."""
    m = c.model()
    sec = _section(m, section)
    if a or b:
        ls = leaf_space(m)
        for x in (a, b):
            if x is None or x not in ls.up:
                raise click.UsageError(f"--from and --to need known unstable leaves, got {x}")
        z = zigzag(ls, a, b)
    else:
        bs = base(m, sec)
        if bs.kind != "leaves":
            raise click.UsageError("this section's base is an end; give --from and --to")
        z = base_zigzag(m, bs)
    rep = is_ql_extremal(m, sec, z)
    lines = rep.lines()
    payload = {"ok": rep.ok, "failures": rep.failures}
    if rep.ok:
        rec = ql_implies_master(m, sec, z)
        payload["master_set"] = str(rec.value)
        lines.append(f"single master set: {rec.value}" if rec.ok else f"NOT constant: {rec.witnesses}")
        if not rec.ok:
            c.emit(payload, lines)
            sys.exit(1)
    c.emit(payload, lines)


@main.command("ct")
@click.option("--section", "-s", default=None)
@click.pass_obj
def ct_cmd(c, section):
    """Symbolic boundary point of a section (all special sections if omitted)."""
    m = c.model()
    secs = [_section(m, section)] if section else [special_section(m, p) for p in all_fiber_points(m)]
    vals = [ctmod.ct(m, s) for s in secs]
    c.emit([{"section": s.label, "point": str(v.point) if v.point else None, "status": v.status}
            for s, v in zip(secs, vals)],
           [f"{s.label}: {v}" for s, v in zip(secs, vals)])


@main.command("ct-continuity")
@click.option("--end", required=True)
@click.pass_obj
def ct_continuity(c, end):
    """ct along the special sections that march to an end."""
    m = c.model()
    rep = ctmod.continuity_sample(m, end)
    c.emit({"end": end, "target": str(rep.target), "leaves": rep.leaves,
            "values": [str(v) for v in rep.values], "stable_from": rep.stable_from}, rep.lines())


@main.command()
@click.option("--auto", "auto", default="g", help="Automorphism name.")
@click.option("--power", default=1, type=int)
@click.pass_obj
def dynamics(c, auto, power):
    """Fixed points of g^k on the circle of sections, with attractor/repellor type."""
    m = c.model()
    if auto not in m.automorphisms and auto != "identity":
        raise click.UsageError(f"{m.name} declares no automorphism {auto!r}")
    sample = [special_section(m, p) for p in all_fiber_points(m)]
    recs = periodic_sections(m, auto, power, sample)
    alt = alternates(recs)
    c.emit({"fixed": [{"section": r.section.label, "ct": str(r.ct), "type": r.classification,
                       "position": r.position} for r in recs], "alternates": alt},
           [r.line() for r in recs] + [f"alternates: {'yes' if alt else 'no'}"])
    sys.exit(0 if recs and alt else 1)


@main.command()
@click.option("--views", default=",".join(VIEWS),
              help="Comma-separated subset of orbit,coloring,circle; empty writes nothing.")
@click.option("--section", "-s", default=None, help="Section for the coloring view.")
@click.pass_obj
def render(c, views, section):
    """Write SVG views: one file per view into --out, or a single view to stdout."""
    m = c.model()
    chosen = [v.strip() for v in views.split(",") if v.strip()]
    for v in chosen:
        if v not in VIEWS:
            raise click.UsageError(f"unknown view {v!r}; choose from {', '.join(VIEWS)}")
    if not chosen:
        return
    if len(chosen) > 1 and not c.out:
        raise click.UsageError("several views need --out DIR")
    sec = None
    if "coloring" in chosen:
        sec = _section(m, section) if section else special_section(m, FiberPoint(m.unstable[0], None))
    secs = vals = None
    if "circle" in chosen:
        secs = [special_section(m, p) for p in all_fiber_points(m)]
        vals = [ctmod.ct(m, s) for s in secs]
    docs = render_views(m, chosen, sec, secs, vals)
    if not c.out:
        click.echo(docs[chosen[0]], nl=False)
        return
    out = Path(c.out)
    out.mkdir(parents=True, exist_ok=True)
    for v, text in docs.items():
        (out / f"{m.name}_{v}.svg").write_text(text)
        click.echo(str(out / f"{m.name}_{v}.svg"))


@main.command()
@click.option("--count", default=10, type=int)
@click.option("--max-leaves", default=20, type=int)
@click.pass_obj
def corpus(c, count, max_leaves):
    """Generate a corpus; with --out, write one JSON file per model."""
    seed = 1 if c.seed is None else c.seed
    models = generate_corpus(seed, count, max_leaves)
    if c.out:
        out = Path(c.out)
        out.mkdir(parents=True, exist_ok=True)
        for m in models:
            (out / f"{m.name}.json").write_text(serialize_model(m))
    c.emit([{"name": m.name, "unstable": len(m.unstable), "stable": len(m.stable),
             "chains": len(m.chains), "fits": len(m.perfect_fits)} for m in models],
           [f"{m.name}: {len(m.unstable)} unstable, {len(m.stable)} stable, "
            f"{len(m.chains)} chains, {len(m.perfect_fits)} fits" for m in models])


@main.command()
@click.option("--count", default=100, type=int)
@click.option("--max-leaves", default=50, type=int)
@click.option("--no-fixtures", is_flag=True)
@click.pass_obj
def suite(c, count, max_leaves, no_fixtures):
    """Run every property check over the fixtures and (with --seed) a corpus."""
    extra = (c.model(),) if c.model_arg else ()
    cfg = RunConfig(fixtures=() if no_fixtures else FIXTURE_NAMES, seed=c.seed, count=count,
                    max_leaves=max_leaves, models=extra)
    status, records = run_suites(cfg)
    text = report_json(records) if c.as_json else report_text(records)
    if c.out:
        Path(c.out).write_text(text)
    click.echo(text, nl=False)
    sys.exit(status)


def run():
    try:
        main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.exceptions.Abort:
        sys.exit(2)
    except ModelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
