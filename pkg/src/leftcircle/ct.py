"""The boundary map from the leftmost circle to symbolic sphere points."""

from dataclasses import dataclass

from .current import base
from .errors import NoStabilization
from .master import base_zigzag, f_end, i_map, is_ql_extremal, master_sets
from .sections import end_family, limit_section_at_end

OK = "ok"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CTValue:
    point: object
    status: str = OK
    detail: str = ""

    def __str__(self):
        if self.status == OK:
            return str(self.point)
        return f"{self.status}: {self.detail}"


@dataclass
class WellDefinedReport:
    ok: bool
    status: str
    witnesses: list


def check_well_defined(m, sec, b=None):
    """i of the section is constant over a leaf base, or the window is too coarse to say."""
    b = b or base(m, sec)
    if b.kind != "leaves" or len(b.leaves) < 2:
        return WellDefinedReport(True, OK, [])
    vals = [(x, i_map(m, sec.point(x))) for x in b.leaves]
    odd = [(x, p) for x, p in vals if p != vals[0][1]]
    if not odd:
        return WellDefinedReport(True, OK, [])
    pair = [vals[0], odd[0]]
    qle = is_ql_extremal(m, sec, base_zigzag(m, b))
    if 2 in qle.conditions():
        # a run of nonmarker values: the window lacks the pinching markers
        return WellDefinedReport(True, INCONCLUSIVE, pair)
    return WellDefinedReport(False, "ill_defined", pair)


def ct(m, sec):
    memo = m._cache.setdefault("ct", {})
    key = sec.key()
    if key not in memo:
        memo[key] = _ct(m, sec)
    return memo[key]


def _ct(m, sec):
    b = base(m, sec)
    if b.kind == "end":
        return CTValue(f_end(m, b.end))
    rep = check_well_defined(m, sec, b)
    if rep.status == INCONCLUSIVE:
        return CTValue(None, INCONCLUSIVE, "window lacks pinching markers over the base")
    if not rep.ok:
        (a, pa), (c, pc) = rep.witnesses
        raise ValueError(f"CT is not constant over the base: {a} -> {pa}, {c} -> {pc}")
    return CTValue(i_map(m, sec.point(b.leaves[0])))


@dataclass
class CoreReport:
    checked: list
    skipped: list
    mismatches: list

    @property
    def ok(self):
        return not self.mismatches


def check_core_compat(m, circle, leaf):
    """Where a section is alone in its fiber value at leaf, ct agrees with i there."""
    secs = circle.sections
    checked, skipped, bad = [], [], []
    shapes = {}
    for s in secs:
        shapes.setdefault(s.values.get(leaf), set()).add(s.key())
    for i, s in enumerate(secs):
        if len(shapes[s.values.get(leaf)]) > 1:
            continue
        c = ct(m, s)
        if c.status != OK:
            skipped.append(i)
            continue
        expected = i_map(m, s.point(leaf))
        checked.append(i)
        if c.point != expected:
            bad.append((i, c.point, expected))
    return CoreReport(checked, skipped, bad)


@dataclass
class ContinuityReport:
    end: str
    leaves: list
    values: list
    target: CTValue
    stable_from: str

    def lines(self):
        out = [f"limit at {self.end}: {self.target}"]
        out += [f"  {x}: {v}" for x, v in zip(self.leaves, self.values)]
        out.append(f"stable from {self.stable_from}")
        return out


def continuity_sample(m, end_id):
    """ct along the special sections marching to an end settles on ct of the limit."""
    limit = limit_section_at_end(m, end_id)
    target = ct(m, limit)
    leaves, family = end_family(m, end_id, limit)
    values = [ct(m, s) for s in family]
    k = len(values)
    while k > 0 and values[k - 1] == target:
        k -= 1
    if len(values) - k < min(2, len(values)):
        raise NoStabilization(leaves[-1], f"ct along the ray to {end_id} never settles on {target}")
    return ContinuityReport(end_id, list(leaves), values, target, leaves[k])


class CTMap:
    """fit / transform wrapper: fit binds a model, transform maps sections to ct values."""

    def __init__(self, strict=False):
        self.strict = strict

    def get_params(self, deep=True):
        return {"strict": self.strict}

    def set_params(self, **params):
        for k, v in params.items():
            setattr(self, k, v)
        return self

    def fit(self, model, y=None):
        self.model_ = model
        self.master_sets_ = master_sets(model)
        return self

    def transform(self, sections):
        out = []
        for s in sections:
            v = ct(self.model_, s)
            if self.strict and v.status != OK:
                raise ValueError(str(v))
            out.append(v)
        return out
