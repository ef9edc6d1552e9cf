"""Regenerate the JSON fixtures shipped in src/leftcircle/fixtures."""

import sys
from pathlib import Path

from leftcircle.generate import assemble
from leftcircle.model import serialize_model

OUT = Path(__file__).resolve().parent.parent / "src" / "leftcircle" / "fixtures"


def m0():
    return assemble(["u0", "u1", "u2"], {"s1": ["u0", "u1", "u2"]}, {"s1": 0}, name="M0")


def m1(ends=()):
    spans = {"s1": ["u1", "u2"], "t0": ["u-1", "u0", "u1"], "s2": ["u-2", "u-1"]}
    keys = {"s1": 0, "t0": 1, "s2": 2}
    fits = [("s1", "minus", "u0", "minus"), ("s2", "plus", "u0", "plus")]
    return assemble(["u-2", "u-1", "u0", "u1", "u2"], spans, keys, fits, ends=ends, name="M1")


def m2():
    """A line whose two sides carry spiralling markers pinching at alternate leaves."""
    n = 12
    u = [f"u{i - n + 1}" for i in range(n)]          # u[0] is the bottom leaf
    spans = {
        "p0": u[0:3], "p1": u[4:7], "p2": u[8:12],
        "q0": u[10:12], "q1": u[6:9], "q2": u[0:5],
    }
    keys = {"p0": -1, "p1": -1, "p2": -1, "q0": 1, "q1": 1, "q2": 1}
    fits = [
        ("p0", "plus", u[3], "minus"), ("p1", "minus", u[3], "minus"),
        ("p1", "plus", u[7], "minus"), ("p2", "minus", u[7], "minus"),
        ("q0", "minus", u[9], "plus"), ("q1", "plus", u[9], "plus"),
        ("q1", "minus", u[5], "plus"), ("q2", "plus", u[5], "plus"),
    ]
    ends = [("tau-", u[0], "down"), ("tau+", u[-1], "up")]
    return assemble(u, spans, keys, fits, ends=ends, name="M2")


def m3():
    """The broken zigzag: six cataclysms, three of them met in one-leaf segments.

    One stable leaf runs along each chart, and one link sits in each gap
    between nonseparated leaves, so every stable end is at the frontier or
    at a perfect fit.
    """
    leaves = ["nu0", "a", "nu1", "w1", "nu2", "b", "nu3", "w2", "nu4", "w3", "nu6",
              "c", "nu7", "w4", "nu8", "d", "nu9", "w5", "nu10", "w6", "nu12"]
    charts = [["nu0", "a", "nu1", "w1"], ["w2", "nu3", "b", "nu2", "w1"], ["w2", "nu4", "w3"],
              ["w4", "nu7", "c", "nu6", "w3"], ["w4", "nu8", "d", "nu9", "w5"],
              ["w6", "nu10", "w5"], ["w6", "nu12"]]
    chains = [(["nu1", "nu2"], "from_above", "w1"), (["nu3", "nu4"], "from_below", "w2"),
              (["nu4", "nu6"], "from_above", "w3"), (["nu7", "nu8"], "from_below", "w4"),
              (["nu9", "nu10"], "from_above", "w5"), (["nu10", "nu12"], "from_below", "w6")]
    spans, keys, fits, chain_decl = {}, {}, [], []
    for k, ch in enumerate(charts):
        spans[f"k{k}"] = ch
        keys[f"k{k}"] = 2 * k
    for k, (members, side, common) in enumerate(chains, start=1):
        s = f"l{k}"
        sign = "minus" if side == "from_above" else "plus"
        spans[s] = [common]
        keys[s] = 2 * k - 1
        fits += [(s, sign, members[0], "plus"), (s, sign, members[1], "minus")]
        chain_decl.append((members, side, [s]))
    return assemble(leaves, spans, keys, fits, chain_decl, name="M3")


def m4():
    """A shift-invariant line: each leaf pinches a marker above-left and below-right."""
    n = 10
    u = [f"u{k}" for k in range(n)]
    spans, keys, fits = {"bb": list(u), "tb": list(u)}, {"bb": -1, "tb": 1}, []
    for k in range(n - 1):
        spans[f"a{k}"] = u[k + 1:]
        keys[f"a{k}"] = -10 - k
        fits.append((f"a{k}", "minus", u[k], "minus"))
    for k in range(1, n):
        spans[f"b{k}"] = u[:k]
        keys[f"b{k}"] = 30 - k
        fits.append((f"b{k}", "plus", u[k], "plus"))
    shift = {u[k]: u[k + 1] for k in range(n - 1)}
    shift.update({f"a{k}": f"a{k + 1}" for k in range(n - 2)})
    shift.update({f"b{k}": f"b{k + 1}" for k in range(1, n - 1)})
    shift.update({"bb": "bb", "tb": "tb", "bottom": "bottom", "top": "top"})
    ends = [("bottom", u[0], "down"), ("top", u[-1], "up")]
    return assemble(u, spans, keys, fits, ends=ends, automorphisms={"g": shift}, name="M4")


BUILDERS = {
    "M0": m0,
    "M1": m1,
    "M1e": lambda: m1(ends=[("top", "u2", "up")]),
    "M2": m2,
    "M3": m3,
    "M4": m4,
}


def main(names):
    for name in names or sorted(BUILDERS):
        m = BUILDERS[name]()
        (OUT / f"{name}.json").write_text(serialize_model(m))
        print("wrote", name)


if __name__ == "__main__":
    main(sys.argv[1:])
