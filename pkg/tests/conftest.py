import json
from functools import lru_cache
from importlib import resources

import networkx as nx

from leftcircle.generate import generate_corpus
from leftcircle.model import parse_model
from leftcircle.sections import _seed


def fixture_dict(name):
    text = resources.files("leftcircle").joinpath(f"fixtures/{name}.json").read_text()
    return json.loads(text)


def mutated(name, change):
    """Parse a fixture after applying change(dict) to its JSON form."""
    d = fixture_dict(name)
    change(d)
    return parse_model(json.dumps(d), name + "*")


@lru_cache(maxsize=None)
def small_corpus():
    return tuple(generate_corpus(7, 30, 8))


@lru_cache(maxsize=None)
def medium_corpus():
    return tuple(generate_corpus(1, 20, 20))


def component_oracle(m):
    """Shared-endpoint components built directly as a graph on leaf names."""
    g = nx.Graph()
    g.add_nodes_from(m.unstable)
    g.add_nodes_from(m.stable)
    for pf in m.perfect_fits:
        g.add_edge(pf.stable, pf.unstable)
    for c in m.chains:
        nx.add_path(g, c.leaves)
    for e in m.ends:
        g.add_edge("end:" + e.id, e.boundary_hint or _seed(m, e))
    return {x: frozenset(comp) for comp in nx.connected_components(g) for x in comp}
