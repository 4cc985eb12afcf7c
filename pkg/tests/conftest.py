import json
from importlib import resources

import numpy as np
import pytest

from sdn_duel.topology import default_config


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture
def default_doc():
    text = resources.files("sdn_duel.data").joinpath("default_topology.json").read_text()
    return json.loads(text)


def frontier_oracle(cfg, compromised, link_active):
    """Fixed-point reachability over the explicit edge list.

    Nodes are labelled ("host", id) / ("switch", id) / ("router", id). Clean
    hosts end a path; everything else relays.
    """
    edges = [(("host", h), ("switch", s)) for h, s in cfg.host_links]
    edges += [(("switch", s), ("router", r)) for s, r in cfg.trunk_links]
    edges += [(("host", a), ("host", b)) for a, b in cfg.route_links]
    edges = [e for e, on in zip(edges, link_active) if on]

    def relays(node):
        kind, ident = node
        return kind != "host" or bool(compromised[ident])

    reached = {("host", int(h)) for h in np.flatnonzero(compromised)}
    changed = True
    while changed:
        changed = False
        for u, v in edges:
            for a, b in ((u, v), (v, u)):
                if a in reached and relays(a) and b not in reached:
                    reached.add(b)
                    changed = True
    return {ident for kind, ident in reached if kind == "host" and not compromised[ident]}
