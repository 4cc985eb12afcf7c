import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import frontier_oracle
from sdn_duel.topology import (ConfigError, attack_frontier, encode, initial_state, load_config)


def test_default_config_shape(cfg):
    assert cfg.host_count == 32
    assert [len(hosts) for _, hosts in cfg.subnets] == [6, 8, 9, 9]
    assert len(cfg.trunk_links) == 4
    assert {r for _, r in cfg.trunk_links} == {0}
    assert cfg.link_count == 48
    assert cfg.host_count + cfg.link_count == 80
    assert len(cfg.backup_hosts) == 3
    assert cfg.s_max == cfg.host_count
    assert cfg.initially_compromised <= set(range(6))


def test_two_backups_rejected(default_doc):
    default_doc["backup_hosts"] = default_doc["backup_hosts"][:2]
    with pytest.raises(ConfigError, match="exactly 3"):
        load_config(json.dumps(default_doc))


def test_compromised_server_rejected(default_doc):
    default_doc["initially_compromised"].append(default_doc["critical_server"])
    with pytest.raises(ConfigError, match="critical_server"):
        load_config(json.dumps(default_doc))


@pytest.mark.parametrize("mutate, needle", [
    (lambda d: d.update(initially_compromised=[]), "non-empty"),
    (lambda d: d.update(backup_hosts=[d["critical_server"], 1, 2]), "exclude critical_server"),
    (lambda d: d.update(route_links=[[0, 99]]), "out of range"),
    (lambda d: d.update(schema_version=7), "schema_version"),
    (lambda d: d.pop("host_links"), "missing"),
    (lambda d: d["subnets"][0]["hosts"].append(31), "more than one subnet"),
])
def test_invalid_configs(default_doc, mutate, needle):
    mutate(default_doc)
    with pytest.raises(ConfigError, match=needle):
        load_config(json.dumps(default_doc))


def test_parse_error():
    with pytest.raises(ConfigError, match="parse error"):
        load_config("{not json")


def test_initial_state(cfg):
    s = initial_state(cfg)
    assert s.link_active.all()
    assert s.server_at == cfg.critical_server
    assert s.compromised.sum() == len(cfg.initially_compromised)
    assert set(np.flatnonzero(s.flags)) == cfg.initially_compromised


def test_encode_layout(cfg):
    s = initial_state(cfg)
    s.compromised[:] = False
    s.flags[:] = False
    v = encode(s, cfg)
    assert v.shape == (80,)
    assert (v == 1).all()

    s.compromised[0] = True
    w = encode(s, cfg)
    expected = np.concatenate([(~s.compromised).astype(np.uint8), s.link_active.astype(np.uint8)])
    assert np.array_equal(w, expected)
    assert np.flatnonzero(v != w).tolist() == [0]


def test_slot_layout_documents_every_slot(cfg):
    layout = cfg.slot_layout()
    assert [slot for slot, _ in layout] == list(range(80))
    assert layout[32][1] == "link host 0 <-> switch 0"


def test_frontier_empty_without_compromise(cfg):
    s = initial_state(cfg)
    s.compromised[:] = False
    assert attack_frontier(s, cfg) == set()


def test_frontier_empty_when_isolated(cfg):
    s = initial_state(cfg)
    s.compromised[:] = False
    s.compromised[4] = True
    s.link_active[list(cfg.host_incident[4])] = False
    assert attack_frontier(s, cfg) == set()


def test_default_frontier_matches_oracle(cfg):
    s = initial_state(cfg)
    got = attack_frontier(s, cfg)
    assert got == frontier_oracle(cfg, s.compromised, s.link_active)
    # through the router every clean host is exposed at the start
    assert got == set(range(32)) - cfg.initially_compromised


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_frontier_properties(cfg, data):
    compromised = np.array(data.draw(st.lists(st.booleans(), min_size=32, max_size=32)))
    links = np.array(data.draw(st.lists(st.booleans(), min_size=48, max_size=48)))
    s = initial_state(cfg)
    s.compromised[:] = compromised
    s.flags[:] = compromised
    s.link_active[:] = links
    front = attack_frontier(s, cfg)
    assert front == frontier_oracle(cfg, compromised, links)
    assert not any(compromised[h] for h in front)
    assert len(encode(s, cfg)) == 80

    for h in np.flatnonzero(compromised):
        s.link_active[list(cfg.host_incident[h])] = False
    assert attack_frontier(s, cfg) == set()


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_encode_injective(cfg, data):
    bits = st.lists(st.booleans(), min_size=80, max_size=80)
    a, b = data.draw(bits), data.draw(bits)
    states = []
    for vec in (a, b):
        s = initial_state(cfg)
        s.compromised[:] = vec[:32]
        s.link_active[:] = vec[32:]
        states.append(encode(s, cfg))
    assert np.array_equal(states[0], states[1]) == (a == b)
