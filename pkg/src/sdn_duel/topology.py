"""Simulated network under defense: config loading, live state, observation encoding.

The graph has three node kinds. Hosts use ids ``0..host_count-1``; switches
and routers are internal nodes that only relay traffic. Every link carries an
activity bit, and the observation vector is laid out as

    [host 0 .. host H-1 | host_links | trunk_links | route_links]

with links kept in the order the config document declares them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
N_BACKUPS = 3


class ConfigError(ValueError):
    """Raised when a topology document is malformed or violates an invariant."""


@dataclass(frozen=True)
class TopologyConfig:
    host_count: int
    subnets: tuple[tuple[int, tuple[int, ...]], ...]
    trunk_links: tuple[tuple[int, int], ...]
    host_links: tuple[tuple[int, int], ...]
    route_links: tuple[tuple[int, int], ...]
    critical_server: int
    backup_hosts: tuple[int, ...]
    initially_compromised: frozenset[int]
    s_max: int
    # derived, filled in __post_init__
    links: tuple[tuple[str, int, str, int], ...] = field(init=False, repr=False)
    host_incident: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    _adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        links = [("host", h, "switch", s) for h, s in self.host_links]
        links += [("switch", s, "router", r) for s, r in self.trunk_links]
        links += [("host", a, "host", b) for a, b in self.route_links]
        object.__setattr__(self, "links", tuple(links))

        incident: list[list[int]] = [[] for _ in range(self.host_count)]
        for idx, (ka, a, kb, b) in enumerate(links):
            if ka == "host":
                incident[a].append(idx)
            if kb == "host":
                incident[b].append(idx)
        object.__setattr__(self, "host_incident", tuple(tuple(x) for x in incident))

        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.node_count)]
        for idx, (ka, a, kb, b) in enumerate(links):
            u, v = self.node_index(ka, a), self.node_index(kb, b)
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        object.__setattr__(self, "_adjacency", tuple(tuple(x) for x in adj))

    @property
    def n_switches(self) -> int:
        ids = {s for s, _ in self.subnets} | {s for _, s in self.host_links} | {s for s, _ in self.trunk_links}
        return max(ids) + 1 if ids else 0

    @property
    def n_routers(self) -> int:
        return max((r for _, r in self.trunk_links), default=-1) + 1

    @property
    def node_count(self) -> int:
        return self.host_count + self.n_switches + self.n_routers

    @property
    def link_count(self) -> int:
        return len(self.links)

    @property
    def observation_width(self) -> int:
        return self.host_count + self.link_count

    def node_index(self, kind: str, ident: int) -> int:
        if kind == "host":
            return ident
        if kind == "switch":
            return self.host_count + ident
        return self.host_count + self.n_switches + ident

    def slot_layout(self) -> list[tuple[int, str]]:
        """(slot, description) rows for every position of the observation vector."""
        rows = [(h, f"host {h}") for h in range(self.host_count)]
        for idx, (ka, a, kb, b) in enumerate(self.links):
            rows.append((self.host_count + idx, f"link {ka} {a} <-> {kb} {b}"))
        return rows


@dataclass
class NetworkState:
    compromised: np.ndarray  # bool, one per host
    link_active: np.ndarray  # bool, one per link
    server_at: int
    flags: np.ndarray  # bool, one per host

    def copy(self) -> NetworkState:
        return NetworkState(self.compromised.copy(), self.link_active.copy(),
                            self.server_at, self.flags.copy())


def _pairs(raw, name: str) -> tuple[tuple[int, int], ...]:
    try:
        return tuple((int(a), int(b)) for a, b in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected a list of integer pairs") from exc


def config_from_dict(doc: dict) -> TopologyConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top-level document must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    missing = [k for k in ("host_count", "subnets", "host_links", "trunk_links", "route_links",
                           "critical_server", "backup_hosts", "initially_compromised") if k not in doc]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")

    try:
        host_count = int(doc["host_count"])
        subnets = tuple((int(sn["switch"]), tuple(int(h) for h in sn["hosts"])) for sn in doc["subnets"])
        critical = int(doc["critical_server"])
        backups = tuple(int(h) for h in doc["backup_hosts"])
        initial = frozenset(int(h) for h in doc["initially_compromised"])
        s_max = int(doc.get("s_max", host_count))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"malformed field: {exc}") from exc

    cfg_kwargs = dict(
        host_count=host_count,
        subnets=subnets,
        trunk_links=_pairs(doc["trunk_links"], "trunk_links"),
        host_links=_pairs(doc["host_links"], "host_links"),
        route_links=_pairs(doc["route_links"], "route_links"),
        critical_server=critical,
        backup_hosts=backups,
        initially_compromised=initial,
        s_max=s_max,
    )
    validate(**cfg_kwargs)
    return TopologyConfig(**cfg_kwargs)


def validate(*, host_count, subnets, trunk_links, host_links, route_links,
             critical_server, backup_hosts, initially_compromised, s_max) -> None:
    if host_count < 1:
        raise ConfigError("host_count must be positive")

    def check_host(h, where):
        if not 0 <= h < host_count:
            raise ConfigError(f"{where}: host id {h} out of range 0..{host_count - 1}")

    seen: set[int] = set()
    for switch, hosts in subnets:
        if switch < 0:
            raise ConfigError(f"subnets: negative switch id {switch}")
        for h in hosts:
            check_host(h, "subnets")
            if h in seen:
                raise ConfigError(f"subnets: host {h} listed in more than one subnet")
            seen.add(h)
    if seen != set(range(host_count)):
        raise ConfigError("subnets must partition every host exactly once")

    for h, s in host_links:
        check_host(h, "host_links")
        if s < 0:
            raise ConfigError(f"host_links: negative switch id {s}")
    for s, r in trunk_links:
        if s < 0 or r < 0:
            raise ConfigError("trunk_links: ids must be non-negative")
    for a, b in route_links:
        check_host(a, "route_links")
        check_host(b, "route_links")
        if a == b:
            raise ConfigError(f"route_links: self-loop on host {a}")

    check_host(critical_server, "critical_server")
    if len(backup_hosts) != N_BACKUPS:
        raise ConfigError(f"backup_hosts must list exactly {N_BACKUPS} hosts, got {len(backup_hosts)}")
    if len(set(backup_hosts)) != N_BACKUPS:
        raise ConfigError("backup_hosts must be distinct")
    for h in backup_hosts:
        check_host(h, "backup_hosts")
    if critical_server in backup_hosts:
        raise ConfigError("backup_hosts must exclude critical_server")

    if not initially_compromised:
        raise ConfigError("initially_compromised must be non-empty")
    for h in initially_compromised:
        check_host(h, "initially_compromised")
    if critical_server in initially_compromised:
        raise ConfigError("critical_server must not be initially compromised")
    if s_max < 1:
        raise ConfigError("s_max must be positive")


def load_config(text: str) -> TopologyConfig:
    """Parse and validate a JSON topology document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return config_from_dict(doc)


def load_config_file(path: str | Path) -> TopologyConfig:
    return load_config(Path(path).read_text())


def default_config() -> TopologyConfig:
    text = resources.files("sdn_duel.data").joinpath("default_topology.json").read_text()
    return load_config(text)


def initial_state(cfg: TopologyConfig) -> NetworkState:
    compromised = np.zeros(cfg.host_count, dtype=bool)
    compromised[list(cfg.initially_compromised)] = True
    return NetworkState(
        compromised=compromised,
        link_active=np.ones(cfg.link_count, dtype=bool),
        server_at=cfg.critical_server,
        flags=compromised.copy(),
    )


def encode(state: NetworkState, cfg: TopologyConfig) -> np.ndarray:
    """0/1 observation vector: 1 = host clean / link active."""
    out = np.empty(cfg.observation_width, dtype=np.uint8)
    out[:cfg.host_count] = ~state.compromised
    out[cfg.host_count:] = state.link_active
    return out


def attack_frontier(state: NetworkState, cfg: TopologyConfig) -> set[int]:
    """Clean hosts the attacker can reach from any compromised host.

    Traffic relays through switches, routers and already-compromised hosts.
    A clean host is a target, not a relay.
    """
    H = cfg.host_count
    compromised = state.compromised
    active = state.link_active
    adj = cfg._adjacency

    stack = [int(h) for h in np.flatnonzero(compromised)]
    visited = set(stack)
    frontier: set[int] = set()
    while stack:
        u = stack.pop()
        for v, link in adj[u]:
            if not active[link] or v in visited:
                continue
            if v < H and not compromised[v]:
                frontier.add(v)
                continue
            visited.add(v)
            stack.append(v)
    return frontier
