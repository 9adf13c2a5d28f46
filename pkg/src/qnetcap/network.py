"""Undirected multigraph of quantum channels, entanglement cuts and cut capacities."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Iterator

from .channels import (
    CapacityValue,
    Channel,
    ChannelError,
    Exactness,
    channel_from_dict,
    channel_to_dict,
    is_distillable,
    ree_upper_bound,
)

__all__ = [
    "MAX_FREE_POINTS",
    "NetworkError",
    "NetworkFormatError",
    "UnknownPointError",
    "EnumerationLimitError",
    "Edge",
    "Network",
    "Cut",
    "CutSet",
    "parse_network",
    "load_network",
    "network_to_dict",
    "count_cuts",
    "enumerate_cuts",
    "cut_set",
    "cut_capacity_single_edge",
    "cut_capacity_multi_edge",
]

MAX_FREE_POINTS = 22


class NetworkError(ValueError):
    pass


class NetworkFormatError(NetworkError):
    """The network document does not match the expected schema."""


class UnknownPointError(NetworkError):
    pass


class EnumerationLimitError(NetworkError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    channel: Channel

    def other(self, x: str) -> str:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Network:
    """Named points joined by channel-labelled, undirected edges.

    Parallel edges are kept; each one has its own id.
    """

    points: tuple
    edges: tuple = ()

    def __post_init__(self):
        points = tuple(str(p) for p in self.points)
        edges = tuple(self.edges)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "edges", edges)
        if len(set(points)) != len(points):
            dup = sorted({p for p in points if points.count(p) > 1})
            raise NetworkError(f"duplicate point names: {dup}")
        known = set(points)
        ids = set()
        for e in edges:
            for x in (e.u, e.v):
                if x not in known:
                    raise UnknownPointError(f"edge {e.id!r} references unknown point {x!r}")
            if e.u == e.v:
                raise NetworkError(f"edge {e.id!r} is a self-loop on {e.u!r}")
            if e.id in ids:
                raise NetworkError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)

    @classmethod
    def from_edges(cls, points: Iterable[str], edges: Iterable[tuple]) -> "Network":
        """Convenience constructor from ``(u, v, channel)`` triples with ids e0, e1, ..."""
        return cls(tuple(points), tuple(Edge(f"e{i}", u, v, c) for i, (u, v, c) in enumerate(edges)))

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def edge_by_id(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def incident(self) -> dict:
        inc = defaultdict(list)
        for e in self.edges:
            inc[e.u].append(e)
            inc[e.v].append(e)
        return {p: tuple(inc[p]) for p in self.points}

    @cached_property
    def weights(self) -> dict:
        """Per-edge REE bound (the capacity, for distillable edges)."""
        return {e.id: ree_upper_bound(e.channel) for e in self.edges}

    @cached_property
    def distillable(self) -> bool:
        return all(is_distillable(e.channel) for e in self.edges)

    def check_point(self, p: str) -> str:
        if p not in self.index:
            raise UnknownPointError(f"unknown point {p!r}")
        return p


@dataclass(frozen=True)
class Cut:
    side_a: frozenset
    side_b: frozenset

    def __post_init__(self):
        object.__setattr__(self, "side_a", frozenset(self.side_a))
        object.__setattr__(self, "side_b", frozenset(self.side_b))
        if self.side_a & self.side_b:
            raise NetworkError(f"cut sides overlap on {sorted(self.side_a & self.side_b)}")

    def swapped(self) -> "Cut":
        return Cut(self.side_b, self.side_a)


@dataclass(frozen=True)
class CutSet:
    edges: tuple


# -- parsing -----------------------------------------------------------------


def _fail(path: str, msg: str):
    raise NetworkFormatError(f"{path}: {msg}")


def network_from_dict(doc: Any) -> Network:
    if not isinstance(doc, dict):
        _fail("$", "expected a JSON object with 'points' and 'edges'")
    points = doc.get("points")
    if not isinstance(points, list):
        _fail("$.points", "expected a list of point names")
    for i, p in enumerate(points):
        if not isinstance(p, str) or not p:
            _fail(f"$.points[{i}]", f"expected a non-empty string, got {p!r}")
    edges_doc = doc.get("edges", [])
    if not isinstance(edges_doc, list):
        _fail("$.edges", "expected a list of edges")
    known = set(points)
    edges = []
    for i, e in enumerate(edges_doc):
        path = f"$.edges[{i}]"
        if not isinstance(e, dict):
            _fail(path, "expected an object with 'u', 'v' and 'channel'")
        for key in ("u", "v"):
            if key not in e:
                _fail(path, f"missing field {key!r}")
            if not isinstance(e[key], str):
                _fail(f"{path}.{key}", f"expected a point name, got {e[key]!r}")
            if e[key] not in known:
                raise UnknownPointError(f"{path}.{key}: unknown point {e[key]!r}")
        if "channel" not in e:
            _fail(path, "missing field 'channel'")
        try:
            channel = channel_from_dict(e["channel"], f"{path}.channel")
        except ChannelError as exc:
            raise NetworkFormatError(str(exc)) from None
        eid = str(e["id"]) if "id" in e else f"e{i}"
        edges.append(Edge(eid, e["u"], e["v"], channel))
    try:
        return Network(tuple(points), tuple(edges))
    except UnknownPointError:
        raise
    except NetworkError as exc:
        raise NetworkFormatError(f"$: {exc}") from None


def parse_network(text: str) -> Network:
    """Parse and validate a network JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return network_from_dict(doc)


def load_network(path) -> Network:
    return parse_network(Path(path).read_text())


def network_to_dict(net: Network) -> dict:
    return {
        "points": list(net.points),
        "edges": [
            {"id": e.id, "u": e.u, "v": e.v, "channel": channel_to_dict(e.channel)} for e in net.edges
        ],
    }


# -- cuts --------------------------------------------------------------------


def _constrained(net: Network, sources: Iterable[str], sinks: Iterable[str]):
    sources = frozenset(net.check_point(p) for p in sources)
    sinks = frozenset(net.check_point(p) for p in sinks)
    if sources & sinks:
        raise NetworkError(f"sources and sinks overlap on {sorted(sources & sinks)}")
    free = tuple(p for p in net.points if p not in sources and p not in sinks)
    if len(free) > MAX_FREE_POINTS:
        raise EnumerationLimitError(
            f"{len(free)} free points exceed the enumeration cap of {MAX_FREE_POINTS}; "
            "use the widest-path / max-flow routines instead"
        )
    return sources, sinks, free


def count_cuts(net: Network, sources: Iterable[str], sinks: Iterable[str]) -> int:
    return 1 << len(_constrained(net, sources, sinks)[2])


def enumerate_cuts(
    net: Network, sources: Iterable[str], sinks: Iterable[str], start: int = 0
) -> Iterator[Cut]:
    """Yield every bipartition with ``sources`` on side A and ``sinks`` on side B.

    Cut number k puts the j-th free point (in network order) on side A iff bit j
    of k is set, so the stream is deterministic and can be resumed at ``start``.
    """
    sources, sinks, free = _constrained(net, sources, sinks)
    for k in range(start, 1 << len(free)):
        a = set(sources)
        b = set(sinks)
        for j, p in enumerate(free):
            (a if k >> j & 1 else b).add(p)
        yield Cut(frozenset(a), frozenset(b))


def _crossing(net: Network, cut: Cut) -> list:
    return [e for e in net.edges if (e.u in cut.side_a) != (e.v in cut.side_a)]


def cut_set(net: Network, cut: Cut) -> CutSet:
    covered = cut.side_a | cut.side_b
    if covered != set(net.points):
        raise NetworkError("cut does not partition the network's points")
    return CutSet(tuple(e.id for e in _crossing(net, cut)))


def _cut_values(net: Network, cut: Cut):
    edges = [net.edge_by_id[i] for i in cut_set(net, cut).edges]
    exact = all(is_distillable(e.channel) for e in edges)
    return [net.weights[e.id] for e in edges], Exactness.EXACT if exact else Exactness.UPPER_BOUND


def cut_capacity_single_edge(net: Network, cut: Cut) -> CapacityValue:
    """Largest per-edge capacity (or REE bound) across the cut; 0 for an empty cut-set."""
    values, exactness = _cut_values(net, cut)
    return CapacityValue(max(values, default=0.0), exactness)


def cut_capacity_multi_edge(net: Network, cut: Cut) -> CapacityValue:
    """Sum of per-edge capacities (or REE bounds) across the cut."""
    values, exactness = _cut_values(net, cut)
    return CapacityValue(math.fsum(values) if not any(map(math.isinf, values)) else math.inf, exactness)
