"""End-to-end capacities of a network under single-path and multipath routing.

Single-path routing is governed by the widest (maximum-bottleneck) route,
which equals the minimum over entanglement cuts of the largest crossing edge.
Multipath routing is governed by the maximum flow, which equals the minimum
over cuts of the summed crossing edges.  Both are computed with polynomial
algorithms; :func:`min_cut_bruteforce` enumerates cuts and serves as an
independent check on small networks.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .channels import CapacityValue, Exactness
from .network import (
    Cut,
    Network,
    NetworkError,
    cut_capacity_multi_edge,
    cut_capacity_single_edge,
    enumerate_cuts,
)

__all__ = [
    "RESIDUAL_TOL",
    "Route",
    "WidestPath",
    "FlowAssignment",
    "SinglePathReport",
    "MultipathReport",
    "MinCut",
    "widest_path",
    "maximum_spanning_tree",
    "tree_route",
    "max_flow",
    "single_path_capacity",
    "multipath_capacity",
    "min_cut_bruteforce",
]

# residual capacities at or below this are treated as exhausted
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class Route:
    points: tuple
    edges: tuple
    bottleneck_edge: str


@dataclass(frozen=True)
class WidestPath:
    capacity: CapacityValue
    route: Optional[Route]


@dataclass(frozen=True)
class FlowAssignment:
    """Max-flow witness.

    ``edge_rates[id]`` is the effective rate on an edge, positive when it runs
    from ``edge.u`` to ``edge.v``.  ``cut`` is the minimum cut read off the
    final residual graph.
    """

    value: float
    edge_rates: dict
    orientation: dict
    cut: Cut


@dataclass(frozen=True)
class SinglePathReport:
    value: CapacityValue
    route: Optional[Route]
    cut: Cut


@dataclass(frozen=True)
class MultipathReport:
    value: CapacityValue
    flow: Optional[FlowAssignment]
    cut: Cut


@dataclass(frozen=True)
class MinCut:
    value: CapacityValue
    cut: Cut
    index: int = field(default=0)


def _endpoints(net: Network, a: str, b: str):
    net.check_point(a)
    net.check_point(b)
    if a == b:
        raise NetworkError(f"end-points must differ, got {a!r} twice")


def _network_exactness(net: Network) -> Exactness:
    return Exactness.EXACT if net.distillable else Exactness.UPPER_BOUND


# -- single path -------------------------------------------------------------


def _widest_width(net: Network, a: str, b: str) -> Optional[float]:
    """Largest bottleneck over a-b routes, or None if b is unreachable."""
    w = net.weights
    best = {a: math.inf}
    done = set()
    heap = [(-math.inf, a)]
    while heap:
        neg, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == b:
            return -neg
        for e in net.incident[x]:
            y = e.other(x)
            width = min(-neg, w[e.id])
            if y not in done and (y not in best or width > best[y]):
                best[y] = width
                heapq.heappush(heap, (-width, y))
    return None


def _route_within(net: Network, a: str, b: str, admissible: Callable) -> Optional[Route]:
    """Fewest-hop a-b route over admissible edges, lexicographically smallest by point names."""
    w = net.weights
    dist = {b: 0}
    queue = deque([b])
    while queue:
        x = queue.popleft()
        for e in net.incident[x]:
            y = e.other(x)
            if y not in dist and admissible(e):
                dist[y] = dist[x] + 1
                queue.append(y)
    if a not in dist:
        return None
    points, edges = [a], []
    x = a
    while x != b:
        options = {}
        for e in net.incident[x]:
            y = e.other(x)
            if admissible(e) and dist.get(y) == dist[x] - 1:
                # widest of any parallel edges; the first one listed on ties
                if y not in options or w[e.id] > w[options[y].id]:
                    options[y] = e
        y = min(options)
        points.append(y)
        edges.append(options[y].id)
        x = y
    bottleneck = min(edges, key=lambda i: w[i])
    return Route(tuple(points), tuple(edges), bottleneck)


def widest_path(net: Network, a: str, b: str) -> WidestPath:
    """Route maximising the smallest per-edge capacity, via a modified Dijkstra.

    Among equally wide routes the one with fewest hops wins, then the
    lexicographically smallest sequence of point names.  Disconnected
    end-points give capacity 0 and no route.
    """
    _endpoints(net, a, b)
    width = _widest_width(net, a, b)
    if width is None:
        return WidestPath(CapacityValue(0.0, _network_exactness(net)), None)
    w = net.weights
    route = _route_within(net, a, b, lambda e: w[e.id] >= width)
    return WidestPath(CapacityValue(width, _network_exactness(net)), route)


def _dual_cut(net: Network, a: str, width: float) -> Cut:
    """Points reachable from a through edges strictly wider than ``width``."""
    w = net.weights
    side_a = {a}
    stack = [a]
    while stack:
        x = stack.pop()
        for e in net.incident[x]:
            y = e.other(x)
            if y not in side_a and w[e.id] > width:
                side_a.add(y)
                stack.append(y)
    return Cut(frozenset(side_a), frozenset(p for p in net.points if p not in side_a))


class _DisjointSets:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return True


def maximum_spanning_tree(net: Network) -> tuple:
    """Edge ids of a maximum-weight spanning forest (Kruskal).

    The a-b path inside the tree is a widest a-b route of the network.
    """
    w = net.weights
    order = sorted(range(len(net.edges)), key=lambda i: (-w[net.edges[i].id], i))
    sets = _DisjointSets(net.points)
    tree = []
    for i in order:
        e = net.edges[i]
        if sets.union(e.u, e.v):
            tree.append(e.id)
            if len(tree) == len(net.points) - 1:
                break
    return tuple(tree)


def tree_route(net: Network, tree: Iterable[str], a: str, b: str) -> Optional[Route]:
    """The unique a-b path inside a forest given by edge ids."""
    _endpoints(net, a, b)
    allowed = set(tree)
    return _route_within(net, a, b, lambda e: e.id in allowed)


def single_path_capacity(net: Network, a: str, b: str) -> SinglePathReport:
    """Single-path capacity with a route witness (distillable networks) and a dual cut.

    For networks with non-distillable edges the value is only the REE upper
    bound and no route is reported.
    """
    wp = widest_path(net, a, b)
    cut = _dual_cut(net, a, wp.capacity.bits)
    route = wp.route if net.distillable else None
    return SinglePathReport(wp.capacity, route, cut)


# -- multipath ---------------------------------------------------------------


def max_flow(net: Network, a: str, b: str) -> FlowAssignment:
    """Maximum a-b flow over the undirected network (shortest augmenting paths).

    Each undirected edge of capacity c carries a signed flow in [-c, c].
    Infinite capacities are replaced by one plus the sum of all finite ones; a
    minimum cut that still crosses such an edge means the flow is unbounded and
    the value is reported as ``inf``.
    """
    _endpoints(net, a, b)
    w = net.weights
    finite = math.fsum(x for x in w.values() if not math.isinf(x))
    surrogate = 1.0 + finite
    cap = {i: (surrogate if math.isinf(x) else x) for i, x in w.items()}
    flow = {e.id: 0.0 for e in net.edges}

    def residual(e, x):
        return cap[e.id] - flow[e.id] if x == e.u else cap[e.id] + flow[e.id]

    while True:
        parent = {a: None}
        queue = deque([a])
        while queue and b not in parent:
            x = queue.popleft()
            for e in net.incident[x]:
                y = e.other(x)
                if y not in parent and residual(e, x) > RESIDUAL_TOL:
                    parent[y] = (x, e)
                    queue.append(y)
        if b not in parent:
            break
        path = []
        y = b
        while parent[y] is not None:
            x, e = parent[y]
            path.append((x, e))
            y = x
        push = min(residual(e, x) for x, e in path)
        for x, e in path:
            flow[e.id] += push if x == e.u else -push

    side_a = frozenset(parent)
    cut = Cut(side_a, frozenset(p for p in net.points if p not in side_a))
    value = math.fsum(flow[e.id] if e.u == a else -flow[e.id] for e in net.incident[a])
    crossing = [e for e in net.edges if (e.u in side_a) != (e.v in side_a)]
    if any(math.isinf(w[e.id]) for e in crossing):
        value = math.inf
    orientation = {}
    for e in net.edges:
        f = flow[e.id]
        if f != 0.0:
            orientation[e.id] = (e.u, e.v) if f > 0 else (e.v, e.u)
    return FlowAssignment(max(value, 0.0), flow, orientation, cut)


def multipath_capacity(net: Network, a: str, b: str) -> MultipathReport:
    """Multipath (flooding) capacity: the max-flow value with its minimum cut.

    The flow witness is only attached when the value is an exact capacity.
    """
    flow = max_flow(net, a, b)
    value = CapacityValue(flow.value, _network_exactness(net))
    return MultipathReport(value, flow if net.distillable else None, flow.cut)


# -- brute-force oracle ------------------------------------------------------

_FUNCTIONALS = {
    "single_edge": cut_capacity_single_edge,
    "multi_edge": cut_capacity_multi_edge,
}


def min_cut_bruteforce(
    net: Network,
    sources: Iterable[str],
    sinks: Iterable[str],
    mode: str = "single_edge",
    where: Optional[Callable[[Cut], bool]] = None,
) -> MinCut:
    """Minimum of a cut functional over every constrained bipartition.

    ``mode`` is ``"single_edge"`` (largest crossing edge) or ``"multi_edge"``
    (sum of crossing edges).  ``where`` optionally restricts the family of
    cuts.  Ties go to the earliest cut in enumeration order.
    """
    try:
        functional = _FUNCTIONALS[mode]
    except KeyError:
        raise ValueError(f"mode must be one of {sorted(_FUNCTIONALS)}, got {mode!r}") from None
    best = None
    for k, cut in enumerate(enumerate_cuts(net, sources, sinks)):
        if where is not None and not where(cut):
            continue
        value = functional(net, cut)
        if best is None or value.bits < best.value.bits:
            best = MinCut(value, cut, k)
    if best is None:
        raise NetworkError("no cut satisfies the requested constraints")
    return best
