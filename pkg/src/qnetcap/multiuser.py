"""Outer bounds for multiple-unicast, multicast and multiple-multicast sessions.

Each bound limits the sum of the rates of a subset of sessions by the cheapest
entanglement cut separating that subset's senders from its receivers.  Subsets
are reported in bitmask order (session i is bit i).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .channels import CapacityValue, Exactness, is_distillable
from .network import Cut, Network, NetworkError
from .routing import max_flow, min_cut_bruteforce

__all__ = [
    "MAX_ALL_SUBSETS",
    "UnsupportedAchievabilityError",
    "Constraint",
    "RateRegionBounds",
    "multi_unicast_bounds",
    "multicast_bounds",
    "multiple_multicast_bounds",
    "single_key_multicast_lower_bound",
]

# above this many sessions the caller must name the subsets explicitly
MAX_ALL_SUBSETS = 6

_ROUTING_MODES = {"single_path": "single_edge", "multipath": "multi_edge"}


class UnsupportedAchievabilityError(NetworkError):
    pass


@dataclass(frozen=True)
class Constraint:
    """``sum(R_i for i in subset) <= bound``, attained at ``cut``."""

    subset: tuple
    bound: CapacityValue
    cut: Cut


@dataclass(frozen=True)
class RateRegionBounds:
    constraints: tuple
    symmetric_bound: Optional[CapacityValue] = None

    def bound_for(self, subset: Iterable[int]) -> CapacityValue:
        key = tuple(sorted(subset))
        for c in self.constraints:
            if c.subset == key:
                return c.bound
        raise KeyError(key)


def _subset_list(m: int, subsets: Optional[Iterable[Iterable[int]]]) -> list:
    if subsets is None:
        if m > MAX_ALL_SUBSETS:
            raise NetworkError(
                f"{m} sessions give {2 ** m - 1} subsets; pass an explicit subset list "
                f"(all subsets are only produced for up to {MAX_ALL_SUBSETS} sessions)"
            )
        return [tuple(i for i in range(m) if mask >> i & 1) for mask in range(1, 1 << m)]
    out = set()
    for s in subsets:
        s = tuple(sorted(set(s)))
        if not s or any(not 0 <= i < m for i in s):
            raise NetworkError(f"invalid session subset {s} for {m} sessions")
        out.add(s)
    return sorted(out, key=lambda s: sum(1 << i for i in s))


def _distinct(net: Network, names: Sequence[str], what: str) -> tuple:
    names = tuple(names)
    if not names:
        raise NetworkError(f"need at least one {what}")
    for p in names:
        net.check_point(p)
    if len(set(names)) != len(names):
        raise NetworkError(f"duplicate {what}s in {list(names)}")
    return names


def multi_unicast_bounds(
    net: Network,
    pairs: Sequence[tuple],
    routing: str = "multipath",
    subsets: Optional[Iterable[Iterable[int]]] = None,
) -> RateRegionBounds:
    """Outer bounds for M sender-receiver pairs routed by single paths or multipaths."""
    if routing not in _ROUTING_MODES:
        raise ValueError(f"routing must be one of {sorted(_ROUTING_MODES)}, got {routing!r}")
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise NetworkError("need at least one sender-receiver pair")
    for a, b in pairs:
        net.check_point(a)
        net.check_point(b)
    shared = {a for a, _ in pairs} & {b for _, b in pairs}
    if shared:
        raise NetworkError(f"senders and receivers must be disjoint; shared: {sorted(shared)}")
    mode = _ROUTING_MODES[routing]
    constraints = []
    for s in _subset_list(len(pairs), subsets):
        best = min_cut_bruteforce(net, {pairs[i][0] for i in s}, {pairs[i][1] for i in s}, mode)
        constraints.append(Constraint(s, best.value, best.cut))
    return RateRegionBounds(tuple(constraints))


def _symmetric_flow_bound(net: Network, a: str, receivers: Sequence[str]) -> float:
    return min(max_flow(net, a, b).value for b in receivers)


def multicast_bounds(
    net: Network,
    a: str,
    receivers: Sequence[str],
    subsets: Optional[Iterable[Iterable[int]]] = None,
) -> RateRegionBounds:
    """Outer bounds for one sender multicasting independent messages to each receiver.

    ``symmetric_bound`` caps the common rate to every receiver by the smallest
    sender-receiver max flow.
    """
    net.check_point(a)
    receivers = _distinct(net, receivers, "receiver")
    if a in receivers:
        raise NetworkError(f"sender {a!r} is also listed as a receiver")
    constraints = []
    for s in _subset_list(len(receivers), subsets):
        best = min_cut_bruteforce(net, {a}, {receivers[i] for i in s}, "multi_edge")
        constraints.append(Constraint(s, best.value, best.cut))
    symmetric = CapacityValue(_symmetric_flow_bound(net, a, receivers), Exactness.UPPER_BOUND)
    return RateRegionBounds(tuple(constraints), symmetric)


def multiple_multicast_bounds(
    net: Network,
    senders: Sequence[str],
    receivers: Sequence[str],
    subsets: Optional[Iterable[Iterable[int]]] = None,
) -> RateRegionBounds:
    """Outer bounds on the multicast rates of several senders sharing one receiver set.

    Subsets index the senders.  A cut counts for a sender subset when all of
    those senders are on side A and *at least one* receiver is on side B;
    every other point, including the remaining senders, is free.
    """
    senders = _distinct(net, senders, "sender")
    receivers = _distinct(net, receivers, "receiver")
    shared = set(senders) & set(receivers)
    if shared:
        raise NetworkError(f"senders and receivers must be disjoint; shared: {sorted(shared)}")

    def reaches_receiver(cut: Cut) -> bool:
        return any(r in cut.side_b for r in receivers)

    constraints = []
    for s in _subset_list(len(senders), subsets):
        best = min_cut_bruteforce(net, {senders[i] for i in s}, (), "multi_edge", where=reaches_receiver)
        constraints.append(Constraint(s, best.value, best.cut))
    return RateRegionBounds(tuple(constraints))


def single_key_multicast_lower_bound(net: Network, a: str, receivers: Sequence[str]) -> CapacityValue:
    """Achievable rate for distributing one common key to every receiver (network coding).

    Requires a distillable network, where the per-receiver multipath
    capacities are known exactly.
    """
    net.check_point(a)
    receivers = _distinct(net, receivers, "receiver")
    if a in receivers:
        raise NetworkError(f"sender {a!r} is also listed as a receiver")
    if not net.distillable:
        bad = [e.id for e in net.edges if not is_distillable(e.channel)]
        raise UnsupportedAchievabilityError(
            f"the network-coding rate needs distillable edges; non-distillable: {bad}"
        )
    return CapacityValue(_symmetric_flow_bound(net, a, receivers), Exactness.LOWER_BOUND)
