"""Linear repeater chains: capacities, equidistant placement on lossy lines, multiband links."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .channels import (
    CapacityValue,
    Channel,
    ChannelError,
    Exactness,
    Lossy,
    channel_from_dict,
    is_distillable,
    ree_upper_bound,
)

__all__ = [
    "DB_PER_KM_FIBER",
    "Chain",
    "ChainAsymptotics",
    "chain_capacity",
    "per_link_eta",
    "equidistant_lossy_chain",
    "chain_asymptotics",
    "multiband_chain_capacity",
    "multiband_point_to_point",
    "loss_db_to_eta",
    "eta_to_loss_db",
    "distance_to_eta",
    "parse_chain",
    "load_chain",
]

# standard telecom fiber attenuation
DB_PER_KM_FIBER = 0.2
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Chain:
    """N + 1 channels joining Alice, N repeaters and Bob, in order."""

    links: tuple

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        if not self.links:
            raise ChannelError("a chain needs at least one link")

    @property
    def n_repeaters(self) -> int:
        return len(self.links) - 1


def chain_capacity(chain: Chain | Sequence[Channel]) -> CapacityValue:
    """Repeater-assisted capacity: the weakest link's capacity (or REE bound)."""
    links = chain.links if isinstance(chain, Chain) else Chain(tuple(chain)).links
    exact = all(is_distillable(c) for c in links)
    return CapacityValue(
        min(ree_upper_bound(c) for c in links), Exactness.EXACT if exact else Exactness.UPPER_BOUND
    )


def _check_eta(eta: float) -> float:
    if not 0.0 <= eta <= 1.0:
        raise ChannelError(f"transmissivity must lie in [0, 1], got {eta!r}")
    return float(eta)


def _check_repeaters(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ChannelError(f"number of repeaters must be an integer >= 0, got {n!r}")
    return int(n)


def per_link_eta(eta_total: float, n_repeaters: int) -> float:
    return _check_eta(eta_total) ** (1.0 / (_check_repeaters(n_repeaters) + 1))


def equidistant_lossy_chain(eta_total: float, n_repeaters: int) -> CapacityValue:
    """Capacity of a lossy line with ``n_repeaters`` evenly spaced repeaters.

    Evenly spaced repeaters maximise the weakest link, giving
    ``-log2(1 - eta_total ** (1 / (N + 1)))``.
    """
    return CapacityValue(ree_upper_bound(Lossy(per_link_eta(eta_total, n_repeaters))))


@dataclass(frozen=True)
class ChainAsymptotics:
    repeater_dominant: float
    loss_dominant: float


def chain_asymptotics(eta_total: float, n_repeaters: int) -> ChainAsymptotics:
    """Leading-order approximations of the equidistant chain capacity (diagnostics only).

    ``repeater_dominant`` holds for N >> 1 at fixed loss, ``loss_dominant`` for
    very lossy links at fixed N.
    """
    if not 0.0 < eta_total < 1.0:
        raise ChannelError(f"asymptotics need eta in (0, 1), got {eta_total!r}")
    n = _check_repeaters(n_repeaters)
    if n < 1:
        raise ChannelError("asymptotics need at least one repeater")
    return ChainAsymptotics(
        repeater_dominant=math.log2(n) - math.log2(math.log(1.0 / eta_total)),
        loss_dominant=per_link_eta(eta_total, n) / _LN2,
    )


def multiband_point_to_point(eta: float, bands: int) -> CapacityValue:
    if isinstance(bands, bool) or int(bands) != bands or bands < 1:
        raise ChannelError(f"bands must be an integer >= 1, got {bands!r}")
    return CapacityValue(int(bands) * ree_upper_bound(Lossy(_check_eta(eta))))


def multiband_chain_capacity(links: Iterable[tuple]) -> CapacityValue:
    """Capacity of a chain of multiband lossy links given as ``(eta, bands)`` pairs.

    Equal to ``-log2 max_i (1 - eta_i) ** M_i``; evaluated as the minimum of the
    per-link capacities so that large band counts cannot underflow.
    """
    values = [multiband_point_to_point(eta, m).bits for eta, m in links]
    if not values:
        raise ChannelError("a chain needs at least one link")
    return CapacityValue(min(values))


def loss_db_to_eta(loss_db: float) -> float:
    if not loss_db >= 0.0:
        raise ChannelError(f"loss in dB must be >= 0, got {loss_db!r}")
    return 10.0 ** (-loss_db / 10.0)


def eta_to_loss_db(eta: float) -> float:
    eta = _check_eta(eta)
    if eta == 0.0:
        return math.inf
    return -10.0 * math.log10(eta)


def distance_to_eta(distance_km: float, db_per_km: float = DB_PER_KM_FIBER) -> float:
    if not distance_km >= 0.0 or not db_per_km >= 0.0:
        raise ChannelError("distance and loss rate must be >= 0")
    return loss_db_to_eta(distance_km * db_per_km)


def parse_chain(text: str) -> Chain:
    """Parse ``{"links": [channel, ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("links"), list):
        raise ChannelError("$: expected an object with a 'links' list")
    return Chain(tuple(channel_from_dict(c, f"$.links[{i}]") for i, c in enumerate(doc["links"])))


def load_chain(path) -> Chain:
    return parse_chain(Path(path).read_text())
