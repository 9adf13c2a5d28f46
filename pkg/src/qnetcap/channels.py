"""Parametric point-to-point channel models and their two-way capacities.

Every channel exposes a single per-use figure of merit, its relative-entropy-
of-entanglement (REE) bound.  For the distillable family (pure loss,
quantum-limited amplifier, dephasing, erasure and multiband stacks of these)
the bound is achievable, so it *is* the two-way capacity; for the remaining
Gaussian and Pauli channels it is only an upper bound.

All quantities are in bits per channel use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

__all__ = [
    "ChannelError",
    "Exactness",
    "CapacityValue",
    "Lossy",
    "QLimAmplifier",
    "ThermalLoss",
    "NoisyAmplifier",
    "AdditiveNoise",
    "Dephasing",
    "Erasure",
    "PauliQubit",
    "Multiband",
    "Channel",
    "binary_entropy",
    "thermal_entropy",
    "is_distillable",
    "two_way_capacity",
    "ree_upper_bound",
    "channel_from_dict",
    "channel_to_dict",
]

PROB_TOL = 1e-12
_LN2 = math.log(2.0)


class ChannelError(ValueError):
    """Invalid channel parameters or an out-of-domain argument."""


class Exactness(str, enum.Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"
    # only produced by the network-coding single-key multicast rate
    LOWER_BOUND = "lower_bound"


@dataclass(frozen=True)
class CapacityValue:
    """A rate in bits per use (``inf`` allowed) with its exactness tag."""

    bits: float
    exactness: Exactness = Exactness.EXACT

    def __post_init__(self):
        if math.isnan(self.bits) or self.bits < 0:
            raise ValueError(f"capacity must be a non-negative number, got {self.bits!r}")
        object.__setattr__(self, "exactness", Exactness(self.exactness))

    @property
    def exact(self) -> bool:
        return self.exactness is Exactness.EXACT

    def __float__(self) -> float:
        return self.bits


# -- entropies ---------------------------------------------------------------


def binary_entropy(p: float) -> float:
    """Binary Shannon entropy in bits, with ``0 log 0 = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"probability must lie in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log1p(-p) / _LN2


def thermal_entropy(x: float) -> float:
    """Entropy ``(x+1) log2(x+1) - x log2 x`` of a thermal state with mean photon number x."""
    if not x >= 0.0:
        raise ChannelError(f"mean photon number must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    return ((x + 1.0) * math.log1p(x) - x * math.log(x)) / _LN2


def _log1p_minus_x(x: float) -> float:
    """``log(1 + x) - x`` without cancellation for small |x|."""
    if abs(x) < 0.05:
        # alternating series; 16 terms leave a relative error far below 1 ulp
        total = 0.0
        power = x * x
        for k in range(2, 18):
            term = power / k
            total += -term if k % 2 == 0 else term
            power *= x
        return total
    return math.log1p(x) - x


def _weighted_psi(w: float, ref: float, d: float) -> float:
    """``w * psi(d / ref)`` with ``psi(x) = log(1 + x) - x``, where ``w = ref + d``.

    The offset d is passed separately because ``w - ref`` loses it once w has
    been rounded; the result stays finite as w -> 0.
    """
    if w == 0.0:
        return 0.0
    a = d / ref
    if abs(a) < 0.05:
        return w * _log1p_minus_x(a)
    if a < -0.5:
        return w * (math.log(w) - math.log(ref)) - w * a
    return w * (math.log1p(a) - a)


def _thermal_divergence(n: float, t: float) -> float:
    """KL divergence (bits) between thermal distributions with means n and t.

    Both the thermal-loss and the noisy-amplifier REE bounds reduce to this
    quantity, with t the channel's noise threshold.  It is written as a sum of
    terms that stay accurate when n approaches t, where the value vanishes
    quadratically and the textbook expression loses its sign.
    """
    d = n - t
    nats = d * d / (t * (t + 1.0)) + _weighted_psi(n, t, d) - _weighted_psi(n + 1.0, t + 1.0, d)
    return max(nats, 0.0) / _LN2


def _kl_from_uniform_bit(p: float) -> float:
    """``1 - H2(p)`` computed stably near p = 1/2."""
    if p == 0.0 or p == 1.0:
        return 1.0
    d = p - 0.5
    nats = 4.0 * d * d + _weighted_psi(p, 0.5, d) + _weighted_psi(1.0 - p, 0.5, -d)
    return max(nats, 0.0) / _LN2


def _plob(eta: float) -> float:
    if eta == 1.0:
        return math.inf
    if eta == 0.0:
        return 0.0
    return -math.log1p(-eta) / _LN2


def _check_probs(probs: Sequence[float], what: str) -> tuple[float, ...]:
    probs = tuple(float(p) for p in probs)
    if any(not (p >= 0.0) for p in probs):
        raise ChannelError(f"{what}: probabilities must be non-negative, got {probs}")
    if abs(math.fsum(probs) - 1.0) > PROB_TOL:
        raise ChannelError(f"{what}: probabilities must sum to 1, got sum {math.fsum(probs)!r}")
    return probs


# -- channel models ----------------------------------------------------------


@dataclass(frozen=True)
class Lossy:
    """Pure-loss bosonic channel with transmissivity ``eta``."""

    eta: float
    kind = "lossy"
    formula = "plob:-log2(1-eta)"

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ChannelError(f"lossy: eta must lie in [0, 1], got {self.eta!r}")


@dataclass(frozen=True)
class QLimAmplifier:
    """Quantum-limited phase-insensitive amplifier with gain ``g > 1``."""

    g: float
    kind = "amplifier"
    formula = "amplifier:-log2(1-1/g)"

    def __post_init__(self):
        if not (self.g > 1.0):
            raise ChannelError(f"amplifier: gain must be > 1, got {self.g!r}")


@dataclass(frozen=True)
class ThermalLoss:
    eta: float
    nbar: float
    kind = "thermal_loss"
    formula = "thermal_loss:ree_bound"

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ChannelError(f"thermal_loss: eta must lie in (0, 1), got {self.eta!r}")
        if not (0.0 <= self.nbar < math.inf):
            raise ChannelError(f"thermal_loss: nbar must be finite and >= 0, got {self.nbar!r}")

    @property
    def threshold(self) -> float:
        """Thermal noise at and above which the bound vanishes."""
        return self.eta / (1.0 - self.eta)


@dataclass(frozen=True)
class NoisyAmplifier:
    g: float
    nbar: float
    kind = "noisy_amplifier"
    formula = "noisy_amplifier:ree_bound"

    def __post_init__(self):
        if not (1.0 < self.g < math.inf):
            raise ChannelError(f"noisy_amplifier: gain must be finite and > 1, got {self.g!r}")
        if not (0.0 <= self.nbar < math.inf):
            raise ChannelError(f"noisy_amplifier: nbar must be finite and >= 0, got {self.nbar!r}")

    @property
    def threshold(self) -> float:
        return 1.0 / (self.g - 1.0)


@dataclass(frozen=True)
class AdditiveNoise:
    """Additive Gaussian noise channel with noise variance ``xi``."""

    xi: float
    kind = "additive_noise"
    formula = "additive_noise:ree_bound"

    def __post_init__(self):
        if not (0.0 <= self.xi < math.inf):
            raise ChannelError(f"additive_noise: xi must be finite and >= 0, got {self.xi!r}")


@dataclass(frozen=True)
class Dephasing:
    """Qudit dephasing channel; ``probs[i]`` is the probability of i phase flips.

    The dimension is ``len(probs)``; the qubit channel with dephasing
    probability p is ``Dephasing((1 - p, p))``.
    """

    probs: tuple
    kind = "dephasing"
    formula = "dephasing:log2(d)-H(P)"

    def __post_init__(self):
        probs = _check_probs(self.probs, "dephasing")
        if len(probs) < 2:
            raise ChannelError("dephasing: need a probability vector of length d >= 2")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def qubit(cls, p: float) -> "Dephasing":
        return cls((1.0 - p, p))

    @property
    def d(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class Erasure:
    p: float
    d: int = 2
    kind = "erasure"
    formula = "erasure:(1-p)log2(d)"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ChannelError(f"erasure: p must lie in [0, 1], got {self.p!r}")
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 2:
            raise ChannelError(f"erasure: dimension must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))


@dataclass(frozen=True)
class PauliQubit:
    """Qubit Pauli channel with probabilities of (I, X, Y, Z)."""

    probs: tuple
    kind = "pauli"
    formula = "pauli:ree_bound"

    def __post_init__(self):
        probs = _check_probs(self.probs, "pauli")
        if len(probs) != 4:
            raise ChannelError(f"pauli: need exactly 4 probabilities, got {len(probs)}")
        object.__setattr__(self, "probs", probs)


_SingleBand = Union[
    Lossy, QLimAmplifier, ThermalLoss, NoisyAmplifier, AdditiveNoise, Dephasing, Erasure, PauliQubit
]


@dataclass(frozen=True)
class Multiband:
    """``bands`` independent copies of one single-band channel used in parallel."""

    bands: int
    inner: _SingleBand
    kind = "multiband"

    def __post_init__(self):
        if isinstance(self.bands, bool) or int(self.bands) != self.bands or self.bands < 1:
            raise ChannelError(f"multiband: bands must be an integer >= 1, got {self.bands!r}")
        object.__setattr__(self, "bands", int(self.bands))
        if isinstance(self.inner, Multiband):
            raise ChannelError("multiband: inner channel may not itself be multiband")
        if not isinstance(self.inner, _SINGLE_BAND_TYPES):
            raise ChannelError(f"multiband: unsupported inner channel {self.inner!r}")

    @property
    def formula(self) -> str:
        return f"multiband[{self.bands}]x{self.inner.formula}"


Channel = Union[_SingleBand, Multiband]

_SINGLE_BAND_TYPES = (
    Lossy, QLimAmplifier, ThermalLoss, NoisyAmplifier, AdditiveNoise, Dephasing, Erasure, PauliQubit
)
_DISTILLABLE_TYPES = (Lossy, QLimAmplifier, Dephasing, Erasure)


def is_distillable(c: Channel) -> bool:
    if isinstance(c, Multiband):
        return is_distillable(c.inner)
    return isinstance(c, _DISTILLABLE_TYPES)


def ree_upper_bound(c: Channel) -> float:
    """REE upper bound on the two-way capacity, in bits per use.

    For distillable channels this is the capacity itself.
    """
    if isinstance(c, Multiband):
        inner = ree_upper_bound(c.inner)
        return c.bands * inner
    if isinstance(c, Lossy):
        return _plob(c.eta)
    if isinstance(c, QLimAmplifier):
        if math.isinf(c.g):
            return 0.0
        # log2(g) - log2(g - 1) == -log2(1 - 1/g), exact at g -> 1+
        return max(math.log2(c.g) - math.log2(c.g - 1.0), 0.0)
    if isinstance(c, Dephasing):
        if c.d == 2:
            return _kl_from_uniform_bit(c.probs[1])
        return max(math.fsum(p * math.log2(c.d * p) for p in c.probs if p > 0.0), 0.0)
    if isinstance(c, Erasure):
        return (1.0 - c.p) * math.log2(c.d)
    if isinstance(c, ThermalLoss):
        t = c.threshold
        if c.nbar >= t:
            return 0.0
        if c.nbar == 0.0:
            return _plob(c.eta)
        return _thermal_divergence(c.nbar, t)
    if isinstance(c, NoisyAmplifier):
        t = c.threshold
        if c.nbar >= t:
            return 0.0
        if c.nbar == 0.0:
            return ree_upper_bound(QLimAmplifier(c.g))
        return _thermal_divergence(c.nbar, t)
    if isinstance(c, AdditiveNoise):
        if c.xi >= 1.0:
            return 0.0
        if c.xi == 0.0:
            return math.inf
        return max(-_log1p_minus_x(c.xi - 1.0), 0.0) / _LN2
    if isinstance(c, PauliQubit):
        p_max = max(c.probs)
        if p_max < 0.5:
            return 0.0
        return _kl_from_uniform_bit(p_max)
    raise TypeError(f"not a channel: {c!r}")


def two_way_capacity(c: Channel) -> CapacityValue:
    exactness = Exactness.EXACT if is_distillable(c) else Exactness.UPPER_BOUND
    return CapacityValue(ree_upper_bound(c), exactness)


# -- JSON encoding -----------------------------------------------------------


def _number(obj: Mapping[str, Any], key: str, path: str) -> float:
    if key not in obj:
        raise ChannelError(f"{path}: missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ChannelError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _integer(obj: Mapping[str, Any], key: str, path: str) -> int:
    value = _number(obj, key, path)
    if value != int(value):
        raise ChannelError(f"{path}.{key}: expected an integer, got {obj[key]!r}")
    return int(value)


def _prob_list(obj: Mapping[str, Any], key: str, path: str) -> tuple:
    value = obj.get(key)
    if not isinstance(value, list) or not value:
        raise ChannelError(f"{path}.{key}: expected a non-empty list of probabilities")
    return tuple(_number({"p": v}, "p", f"{path}.{key}[{i}]") for i, v in enumerate(value))


def channel_from_dict(obj: Mapping[str, Any], path: str = "channel") -> Channel:
    """Build a channel from its JSON object, e.g. ``{"kind": "lossy", "eta": 0.5}``.

    ``path`` prefixes error messages so callers can point at the offending field.
    """
    if not isinstance(obj, Mapping):
        raise ChannelError(f"{path}: expected an object, got {obj!r}")
    kind = obj.get("kind")
    try:
        if kind == "lossy":
            return Lossy(_number(obj, "eta", path))
        if kind == "amplifier":
            return QLimAmplifier(_number(obj, "g", path))
        if kind == "thermal_loss":
            return ThermalLoss(_number(obj, "eta", path), _number(obj, "nbar", path))
        if kind == "noisy_amplifier":
            return NoisyAmplifier(_number(obj, "g", path), _number(obj, "nbar", path))
        if kind == "additive_noise":
            return AdditiveNoise(_number(obj, "xi", path))
        if kind == "dephasing":
            if "probs" not in obj and "p" in obj:
                return Dephasing.qubit(_number(obj, "p", path))
            return Dephasing(_prob_list(obj, "probs", path))
        if kind == "erasure":
            d = _integer(obj, "d", path) if "d" in obj else 2
            return Erasure(_number(obj, "p", path), d)
        if kind == "pauli":
            return PauliQubit(_prob_list(obj, "probs", path))
        if kind == "multiband":
            inner = channel_from_dict(obj.get("inner"), f"{path}.inner")
            return Multiband(_integer(obj, "bands", path), inner)
    except ChannelError as exc:
        msg = str(exc)
        raise ChannelError(msg if msg.startswith(path) else f"{path}: {msg}") from None
    raise ChannelError(f"{path}.kind: unknown channel kind {kind!r}")


def channel_to_dict(c: Channel) -> dict:
    if isinstance(c, Lossy):
        return {"kind": c.kind, "eta": c.eta}
    if isinstance(c, QLimAmplifier):
        return {"kind": c.kind, "g": c.g}
    if isinstance(c, ThermalLoss):
        return {"kind": c.kind, "eta": c.eta, "nbar": c.nbar}
    if isinstance(c, NoisyAmplifier):
        return {"kind": c.kind, "g": c.g, "nbar": c.nbar}
    if isinstance(c, AdditiveNoise):
        return {"kind": c.kind, "xi": c.xi}
    if isinstance(c, (Dephasing, PauliQubit)):
        return {"kind": c.kind, "probs": list(c.probs)}
    if isinstance(c, Erasure):
        return {"kind": c.kind, "p": c.p, "d": c.d}
    if isinstance(c, Multiband):
        return {"kind": c.kind, "bands": c.bands, "inner": channel_to_dict(c.inner)}
    raise TypeError(f"not a channel: {c!r}")
