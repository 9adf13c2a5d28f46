"""Two-way capacities and capacity bounds for quantum repeater chains and networks."""

__version__ = "0.1.0"

from .channels import (
    AdditiveNoise,
    CapacityValue,
    ChannelError,
    Dephasing,
    Erasure,
    Exactness,
    Lossy,
    Multiband,
    NoisyAmplifier,
    PauliQubit,
    QLimAmplifier,
    ThermalLoss,
    binary_entropy,
    is_distillable,
    ree_upper_bound,
    thermal_entropy,
    two_way_capacity,
)
from .chain import (
    Chain,
    chain_capacity,
    equidistant_lossy_chain,
    multiband_chain_capacity,
    multiband_point_to_point,
)
from .network import Cut, Edge, Network, cut_set, enumerate_cuts, load_network, parse_network
from .routing import (
    max_flow,
    maximum_spanning_tree,
    min_cut_bruteforce,
    multipath_capacity,
    single_path_capacity,
    widest_path,
)
from .multiuser import (
    multi_unicast_bounds,
    multicast_bounds,
    multiple_multicast_bounds,
    single_key_multicast_lower_bound,
)
