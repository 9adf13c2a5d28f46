"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as they run (visible with ``-s``) and again in the
terminal summary of every pytest run.
"""

import math
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES, butterfly, diamond
from netgen import close, corpus, reenumerate
from qnetcap.chain import (
    chain_capacity,
    distance_to_eta,
    equidistant_lossy_chain,
    loss_db_to_eta,
    multiband_chain_capacity,
    multiband_point_to_point,
    per_link_eta,
)
from qnetcap.channels import (
    AdditiveNoise,
    Lossy,
    NoisyAmplifier,
    PauliQubit,
    ThermalLoss,
    ree_upper_bound,
    two_way_capacity,
)
from qnetcap.multiuser import (
    multi_unicast_bounds,
    multicast_bounds,
    multiple_multicast_bounds,
    single_key_multicast_lower_bound,
)
from qnetcap.report import sweep_table
from qnetcap.routing import (
    max_flow,
    maximum_spanning_tree,
    min_cut_bruteforce,
    multipath_capacity,
    single_path_capacity,
    tree_route,
    widest_path,
)

CORPUS_SEED = 20240917
CORPUS_SIZE = 200


def verdict(number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    line = f"{status} {number}: {title}" + (f" ({detail})" if detail else "")
    if failures:
        line += " -- " + "; ".join(failures[:3])
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failures, line


@pytest.fixture(scope="module")
def random_corpus():
    return list(corpus(CORPUS_SEED, CORPUS_SIZE, max_points=10, connected=True, distillable=True))


def test_criterion_01_diamond_doubling():
    start = time.perf_counter()
    net = diamond(Lossy(0.5))
    single = single_path_capacity(net, "a", "b").value
    multi = multipath_capacity(net, "a", "b").value
    elapsed = time.perf_counter() - start
    failures = []
    if not (abs(single.bits - 1.0) <= 1e-12 and single.exact):
        failures.append(f"single-path {single}")
    if not (abs(multi.bits - 2.0) <= 1e-12 and multi.exact):
        failures.append(f"multipath {multi}")
    if elapsed >= 1.0:
        failures.append(f"took {elapsed:.2f}s")
    verdict(1, "diamond doubling", failures, f"single={single.bits}, multi={multi.bits}, {elapsed * 1e3:.1f} ms")


def test_criterion_02_three_db_rule():
    failures = []
    for n in (0, 1, 2, 10, 100):
        value = equidistant_lossy_chain(loss_db_to_eta(3.0103 * (n + 1)), n).bits
        if abs(value - 1.0) > 1e-6:
            failures.append(f"N={n}: {value}")
    # 15 km at 0.2 dB/km is 3.0 dB, so the rule holds up to the rounding 3.0103 dB -> 3 dB
    km15 = two_way_capacity(Lossy(distance_to_eta(15.0))).bits
    rounding = two_way_capacity(Lossy(loss_db_to_eta(3.0))).bits - 1.0
    if not (km15 >= 1.0 and abs(km15 - 1.0) <= rounding + 1e-12):
        failures.append(f"15 km link gives {km15}")
    verdict(2, "3 dB rule", failures, f"15 km link = {km15:.6f}")


def test_criterion_03_loss_sweep():
    repeaters = [0, 1, 2, 10, 100]
    table = sweep_table("loss_db", [float(x) for x in range(71)], repeaters)
    failures = []
    for row in table["rows"]:
        db, values = row[0], [math.inf if v == "inf" else v for v in row[1:]]
        eta = 10.0 ** (-db / 10.0)
        for n, v in zip(repeaters, values):
            expected = math.inf if eta == 1.0 else -math.log2(1.0 - eta ** (1.0 / (n + 1)))
            if not close(v, expected, 1e-9):
                failures.append(f"{db} dB N={n}: {v} vs {expected}")
        if any(x > y for x, y in zip(values, values[1:])):
            failures.append(f"{db} dB: columns decrease in N")
        plob = math.inf if eta == 1.0 else -math.log2(1.0 - eta)
        if not close(values[0], plob, 1e-9):
            failures.append(f"{db} dB: N=0 column {values[0]} vs {plob}")
    verdict(3, "loss sweep 0-70 dB", failures, f"{len(table['rows'])} rows x {len(table['columns'])} columns")


def test_criterion_04_widest_path_oracle(random_corpus):
    start = time.perf_counter()
    failures = []
    for k, (net, a, b) in enumerate(random_corpus):
        value = widest_path(net, a, b).capacity.bits
        oracle = min_cut_bruteforce(net, {a}, {b}, "single_edge").value.bits
        route = tree_route(net, maximum_spanning_tree(net), a, b)
        tree_value = net.weights[route.bottleneck_edge]
        if not close(value, oracle, 1e-9):
            failures.append(f"network {k}: widest {value} vs cut {oracle}")
        if not close(value, tree_value, 1e-9):
            failures.append(f"network {k}: widest {value} vs tree {tree_value}")
    elapsed = time.perf_counter() - start
    if elapsed >= 30.0:
        failures.append(f"took {elapsed:.1f}s")
    verdict(4, "widest path = min single-edge cut = tree bottleneck", failures, f"{len(random_corpus)} networks, {elapsed:.2f}s")


def test_criterion_05_max_flow_oracle(random_corpus):
    failures = []
    worst_residual = 0.0
    for k, (net, a, b) in enumerate(random_corpus):
        flow = max_flow(net, a, b)
        oracle = min_cut_bruteforce(net, {a}, {b}, "multi_edge").value.bits
        if not close(flow.value, oracle, 1e-6):
            failures.append(f"network {k}: flow {flow.value} vs cut {oracle}")
        for p in net.points:
            if p in (a, b):
                continue
            residual = abs(math.fsum(flow.edge_rates[e.id] * (1 if e.u == p else -1) for e in net.incident[p]))
            worst_residual = max(worst_residual, residual)
            if residual >= 1e-9:
                failures.append(f"network {k}: conservation residual {residual} at {p}")
        for e in net.edges:
            if abs(flow.edge_rates[e.id]) > net.weights[e.id] + 1e-9:
                failures.append(f"network {k}: edge {e.id} over capacity")
    verdict(5, "max flow = min multi-edge cut", failures, f"worst conservation residual {worst_residual:.1e}")


def _straddle(rng, t):
    """A value near threshold t: relative offsets, ulp steps or t itself."""
    r = rng.random()
    if r < 0.1:
        return t
    if r < 0.3:
        x = t
        for _ in range(rng.randint(1, 4)):
            x = math.nextafter(x, math.inf if rng.random() < 0.5 else 0.0)
        return x
    return t * (1.0 + rng.uniform(-0.5, 0.5))


def test_criterion_06_channel_thresholds():
    rng = random.Random(6)
    failures = []
    draws = 1000
    for _ in range(draws):
        eta = rng.uniform(0.01, 0.99)
        c = ThermalLoss(eta, _straddle(rng, eta / (1.0 - eta)))
        if (ree_upper_bound(c) == 0.0) != (c.nbar >= c.threshold):
            failures.append(f"{c}")
        g = rng.uniform(1.01, 10.0)
        c = NoisyAmplifier(g, _straddle(rng, 1.0 / (g - 1.0)))
        if (ree_upper_bound(c) == 0.0) != (c.nbar >= c.threshold):
            failures.append(f"{c}")
        xi = _straddle(rng, 1.0)
        if (ree_upper_bound(AdditiveNoise(xi)) == 0.0) != (xi >= 1.0):
            failures.append(f"AdditiveNoise({xi})")
        p_max = _straddle(rng, 0.5)
        rest = 1.0 - p_max
        c = PauliQubit((p_max, rest / 3, rest / 3, rest - 2 * (rest / 3)))
        # 1 - H2(1/2) = 0, so the bound vanishes exactly when p_max <= 1/2
        if (ree_upper_bound(c) == 0.0) != (max(c.probs) <= 0.5):
            failures.append(f"{c}")
    verdict(6, "channel thresholds", failures, f"{draws} draws per family")


def test_criterion_07_multiband_consistency():
    rng = random.Random(7)
    failures = []
    for _ in range(500):
        eta, m, n = rng.random(), rng.randint(1, 1000), rng.randint(0, 100)
        p2p = multiband_point_to_point(eta, m).bits
        ref = m * two_way_capacity(Lossy(eta)).bits
        if abs(p2p - ref) > 1e-12 * max(1.0, ref):
            failures.append(f"p2p eta={eta} M={m}")
        chain = multiband_chain_capacity([(per_link_eta(eta, n), m)] * (n + 1)).bits
        closed = -m * math.log2(1.0 - eta ** (1.0 / (n + 1)))
        if abs(chain - closed) > 1e-12 * max(1.0, closed):
            failures.append(f"chain eta={eta} M={m} N={n}: {chain} vs {closed}")
    verdict(7, "multiband consistency", failures, "500 draws")


def test_criterion_08_multiband_crossing():
    def gap(km):
        eta = distance_to_eta(km, 0.2)
        return multiband_point_to_point(eta, 1000).bits - equidistant_lossy_chain(eta, 1).bits

    at50, at400 = gap(50.0), gap(400.0)
    failures = []
    if not at50 > 0:
        failures.append(f"at 50 km M=1000 minus N=1 is {at50}")
    if not at400 < 0:
        failures.append(f"at 400 km M=1000 minus N=1 is {at400}")
    verdict(8, "M=1000 vs N=1 crossing", failures, f"gap {at50:.3g} at 50 km, {at400:.3g} at 400 km")


def test_criterion_09_multiuser_reductions(random_corpus):
    failures = []
    for k, (net, a, b) in enumerate(random_corpus):
        multi = multipath_capacity(net, a, b).value.bits
        single = single_path_capacity(net, a, b).value.bits
        checks = {
            "multi-unicast multipath": (multi_unicast_bounds(net, [(a, b)], "multipath").bound_for([0]).bits, multi),
            "multi-unicast single-path": (multi_unicast_bounds(net, [(a, b)], "single_path").bound_for([0]).bits, single),
            "multicast": (multicast_bounds(net, a, [b]).symmetric_bound.bits, multi),
            "multicast constraint": (multicast_bounds(net, a, [b]).bound_for([0]).bits, multi),
            "multiple-multicast": (multiple_multicast_bounds(net, [a], [b]).bound_for([0]).bits, multi),
            "single-key": (single_key_multicast_lower_bound(net, a, [b]).bits, multi),
        }
        for mode, (got, want) in checks.items():
            if not close(got, want, 1e-9):
                failures.append(f"network {k} {mode}: {got} vs {want}")
        receivers = [p for p in net.points if p != a][:3]
        lb = single_key_multicast_lower_bound(net, a, receivers).bits
        sym = multicast_bounds(net, a, receivers).symmetric_bound.bits
        if lb != sym:
            failures.append(f"network {k}: single-key {lb} vs symmetric {sym}")

    net = butterfly()
    pairs = [("a1", "b1"), ("a2", "b2")]
    for routing, functional in (("multipath", sum), ("single_path", max)):
        for c in multi_unicast_bounds(net, pairs, routing).constraints:
            want = reenumerate(net, {pairs[i][0] for i in c.subset}, {pairs[i][1] for i in c.subset}, functional=functional)
            if c.bound.bits != want:
                failures.append(f"butterfly {routing} {c.subset}: {c.bound.bits} vs {want}")
    for c in multicast_bounds(net, "a1", ["b1", "b2"]).constraints:
        want = reenumerate(net, {"a1"}, {["b1", "b2"][i] for i in c.subset})
        if c.bound.bits != want:
            failures.append(f"butterfly multicast {c.subset}: {c.bound.bits} vs {want}")
    for c in multiple_multicast_bounds(net, ["a1", "a2"], ["b1", "b2"]).constraints:
        want = reenumerate(net, {["a1", "a2"][i] for i in c.subset}, some_b=["b1", "b2"])
        if c.bound.bits != want:
            failures.append(f"butterfly multiple-multicast {c.subset}: {c.bound.bits} vs {want}")
    verdict(9, "multi-user reductions", failures, f"{len(random_corpus)} networks + butterfly oracle")


def test_criterion_10_equidistant_optimality():
    rng = random.Random(10)
    total_db = 20.0
    failures = []
    uniform_seen = 0
    for k in range(200):
        n = rng.randint(1, 20)
        if k % 10 == 0:
            split = [total_db / (n + 1)] * (n + 1)
        else:
            w = [rng.expovariate(1.0) for _ in range(n + 1)]
            split = [total_db * x / sum(w) for x in w]
        value = chain_capacity([Lossy(loss_db_to_eta(db)) for db in split]).bits
        best = equidistant_lossy_chain(loss_db_to_eta(total_db), n).bits
        deviation = max(abs(db - total_db / (n + 1)) for db in split)
        if value > best + 1e-12:
            failures.append(f"split {k} beats equidistant by {value - best}")
        at_equality = abs(value - best) <= 1e-12
        if at_equality != (deviation <= 1e-9):
            failures.append(f"split {k}: equality={at_equality} but deviation {deviation}")
        uniform_seen += deviation <= 1e-9
    verdict(10, "equidistant optimality", failures, f"200 splits, {uniform_seen} uniform")
