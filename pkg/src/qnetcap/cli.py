"""Command-line entry point.

Exit status: 0 on success, 2 on usage errors, 1 on invalid input or any
domain error (the diagnostic goes to stderr; with ``--format json`` an error
document is also printed to stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .chain import (
    DB_PER_KM_FIBER,
    chain_asymptotics,
    chain_capacity,
    distance_to_eta,
    equidistant_lossy_chain,
    eta_to_loss_db,
    load_chain,
    loss_db_to_eta,
    multiband_chain_capacity,
    per_link_eta,
)
from .channels import ChannelError, ree_upper_bound
from .multiuser import (
    multi_unicast_bounds,
    multicast_bounds,
    multiple_multicast_bounds,
    single_key_multicast_lower_bound,
)
from .network import (
    Network,
    NetworkError,
    cut_capacity_multi_edge,
    cut_capacity_single_edge,
    enumerate_cuts,
    load_network,
)
from .report import (
    Report,
    cut_to_dict,
    error_document,
    flow_to_dict,
    fmt_number,
    parse_sweep,
    quantity,
    route_to_dict,
    sweep_table,
    to_units,
)
from .routing import min_cut_bruteforce, multipath_capacity, single_path_capacity

__all__ = ["run", "main", "run_query"]


class UsageError(Exception):
    pass


def _names(text: Optional[str]) -> list:
    if not text:
        return []
    return [p.strip() for p in text.split(",") if p.strip()]


def _ints(text: Optional[str], flag: str) -> list:
    try:
        return [int(x) for x in _names(text)]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _pairs(text: str) -> list:
    pairs = []
    for item in _names(text):
        a, sep, b = item.partition(":")
        if not sep or not a or not b:
            raise UsageError(f"--pairs expects 'a1:b1,a2:b2', got {text!r}")
        pairs.append((a, b))
    if not pairs:
        raise UsageError("--pairs is empty")
    return pairs


def _provenance(net: Network) -> dict:
    return {e.id: e.channel.formula for e in net.edges}


def _require(args, *flags):
    for flag in flags:
        if getattr(args, flag) in (None, ""):
            raise UsageError(f"--{flag.replace('_', '-')} is required")


# -- report builders (also used by run_query) --------------------------------


def single_path_report(net: Network, a: str, b: str, units: str, query: dict) -> Report:
    rep = single_path_capacity(net, a, b)
    return Report(
        "netcap single-path",
        query,
        units,
        values={"capacity": quantity(rep.value, units)},
        witnesses={"route": route_to_dict(rep.route), "cut": cut_to_dict(net, rep.cut)},
        provenance=_provenance(net),
    )


def multipath_report(net: Network, a: str, b: str, units: str, query: dict) -> Report:
    rep = multipath_capacity(net, a, b)
    witnesses = {"cut": cut_to_dict(net, rep.cut)}
    if rep.flow is not None:
        witnesses["flow"] = flow_to_dict(rep.flow, units)
    return Report(
        "netcap multi-path",
        query,
        units,
        values={"capacity": quantity(rep.value, units)},
        witnesses=witnesses,
        provenance=_provenance(net),
    )


def _constraints(net: Network, bounds, labels: Sequence[str], units: str):
    values, out = {}, []
    for c in bounds.constraints:
        name = "+".join(f"R[{labels[i]}]" for i in c.subset)
        values[name] = quantity(c.bound, units)
        out.append(
            {
                "subset": list(c.subset),
                "sessions": [labels[i] for i in c.subset],
                "bound": quantity(c.bound, units),
                "cut": cut_to_dict(net, c.cut),
            }
        )
    return values, out


def multi_unicast_report(net, pairs, routing, units, query) -> Report:
    bounds = multi_unicast_bounds(net, pairs, routing)
    values, constraints = _constraints(net, bounds, [f"{a}->{b}" for a, b in pairs], units)
    return Report("multi-unicast", query, units, values, {"constraints": constraints}, _provenance(net))


def multicast_report(net, a, receivers, units, query) -> Report:
    bounds = multicast_bounds(net, a, receivers)
    values, constraints = _constraints(net, bounds, [f"{a}->{b}" for b in receivers], units)
    values = {"symmetric_bound": quantity(bounds.symmetric_bound, units), **values}
    return Report("multicast", query, units, values, {"constraints": constraints}, _provenance(net))


def multiple_multicast_report(net, senders, receivers, units, query) -> Report:
    bounds = multiple_multicast_bounds(net, senders, receivers)
    values, constraints = _constraints(net, bounds, list(senders), units)
    return Report("multi-multicast", query, units, values, {"constraints": constraints}, _provenance(net))


def single_key_report(net, a, receivers, units, query) -> Report:
    value = single_key_multicast_lower_bound(net, a, receivers)
    return Report(
        "single-key-lb", query, units, {"single_key_rate": quantity(value, units)}, {}, _provenance(net)
    )


def run_query(net: Network, query: dict, units: str = "bits") -> Report:
    """Answer a JSON query such as ``{"mode": "multicast", "source": "a", "receivers": ["b1"]}``.

    Modes: single_path, multipath (source, sink); multi_unicast (pairs,
    optional routing); multicast and single_key (source, receivers);
    multiple_multicast (senders, receivers).
    """
    if not isinstance(query, dict) or "mode" not in query:
        raise NetworkError("query must be an object with a 'mode' field")
    mode = query["mode"]
    try:
        if mode == "single_path":
            return single_path_report(net, query["source"], query["sink"], units, query)
        if mode == "multipath":
            return multipath_report(net, query["source"], query["sink"], units, query)
        if mode == "multi_unicast":
            pairs = [tuple(p) for p in query["pairs"]]
            return multi_unicast_report(net, pairs, query.get("routing", "multipath"), units, query)
        if mode == "multicast":
            return multicast_report(net, query["source"], list(query["receivers"]), units, query)
        if mode == "multiple_multicast":
            return multiple_multicast_report(
                net, list(query["senders"]), list(query["receivers"]), units, query
            )
        if mode == "single_key":
            return single_key_report(net, query["source"], list(query["receivers"]), units, query)
    except KeyError as exc:
        raise NetworkError(f"query mode {mode!r} is missing field {exc.args[0]!r}") from None
    raise NetworkError(f"unknown query mode {mode!r}")


# -- subcommands -------------------------------------------------------------


def _cmd_chain(args) -> Report:
    units = args.units
    query = {}
    if args.file:
        chain = load_chain(args.file)
        query["file"] = str(args.file)
        value = chain_capacity(chain)
        per_link = [fmt_number(to_units(ree_upper_bound(c), units)) for c in chain.links]
        weakest = min(range(len(chain.links)), key=lambda i: ree_upper_bound(chain.links[i]))
        return Report(
            "chain",
            query,
            units,
            {"capacity": quantity(value, units)},
            {"link_values": per_link, "weakest_link": weakest},
            {f"link{i}": c.formula for i, c in enumerate(chain.links)},
        )
    if not args.equidistant:
        raise UsageError("chain needs a chain file or --equidistant")
    if (args.loss_db is None) == (args.distance_km is None):
        raise UsageError("--equidistant needs exactly one of --loss-db or --distance-km")
    repeaters = _ints(args.repeaters, "--repeaters") or [0]
    if len(repeaters) != 1:
        raise UsageError("chain takes a single --repeaters value")
    n = repeaters[0]
    if args.loss_db is not None:
        eta = loss_db_to_eta(args.loss_db)
        query["loss_db"] = args.loss_db
    else:
        eta = distance_to_eta(args.distance_km, args.db_per_km)
        query.update(distance_km=args.distance_km, db_per_km=args.db_per_km)
    query.update(equidistant=True, repeaters=n)
    link_eta = per_link_eta(eta, n)
    witnesses = {"per_link_eta": fmt_number(link_eta), "per_link_loss_db": fmt_number(eta_to_loss_db(link_eta))}
    bands = _ints(args.bands, "--bands")
    if bands:
        if len(bands) != 1:
            raise UsageError("chain takes a single --bands value")
        query["bands"] = bands[0]
        value = multiband_chain_capacity([(link_eta, bands[0])] * (n + 1))
        provenance = {"chain": "multiband_chain:-M*log2(1-eta^(1/(N+1)))"}
    else:
        value = equidistant_lossy_chain(eta, n)
        provenance = {"chain": "equidistant_lossy_chain:-log2(1-eta^(1/(N+1)))"}
        if n >= 1 and 0.0 < eta < 1.0:
            asym = chain_asymptotics(eta, n)
            witnesses["asymptotics"] = {
                "repeater_dominant": fmt_number(asym.repeater_dominant),
                "loss_dominant": fmt_number(to_units(asym.loss_dominant, units)),
            }
    return Report("chain", query, units, {"capacity": quantity(value, units)}, witnesses, provenance)


def _load(args) -> Network:
    return load_network(args.file)


def _cmd_single_path(args) -> Report:
    _require(args, "from_", "to")
    net = _load(args)
    query = {"file": str(args.file), "from": args.from_, "to": args.to}
    return single_path_report(net, args.from_, args.to, args.units, query)


def _cmd_multi_path(args) -> Report:
    _require(args, "from_", "to")
    net = _load(args)
    query = {"file": str(args.file), "from": args.from_, "to": args.to}
    return multipath_report(net, args.from_, args.to, args.units, query)


def _cmd_cuts(args) -> Report:
    _require(args, "from_", "to")
    net = _load(args)
    sources, sinks = _names(args.from_), _names(args.to)
    units = args.units
    rows = []
    for k, cut in enumerate(enumerate_cuts(net, sources, sinks)):
        d = cut_to_dict(net, cut)
        single = cut_capacity_single_edge(net, cut)
        multi = cut_capacity_multi_edge(net, cut)
        rows.append(
            [
                k,
                d["side_a"],
                d["side_b"],
                d["cut_set"],
                fmt_number(to_units(single.bits, units)),
                fmt_number(to_units(multi.bits, units)),
                single.exactness.value,
            ]
        )
    single_min = min_cut_bruteforce(net, sources, sinks, "single_edge")
    multi_min = min_cut_bruteforce(net, sources, sinks, "multi_edge")
    return Report(
        "cuts",
        {"file": str(args.file), "from": sources, "to": sinks},
        units,
        {"min_single_edge": quantity(single_min.value, units), "min_multi_edge": quantity(multi_min.value, units)},
        {"min_single_edge_cut": single_min.index, "min_multi_edge_cut": multi_min.index},
        _provenance(net),
        table={
            "columns": ["index", "side_a", "side_b", "cut_set", "single_edge", "multi_edge", "exactness"],
            "rows": rows,
        },
    )


def _cmd_multicast(args) -> Report:
    _require(args, "from_", "receivers")
    net = _load(args)
    receivers = _names(args.receivers)
    query = {"file": str(args.file), "from": args.from_, "receivers": receivers}
    return multicast_report(net, args.from_, receivers, args.units, query)


def _cmd_multi_unicast(args) -> Report:
    _require(args, "pairs")
    net = _load(args)
    pairs = _pairs(args.pairs)
    routing = args.routing.replace("-", "_")
    query = {"file": str(args.file), "pairs": [list(p) for p in pairs], "routing": routing}
    return multi_unicast_report(net, pairs, routing, args.units, query)


def _cmd_multi_multicast(args) -> Report:
    _require(args, "senders", "receivers")
    net = _load(args)
    senders, receivers = _names(args.senders), _names(args.receivers)
    query = {"file": str(args.file), "senders": senders, "receivers": receivers}
    return multiple_multicast_report(net, senders, receivers, args.units, query)


def _cmd_single_key(args) -> Report:
    _require(args, "from_", "receivers")
    net = _load(args)
    receivers = _names(args.receivers)
    query = {"file": str(args.file), "from": args.from_, "receivers": receivers}
    return single_key_report(net, args.from_, receivers, args.units, query)


def _cmd_sweep(args) -> Report:
    _require(args, "sweep")
    try:
        variable, samples = parse_sweep(args.sweep)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    repeaters = _ints(args.repeaters, "--repeaters")
    bands = _ints(args.bands, "--bands")
    if not repeaters and not bands:
        repeaters = [0, 1, 2, 10, 100] if variable == "loss_db" else [0, 1, 2]
        bands = [] if variable == "loss_db" else [10, 100, 1000]
    query = {"sweep": args.sweep, "repeaters": repeaters, "bands": bands}
    if variable == "distance_km":
        query["db_per_km"] = args.db_per_km
    table = sweep_table(variable, samples, repeaters, bands, args.db_per_km, args.units)
    provenance = {f"N={n}": "equidistant_lossy_chain" for n in repeaters}
    provenance.update({f"M={m}": "multiband_point_to_point" for m in bands})
    return Report("sweep", query, args.units, {}, {}, provenance, table=table)


def _cmd_query(args) -> Report:
    net = _load(args)
    try:
        query = json.loads(Path(args.query).read_text())
    except json.JSONDecodeError as exc:
        raise NetworkError(f"{args.query}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return run_query(net, query, args.units)


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a flag given before the subcommand from being reset by the subparser
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--units", choices=("bits", "nats"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="qnetcap",
        description="End-to-end capacities of quantum repeater chains and networks.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def network_cmd(target, name, func, help_):
        p = target.add_parser(name, parents=[common], help=help_)
        p.add_argument("file", type=Path, help="network JSON file")
        p.set_defaults(func=func)
        return p

    p = sub.add_parser("chain", parents=[common], help="capacity of a repeater chain")
    p.add_argument("file", nargs="?", type=Path, help="chain JSON file")
    p.add_argument("--equidistant", action="store_true", help="evenly spaced repeaters on a lossy line")
    p.add_argument("--loss-db", type=float, help="total loss of the line in dB")
    p.add_argument("--distance-km", type=float, help="total length of the line in km")
    p.add_argument("--repeaters", help="number of repeaters N")
    p.add_argument("--bands", help="bands per link (multiband chain)")
    p.add_argument("--db-per-km", type=float, default=DB_PER_KM_FIBER)
    p.set_defaults(func=_cmd_chain)

    netcap = sub.add_parser("netcap", help="unicast network capacities").add_subparsers(
        dest="routing_mode", required=True
    )
    for name, func in (("single-path", _cmd_single_path), ("multi-path", _cmd_multi_path)):
        p = network_cmd(netcap, name, func, f"{name} capacity between two points")
        p.add_argument("--from", dest="from_")
        p.add_argument("--to")

    p = network_cmd(sub, "cuts", _cmd_cuts, "enumerate entanglement cuts")
    p.add_argument("--from", dest="from_", help="comma-separated points kept on side A")
    p.add_argument("--to", help="comma-separated points kept on side B")

    p = network_cmd(sub, "multicast", _cmd_multicast, "multicast outer bounds")
    p.add_argument("--from", dest="from_")
    p.add_argument("--receivers")

    p = network_cmd(sub, "multi-unicast", _cmd_multi_unicast, "multiple-unicast outer bounds")
    p.add_argument("--pairs", help="'a1:b1,a2:b2'")
    p.add_argument("--routing", choices=("single-path", "multipath"), default="multipath")

    p = network_cmd(sub, "multi-multicast", _cmd_multi_multicast, "multiple-multicast outer bounds")
    p.add_argument("--senders", "--from", dest="senders")
    p.add_argument("--receivers")

    p = network_cmd(sub, "single-key-lb", _cmd_single_key, "network-coding single-key multicast rate")
    p.add_argument("--from", dest="from_")
    p.add_argument("--receivers")

    p = sub.add_parser("sweep", parents=[common], help="capacity curves over loss or distance")
    p.add_argument("--sweep", help="'loss_db=0:70:1' or 'distance_km=0:500:5'")
    p.add_argument("--repeaters", help="comma-separated repeater counts")
    p.add_argument("--bands", help="comma-separated band counts (multiband point-to-point)")
    p.add_argument("--db-per-km", type=float, default=DB_PER_KM_FIBER)
    p.set_defaults(func=_cmd_sweep)

    p = network_cmd(sub, "query", _cmd_query, "answer a JSON query file")
    p.add_argument("query", type=Path, help="query JSON file")
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.format = getattr(args, "format", "text")
    args.units = getattr(args, "units", "bits")
    try:
        report = args.func(args)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"qnetcap: error: {exc}", file=stderr)
        return 2
    except (NetworkError, ChannelError, ValueError, OSError) as exc:
        kind = type(exc).__name__
        print(f"qnetcap: {kind}: {exc}", file=stderr)
        if args.format == "json":
            stdout.write(error_document(kind, str(exc)))
        return 1
    stdout.write(report.render(args.format))
    return 0


def main() -> None:
    sys.exit(run())
