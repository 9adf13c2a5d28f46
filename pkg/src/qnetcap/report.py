"""Deterministic report objects and their JSON / CSV / text renderings.

A :class:`Report` only ever holds JSON-native data: floats are rounded to 12
significant digits when they enter a report and infinity is stored as the
string ``"inf"``.  Rendering and re-parsing are therefore lossless.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable, Optional, Sequence

from .chain import distance_to_eta, equidistant_lossy_chain, loss_db_to_eta, multiband_point_to_point
from .channels import CapacityValue
from .network import Cut, Network
from .routing import FlowAssignment, Route

__all__ = [
    "UNITS",
    "SIG_DIGITS",
    "Report",
    "fmt_number",
    "to_units",
    "quantity",
    "cut_to_dict",
    "route_to_dict",
    "flow_to_dict",
    "parse_sweep",
    "sweep_table",
    "load_schema",
    "error_document",
]

UNITS = ("bits", "nats")
SIG_DIGITS = 12
_SWEEP_VARIABLES = ("loss_db", "distance_km")


def to_units(bits: float, units: str) -> float:
    if units not in UNITS:
        raise ValueError(f"units must be one of {UNITS}, got {units!r}")
    return bits * math.log(2.0) if units == "nats" else bits


def fmt_number(x: float):
    """JSON-ready number: 12 significant digits, ``"inf"`` for infinity."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise ValueError("NaN cannot be reported")
    y = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if y == 0.0 else y


def quantity(value: CapacityValue, units: str = "bits") -> dict:
    return {"value": fmt_number(to_units(value.bits, units)), "exactness": value.exactness.value}


def cut_to_dict(net: Network, cut: Cut) -> dict:
    side_a = cut.side_a
    return {
        "side_a": sorted(cut.side_a),
        "side_b": sorted(cut.side_b),
        "cut_set": [e.id for e in net.edges if (e.u in side_a) != (e.v in side_a)],
    }


def route_to_dict(route: Optional[Route]) -> Optional[dict]:
    if route is None:
        return None
    return {"points": list(route.points), "edges": list(route.edges), "bottleneck_edge": route.bottleneck_edge}


def flow_to_dict(flow: FlowAssignment, units: str = "bits") -> dict:
    return {
        "edge_rates": {i: fmt_number(to_units(r, units)) for i, r in flow.edge_rates.items()},
        "orientation": {i: list(d) for i, d in flow.orientation.items()},
    }


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    if isinstance(x, (list, tuple)):
        return " ".join(_cell(v) for v in x)
    return str(x)


@dataclass
class Report:
    command: str
    query: dict
    units: str = "bits"
    values: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    table: Optional[dict] = None

    def to_dict(self) -> dict:
        doc = {
            "command": self.command,
            "query": self.query,
            "units": self.units,
            "values": self.values,
            "witnesses": self.witnesses,
            "provenance": self.provenance,
        }
        if self.table is not None:
            doc["table"] = self.table
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        return cls(
            command=doc["command"],
            query=doc["query"],
            units=doc["units"],
            values=doc["values"],
            witnesses=doc["witnesses"],
            provenance=doc["provenance"],
            table=doc.get("table"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.table is not None:
            writer.writerow(self.table["columns"])
            writer.writerows([_cell(v) for v in row] for row in self.table["rows"])
        else:
            writer.writerow(["quantity", "value", "exactness", "units"])
            for name, q in self.values.items():
                writer.writerow([name, _cell(q["value"]), q["exactness"], self.units])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.command}"]
        if self.query:
            lines.append("  " + ", ".join(f"{k}={_cell(v)}" for k, v in self.query.items()))
        for name, q in self.values.items():
            lines.append(f"{name}: {_cell(q['value'])} {self.units}/use ({q['exactness'].replace('_', ' ')})")
        for name, w in self.witnesses.items():
            lines.append(f"{name}: {json.dumps(w, separators=(', ', ': '))}")
        if self.table is not None:
            rows = [self.table["columns"]] + [[_cell(v) for v in row] for row in self.table["rows"]]
            widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
            for r in rows:
                lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        raise ValueError(f"unknown format {fmt!r}")


def error_document(kind: str, message: str) -> str:
    return json.dumps({"error": {"type": kind, "message": message}}, indent=2) + "\n"


def load_schema() -> dict:
    """The JSON schema every report (and error document) validates against."""
    return json.loads(resources.files("qnetcap").joinpath("report.schema.json").read_text())


# -- sweeps ------------------------------------------------------------------


def parse_sweep(spec: str) -> tuple:
    """Parse ``"var=start:stop:step"`` into ``(var, [samples])`` (stop inclusive)."""
    try:
        var, rng = spec.split("=", 1)
        start, stop, step = (float(x) for x in rng.split(":"))
    except ValueError:
        raise ValueError(f"sweep must look like 'var=start:stop:step', got {spec!r}") from None
    var = var.strip()
    if var not in _SWEEP_VARIABLES:
        raise ValueError(f"sweep variable must be one of {_SWEEP_VARIABLES}, got {var!r}")
    if not step > 0 or not stop >= start or math.isinf(stop) or start < 0:
        raise ValueError(f"empty or invalid sweep range {rng!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return var, [fmt_number(start + i * step) for i in range(count)]


def sweep_table(
    variable: str,
    samples: Sequence[float],
    repeaters: Iterable[int] = (),
    bands: Iterable[int] = (),
    db_per_km: float = 0.2,
    units: str = "bits",
) -> dict:
    """Capacity curves over total line loss or distance.

    One column per equidistant repeater count ``N=n`` and per multiband
    point-to-point configuration ``M=m``.
    """
    repeaters, bands = list(repeaters), list(bands)
    if not repeaters and not bands:
        raise ValueError("a sweep needs at least one repeater count or band count")
    columns = [variable] + [f"N={n}" for n in repeaters] + [f"M={m}" for m in bands]
    rows = []
    for x in samples:
        eta = loss_db_to_eta(x) if variable == "loss_db" else distance_to_eta(x, db_per_km)
        row: list[Any] = [x]
        row += [fmt_number(to_units(equidistant_lossy_chain(eta, n).bits, units)) for n in repeaters]
        row += [fmt_number(to_units(multiband_point_to_point(eta, m).bits, units)) for m in bands]
        rows.append(row)
    return {"columns": columns, "rows": rows}
