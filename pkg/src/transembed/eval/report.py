"""Result tables: one CSV row per (model, dataset) plus a pivoted pretty view."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

FIELDS = ("model", "dataset", "metric", "value", "used", "skipped")

RHO = "rho"
PERCENT = "%"


@dataclass(frozen=True)
class ReportRow:
    model: str
    dataset: str
    metric: str
    value: float
    used: int
    skipped: int

    def __post_init__(self):
        if self.metric not in (RHO, PERCENT):
            raise ValueError(f"metric must be {RHO!r} or {PERCENT!r}")


def format_value(value: float) -> str:
    return f"{value:.6f}"


def to_csv(rows, out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([r.model, r.dataset, r.metric, format_value(r.value), r.used, r.skipped])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def read_csv(text: str) -> list[ReportRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != FIELDS:
        raise ValueError(f"report header must be {','.join(FIELDS)}")
    return [ReportRow(r["model"], r["dataset"], r["metric"], float(r["value"]),
                      int(r["used"]), int(r["skipped"])) for r in reader]


def pretty(rows) -> str:
    """Datasets down, models across, two decimals; percentages shown as fractions."""
    rows = list(rows)
    models = list(dict.fromkeys(r.model for r in rows))
    datasets = list(dict.fromkeys((r.dataset, r.metric) for r in rows))
    cell = {(r.model, r.dataset): r.value for r in rows}
    table = [["", ""] + models]
    for name, metric in datasets:
        table.append([name, metric] + [f"{cell[(m, name)]:.2f}" if (m, name) in cell else "-"
                                       for m in models])
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    lines = []
    for k, row in enumerate(table):
        parts = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
        parts += [c.rjust(w) for c, w in zip(row[2:], widths[2:])]
        lines.append("  ".join(parts).rstrip())
        if k == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines) + "\n"
