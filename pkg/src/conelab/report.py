"""CSV and JSON reports.

Both formats carry the same rows.  Floats are written with ``repr`` so a
value survives a round trip exactly, and nothing time- or host-dependent is
recorded, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from conelab import __version__
from conelab.checks import VerdictRow
from conelab.field import field_from_q
from conelab.fitting import slope_verdict
from conelab.scan import ScanResult

COLUMNS = ("check_id", "p", "e", "d", "q", "pair_inv_p", "pair_inv_r",
           "family", "ratio", "constant", "slope", "verdict")


@dataclass(frozen=True)
class ReportRow:
    check_id: str
    p: int
    e: int
    d: int
    q: int
    pair_inv_p: str
    pair_inv_r: str
    family: str
    ratio: float | None
    constant: float | None
    slope: float | None
    verdict: str

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in COLUMNS}


def _pe(q: int) -> tuple[int, int]:
    f = field_from_q(q)
    return f.p, f.e


def verdict_rows_to_report(rows: list[VerdictRow]) -> list[ReportRow]:
    out = []
    for row in rows:
        inv_p, inv_r = (str(row.pair.inv_p), str(row.pair.inv_r)) if row.pair else ("", "")
        for i, q in enumerate(row.qs):
            family = row.label
            if row.witnesses:
                family = f"{row.label}:{row.witnesses[i]}"
            value = row.constants[i]
            out.append(ReportRow(row.check_id, *_pe(q), row.d, q, inv_p, inv_r, family,
                                 value if row.pair else None, value, row.slope, row.verdict))
    return out


def scan_to_report(result: ScanResult) -> list[ReportRow]:
    cfg = result.config
    check_id = "scan" if cfg.mode == "check" else "scan-conjecture"
    out = []
    for res in result.results:
        inv_p, inv_r = str(res.pair.inv_p), str(res.pair.inv_r)
        summary = f"{res.position.value.lower()}:{res.verdict}"
        if res.note:
            summary += f" ({res.note})"
        for i, q in enumerate(result.qs):
            p, e = _pe(q)
            for curve in res.curves:
                out.append(ReportRow(check_id, p, e, cfg.d, q, inv_p, inv_r,
                                     f"{curve.family}:{curve.witnesses[i]}", curve.ratios[i], None,
                                     curve.slope, slope_verdict(curve.slope, cfg.threshold)))
            out.append(ReportRow(check_id, p, e, cfg.d, q, inv_p, inv_r,
                                 f"best(witness={res.witness_family})", res.best[i], None,
                                 res.best_slope, summary))
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(_cell(getattr(row, c)) for c in COLUMNS)
    return buf.getvalue()


def build_metadata(rows: list[ReportRow], seed: int, **extra) -> dict:
    qs = sorted({r.q for r in rows})
    meta = {
        "version": __version__,
        "seed": seed,
        "modulus": {str(q): list(field_from_q(q).modulus) for q in qs},
    }
    meta.update(extra)
    return meta


def render_json(rows: list[ReportRow], metadata: dict) -> str:
    doc = {"metadata": metadata, "columns": list(COLUMNS), "rows": [r.as_dict() for r in rows]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit_report(rows: list[ReportRow], fmt: str = "csv", path=None, *, seed: int = 0,
                **metadata) -> str:
    """Render ``rows`` and write them to ``path`` if given; returns the text."""
    if not rows:
        raise ValueError("no rows to report")
    if fmt == "csv":
        text = render_csv(rows)
    elif fmt == "json":
        text = render_json(rows, build_metadata(rows, seed, **metadata))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


_INT = {"p", "e", "d", "q"}
_FLOAT = {"ratio", "constant", "slope"}


def _typed(col: str, raw: str):
    if col in _INT:
        return int(raw)
    if col in _FLOAT:
        return float(raw) if raw else None
    return raw


def read_report(path) -> tuple[dict | None, list[ReportRow]]:
    """Parse a CSV or JSON report back into ``(metadata, rows)``."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        if doc.get("columns") != list(COLUMNS):
            raise ValueError(f"{path}: unexpected columns")
        return doc["metadata"], [ReportRow(**r) for r in doc["rows"]]
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError(f"{path}: unexpected header {header}")
    return None, [ReportRow(*(_typed(c, v) for c, v in zip(COLUMNS, line))) for line in reader]
