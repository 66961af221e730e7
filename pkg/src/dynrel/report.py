"""JSON and CSV serialisation of analysis results and Monte Carlo estimates."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .errors import DynrelError
from .model import AnalysisResult, Estimate, ci95

CSV_FIELDS = ["model", "kind", "method", "time", "value", "errorBound", "stdErr", "termCount", "seed", "n"]


class ReportFormatError(DynrelError, ValueError):
    pass


def to_record(r: AnalysisResult | Estimate) -> dict:
    """Flat record in the fixed field order of the report schema."""
    rec = {"model": r.model, "kind": r.kind, "method": r.method, "time": r.time, "value": r.value}
    if isinstance(r, Estimate):
        rec["stdErr"] = r.std_err
        rec["seed"] = r.seed
        rec["n"] = r.n
    else:
        rec["errorBound"] = r.error_bound
        if r.term_count is not None:
            rec["termCount"] = r.term_count
    return rec


def from_record(rec: dict) -> AnalysisResult | Estimate:
    if "stdErr" in rec:
        return Estimate(rec["model"], rec["kind"], rec["method"], rec["time"], rec["value"],
                        rec["stdErr"], rec["n"], rec["seed"], ci95(rec["value"], rec["stdErr"]))
    return AnalysisResult(rec["model"], rec["kind"], rec["method"], rec["time"], rec["value"],
                          rec["errorBound"], rec.get("termCount"))


def emit_report(results: Iterable[AnalysisResult | Estimate], fmt: str = "json") -> bytes:
    """Serialise results; a single JSON result is an object, several an array."""
    results = list(results)
    if not results:
        raise ReportFormatError("nothing to report")
    records = [to_record(r) for r in results]
    if fmt == "json":
        body = records[0] if len(records) == 1 else records
        return (json.dumps(body, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
        return buf.getvalue().encode()
    raise ReportFormatError(f"unknown report format {fmt!r} (expected json or csv)")


def load_report(data: bytes | str) -> list[AnalysisResult | Estimate]:
    """Inverse of the JSON form of :func:`emit_report`."""
    body = json.loads(data)
    if isinstance(body, dict):
        body = [body]
    return [from_record(rec) for rec in body]
