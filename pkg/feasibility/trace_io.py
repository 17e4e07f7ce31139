"""JSON-lines trace export: one object per update, then one summary object."""

from __future__ import annotations

import json
from collections.abc import Iterable
from pathlib import Path

from feasibility.solver import IterationRecord, SolveOutcome

TRACE_FIELDS = ("k", "x", "i", "f", "g", "g_norm", "alpha", "delta", "flags")


NONFINITE = {"inf": "Infinity", "-inf": "-Infinity", "nan": "NaN"}


def fmt_real(v: float) -> str:
    # 17 significant digits round-trip every double
    text = format(float(v), ".17g")
    return NONFINITE.get(text, text)


def _vec(v) -> str:
    return "[" + ", ".join(fmt_real(c) for c in v) + "]"


def record_line(r: IterationRecord) -> str:
    parts = [
        f'"k": {r.k}',
        f'"x": {_vec(r.x_k)}',
        f'"i": {r.i_k}',
        f'"f": {fmt_real(r.f_value)}',
        f'"g": {_vec(r.g_k)}',
        f'"g_norm": {fmt_real(r.g_norm)}',
        f'"alpha": {fmt_real(r.alpha_k)}',
        f'"delta": {"null" if r.delta_k is None else fmt_real(r.delta_k)}',
        f'"flags": {json.dumps(sorted(f.value for f in r.flags))}',
    ]
    return "{" + ", ".join(parts) + "}"


def summary_line(outcome: SolveOutcome, extra: dict | None = None) -> str:
    summary = {"summary": True, **outcome.summary(), **(extra or {})}
    x = summary.pop("x")
    residual = summary.pop("final_residual")
    head = json.dumps(summary)[:-1]
    return f'{head}, "x": {_vec(x)}, "final_residual": {_vec(residual)}}}'


def write_trace(path: str | Path, outcome: SolveOutcome, extra: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in outcome.trace:
            f.write(record_line(r) + "\n")
        f.write(summary_line(outcome, extra) + "\n")


def read_trace(path: str | Path) -> tuple[list[dict], dict | None]:
    records, summary = [], None
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("summary"):
                summary = obj
            else:
                records.append(obj)
    return records, summary


def iter_reals(records: Iterable[dict]) -> Iterable[float]:
    for r in records:
        yield from r["x"]
        yield from r["g"]
        yield r["f"]
        yield r["g_norm"]
        yield r["alpha"]
        if r["delta"] is not None:
            yield r["delta"]
