"""Machine-readable run reports.

One :class:`RunReport` per CLI invocation (or per table row), holding the
echoed command, the solver configuration, a content fingerprint of the model
and one :class:`ConstantRow` per reported quantity.  JSON serialization
round-trips losslessly; CSV and text renderings use fixed formatting (four
decimals for constants, two-digit scientific for gaps) so repeated runs are
byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import CertboundError


class ReportFieldError(CertboundError):
    """A report field is NaN or infinite; the run must abort instead."""


@dataclass
class ConstantRow:
    """One certified (or sampled) quantity.

    ``value`` is the reported constant: the certified safe side of the
    sandwich for optimization-backed quantities.  ``lower`` is the achieved
    point-witness side (may be absent for assembled or sampled quantities);
    ``gap`` is the width of the underlying sandwich.
    """

    name: str
    value: float
    lower: float | None = None
    gap: float | None = None
    eps_optimal: bool | None = None
    subproblems: int | None = None
    evals: int | None = None
    wall_time_ms: float | None = None


@dataclass
class RunReport:
    command: str
    config: dict
    model_fingerprint: str
    results: list[ConstantRow] = field(default_factory=list)
    label: str = ""

    def validate(self) -> None:
        for row in self.results:
            for name in ("value", "lower", "gap", "wall_time_ms"):
                x = getattr(row, name)
                if x is not None and not math.isfinite(x):
                    raise ReportFieldError(
                        f"report field {row.name}.{name} is {x!r}"
                    )

    def strip_timing(self) -> None:
        for row in self.results:
            row.wall_time_ms = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        rows = [ConstantRow(**row) for row in data.get("results", [])]
        return cls(
            command=data["command"],
            config=dict(data["config"]),
            model_fingerprint=data["model_fingerprint"],
            results=rows,
            label=data.get("label", ""),
        )


def to_json(reports: Sequence[RunReport]) -> str:
    """Always an array, one object per report, keys sorted."""
    payload = [r.to_dict() for r in reports]
    return json.dumps(payload, indent=2, sort_keys=True)


def _fmt_value(x: float | None) -> str:
    return "" if x is None else f"{x:.4f}"


def _fmt_gap(x: float | None) -> str:
    return "" if x is None else f"{x:.2e}"


def _fmt_flag(x: bool | None) -> str:
    return "" if x is None else ("true" if x else "false")


def _fmt_time(x: float | None) -> str:
    return "" if x is None else f"{x:.1f}"


_COLUMNS = ("n", "name", "value", "lower", "gap", "eps_optimal", "wall_time_ms")


def _table_cells(reports: Sequence[RunReport]) -> list[tuple[str, ...]]:
    cells = []
    for report in reports:
        for row in report.results:
            cells.append(
                (
                    report.label,
                    row.name,
                    _fmt_value(row.value),
                    _fmt_value(row.lower),
                    _fmt_gap(row.gap),
                    _fmt_flag(row.eps_optimal),
                    _fmt_time(row.wall_time_ms),
                )
            )
    return cells


def emit_table(reports: Sequence[RunReport], fmt: str) -> str:
    """Render reports as ``json`` (lossless), ``csv`` or aligned ``text``."""
    if fmt == "json":
        return to_json(reports)
    rows = _table_cells(reports)
    if fmt == "csv":
        lines = [",".join(_COLUMNS)]
        lines += [",".join(row) for row in rows]
        return "\n".join(lines)
    if fmt == "text":
        widths = [
            max(len(_COLUMNS[k]), max((len(r[k]) for r in rows), default=0))
            for k in range(len(_COLUMNS))
        ]
        header = "  ".join(c.ljust(w) for c, w in zip(_COLUMNS, widths))
        lines = [header, "  ".join("-" * w for w in widths)]
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows]
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}")
