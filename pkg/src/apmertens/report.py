"""Row-oriented result sets with CSV and JSON renderings."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

SIG_DIGITS = 12


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not (math.isnan(v) or math.isinf(v)):
        return float(format_value(v))
    return v


@dataclass
class Report:
    """A table of results.

    Every row carries a ``quantity`` column naming what it measures.
    ``metadata`` holds tolerances, cutoffs and tail bounds.
    """

    schema: str
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(self, **row) -> None:
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"columns {sorted(unknown)} not in schema {self.schema}")
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list[Any]:
        return [r.get(name) for r in self.rows]

    def to_csv(self, meta: bool = True) -> str:
        out = io.StringIO()
        if meta:
            stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
            out.write(f"# generated {stamp} schema={self.schema}\n")
        out.write(",".join(self.columns) + "\n")
        for r in self.rows:
            out.write(",".join(format_value(r.get(c)) for c in self.columns) + "\n")
        return out.getvalue()

    def to_json(self, meta: bool = True) -> str:
        doc: dict[str, Any] = {
            "schema": self.schema,
            "columns": self.columns,
            "rows": [{c: _json_value(r.get(c)) for c in self.columns} for r in self.rows],
            "metadata": {k: _json_value(v) for k, v in self.metadata.items()},
        }
        if meta:
            doc["generated"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        return json.dumps(doc, indent=2) + "\n"

    def render(self, fmt: str = "csv", meta: bool = True) -> str:
        if fmt == "csv":
            return self.to_csv(meta)
        if fmt == "json":
            return self.to_json(meta)
        raise ValueError(f"unknown format {fmt!r}")
