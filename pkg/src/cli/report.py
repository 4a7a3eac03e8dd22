"""Text and JSON reports for the command line."""
import json
from dataclasses import dataclass, field
from fractions import Fraction

import pandas as pd

from common.counts import INFINITE


def plain(value):
    """JSON-safe rendering: exact numbers as strings, infinity as "infinity"."""
    if value is INFINITE:
        return "infinity"
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    return str(value)


@dataclass
class Report:
    command: str
    spec: str = ""
    parameters: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    hypotheses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    exit_code: int = 0

    def add_table(self, name, rows):
        self.tables[name] = [{k: plain(v) for k, v in row.items()} for row in rows]

    def to_json(self):
        return {
            "command": self.command,
            "spec": self.spec,
            "parameters": plain(self.parameters),
            "results": plain(self.results),
            "tables": self.tables,
            "hypotheses": [
                {"subject": h.subject, "status": h.status, "detail": h.detail} for h in self.hypotheses
            ],
            "notes": list(self.notes),
        }

    def to_text(self):
        lines = [f"command: {self.command}"]
        if self.spec:
            lines.append(f"spec: {self.spec}")
        if self.parameters:
            lines.append("parameters: " + ", ".join(f"{k}={plain(v)}" for k, v in sorted(self.parameters.items())))
        for key, value in self.results.items():
            rendered = plain(value)
            if isinstance(rendered, (list, dict)):
                rendered = json.dumps(rendered, ensure_ascii=False)
            lines.append(f"{key}: {rendered}")
        for h in self.hypotheses:
            lines.append(f"hypothesis: {h.subject}: {h.status} ({h.detail})")
        for name, rows in self.tables.items():
            lines.append("")
            lines.append(f"{name}:")
            if rows:
                lines.append(pd.DataFrame(rows).to_string(index=False))
            else:
                lines.append("  (none)")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)

    def render(self, as_json=False):
        if as_json:
            return json.dumps(self.to_json(), indent=2, ensure_ascii=False)
        return self.to_text()
