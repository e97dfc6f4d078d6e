"""Verification outcome records and their JSON form."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = "ch3lab.report/1"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema", "reports"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "model", "status", "residual", "anchor"],
                "properties": {
                    "id": {"type": "string"},
                    "model": {"type": "string"},
                    "status": {"enum": ["pass", "fail", "error"]},
                    "residual": {"type": "string"},
                    "anchor": {"type": "string"},
                    "details": {"type": "object"},
                    "seconds": {"type": "number"},
                },
            },
        },
    },
}


@dataclass
class CheckReport:
    id: str
    model: str
    status: str  # pass | fail | error
    residual: str
    anchor: str = ""
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("seconds")
        if not d["details"]:
            d.pop("details")
        return d

    def line(self) -> str:
        return f"[{self.status.upper():5}] {self.id} ({self.model})"


def reports_json(reports, timings: bool = False) -> str:
    payload = {
        "schema": SCHEMA_VERSION,
        "reports": [r.to_dict(timings) for r in sorted(reports, key=lambda r: r.id)],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
