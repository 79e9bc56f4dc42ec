"""Service-event records and the JSON Lines log format.

One event per line, keys sorted, compact separators: the byte stream is the
canonical representation, so identical runs hash identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

ORDER_TAKEN = "OrderTaken"
DRINK_DELIVERED = "DrinkDelivered"
UTTERANCE = "Utterance"
SMILE_TAG_ON = "SmileTagOn"
SMILE_TAG_OFF = "SmileTagOff"
MOTION_PLAYED = "MotionPlayed"
MOVE_SEGMENT = "MoveSegment"
PHASE_CHANGE = "PhaseChange"

EVENT_KINDS = (
    ORDER_TAKEN, DRINK_DELIVERED, UTTERANCE, SMILE_TAG_ON, SMILE_TAG_OFF,
    MOTION_PLAYED, MOVE_SEGMENT, PHASE_CHANGE,
)


@dataclass
class ServiceEvent:
    """One telemetry record: what happened, when, involving which robot/table."""

    timestamp_s: float
    kind: str
    robot_id: str | None = None
    table_id: str | None = None
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_json_line(self) -> str:
        doc = {"ts": self.timestamp_s, "kind": self.kind, "robot": self.robot_id,
               "table": self.table_id, "payload": self.payload}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str) -> "ServiceEvent":
        doc = json.loads(line)
        return cls(doc["ts"], doc["kind"], doc.get("robot"), doc.get("table"),
                   doc.get("payload") or {})


def write_log(events: list[ServiceEvent], path: str):
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(ev.to_json_line())
            fh.write("\n")


def read_log(path: str) -> list[ServiceEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(ServiceEvent.from_json_line(line))
    return events


def log_digest(events: list[ServiceEvent]) -> str:
    """SHA-256 over the canonical line encoding."""
    h = hashlib.sha256()
    for ev in events:
        h.update(ev.to_json_line().encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def check_monotone(events: list[ServiceEvent]) -> bool:
    return all(a.timestamp_s <= b.timestamp_s for a, b in zip(events, events[1:]))
