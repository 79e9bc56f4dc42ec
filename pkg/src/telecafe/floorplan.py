"""Cafe floor plan: room bounds, six tables, counter, and preset line paths.

The reference plan is a 10 m x 8 m room with tables on a 2x3 grid and the
drink counter on the south wall.  Each mobile robot has a home dock near the
counter; every table has an out-and-back path pair reachable from a dock.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .robot import LinePath

DELIVERY_RADIUS_M = 0.6     # "at the table" distance for orders and deliveries
COUNTER_RADIUS_M = 1.0      # close enough to the counter to pick up a drink
CONVERSATION_RADIUS_M = 2.0 # close enough to a table to be talking with it


@dataclass(frozen=True)
class Table:
    table_id: str
    position: tuple[float, float]
    seat_count: int = 4

    def __post_init__(self):
        if not 1 <= self.seat_count <= 4:
            raise ValueError("tables seat 1..4 customers")


@dataclass
class FloorPlan:
    bounds: tuple[float, float]                 # (width_m, height_m)
    tables: list[Table]
    counter: tuple[float, float]
    line_paths: list[LinePath]
    obstacles: list[tuple[float, float, float, float]] = field(default_factory=list)
    docks: dict[str, tuple[float, float]] = field(default_factory=dict)

    def table(self, table_id: str) -> Table:
        for t in self.tables:
            if t.table_id == table_id:
                return t
        raise KeyError(table_id)

    def table_ids(self) -> list[str]:
        return [t.table_id for t in self.tables]

    def paths_to(self, target_label: str) -> list[LinePath]:
        return [p for p in self.line_paths if p.target_label == target_label]

    def nearest_table(self, pos: tuple[float, float],
                      within_m: float) -> Table | None:
        best, best_d = None, within_m
        for t in self.tables:
            d = math.dist(pos, t.position)
            if d <= best_d:
                best, best_d = t, d
        return best

    def validate(self):
        w, h = self.bounds
        for t in self.tables:
            x, y = t.position
            if not (0 <= x <= w and 0 <= y <= h):
                raise ValueError(f"{t.table_id} outside bounds")
        for t in self.tables:
            reachable = any(
                p.target_label == t.table_id
                and math.dist(p.waypoints[0], self.counter) <= 1.5
                for p in self.line_paths
            )
            if not reachable:
                raise ValueError(f"{t.table_id} has no line path from the counter")


def reference_plan() -> FloorPlan:
    """The canonical six-table plan used by all canned scenarios."""
    tables = [
        Table("table_1", (2.0, 3.0)), Table("table_2", (5.0, 3.0)), Table("table_3", (8.0, 3.0)),
        Table("table_4", (2.0, 6.0)), Table("table_5", (5.0, 6.0)), Table("table_6", (8.0, 6.0)),
    ]
    docks = {"mobile_1": (4.2, 0.9), "mobile_2": (5.0, 0.9), "mobile_3": (5.8, 0.9)}
    d1, d2, d3 = docks["mobile_1"], docks["mobile_2"], docks["mobile_3"]
    # Service stops sit 0.55 m south/west of each table centre, inside the
    # delivery radius but clear of the furniture.
    routes = {
        "table_1": [d1, (2.0, 0.9), (2.0, 2.45)],
        "table_4": [d1, (1.1, 0.9), (1.1, 6.0), (1.45, 6.0)],
        "table_2": [d2, (5.0, 2.45)],
        "table_5": [d2, (5.0, 1.8), (3.6, 1.8), (3.6, 6.0), (4.45, 6.0)],
        "table_3": [d3, (8.0, 0.9), (8.0, 2.45)],
        "table_6": [d3, (8.9, 0.9), (8.9, 6.0), (8.55, 6.0)],
    }
    paths = []
    for table_id, wps in routes.items():
        paths.append(LinePath(f"to_{table_id}", list(wps), table_id))
        paths.append(LinePath(f"from_{table_id}", list(reversed(wps)), "counter"))
    plan = FloorPlan(bounds=(10.0, 8.0), tables=tables, counter=(5.0, 0.5),
                     line_paths=paths, docks=docks)
    plan.validate()
    return plan


def save_plan(plan: FloorPlan, path: str):
    doc = {
        "bounds": {"width_m": plan.bounds[0], "height_m": plan.bounds[1]},
        "counter": {"x_m": plan.counter[0], "y_m": plan.counter[1]},
        "tables": [
            {"id": t.table_id, "x_m": t.position[0], "y_m": t.position[1],
             "seat_count": t.seat_count}
            for t in plan.tables
        ],
        "line_paths": [
            {"id": p.path_id, "target": p.target_label,
             "waypoints": [list(w) for w in p.waypoints]}
            for p in plan.line_paths
        ],
        "obstacles": [list(o) for o in plan.obstacles],
        "docks": {k: list(v) for k, v in plan.docks.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_plan(path: str) -> FloorPlan:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    plan = FloorPlan(
        bounds=(doc["bounds"]["width_m"], doc["bounds"]["height_m"]),
        tables=[Table(t["id"], (t["x_m"], t["y_m"]), t.get("seat_count", 4))
                for t in doc["tables"]],
        counter=(doc["counter"]["x_m"], doc["counter"]["y_m"]),
        line_paths=[LinePath(p["id"], [tuple(w) for w in p["waypoints"]], p["target"])
                    for p in doc["line_paths"]],
        obstacles=[tuple(o) for o in doc.get("obstacles", [])],
        docks={k: tuple(v) for k, v in doc.get("docks", {}).items()},
    )
    plan.validate()
    return plan
