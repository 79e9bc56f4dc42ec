"""Deterministic discrete-time cafe world.

A single writer advances the world on a fixed 0.1 s tick: robots step,
collisions halt the mover, and proximity triggers service events (orders at
occupied tables, drink pickup at the counter, delivery at the target table).
Customers are scripted event sources whose chatter timing comes from the
world's seeded RNG; everything else is a pure function of the scenario.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

from . import robot as rb
from . import session as ss
from .events import (
    DRINK_DELIVERED, MOVE_SEGMENT, MOTION_PLAYED, ORDER_TAKEN, PHASE_CHANGE,
    SMILE_TAG_OFF, SMILE_TAG_ON, UTTERANCE, ServiceEvent,
)
from .floorplan import (
    CONVERSATION_RADIUS_M, COUNTER_RADIUS_M, DELIVERY_RADIUS_M, FloorPlan,
)

DEFAULT_TICK_S = 0.1
MIN_CLEARANCE_M = 0.7       # centre-to-centre; > footprint diagonal (0.64 m)
WALL_MARGIN_M = 0.35
END_OF_DAY = "end_of_day"

CUSTOMER_LINES = (
    "Excuse me!", "This is lovely.", "Could we order?", "Thank you so much.",
    "How does the robot work?", "One more, please.", "That was quick!",
    "Where are you joining us from?",
)


class CapacityExceeded(Exception):
    pass


class BadPhase(Exception):
    code = "bad_phase"


@dataclass
class Party:
    table_id: str
    size: int
    session: int            # 1-based session the party is served in
    seated_at_s: float


@dataclass
class Order:
    order_id: str
    session: int
    table_id: str
    party_size: int
    robot_id: str
    status: str = "pending"     # pending -> carried -> delivered


@dataclass
class _Segment:
    start_s: float
    start_pos: tuple[float, float]
    kind: str
    distance_m: float = 0.0


def default_robots(plan: FloorPlan,
                   stationary_tables: tuple[str, str] = ("table_2", "table_5")) -> dict[str, rb.RobotState]:
    """Reference crew: three mobile units at their docks, two tabletop units."""
    robots: dict[str, rb.RobotState] = {}
    for rid, dock in plan.docks.items():
        robots[rid] = rb.RobotState(rid, rb.RobotSpec(kind=rb.MOBILE),
                                    pose=rb.Pose(dock[0], dock[1], math.pi / 2))
    for i, table_id in enumerate(stationary_tables, start=1):
        pos = plan.table(table_id).position
        robots[f"stationary_{i}"] = rb.RobotState(
            f"stationary_{i}", rb.RobotSpec(kind=rb.STATIONARY),
            pose=rb.Pose(pos[0], pos[1], -math.pi / 2))
    return robots


class World:
    """The cafe: floor plan, robots, customers, drinks, and the day clock."""

    def __init__(self, plan: FloorPlan, schedule: ss.DaySchedule,
                 session_plan: ss.SessionPlan | None = None, seed: int = 0,
                 robots: dict[str, rb.RobotState] | None = None,
                 party_schedule: dict[int, list[int]] | None = None,
                 dt_s: float = DEFAULT_TICK_S):
        self.plan = plan
        self.schedule = schedule
        self.session_plan = session_plan or ss.SessionPlan()
        self.dt_s = dt_s
        self.rng = random.Random(seed)
        self.robots = robots if robots is not None else default_robots(plan)
        self.party_schedule = party_schedule or {}
        self.clock_tick = 0
        self.parties: dict[str, Party] = {}
        self.orders: list[Order] = []
        self.items: dict[str, str] = {}     # drink id -> "counter" | robot id | table id
        self._pending: list[ServiceEvent] = []
        self._segments: dict[str, _Segment] = {}
        self._utter_heap: list[tuple[int, int, str]] = []
        self._utter_seq = 0
        self._boundaries = self._build_boundaries()
        self._boundary_idx = 0
        self._stationed: dict[str, tuple[float, float]] = {
            rid: r.pose.position() for rid, r in self.robots.items()}

    # --- time ---

    @property
    def clock_s(self) -> float:
        return round(self.clock_tick * self.dt_s, 3)

    def _ts(self, tick: int) -> float:
        return round(tick * self.dt_s, 3)

    def session_and_phase(self, t_s: float) -> tuple[int, ss.Phase] | None:
        """(1-based session, phase) at absolute day time, None outside sessions."""
        for i, s0 in enumerate(self.schedule.session_starts):
            if s0 <= t_s < s0 + self.session_plan.cycle_s:
                return (i + 1, ss.phase_at(self.session_plan, t_s - s0))
        return None

    def current_phase(self) -> tuple[int, ss.Phase] | None:
        return self.session_and_phase(self.clock_s)

    def _build_boundaries(self) -> list[tuple[int, int, str]]:
        out = []
        for i, s0 in enumerate(self.schedule.session_starts):
            for off, phase in self.session_plan.boundaries():
                out.append((int(round((s0 + off) / self.dt_s)), i + 1, phase.name))
        out.append((int(round(self.schedule.end_s / self.dt_s)),
                    self.schedule.n_sessions, END_OF_DAY))
        return out

    @property
    def end_tick(self) -> int:
        return self._boundaries[-1][0]

    # --- customers ---

    def seat_customers(self, parties: list[int]) -> None:
        """Seat arriving parties, lowest free table first.

        Allowed during an entry phase (they are next session's customers) and
        at day open (the first session's customers walk in with the doors).
        """
        cur = self.current_phase()
        at_open = self.clock_tick == int(round(self.schedule.session_starts[0] / self.dt_s))
        if not at_open and (cur is None or cur[1].name != ss.ENTRY):
            raise BadPhase("customers are only seated during an entry phase")
        session = cur[0] + 1 if (cur and cur[1].name == ss.ENTRY) else 1
        free = [t for t in self.plan.tables if t.table_id not in self.parties]
        if len(parties) > len(free):
            raise CapacityExceeded(f"{len(parties)} parties for {len(free)} free tables")
        for size, table in zip(parties, free):
            if not 1 <= size <= table.seat_count:
                raise CapacityExceeded(f"party of {size} cannot take {table.table_id}")
        for size, table in zip(parties, free):
            self.parties[table.table_id] = Party(table.table_id, size, session, self.clock_s)
            self._schedule_utterance(table.table_id)

    def _schedule_utterance(self, table_id: str):
        gap = self.rng.uniform(30.0, 120.0)
        self._utter_seq += 1
        heapq.heappush(self._utter_heap,
                       (self.clock_tick + max(1, int(round(gap / self.dt_s))),
                        self._utter_seq, table_id))

    def _clear_customers(self):
        self.parties.clear()

    # --- operator-facing actions (called between ticks by the command layer) ---

    def _robot(self, robot_id: str) -> rb.RobotState:
        if robot_id not in self.robots:
            raise KeyError(robot_id)
        return self.robots[robot_id]

    def play_motion(self, robot_id: str, motion_id: str, group: str | None = None):
        r = self._robot(robot_id)
        if group is not None:
            pool = r.catalog.head if group == "head" else r.catalog.arm
            if motion_id not in pool:
                raise rb.UnknownMotion(f"{motion_id!r} is not a {group} motion")
        rb.start_motion(r, motion_id)
        self._pending.append(ServiceEvent(
            self.clock_s, MOTION_PLAYED, robot_id,
            payload={"motion": motion_id, "group": r.catalog.motion(motion_id).group}))

    def locomote(self, robot_id: str, direction: str, duration_s: float):
        rb.start_locomotion(self._robot(robot_id), direction, duration_s)
        self._open_segment(robot_id, "direct")

    def line_trace_to(self, robot_id: str, target_label: str):
        r = self._robot(robot_id)
        candidates = self.plan.paths_to(target_label)
        if not candidates:
            raise rb.PathUnreachable(f"no path to {target_label!r}")
        pos = r.pose.position()
        best = min(candidates, key=lambda p: math.dist(pos, p.waypoints[0]))
        rb.start_line_trace(r, best)
        self._open_segment(robot_id, "line_trace")

    def stop_robot(self, robot_id: str):
        r = self._robot(robot_id)
        was_moving = r.moving
        rb.stop(r)
        if was_moving:
            now = self.clock_s
            self._finish_segment(robot_id, self._pending, now)
            self._arrival_triggers(robot_id, self._pending, now)

    def speak(self, robot_id: str, text: str, voice_mode: str = "synthesized"):
        r = self._robot(robot_id)
        if r.battery_s <= 0.0:
            raise rb.BatteryEmpty(f"{robot_id}: battery exhausted")
        table = self._occupied_table_near(r.pose.position(), CONVERSATION_RADIUS_M)
        self._pending.append(ServiceEvent(
            self.clock_s, UTTERANCE, robot_id, table,
            payload={"text": text, "voice": voice_mode, "speaker": "robot"}))

    def smile_tag(self, robot_id: str, on: bool):
        self._robot(robot_id)
        self._pending.append(ServiceEvent(
            self.clock_s, SMILE_TAG_ON if on else SMILE_TAG_OFF, robot_id))

    def staff_move(self, robot_id: str, table_id: str):
        """Human staff relocate a tabletop unit: instantaneous, tagged in the log."""
        r = self._robot(robot_id)
        dest = self.plan.table(table_id).position
        src = r.pose.position()
        r.pose.x_m, r.pose.y_m = dest
        self._stationed[robot_id] = dest
        self._pending.append(ServiceEvent(
            self.clock_s, MOVE_SEGMENT, robot_id, table_id,
            payload={"start_s": self.clock_s, "end_s": self.clock_s,
                     "from": [round(src[0], 3), round(src[1], 3)],
                     "to": [round(dest[0], 3), round(dest[1], 3)],
                     "distance_m": round(math.dist(src, dest), 3),
                     "mode": "staff_move", "ends_at_table": table_id}))

    # --- stepping ---

    def quiescent(self) -> bool:
        return all(r.idle for r in self.robots.values())

    def can_fast_forward(self) -> bool:
        return not self._pending and self.quiescent()

    def fast_forward(self, n_ticks: int):
        """Jump a quiescent world forward; only clock and batteries change."""
        assert self.can_fast_forward()
        self.clock_tick += n_ticks
        drain = n_ticks * self.dt_s
        for r in self.robots.values():
            r.battery_s = max(0.0, r.battery_s - drain)

    def next_internal_tick(self) -> int:
        """Earliest tick at which the world itself produces an event."""
        nxt = self.end_tick
        if self._boundary_idx < len(self._boundaries):
            nxt = min(nxt, self._boundaries[self._boundary_idx][0])
        if self._utter_heap:
            nxt = min(nxt, self._utter_heap[0][0])
        return max(nxt, self.clock_tick + 1)

    def tick(self) -> list[ServiceEvent]:
        """Advance one fixed step; returns the events it produced, in time order."""
        events: list[ServiceEvent] = self._pending
        self._pending = []
        self.clock_tick += 1
        now = self.clock_s

        # Phase boundaries crossed by this tick (timestamped at the boundary).
        while (self._boundary_idx < len(self._boundaries)
               and self._boundaries[self._boundary_idx][0] <= self.clock_tick):
            btick, session, name = self._boundaries[self._boundary_idx]
            self._boundary_idx += 1
            events.append(ServiceEvent(self._ts(btick), PHASE_CHANGE,
                                       payload={"phase": name, "session": session}))
            if name == ss.BREAK:
                self._clear_customers()
            elif name == ss.ENTRY:
                sizes = self.party_schedule.get(session + 1)
                if sizes:
                    self.seat_customers(sizes)
            elif name == ss.DRINK_SERVING:
                for rid in sorted(self.robots):
                    self._try_pickup(rid)

        stopped: list[str] = []
        for rid in sorted(self.robots):
            r = self.robots[rid]
            was_moving = r.moving
            old = r.pose.copy()
            rb.step(r, self.dt_s)
            if was_moving:
                self._adjudicate_move(rid, r, old)
                seg = self._segments.get(rid)
                if seg is not None:
                    seg.distance_m += math.dist(old.position(), r.pose.position())
                if not r.moving:
                    stopped.append(rid)

        for rid in stopped:
            self._finish_segment(rid, events, now)
            self._arrival_triggers(rid, events, now)

        # Customer chatter due this tick.
        while self._utter_heap and self._utter_heap[0][0] <= self.clock_tick:
            _, _, table_id = heapq.heappop(self._utter_heap)
            party = self.parties.get(table_id)
            if party is None:
                continue
            events.append(ServiceEvent(
                now, UTTERANCE, None, table_id,
                payload={"text": self.rng.choice(CUSTOMER_LINES), "speaker": "customer"}))
            self._schedule_utterance(table_id)

        return events

    def _open_segment(self, robot_id: str, kind: str):
        r = self.robots[robot_id]
        self._segments[robot_id] = _Segment(self.clock_s, r.pose.position(), kind)

    def _adjudicate_move(self, rid: str, r: rb.RobotState, old: rb.Pose):
        """Walls and other robots halt the mover in place."""
        if r.spec.kind != rb.MOBILE:
            return
        x, y = r.pose.x_m, r.pose.y_m
        w, h = self.plan.bounds
        blocked = not (WALL_MARGIN_M <= x <= w - WALL_MARGIN_M
                       and WALL_MARGIN_M <= y <= h - WALL_MARGIN_M)
        if not blocked:
            for oid, other in self.robots.items():
                if oid == rid or other.spec.kind != rb.MOBILE:
                    continue
                if math.dist(r.pose.position(), other.pose.position()) < MIN_CLEARANCE_M:
                    blocked = True
                    break
        if blocked:
            r.pose = old
            r.mode = rb.Idle()
            seg = self._segments.get(rid)
            if seg is not None:
                seg.kind += ":blocked"

    def _finish_segment(self, rid: str, events: list[ServiceEvent], now: float):
        seg = self._segments.pop(rid, None)
        r = self.robots[rid]
        pos = r.pose.position()
        self._stationed[rid] = pos
        if seg is None:
            return
        table = self.plan.nearest_table(pos, DELIVERY_RADIUS_M)
        events.append(ServiceEvent(
            now, MOVE_SEGMENT, rid, table.table_id if table else None,
            payload={"start_s": seg.start_s, "end_s": now,
                     "from": [round(seg.start_pos[0], 3), round(seg.start_pos[1], 3)],
                     "to": [round(pos[0], 3), round(pos[1], 3)],
                     "distance_m": round(seg.distance_m, 3),
                     "mode": seg.kind,
                     "ends_at_table": table.table_id if table else None}))

    def _occupied_table_near(self, pos: tuple[float, float], radius: float) -> str | None:
        best, best_d = None, radius
        for table_id in self.parties:
            d = math.dist(pos, self.plan.table(table_id).position)
            if d <= best_d:
                best, best_d = table_id, d
        return best

    def _arrival_triggers(self, rid: str, events: list[ServiceEvent], now: float):
        cur = self.current_phase()
        if cur is None:
            return
        session, phase = cur
        r = self.robots[rid]
        pos = r.pose.position()

        if phase.name == ss.ORDER_CONFIRMATION:
            table_id = self._occupied_table_near(pos, DELIVERY_RADIUS_M)
            if table_id is not None and not any(
                    o.session == session and o.table_id == table_id for o in self.orders):
                party = self.parties[table_id]
                order = Order(f"order_s{session}_{table_id}", session, table_id,
                              party.size, rid)
                self.orders.append(order)
                self.items[f"drink_s{session}_{table_id}"] = "counter"
                events.append(ServiceEvent(
                    now, ORDER_TAKEN, rid, table_id,
                    payload={"order_id": order.order_id, "party_size": party.size}))

        if phase.name == ss.DRINK_SERVING:
            self._try_pickup(rid)

        carried = [o for o in self.orders if o.status == "carried" and o.robot_id == rid]
        for order in carried:
            table = self.plan.table(order.table_id)
            if math.dist(pos, table.position) <= DELIVERY_RADIUS_M:
                order.status = "delivered"
                self.items[f"drink_s{order.session}_{order.table_id}"] = order.table_id
                events.append(ServiceEvent(
                    now, DRINK_DELIVERED, rid, order.table_id,
                    payload={"order_id": order.order_id, "party_size": order.party_size}))

    def _try_pickup(self, rid: str):
        """A stopped robot near the counter picks up its earliest pending drink."""
        r = self.robots[rid]
        if r.moving or r.spec.kind != rb.MOBILE:
            return
        if math.dist(r.pose.position(), self.plan.counter) > COUNTER_RADIUS_M:
            return
        if any(o.status == "carried" and o.robot_id == rid for o in self.orders):
            return
        cur = self.current_phase()
        if cur is None or cur[1].name != ss.DRINK_SERVING:
            return
        for order in self.orders:
            if order.status == "pending" and order.robot_id == rid and order.session == cur[0]:
                order.status = "carried"
                self.items[f"drink_s{order.session}_{order.table_id}"] = rid
                return

    # --- inspection helpers ---

    def check_conservation(self) -> bool:
        places = {"counter", *self.robots, *(t.table_id for t in self.plan.tables)}
        return all(loc in places for loc in self.items.values())

    def snapshot(self, robot_id: str) -> dict:
        """Robot-centric world view for the operator console."""
        cur = self.current_phase()
        r = self.robots[robot_id]
        return {
            "clock_s": self.clock_s,
            "session": cur[0] if cur else None,
            "phase": cur[1].name if cur else END_OF_DAY,
            "phase_remaining_s": self._phase_remaining(),
            "self": self._robot_digest(r),
            "robots": [self._robot_digest(o) for _, o in sorted(self.robots.items())],
            "tables": [{"id": t.table_id,
                        "position": [t.position[0], t.position[1]],
                        "party_size": self.parties[t.table_id].size
                        if t.table_id in self.parties else 0}
                       for t in self.plan.tables],
            "bounds": list(self.plan.bounds),
            "counter": list(self.plan.counter),
        }

    def _phase_remaining(self) -> float | None:
        cur = self.current_phase()
        if cur is None:
            return None
        session, phase = cur
        s0 = self.schedule.session_starts[session - 1]
        off = self.clock_s - s0
        for start, p in self.session_plan.boundaries():
            if p.name == phase.name and start <= off < start + p.duration_s:
                return round(start + p.duration_s - off, 3)
        return None

    def _robot_digest(self, r: rb.RobotState) -> dict:
        mode = type(r.mode).__name__
        carried = [o.order_id for o in self.orders
                   if o.status == "carried" and o.robot_id == r.robot_id]
        return {
            "id": r.robot_id, "kind": r.spec.kind,
            "pose": [round(r.pose.x_m, 3), round(r.pose.y_m, 3),
                     round(r.pose.heading_rad, 3)],
            "battery_s": round(r.battery_s, 1),
            "battery_pct": round(100.0 * r.battery_s / r.spec.battery_capacity_s, 1),
            "mode": mode, "carrying": carried,
        }
