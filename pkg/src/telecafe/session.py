"""Cafe workflow: 60-minute session phases, day schedule, and pilot shifts.

A session is a fixed 3600 s cycle of seven phases.  Everything except the
5-minute break counts as working time (3300 s per session), which is the
base for every telemetry rate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

OPENING_TALK = "opening_talk"
ORDER_CONFIRMATION = "order_confirmation"
DRINK_SERVING = "drink_serving"
FREE_TALK = "free_talk"
ENDING_TALK = "ending_talk"
BREAK = "break"
ENTRY = "entry"

# Actor able to run the phase: the cafe owner, a mobile avatar, any avatar, or nobody.
ACTOR_OWNER = "owner"
ACTOR_MOBILE = "mobile"
ACTOR_ANY_AVATAR = "any_avatar"
ACTOR_NONE = "none"

INPUT_METHODS = ("hand-mouse", "gaze", "mouth-mouse", "hand-and-mouth")

SESSION_S = 3600
WORKING_S_PER_SESSION = 3300


class OutOfRange(Exception):
    pass


class Unstaffable(Exception):
    pass


@dataclass(frozen=True)
class Phase:
    name: str
    duration_s: int
    actor: str


@dataclass(frozen=True)
class SessionPlan:
    """Ordered phases of one session; defaults follow the cafe routine."""

    phases: tuple[Phase, ...] = (
        Phase(OPENING_TALK, 300, ACTOR_OWNER),
        Phase(ORDER_CONFIRMATION, 600, ACTOR_MOBILE),
        Phase(DRINK_SERVING, 600, ACTOR_MOBILE),
        Phase(FREE_TALK, 1200, ACTOR_ANY_AVATAR),
        Phase(ENDING_TALK, 300, ACTOR_OWNER),
        Phase(BREAK, 300, ACTOR_NONE),
        Phase(ENTRY, 300, ACTOR_NONE),
    )

    def __post_init__(self):
        if sum(p.duration_s for p in self.phases) != SESSION_S:
            raise ValueError("session phases must sum to 3600 s")

    @property
    def cycle_s(self) -> int:
        return SESSION_S

    @property
    def working_s(self) -> int:
        return sum(p.duration_s for p in self.phases if p.name != BREAK)

    def boundaries(self) -> list[tuple[int, Phase]]:
        """(offset_s, phase) pairs for one cycle."""
        out, t = [], 0
        for p in self.phases:
            out.append((t, p))
            t += p.duration_s
        return out

    def break_window(self) -> tuple[int, int]:
        t = 0
        for p in self.phases:
            if p.name == BREAK:
                return (t, t + p.duration_s)
            t += p.duration_s
        raise ValueError("plan has no break phase")


def phase_at(plan: SessionPlan, t_s: float) -> Phase:
    """The unique phase containing offset t_s within one session cycle."""
    if not 0 <= t_s < plan.cycle_s:
        raise OutOfRange(f"t_s={t_s} outside [0, {plan.cycle_s})")
    t = 0
    for p in plan.phases:
        t += p.duration_s
        if t_s < t:
            return p
    raise OutOfRange(t_s)  # unreachable: durations sum to cycle_s


@dataclass(frozen=True)
class DaySchedule:
    """Business day: back-to-back sessions, default four (three on the first day)."""

    date: str = "2018-11-27"
    n_sessions: int = 4
    session_starts: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_sessions not in (3, 4):
            raise ValueError("a day runs 3 or 4 sessions")
        if not self.session_starts:
            object.__setattr__(self, "session_starts",
                               tuple(i * SESSION_S for i in range(self.n_sessions)))
        if len(self.session_starts) != self.n_sessions:
            raise ValueError("one start time per session")

    @property
    def end_s(self) -> int:
        return self.session_starts[-1] + SESSION_S


def working_seconds(plan: SessionPlan, interval: tuple[float, float],
                    schedule: DaySchedule | None = None) -> float:
    """Non-break seconds of [start, end) within the day's sessions."""
    start, end = interval
    if end < start:
        raise ValueError("interval end precedes start")
    schedule = schedule or DaySchedule()
    brk_lo, brk_hi = plan.break_window()
    total = 0.0
    for s0 in schedule.session_starts:
        lo, hi = max(start, s0), min(end, s0 + plan.cycle_s)
        if hi <= lo:
            continue
        total += hi - lo
        total -= max(0.0, min(hi, s0 + brk_hi) - max(lo, s0 + brk_lo))
    return total


@dataclass(frozen=True)
class PilotProfile:
    pilot_id: str
    input_method: str
    # Session indices (0-based) the pilot can work; None means all.
    available_sessions: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.input_method not in INPUT_METHODS:
            raise ValueError(f"unknown input method {self.input_method!r}")

    def available(self, session: int) -> bool:
        return self.available_sessions is None or session in self.available_sessions


@dataclass
class Shift:
    pilot_id: str
    robot_id: str
    sessions: list[int]
    input_method: str


def assign_shifts(pilots: list[PilotProfile], schedule: DaySchedule,
                  robots: tuple[str, ...] = ("mobile_1", "mobile_2", "mobile_3")) -> list[Shift]:
    """Greedy deterministic roster: per session, lowest pilot id takes the next robot.

    No pilot covers two robots in the same session; raises Unstaffable when a
    robot would go uncovered.
    """
    by_id = sorted(pilots, key=lambda p: p.pilot_id)
    shifts: dict[tuple[str, str], Shift] = {}
    for session in range(schedule.n_sessions):
        booked: set[str] = set()
        for robot_id in robots:
            pick = next((p for p in by_id
                         if p.pilot_id not in booked and p.available(session)), None)
            if pick is None:
                raise Unstaffable(f"no pilot free for {robot_id} in session {session}")
            booked.add(pick.pilot_id)
            key = (pick.pilot_id, robot_id)
            if key not in shifts:
                shifts[key] = Shift(pick.pilot_id, robot_id, [], pick.input_method)
            shifts[key].sessions.append(session)
    return list(shifts.values())


def shift_slots(shifts: list[Shift]) -> list[tuple[int, str, str]]:
    """Flat (session, robot, pilot) slots, sorted."""
    return sorted((s, sh.robot_id, sh.pilot_id) for sh in shifts for s in sh.sessions)


# --- roster file (JSON) ---

def load_roster(path: str) -> list[PilotProfile]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    pilots = []
    for row in doc["pilots"]:
        avail = row.get("available_sessions")
        pilots.append(PilotProfile(row["id"], row["input_method"],
                                   tuple(avail) if avail is not None else None))
    return pilots


def reference_roster() -> list[PilotProfile]:
    """Ten pilots with the experiment's mix of input methods."""
    methods = ["hand-mouse", "gaze", "gaze", "hand-mouse", "mouth-mouse",
               "hand-mouse", "hand-and-mouth", "hand-mouse", "hand-mouse", "gaze"]
    return [PilotProfile(f"p{i + 1:02d}", m) for i, m in enumerate(methods)]


def save_roster(pilots: list[PilotProfile], path: str):
    doc = {"pilots": [
        {"id": p.pilot_id, "input_method": p.input_method,
         **({"available_sessions": list(p.available_sessions)}
            if p.available_sessions is not None else {})}
        for p in pilots
    ]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
