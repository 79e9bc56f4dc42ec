"""Scripted scenarios and the deterministic headless runner.

A scenario is a JSON document naming the floor plan, the day schedule, the
customer parties per session, and a timed operator command list.  Running
the same (scenario, seed) twice produces byte-identical event logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import protocol as pr
from . import robot as rb
from . import session as ss
from .events import ServiceEvent
from .floorplan import FloorPlan, load_plan, reference_plan
from .world import World

STATIONARY_HOME_TABLES = ("table_2", "table_5")


class ScenarioParseError(Exception):
    pass


@dataclass
class ScenarioScript:
    name: str
    seed: int
    n_sessions: int
    floorplan_ref: str = "reference"
    parties: dict[int, list[int]] = field(default_factory=dict)
    commands: list[dict] = field(default_factory=list)
    staff_moves: list[dict] = field(default_factory=list)
    stationary_tables: tuple[str, str] = STATIONARY_HOME_TABLES

    def load_floorplan(self) -> FloorPlan:
        if self.floorplan_ref == "reference":
            return reference_plan()
        return load_plan(self.floorplan_ref)


def parse_script(doc: dict) -> ScenarioScript:
    try:
        script = ScenarioScript(
            name=doc.get("name", "scenario"),
            seed=int(doc.get("seed", 0)),
            n_sessions=int(doc.get("sessions", 4)),
            floorplan_ref=doc.get("floorplan", "reference"),
            parties={int(k): [int(s) for s in v]
                     for k, v in (doc.get("parties") or {}).items()},
            commands=list(doc.get("commands") or []),
            staff_moves=list(doc.get("staff_moves") or []),
            stationary_tables=tuple(doc.get("stationary_tables", STATIONARY_HOME_TABLES)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioParseError(f"bad scenario document: {exc}") from exc
    _validate_script(script)
    return script


def load_script(path: str) -> ScenarioScript:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioParseError(f"cannot read scenario {path!r}: {exc}") from exc
    return parse_script(doc)


def _validate_script(script: ScenarioScript):
    if script.n_sessions not in (3, 4):
        raise ScenarioParseError("sessions must be 3 or 4")
    plan = script.load_floorplan()
    day_end = script.n_sessions * ss.SESSION_S
    robot_ids = set(plan.docks) | {f"stationary_{i}" for i in (1, 2)}
    table_ids = set(plan.table_ids())
    for session, sizes in script.parties.items():
        if not 1 <= session <= script.n_sessions:
            raise ScenarioParseError(f"parties for session {session} outside the day")
        if len(sizes) > len(plan.tables):
            raise ScenarioParseError(f"session {session}: more parties than tables")
        if any(not 1 <= s <= 4 for s in sizes):
            raise ScenarioParseError(f"session {session}: party sizes must be 1..4")
    for cmd in script.commands:
        if cmd.get("kind") not in pr.COMMAND_TYPES:
            raise ScenarioParseError(f"unknown command kind {cmd.get('kind')!r}")
        if cmd.get("robot") not in robot_ids:
            raise ScenarioParseError(f"unknown robot {cmd.get('robot')!r}")
        if not 0 <= float(cmd.get("t", -1)) < day_end:
            raise ScenarioParseError(f"command time {cmd.get('t')!r} outside the day")
    for mv in script.staff_moves:
        if mv.get("robot") not in robot_ids or mv.get("table") not in table_ids:
            raise ScenarioParseError(f"bad staff move {mv!r}")
        if not 0 <= float(mv.get("t", -1)) < day_end:
            raise ScenarioParseError(f"staff move time {mv.get('t')!r} outside the day")


def command_from_dict(doc: dict, seq: int) -> pr.OperatorCommand:
    """Build a typed operator command from a script entry."""
    kind = doc["kind"]
    robot = doc["robot"]
    try:
        if kind == "select_head_motion":
            return pr.SelectHeadMotion(seq, robot, motion_id=doc["motion_id"])
        if kind == "select_arm_motion":
            return pr.SelectArmMotion(seq, robot, motion_id=doc["motion_id"])
        if kind == "locomote":
            return pr.Locomote(seq, robot, direction=doc["direction"],
                               duration_s=float(doc["duration_s"]))
        if kind == "start_line_trace":
            return pr.StartLineTrace(seq, robot, target_label=doc["target_label"])
        if kind == "speak":
            return pr.Speak(seq, robot, text=doc["text"],
                            voice_mode=doc.get("voice_mode", "synthesized"))
        if kind == "smile_tag":
            return pr.SmileTag(seq, robot, on=bool(doc["on"]))
        if kind == "stop":
            return pr.Stop(seq, robot)
    except (KeyError, ValueError) as exc:
        raise ScenarioParseError(f"bad command entry {doc!r}: {exc}") from exc
    raise ScenarioParseError(f"unknown command kind {kind!r}")


def apply_command(world: World, cmd: pr.OperatorCommand) -> pr.Ack | pr.Reject:
    """Apply one operator command; every command yields exactly one Ack or Reject."""
    try:
        if isinstance(cmd, pr.SelectHeadMotion):
            world.play_motion(cmd.robot_id, cmd.motion_id, group="head")
        elif isinstance(cmd, pr.SelectArmMotion):
            world.play_motion(cmd.robot_id, cmd.motion_id, group="arm")
        elif isinstance(cmd, pr.Locomote):
            world.locomote(cmd.robot_id, cmd.direction, cmd.duration_s)
        elif isinstance(cmd, pr.StartLineTrace):
            world.line_trace_to(cmd.robot_id, cmd.target_label)
        elif isinstance(cmd, pr.Speak):
            world.speak(cmd.robot_id, cmd.text, cmd.voice_mode)
        elif isinstance(cmd, pr.SmileTag):
            world.smile_tag(cmd.robot_id, cmd.on)
        elif isinstance(cmd, pr.Stop):
            world.stop_robot(cmd.robot_id)
        else:
            return pr.Reject(cmd.seq, "unknown_command")
    except rb.RobotError as exc:
        return pr.Reject(cmd.seq, exc.code)
    except KeyError:
        return pr.Reject(cmd.seq, "unknown_robot")
    return pr.Ack(cmd.seq)


@dataclass
class RunResult:
    events: list[ServiceEvent]
    world: World
    rejects: list[tuple[float, pr.OperatorCommand, str]]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for ev in self.events:
            out[ev.kind] = out.get(ev.kind, 0) + 1
        return dict(sorted(out.items()))

    @property
    def working_time_s(self) -> int:
        return self.world.schedule.n_sessions * self.world.session_plan.working_s


def build_world(script: ScenarioScript, seed: int | None = None) -> World:
    plan = script.load_floorplan()
    schedule = ss.DaySchedule(n_sessions=script.n_sessions)
    from .world import default_robots
    robots = default_robots(plan, script.stationary_tables)
    return World(plan, schedule, seed=script.seed if seed is None else seed,
                 robots=robots, party_schedule=dict(script.parties))


def run_scenario(script: ScenarioScript, seed: int | None = None) -> RunResult:
    """Headless deterministic run of a whole day; never opens a socket."""
    world = build_world(script, seed)
    dt = world.dt_s

    actions: list[tuple[int, int, str, dict]] = []
    for i, doc in enumerate(script.commands):
        actions.append((int(round(float(doc["t"]) / dt)), i, "cmd", doc))
    for i, doc in enumerate(script.staff_moves):
        actions.append((int(round(float(doc["t"]) / dt)), len(script.commands) + i,
                        "staff", doc))
    actions.sort(key=lambda a: (a[0], a[1]))

    seq_by_robot: dict[str, int] = {}
    events: list[ServiceEvent] = []
    rejects: list[tuple[float, pr.OperatorCommand, str]] = []

    if 1 in script.parties:
        world.seat_customers(script.parties[1])

    ai = 0
    while world.clock_tick < world.end_tick:
        while ai < len(actions) and actions[ai][0] <= world.clock_tick:
            _, _, sort, doc = actions[ai]
            ai += 1
            if sort == "staff":
                world.staff_move(doc["robot"], doc["table"])
                continue
            seq = seq_by_robot.get(doc["robot"], 0) + 1
            seq_by_robot[doc["robot"]] = seq
            cmd = command_from_dict(doc, seq)
            result = apply_command(world, cmd)
            if isinstance(result, pr.Reject):
                rejects.append((world.clock_s, cmd, result.reason))
        if world.can_fast_forward():
            nxt = world.next_internal_tick()
            if ai < len(actions):
                nxt = min(nxt, actions[ai][0])
            nxt = min(nxt, world.end_tick)
            if nxt - 1 > world.clock_tick:
                world.fast_forward(nxt - 1 - world.clock_tick)
        events.extend(world.tick())
    return RunResult(events, world, rejects)


# --- canned scripts ---

def _session_commands(session: int) -> list[dict]:
    """One session's choreography: confirm orders, serve drinks, then chat."""
    s = (session - 1) * ss.SESSION_S
    cmds: list[dict] = []

    def lt(t, robot, target):
        cmds.append({"t": s + t, "robot": robot, "kind": "start_line_trace",
                     "target_label": target})

    def say(t, robot, text):
        cmds.append({"t": s + t, "robot": robot, "kind": "speak", "text": text})

    def motion(t, robot, group, motion_id):
        cmds.append({"t": s + t, "robot": robot,
                     "kind": f"select_{group}_motion", "motion_id": motion_id})

    def smile(t, robot, on):
        cmds.append({"t": s + t, "robot": robot, "kind": "smile_tag", "on": on})

    # Order confirmation: each mobile robot visits its two tables.
    visits = {
        "mobile_1": ("table_1", "table_4", 305, 360, 420, 540),
        "mobile_2": ("table_2", "table_5", 310, 365, 430, 545),
        "mobile_3": ("table_3", "table_6", 315, 370, 435, 555),
    }
    for robot, (near, far, t_out1, t_back1, t_out2, t_back2) in visits.items():
        lt(t_out1, robot, near)
        say(t_out1 + 30, robot, "Hello! May I take your order?")
        lt(t_back1, robot, "counter")
        lt(t_out2, robot, far)
        say(t_out2 + 55, robot, "Hello! May I take your order?")
        lt(t_back2, robot, "counter")
    motion(345, "mobile_1", "head", "nod_once")
    motion(350, "mobile_2", "head", "nod_twice")
    motion(400, "mobile_3", "head", "look_left")

    # Drink serving: pick up at the counter, deliver, come back, repeat.
    serving = {
        "mobile_1": ("table_1", "table_4", 905, 960, 1020, 1140),
        "mobile_2": ("table_2", "table_5", 910, 965, 1030, 1145),
        "mobile_3": ("table_3", "table_6", 915, 970, 1040, 1150),
    }
    for robot, (near, far, t_out1, t_back1, t_out2, t_back2) in serving.items():
        lt(t_out1, robot, near)
        say(t_out1 + 25, robot, "Here is your drink. Enjoy!")
        lt(t_back1, robot, "counter")
        lt(t_out2, robot, far)
        say(t_out2 + 55, robot, "Here is your drink. Enjoy!")
        lt(t_back2, robot, "counter")
    motion(1120, "mobile_1", "arm", "bye_bye")
    motion(935, "mobile_2", "arm", "raise_one_hand")
    motion(1000, "mobile_3", "head", "look_right")

    # Free talk: mobiles station at a table; tabletop units chat from theirs.
    free = {"mobile_1": ("table_1", 1510, 2600), "mobile_2": ("table_5", 1520, 2610),
            "mobile_3": ("table_3", 1530, 2620)}
    for robot, (table, t_out, t_back) in free.items():
        lt(t_out, robot, table)
        for t_say in (1560, 1660, 1760, 1900, 2100):
            say(t_say + 10 * int(robot[-1]), robot, "It is great talking with you.")
        lt(t_back, robot, "counter")
    smile(1600, "mobile_1", True)
    smile(1900, "mobile_1", False)
    smile(1650, "mobile_2", True)
    smile(2050, "mobile_2", False)
    smile(1700, "mobile_3", True)
    smile(1950, "mobile_3", False)
    motion(1620, "mobile_2", "arm", "power_pose")
    motion(1640, "mobile_3", "arm", "hold_up_fists")

    for i, robot in enumerate(("stationary_1", "stationary_2"), start=1):
        for t_say in (1540, 1640, 1740, 1840, 2040, 2240):
            say(t_say + 5 * i, robot, "Welcome! I am joining you remotely.")
        smile(1560 + 20 * i, robot, True)
        smile(2160 + 20 * i, robot, False)
        motion(1545 + 5 * i, robot, "head", "nod_once")
    return cmds


def standard_day_script(n_sessions: int = 4, seed: int = 2018,
                        name: str = "standard_day") -> ScenarioScript:
    """The canned full-day scenario: every table ordered, served, and chatted."""
    parties = {k: [4, 3, 2, 4, 1, 3] for k in range(1, n_sessions + 1)}
    commands: list[dict] = []
    for session in range(1, n_sessions + 1):
        commands.extend(_session_commands(session))
    # Staff shuffle one tabletop unit during the first break.
    staff_moves = [{"t": 3100.0, "robot": "stationary_2", "table": "table_4"},
                   {"t": 3200.0, "robot": "stationary_2", "table": "table_5"}]
    commands.sort(key=lambda c: c["t"])
    return ScenarioScript(name=name, seed=seed, n_sessions=n_sessions,
                          parties=parties, commands=commands, staff_moves=staff_moves)


def first_day_script(seed: int = 2018) -> ScenarioScript:
    return standard_day_script(n_sessions=3, seed=seed, name="first_day")


BUILTIN_SCRIPTS = {"standard_day": standard_day_script, "first_day": first_day_script}


def script_to_dict(script: ScenarioScript) -> dict:
    return {
        "name": script.name, "seed": script.seed, "sessions": script.n_sessions,
        "floorplan": script.floorplan_ref,
        "parties": {str(k): v for k, v in script.parties.items()},
        "commands": script.commands, "staff_moves": script.staff_moves,
        "stationary_tables": list(script.stationary_tables),
    }


def save_script(script: ScenarioScript, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(script_to_dict(script), fh, indent=2)
        fh.write("\n")
