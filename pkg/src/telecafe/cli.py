"""Command-line entry points: serve, simulate, report.

Reports and summaries go to stdout; diagnostics go to stderr; the exit code
is 0 exactly when no error occurred.  `simulate` never opens a socket.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys

from . import session as ss
from . import telemetry as tm
from .channel import parse_channel_spec
from .events import log_digest, read_log, write_log
from .floorplan import load_plan
from .scenario import (
    BUILTIN_SCRIPTS, ScenarioParseError, ScenarioScript, load_script,
    run_scenario, standard_day_script,
)
from .server import CafeService, banner
from .session import DaySchedule, Unstaffable, assign_shifts, load_roster, shift_slots

PORT_ENV_VAR = "TELECAFE_PORT"
DEFAULT_PORT = 8765


class ConfigError(Exception):
    pass


class BindError(Exception):
    pass


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScenarioParseError, Unstaffable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BindError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telecafe",
                                     description="avatar-robot cafe simulator and service")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the teleoperation service")
    serve.add_argument("--floorplan", help="floor plan JSON (default: built-in reference)")
    serve.add_argument("--roster", help="pilot roster JSON; prints the shift assignment")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT,
                       help=f"TCP port (env {PORT_ENV_VAR} overrides)")
    serve.add_argument("--speed", type=float, default=1.0,
                       help="simulated seconds per wall second")
    serve.add_argument("--seed", type=int, default=None)
    serve.add_argument("--sessions", type=int, default=4, choices=(3, 4))
    serve.add_argument("--channel", default="",
                       help="impaired-channel shim: latency=MS,jitter=MS,loss=P")
    serve.add_argument("--out", help="write the event log here when the day ends")
    serve.set_defaults(func=cmd_serve)

    sim = sub.add_parser("simulate", help="run a scripted day headless")
    sim.add_argument("script", help="scenario JSON path or builtin name "
                                    f"({', '.join(BUILTIN_SCRIPTS)})")
    sim.add_argument("--seed", type=int, default=None, help="override the script seed")
    sim.add_argument("--out", help="event log path (default: <script>.events.jsonl)")
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser("report", help="derive work metrics from logs and survey files")
    rep.add_argument("--log", action="append", default=[],
                     help="event log (repeat for one column per day)")
    rep.add_argument("--survey", help="survey CSV")
    rep.add_argument("--facescale", help="face-scale CSV")
    rep.add_argument("--nominal-duty-days", type=int, default=None,
                     help="stated duty-day total to check the face-scale data against")
    rep.add_argument("--robot", default=None, help="restrict log metrics to one robot")
    rep.set_defaults(func=cmd_report)
    return parser


def _resolve_script(ref: str) -> ScenarioScript:
    if ref in BUILTIN_SCRIPTS:
        return BUILTIN_SCRIPTS[ref]()
    if not os.path.exists(ref):
        raise ConfigError(f"scenario file not found: {ref}")
    return load_script(ref)


def cmd_serve(args) -> int:
    script = standard_day_script(n_sessions=args.sessions)
    if args.floorplan:
        if not os.path.exists(args.floorplan):
            raise ConfigError(f"floor plan file not found: {args.floorplan}")
        try:
            load_plan(args.floorplan)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad floor plan {args.floorplan}: {exc}") from exc
        script.floorplan_ref = args.floorplan
        script.commands = []    # interactive day on a custom plan
    else:
        script.commands = []
    if args.roster:
        if not os.path.exists(args.roster):
            raise ConfigError(f"roster file not found: {args.roster}")
        pilots = load_roster(args.roster)
        shifts = assign_shifts(pilots, DaySchedule(n_sessions=args.sessions))
        print("shift assignment:")
        for sess, robot, pilot in shift_slots(shifts):
            print(f"  session {sess + 1}: {robot} <- {pilot}")

    port = int(os.environ.get(PORT_ENV_VAR, args.port))
    channel = parse_channel_spec(args.channel, seed=args.seed or 0)
    service = CafeService(script, speed=args.speed, channel=channel,
                          log_path=args.out, seed=args.seed)

    async def _run():
        try:
            bound = await service.start(port=port)
        except OSError as exc:
            raise BindError(f"cannot bind port {port}: {exc}") from exc
        print(banner(service, bound))
        sys.stdout.flush()
        await service.run()

    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    script = _resolve_script(args.script)
    result = run_scenario(script, seed=args.seed)
    out = args.out or f"{script.name}.events.jsonl"
    write_log(result.events, out)
    print(f"scenario: {script.name}")
    print(f"sessions: {script.n_sessions}")
    print(f"working_time_s: {result.working_time_s}")
    print(f"log: {out}")
    print(f"log_sha256: {log_digest(result.events)}")
    print("event_counts:")
    for kind, n in result.counts().items():
        print(f"  {kind}: {n}")
    for t, cmd, reason in result.rejects:
        print(f"warning: t={t:.1f} {type(cmd).__name__} for {cmd.robot_id} "
              f"rejected: {reason}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    plan = ss.SessionPlan()
    warned = False
    if args.log:
        print("session_metrics:")
        print("log,working_time_s,smile_time_rate_pct,customer_service_time_pct,n_customers")
        rows = []
        for path in args.log:
            if not os.path.exists(path):
                raise ConfigError(f"log file not found: {path}")
            log = read_log(path)
            try:
                m = tm.session_metrics(log, plan, robot_id=args.robot)
                b = tm.work_breakdown(log, plan, robot_id=args.robot)
            except tm.IncompleteLog as exc:
                print(f"warning: {path}: {exc}; reporting zeros", file=sys.stderr)
                warned = True
                m = tm.SessionMetrics(0, 0, 0, 0)
                b = None
            print(f"{os.path.basename(path)},{m.working_time_s},"
                  f"{m.smile_time_rate_pct},{m.customer_service_time_pct},{m.n_customers}")
            rows.append((path, m, b))
        print()
        print("work_breakdown:")
        print("log,service_pct,movement_pct,speaking_pct,idle_pct")
        for path, _, b in rows:
            if b is None:
                print(f"{os.path.basename(path)},0,0,0,0")
            else:
                p = b.percentages
                print(f"{os.path.basename(path)},{p['service']},{p['movement']},"
                      f"{p['speaking']},{p['idle']}")
        print()

    if args.facescale:
        if not os.path.exists(args.facescale):
            raise ConfigError(f"face-scale file not found: {args.facescale}")
        entries = tm.load_face_scales(args.facescale)
        report = tm.face_scale_deltas(entries, nominal_total_days=args.nominal_duty_days)
        print("face_scale_deltas:")
        print("pilot,duty_days,scale,rises,falls")
        for pilot in sorted(report.per_pilot):
            for scale in tm.SCALES:
                pos, neg = report.per_pilot[pilot][scale]
                print(f"{pilot},{report.duty_days[pilot]},{scale},{pos},{neg}")
        for scale in tm.SCALES:
            pos, neg = report.totals[scale]
            print(f"total,{sum(report.duty_days.values())},{scale},{pos},{neg}")
        for pilot, date, reason in report.excluded:
            print(f"note: {pilot} {date} excluded from comparison ({reason})")
        for note in report.notes:
            print(note)
        print()

    if args.survey:
        if not os.path.exists(args.survey):
            raise ConfigError(f"survey file not found: {args.survey}")
        responses = tm.load_survey(args.survey)
        try:
            summary = tm.survey_summary(responses)
        except tm.EmptySurvey as exc:
            print(f"warning: {exc}", file=sys.stderr)
            return 2
        print("survey_summary:")
        print("item,mean,min")
        for item in tm.SURVEY_ITEMS:
            print(f"{item},{summary.means[item]:.1f},{summary.minimums[item]}")
        print(f"all_items_mean_4_plus: {str(summary.all_items_4_plus).lower()}")
        if summary.low_rated:
            print(f"items_with_low_responses: {','.join(summary.low_rated)}")
        print()

    if not (args.log or args.facescale or args.survey):
        raise ConfigError("nothing to report: pass --log, --survey, or --facescale")
    return 0 if not warned else 0


if __name__ == "__main__":
    sys.exit(main())
