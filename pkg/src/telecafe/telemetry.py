"""Replay event logs and survey files into the published work metrics.

Everything here is a pure function of its inputs.  Interval arithmetic runs
on integer tenths of a second (the simulation tick grid), so partitions are
exact; percentages use exact rational half-up rounding.

Service time is defined reproducibly from the log: a robot is serving while
it is parked at an occupied table during a customer-facing phase (known from
its movement segments), or inside a conversation window following one of its
utterances stamped with a table.  Smile time comes from the operator's smile
tags, clipped to working time.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import session as ss
from .events import (
    DRINK_DELIVERED, MOVE_SEGMENT, ORDER_TAKEN, PHASE_CHANGE, SMILE_TAG_OFF,
    SMILE_TAG_ON, UTTERANCE, ServiceEvent,
)
from .world import END_OF_DAY

ENGAGE_WINDOW_S = 10.0      # conversation window following a robot utterance

CUSTOMER_FACING = (ss.ORDER_CONFIRMATION, ss.DRINK_SERVING, ss.FREE_TALK)

SCALES = ("mood", "fatigue", "fullness")
SURVEY_ITEMS = ("rewarding", "self_fulfillment", "work_aptitude",
                "social_participation", "cafe_appropriateness")


class IncompleteLog(Exception):
    pass


class UnpairedSmileTag(Exception):
    pass


class EmptySurvey(Exception):
    pass


def round_half_up(x: Fraction | float) -> int:
    return math.floor(x + Fraction(1, 2))


def round_half_up_1dp(x: Fraction) -> float:
    return float(math.floor(x * 10 + Fraction(1, 2))) / 10


# --- interval helpers (integer tenths, half-open [lo, hi)) ---

Span = tuple[int, int]


def _tenths(t: float) -> int:
    return round(t * 10)


def merge(spans: list[Span]) -> list[Span]:
    out: list[Span] = []
    for lo, hi in sorted(spans):
        if hi <= lo:
            continue
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def intersect(a: list[Span], b: list[Span]) -> list[Span]:
    out, i, j = [], 0, 0
    a, b = merge(a), merge(b)
    while i < len(a) and j < len(b):
        lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return out


def subtract(a: list[Span], b: list[Span]) -> list[Span]:
    out = []
    b = merge(b)
    for lo, hi in merge(a):
        cur = lo
        for blo, bhi in b:
            if bhi <= cur or blo >= hi:
                continue
            if blo > cur:
                out.append((cur, min(blo, hi)))
            cur = max(cur, bhi)
            if cur >= hi:
                break
        if cur < hi:
            out.append((cur, hi))
    return out


def measure(spans: list[Span]) -> int:
    return sum(hi - lo for lo, hi in merge(spans))


# --- session structure recovered from the log ---

@dataclass
class SessionWindow:
    index: int
    start_tenths: int
    working: list[Span]
    customer_facing: list[Span]


def _session_windows(log: list[ServiceEvent], plan: ss.SessionPlan) -> list[SessionWindow]:
    starts: dict[int, int] = {}
    phases_seen: dict[int, set[str]] = {}
    saw_end = False
    for ev in log:
        if ev.kind != PHASE_CHANGE:
            continue
        name, k = ev.payload.get("phase"), ev.payload.get("session")
        if name == END_OF_DAY:
            saw_end = True
            continue
        phases_seen.setdefault(k, set()).add(name)
        if name == ss.OPENING_TALK:
            starts[k] = _tenths(ev.timestamp_s)
    if not starts:
        raise IncompleteLog("log contains no session phases")
    windows = []
    all_names = {p.name for p in plan.phases}
    for k in sorted(starts):
        complete = phases_seen.get(k, set()) >= all_names and (
            (k + 1) in starts or saw_end)
        if not complete:
            raise IncompleteLog(f"session {k} is not fully covered by the log")
        s = starts[k]
        working, facing = [], []
        for off, phase in plan.boundaries():
            span = (s + off * 10, s + (off + phase.duration_s) * 10)
            if phase.name != ss.BREAK:
                working.append(span)
            if phase.name in CUSTOMER_FACING:
                facing.append(span)
        windows.append(SessionWindow(k, s, merge(working), merge(facing)))
    return windows


# --- smile tags ---

def _smile_spans(log: list[ServiceEvent], robot_id: str | None) -> list[Span]:
    open_at: dict[str, int] = {}
    spans: list[Span] = []
    for ev in log:
        if ev.kind not in (SMILE_TAG_ON, SMILE_TAG_OFF):
            continue
        if robot_id is not None and ev.robot_id != robot_id:
            continue
        rid = ev.robot_id or ""
        if ev.kind == SMILE_TAG_ON:
            if rid in open_at:
                raise UnpairedSmileTag(f"{rid}: smile tagged on twice at {ev.timestamp_s}")
            open_at[rid] = _tenths(ev.timestamp_s)
        else:
            if rid not in open_at:
                raise UnpairedSmileTag(f"{rid}: smile tag off without on at {ev.timestamp_s}")
            spans.append((open_at.pop(rid), _tenths(ev.timestamp_s)))
    if open_at:
        raise UnpairedSmileTag(f"smile tag left on for {sorted(open_at)}")
    return merge(spans)


# --- movement and engagement ---

def _move_spans(log: list[ServiceEvent], robot_id: str | None) -> list[Span]:
    spans = []
    for ev in log:
        if ev.kind == MOVE_SEGMENT and (robot_id is None or ev.robot_id == robot_id):
            spans.append((_tenths(ev.payload["start_s"]), _tenths(ev.payload["end_s"])))
    return merge(spans)


def _occupied_tables(log: list[ServiceEvent],
                     windows: list[SessionWindow]) -> dict[int, set[str]]:
    occ: dict[int, set[str]] = {w.index: set() for w in windows}
    for ev in log:
        table = ev.table_id
        if table is None:
            continue
        customerish = ev.kind in (ORDER_TAKEN, DRINK_DELIVERED) or (
            ev.kind == UTTERANCE and ev.robot_id is None)
        if not customerish:
            continue
        t = _tenths(ev.timestamp_s)
        for w in windows:
            if w.start_tenths <= t < w.start_tenths + 36000:
                occ[w.index].add(table)
                break
    return occ


def _engagement_spans(log: list[ServiceEvent], windows: list[SessionWindow],
                      robot_id: str | None) -> list[Span]:
    """When the robot counts as serving a table (before phase clipping)."""
    occupied = _occupied_tables(log, windows)
    day_end = max((w.start_tenths + 36000 for w in windows), default=0)

    # Parked-at-table spans: a movement segment ending at a table keeps the
    # robot there until its next segment starts.
    segs = [ev for ev in log if ev.kind == MOVE_SEGMENT
            and (robot_id is None or ev.robot_id == robot_id)]
    by_robot: dict[str, list[ServiceEvent]] = {}
    for ev in segs:
        by_robot.setdefault(ev.robot_id or "", []).append(ev)
    parked: list[tuple[int, int, str]] = []
    for _, evs in sorted(by_robot.items()):
        evs.sort(key=lambda e: e.payload["end_s"])
        for ev, nxt in zip(evs, evs[1:] + [None]):
            table = ev.payload.get("ends_at_table")
            if table is None:
                continue
            lo = _tenths(ev.payload["end_s"])
            hi = _tenths(nxt.payload["start_s"]) if nxt is not None else day_end
            if lo < hi:
                parked.append((lo, hi, table))

    spans: list[Span] = []
    for lo, hi, table in parked:
        for w in windows:
            if table not in occupied[w.index]:
                continue
            spans.extend(intersect([(lo, hi)], w.customer_facing))

    # Conversation windows from robot utterances stamped with a table.
    for ev in log:
        if (ev.kind == UTTERANCE and ev.robot_id is not None
                and ev.table_id is not None
                and (robot_id is None or ev.robot_id == robot_id)):
            t = _tenths(ev.timestamp_s)
            spans.append((t, t + _tenths(ENGAGE_WINDOW_S)))
    facing_all = [s for w in windows for s in w.customer_facing]
    return intersect(merge(spans), facing_all)


def _speech_spans(log: list[ServiceEvent], robot_id: str | None) -> list[Span]:
    spans = []
    for ev in log:
        if ev.kind == UTTERANCE and ev.robot_id is not None and (
                robot_id is None or ev.robot_id == robot_id):
            t = _tenths(ev.timestamp_s)
            spans.append((t, t + _tenths(ENGAGE_WINDOW_S)))
    return merge(spans)


# --- the published metrics ---

@dataclass
class SessionMetrics:
    working_time_s: int
    smile_time_rate_pct: int
    customer_service_time_pct: int
    n_customers: int


def session_metrics(log: list[ServiceEvent], plan: ss.SessionPlan | None = None,
                    robot_id: str | None = None) -> SessionMetrics:
    """Working time, smile rate, service rate, and customers for one log."""
    plan = plan or ss.SessionPlan()
    windows = _session_windows(log, plan)
    working = merge([s for w in windows for s in w.working])
    working_tenths = measure(working)

    smile_tenths = measure(intersect(_smile_spans(log, robot_id), working))
    service_tenths = measure(intersect(_engagement_spans(log, windows, robot_id), working))

    served: dict[str, int] = {}
    for ev in log:
        if ev.kind == DRINK_DELIVERED and (robot_id is None or ev.robot_id == robot_id):
            served[ev.payload["order_id"]] = ev.payload.get("party_size", 0)

    return SessionMetrics(
        working_time_s=working_tenths // 10,
        smile_time_rate_pct=round_half_up(Fraction(100 * smile_tenths, working_tenths)),
        customer_service_time_pct=round_half_up(Fraction(100 * service_tenths, working_tenths)),
        n_customers=sum(served.values()),
    )


@dataclass
class WorkBreakdown:
    seconds: dict[str, float]       # exact seconds per category
    percentages: dict[str, int]     # sums to exactly 100

    @property
    def active_pct(self) -> int:
        return self.percentages["service"] + self.percentages["movement"]


def work_breakdown(log: list[ServiceEvent], plan: ss.SessionPlan | None = None,
                   robot_id: str | None = None) -> WorkBreakdown:
    """Partition working time into service / movement / speaking / idle."""
    plan = plan or ss.SessionPlan()
    windows = _session_windows(log, plan)
    working = merge([s for w in windows for s in w.working])
    w_tenths = measure(working)

    movement = intersect(_move_spans(log, robot_id), working)
    service = subtract(intersect(_engagement_spans(log, windows, robot_id), working),
                       movement)
    speaking = subtract(subtract(intersect(_speech_spans(log, robot_id), working),
                                 movement), service)
    cat_tenths = {
        "service": measure(service),
        "movement": measure(movement),
        "speaking": measure(speaking),
    }
    cat_tenths["idle"] = w_tenths - sum(cat_tenths.values())
    pct = _largest_remainder(cat_tenths, w_tenths)
    return WorkBreakdown(
        seconds={k: v / 10 for k, v in cat_tenths.items()},
        percentages=pct,
    )


def _largest_remainder(parts: dict[str, int], total: int) -> dict[str, int]:
    """Integer percentages that sum to exactly 100."""
    if total <= 0:
        raise IncompleteLog("no working time to break down")
    exact = {k: Fraction(100 * v, total) for k, v in parts.items()}
    base = {k: math.floor(x) for k, x in exact.items()}
    leftover = 100 - sum(base.values())
    order = sorted(parts, key=lambda k: (base[k] - exact[k], list(parts).index(k)))
    for k in order[:leftover]:
        base[k] += 1
    return base


# --- face scales ---

@dataclass
class FaceScaleEntry:
    pilot_id: str
    date: str
    moment: str                     # "pre" | "post"
    mood: int | None = None
    fatigue: int | None = None
    fullness: int | None = None

    def __post_init__(self):
        if self.moment not in ("pre", "post"):
            raise ValueError(f"moment must be pre or post, got {self.moment!r}")
        for scale in SCALES:
            v = getattr(self, scale)
            if v is not None and not 1 <= v <= 10:
                raise ValueError(f"{scale} must be 1..10, got {v}")


@dataclass
class FaceScaleReport:
    per_pilot: dict[str, dict[str, tuple[int, int]]]    # pilot -> scale -> (rises, falls)
    totals: dict[str, tuple[int, int]]
    duty_days: dict[str, int]
    excluded: list[tuple[str, str, str]]                # (pilot, date, reason)
    notes: list[str] = field(default_factory=list)


def face_scale_deltas(entries: list[FaceScaleEntry],
                      nominal_total_days: int | None = None) -> FaceScaleReport:
    """Count per-pilot rises and falls of each scale across duty days.

    Days missing either the pre- or post-work answer are excluded from the
    comparison (they still count as duty days).  Ties count in neither
    direction.  When a nominal duty-day total is supplied and disagrees with
    the data, the mismatch is reported as a note rather than resolved.
    """
    by_pilot_day: dict[tuple[str, str], dict[str, FaceScaleEntry]] = {}
    for e in entries:
        by_pilot_day.setdefault((e.pilot_id, e.date), {})[e.moment] = e

    pilots = sorted({p for p, _ in by_pilot_day})
    per_pilot = {p: {s: [0, 0] for s in SCALES} for p in pilots}
    duty_days = {p: 0 for p in pilots}
    excluded = []
    for (pilot, date) in sorted(by_pilot_day):
        pair = by_pilot_day[(pilot, date)]
        duty_days[pilot] += 1
        if "pre" not in pair or "post" not in pair:
            missing = "pre" if "pre" not in pair else "post"
            excluded.append((pilot, date, f"missing {missing}-work answer"))
            continue
        for scale in SCALES:
            before = getattr(pair["pre"], scale)
            after = getattr(pair["post"], scale)
            if before is None or after is None:
                continue
            if after > before:
                per_pilot[pilot][scale][0] += 1
            elif after < before:
                per_pilot[pilot][scale][1] += 1

    totals = {
        s: (sum(per_pilot[p][s][0] for p in pilots),
            sum(per_pilot[p][s][1] for p in pilots))
        for s in SCALES
    }
    notes = []
    data_days = sum(duty_days.values())
    if nominal_total_days is not None and nominal_total_days != data_days:
        notes.append(
            f"data note: per-pilot duty days sum to {data_days}, "
            f"but the stated total is {nominal_total_days}; reporting the data as given")
    return FaceScaleReport(
        per_pilot={p: {s: tuple(v) for s, v in scales.items()}
                   for p, scales in per_pilot.items()},
        totals=totals, duty_days=duty_days, excluded=excluded, notes=notes)


def load_face_scales(path: str) -> list[FaceScaleEntry]:
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            entries.append(FaceScaleEntry(
                pilot_id=row["pilot_id"], date=row["date"], moment=row["moment"],
                mood=int(row["mood"]) if row.get("mood") else None,
                fatigue=int(row["fatigue"]) if row.get("fatigue") else None,
                fullness=int(row["fullness"]) if row.get("fullness") else None))
    return entries


def save_face_scales(entries: list[FaceScaleEntry], path: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pilot_id", "date", "moment", *SCALES])
        for e in entries:
            writer.writerow([e.pilot_id, e.date, e.moment,
                             *("" if getattr(e, s) is None else getattr(e, s)
                               for s in SCALES)])


# --- staff attitude survey ---

@dataclass
class SurveyResponse:
    pilot_id: str
    items: tuple[int, int, int, int, int]

    def __post_init__(self):
        if len(self.items) != len(SURVEY_ITEMS):
            raise ValueError("five survey items required")
        if any(not 1 <= v <= 5 for v in self.items):
            raise ValueError("survey items are rated 1..5")


@dataclass
class SurveySummary:
    means: dict[str, float]         # one decimal, half-up
    minimums: dict[str, int]
    low_rated: list[str]            # items with any response <= 2
    all_items_4_plus: bool


def survey_summary(responses: list[SurveyResponse]) -> SurveySummary:
    if not responses:
        raise EmptySurvey("no survey responses")
    means, minimums, low = {}, {}, []
    for i, item in enumerate(SURVEY_ITEMS):
        values = [r.items[i] for r in responses]
        means[item] = round_half_up_1dp(Fraction(sum(values), len(values)))
        minimums[item] = min(values)
        if minimums[item] <= 2:
            low.append(item)
    return SurveySummary(means, minimums, low,
                         all_items_4_plus=all(m >= 4.0 for m in means.values()))


def load_survey(path: str) -> list[SurveyResponse]:
    responses = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            responses.append(SurveyResponse(
                row["pilot_id"], tuple(int(row[item]) for item in SURVEY_ITEMS)))
    return responses


def save_survey(responses: list[SurveyResponse], path: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pilot_id", *SURVEY_ITEMS])
        for r in responses:
            writer.writerow([r.pilot_id, *r.items])
