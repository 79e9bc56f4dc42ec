"""Shared fixtures: synthetic telemetry logs and survey/face-scale data.

The synthetic day logs are built directly from the event vocabulary so the
telemetry pipeline can be pinned against hand-computed numbers.
"""

from __future__ import annotations

import pytest

from telecafe import session as ss
from telecafe.events import (
    DRINK_DELIVERED, MOVE_SEGMENT, PHASE_CHANGE, SMILE_TAG_OFF, SMILE_TAG_ON,
    ServiceEvent,
)
from telecafe.telemetry import FaceScaleEntry, SurveyResponse
from telecafe.world import END_OF_DAY


def phase_events(n_sessions: int, plan: ss.SessionPlan | None = None) -> list[ServiceEvent]:
    plan = plan or ss.SessionPlan()
    events = []
    for k in range(1, n_sessions + 1):
        s = (k - 1) * ss.SESSION_S
        for off, phase in plan.boundaries():
            events.append(ServiceEvent(float(s + off), PHASE_CHANGE,
                                       payload={"phase": phase.name, "session": k}))
    events.append(ServiceEvent(float(n_sessions * ss.SESSION_S), PHASE_CHANGE,
                               payload={"phase": END_OF_DAY, "session": n_sessions}))
    return events


def arrival_departure(robot_id: str, table_id: str, arrive_s: float,
                      depart_s: float, travel_s: float = 40.0) -> list[ServiceEvent]:
    """A move ending at a table, a stay, and a move away again."""
    return [
        ServiceEvent(arrive_s, MOVE_SEGMENT, robot_id, table_id, payload={
            "start_s": arrive_s - travel_s, "end_s": arrive_s,
            "from": [5.0, 0.9], "to": [2.0, 2.45], "distance_m": 4.0,
            "mode": "line_trace", "ends_at_table": table_id}),
        ServiceEvent(depart_s + travel_s, MOVE_SEGMENT, robot_id, None, payload={
            "start_s": depart_s, "end_s": depart_s + travel_s,
            "from": [2.0, 2.45], "to": [5.0, 0.9], "distance_m": 4.0,
            "mode": "line_trace", "ends_at_table": None}),
    ]


def smile_span(robot_id: str, on_s: float, off_s: float) -> list[ServiceEvent]:
    return [ServiceEvent(on_s, SMILE_TAG_ON, robot_id),
            ServiceEvent(off_s, SMILE_TAG_OFF, robot_id)]


def synthetic_day_log(n_sessions: int, robot_id: str = "mobile_1",
                      smile_s: list[int] | None = None,
                      service_s: list[int] | None = None,
                      parties: list[list[int]] | None = None) -> list[ServiceEvent]:
    """A constructed day: per-session smile seconds, service seconds, parties.

    Smile tags run from s+100; the robot parks at table_1 from s+400 for the
    requested service time; each party gets one delivery around s+950.
    """
    events = phase_events(n_sessions)
    for k in range(1, n_sessions + 1):
        s = (k - 1) * ss.SESSION_S
        if smile_s and smile_s[k - 1]:
            events += smile_span(robot_id, s + 100.0, s + 100.0 + smile_s[k - 1])
        if service_s and service_s[k - 1]:
            events += arrival_departure(robot_id, "table_1", s + 400.0,
                                        s + 400.0 + service_s[k - 1])
        if parties:
            for i, size in enumerate(parties[k - 1]):
                table = f"table_{i + 1}"
                events.append(ServiceEvent(
                    s + 950.0 + 10 * i, DRINK_DELIVERED, robot_id, table,
                    payload={"order_id": f"order_s{k}_{table}", "party_size": size}))
    events.sort(key=lambda e: e.timestamp_s)
    return events


# --- published-table fixtures ---

# Five day logs whose smile and service seconds are the published rates
# applied to the working time: rate% x working_s / 100, split evenly over
# the sessions.
TABLE5_DAYS = [
    # (n_sessions, smile_s per session, service_s per session, parties per session)
    (2, [1023, 1023], [825, 825], [[4, 4, 3], [4, 3, 3]]),          # 31% / 25% / 21
    (2, [1617, 1617], [1056, 1056], [[4, 4, 4, 4, 3], [4, 4, 4, 4, 3]]),  # 49% / 32% / 38
    (2, [561, 561], [1089, 1089], [[4, 4, 3], [4, 3, 3]]),          # 17% / 33% / 21
    (2, [759, 759], [561, 561], [[4, 4, 4], [4, 4, 4]]),            # 23% / 17% / 24
    (1, [330], [594], [[4, 4, 4, 4, 3]]),                           # 10% / 18% / 19
]
TABLE5_EXPECTED = {
    "working": [6600, 6600, 6600, 6600, 3300],
    "smile": [31, 49, 17, 23, 10],
    "service": [25, 32, 33, 17, 18],
    "customers": [21, 38, 21, 24, 19],
}


@pytest.fixture
def table5_logs() -> list[list[ServiceEvent]]:
    return [synthetic_day_log(n, smile_s=sm, service_s=sv, parties=pt)
            for n, sm, sv, pt in TABLE5_DAYS]


# --- face-scale fixture: three pilots, 28 duty days, published rise/fall totals ---

_DATES = [f"2018-11-{d}" for d in (26, 27, 28, 29, 30)] + \
         [f"2018-12-{d:02d}" for d in (3, 4, 5, 6, 7)]

# Per-day deltas (+1, -1, 0) per scale, applied to a baseline of 5.
_PILOT_DELTAS = {
    # A: 9 days (skips 12/7): mood 5+/2-, fatigue 1+/4-, fulfilling 5+/2-
    "A": {"dates": _DATES[:9],
          "mood":       [1, 1, 1, 1, 1, -1, -1, 0, 0],
          "fatigue":    [1, -1, -1, -1, -1, 0, 0, 0, 0],
          "fullness":   [1, 1, 1, 1, 1, -1, -1, 0, 0]},
    # B: 10 duty days but no pre-work answer on 11/26: mood 2+/2-,
    # fatigue 0+/8-, fulfilling 2+/2- over the 9 comparable days
    "B": {"dates": _DATES,
          "mood":       [None, 1, 1, -1, -1, 0, 0, 0, 0, 0],
          "fatigue":    [None, -1, -1, -1, -1, -1, -1, -1, -1, 0],
          "fullness":   [None, 1, 1, -1, -1, 0, 0, 0, 0, 0]},
    # C: 9 days (skips 11/26): mood 1+/2-, fatigue 2+/4-, fulfilling 2+/1-
    "C": {"dates": _DATES[1:],
          "mood":       [1, -1, -1, 0, 0, 0, 0, 0, 0],
          "fatigue":    [1, 1, -1, -1, -1, -1, 0, 0, 0],
          "fullness":   [1, 1, -1, 0, 0, 0, 0, 0, 0]},
}


def face_scale_fixture() -> list[FaceScaleEntry]:
    entries = []
    for pilot, spec in _PILOT_DELTAS.items():
        for i, date in enumerate(spec["dates"]):
            deltas = {s: spec[s][i] for s in ("mood", "fatigue", "fullness")}
            if any(d is None for d in deltas.values()):
                # Duty day with the pre-work questionnaire unanswered.
                entries.append(FaceScaleEntry(pilot, date, "post",
                                              mood=5, fatigue=5, fullness=5))
                continue
            entries.append(FaceScaleEntry(pilot, date, "pre",
                                          mood=5, fatigue=5, fullness=5))
            entries.append(FaceScaleEntry(pilot, date, "post",
                                          mood=5 + deltas["mood"],
                                          fatigue=5 + deltas["fatigue"],
                                          fullness=5 + deltas["fullness"]))
    return entries


@pytest.fixture
def face_scales() -> list[FaceScaleEntry]:
    return face_scale_fixture()


# --- survey fixture: nine responses, published item means ---

_SURVEY_COLUMNS = [
    [2, 5, 5, 5, 5, 5, 4, 4, 4],    # rewarding: mean 4.3, one answer of 2
    [2, 4, 5, 5, 5, 5, 5, 4, 5],    # self_fulfillment: mean 4.4, one answer of 2
    [4, 4, 4, 5, 5, 5, 4, 4, 5],    # work_aptitude: mean 4.4
    [5, 5, 5, 5, 5, 4, 5, 4, 4],    # social_participation: mean 4.7
    [5, 5, 5, 5, 5, 5, 5, 5, 4],    # cafe_appropriateness: mean 4.9
]


def survey_fixture() -> list[SurveyResponse]:
    return [SurveyResponse(f"p{r + 1:02d}",
                           tuple(col[r] for col in _SURVEY_COLUMNS))
            for r in range(9)]


@pytest.fixture
def survey_responses() -> list[SurveyResponse]:
    return survey_fixture()
