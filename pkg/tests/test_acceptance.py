"""Acceptance suite: every primary criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Human-subject outcomes are out of reach by construction; these
checks cover the published arithmetic and the system properties.
"""

import asyncio
import math
import random
import time

from telecafe import inputs as inp
from telecafe import protocol as pr
from telecafe import robot as rb
from telecafe import telemetry as tm
from telecafe.channel import ChannelModel, transmit
from telecafe.events import log_digest
from telecafe.scenario import run_scenario, standard_day_script
from telecafe.session import DaySchedule, SessionPlan, working_seconds

from conftest import TABLE5_DAYS, TABLE5_EXPECTED, face_scale_fixture, survey_fixture, synthetic_day_log
from test_protocol import random_message
from test_server import _talk, _with_service

EPSILON = 1e-9


def test_session_arithmetic():
    """Standard day = 4 x 3300 s = 13200 s; 2-session fixture = 6600 s."""
    t0 = time.monotonic()
    result = run_scenario(standard_day_script())
    assert result.working_time_s == 13200
    assert working_seconds(SessionPlan(), (0, 14400), DaySchedule()) == 13200
    metrics = tm.session_metrics(result.events)
    assert metrics.working_time_s == 13200

    two_sessions = synthetic_day_log(2)
    assert tm.session_metrics(two_sessions).working_time_s == 6600
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0, f"accelerated day took {elapsed:.2f}s"
    print(f"PASS: session arithmetic (13200 s / 6600 s, {elapsed:.2f}s)")


def test_table5_reproduction():
    """Five constructed day logs reproduce the published smile/service rates."""
    t0 = time.monotonic()
    smiles, services, workings, customers = [], [], [], []
    for n, smile_s, service_s, parties in TABLE5_DAYS:
        log = synthetic_day_log(n, smile_s=smile_s, service_s=service_s,
                                parties=parties)
        m = tm.session_metrics(log, robot_id="mobile_1")
        workings.append(m.working_time_s)
        smiles.append(m.smile_time_rate_pct)
        services.append(m.customer_service_time_pct)
        customers.append(m.n_customers)
    assert workings == TABLE5_EXPECTED["working"]
    assert smiles == TABLE5_EXPECTED["smile"]
    assert services == TABLE5_EXPECTED["service"]
    assert customers == TABLE5_EXPECTED["customers"]
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    print(f"PASS: five-day table reproduced (smile {smiles}, service {services}, "
          f"{elapsed * 1000:.0f}ms)")


def test_table4_reproduction():
    """Rise/fall totals per scale, with the 28-vs-29 duty-day note."""
    report = tm.face_scale_deltas(face_scale_fixture(), nominal_total_days=29)
    assert report.totals["mood"] == (8, 6)
    assert report.totals["fatigue"] == (3, 16)
    assert report.totals["fullness"] == (9, 5)
    assert sum(report.duty_days.values()) == 28
    assert any("28" in note and "29" in note for note in report.notes)
    print(f"PASS: face-scale totals {report.totals} with data note")


def test_survey_reproduction():
    summary = tm.survey_summary(survey_fixture())
    assert summary.means["cafe_appropriateness"] == 4.9
    assert summary.means["social_participation"] == 4.7
    assert summary.all_items_4_plus
    print(f"PASS: survey means {summary.means} (all items >= 4.0)")


def test_speed_cap_property():
    """10,000 randomized command scripts never exceed 0.2 m/s per tick."""
    rng = random.Random(20181126)
    cat = rb.DEFAULT_CATALOG
    worst = 0.0
    for _ in range(10_000):
        state = rb.RobotState(
            "r", rb.RobotSpec(), pose=rb.Pose(rng.uniform(1, 9), rng.uniform(1, 7),
                                              rng.uniform(-math.pi, math.pi)))
        for _ in range(rng.randint(2, 8)):
            roll = rng.random()
            try:
                if roll < 0.35:
                    rb.start_motion(state, rng.choice(cat.head + cat.arm))
                elif roll < 0.65:
                    rb.start_locomotion(state, rng.choice(cat.locomotion),
                                        rng.uniform(0.1, 1.5))
                elif roll < 0.85:
                    wps = [state.pose.position(),
                           (rng.uniform(0.5, 9.5), rng.uniform(0.5, 7.5))]
                    if math.dist(*wps) > 0.01:
                        rb.start_line_trace(state, rb.LinePath("w", wps, "t"))
                else:
                    rb.stop(state)
            except rb.RobotError:
                pass
            for _ in range(rng.randint(1, 3)):
                before = state.pose.position()
                rb.step(state, 0.1)
                worst = max(worst, math.dist(before, state.pose.position()) / 0.1)
                assert worst <= 0.2 + EPSILON
    print(f"PASS: speed cap held over 10,000 scripts (max {worst:.12f} m/s)")


def test_line_trace_property():
    """100 random polylines: timely arrival, terminal error <= 0.05 m."""
    rng = random.Random(77)
    worst_ratio, worst_err = 0.0, 0.0
    for _ in range(100):
        wps = [(rng.uniform(1.0, 9.0), rng.uniform(1.0, 7.0))]
        for _ in range(rng.randint(1, 4)):
            while True:
                angle = rng.uniform(-math.pi, math.pi)
                length = rng.uniform(0.5, 3.0)
                x = wps[-1][0] + length * math.cos(angle)
                y = wps[-1][1] + length * math.sin(angle)
                if 0.6 <= x <= 9.4 and 0.6 <= y <= 7.4:
                    wps.append((x, y))
                    break
        path = rb.LinePath("rand", wps, "t")
        state = rb.RobotState("r", rb.RobotSpec(),
                              pose=rb.Pose(wps[0][0], wps[0][1],
                                           rng.uniform(-math.pi, math.pi)))
        rb.start_line_trace(state, path)
        budget = 1.5 * path.length_m / 0.2
        t = 0.0
        while not state.idle and t < budget + 1.0:
            rb.step(state, 0.1)
            t += 0.1
        err = math.dist(state.pose.position(), wps[-1])
        assert state.idle and t <= budget, f"late arrival: {t:.1f}s > {budget:.1f}s"
        assert err <= 0.05, f"terminal error {err:.3f}"
        worst_ratio = max(worst_ratio, t / (path.length_m / 0.2))
        worst_err = max(worst_err, err)
    print(f"PASS: line tracing on 100 polylines (worst time ratio "
          f"{worst_ratio:.2f}x, worst error {worst_err:.3f} m)")


def test_determinism():
    """20 repeated runs of the canned day produce one unique log hash."""
    script = standard_day_script()
    digests = {log_digest(run_scenario(script).events) for _ in range(20)}
    assert len(digests) == 1
    print(f"PASS: 20 canned-day runs, 1 unique hash ({next(iter(digests))[:16]}...)")


def test_protocol_properties():
    # Codec round-trip on 10,000 generated messages.
    rng = random.Random(31415)
    for _ in range(10_000):
        msg = random_message(rng)
        assert pr.decode(pr.encode(msg)) == msg

    # Total decode under byte fuzz: random blobs and corrupted real frames.
    for _ in range(5_000):
        blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 80)))
        try:
            pr.decode(blob)
        except (pr.MalformedFrame, pr.UnsupportedVersion):
            pass
    for _ in range(5_000):
        frame = bytearray(pr.encode(random_message(rng)))
        frame[rng.randrange(len(frame))] = rng.randrange(256)
        try:
            pr.decode(bytes(frame))
        except (pr.MalformedFrame, pr.UnsupportedVersion):
            pass

    # Ack completeness over a real lossless connection.
    commands = [pr.Speak(i, "mobile_1", text=f"m{i}") for i in range(1, 41)]

    async def work(service, port):
        responses, _ = await _talk(port, commands, expect=len(commands))
        return responses

    responses = asyncio.run(_with_service(work))
    assert len(responses) == len(commands)

    # Order preservation at loss 0.3 / jitter 100 ms.
    channel = ChannelModel(latency_ms=40.0, jitter_ms=100.0, loss_rate=0.3, seed=9)
    deliveries = transmit(channel, [(i * 2.0, i) for i in range(2000)])
    indices = [d.index for d in deliveries]
    assert 0 < len(indices) < 2000
    assert indices == sorted(indices)
    times = [d.deliver_ms for d in deliveries]
    assert all(a <= b for a, b in zip(times, times[1:]))
    print("PASS: protocol (10k round-trips, fuzz-total decode, "
          f"{len(commands)}/{len(commands)} acks, order kept at loss 0.3)")


# --- modality equivalence ---

TARGET_SEQUENCE = ["nod_once", "look_left", "raise_one_hand", "forward", "bye_bye"]
PALETTE = list(rb.DEFAULT_CATALOG.all_ids)
GAP_MS = 30_000.0


def _pointer_selections():
    return inp.pointer_select([(k * GAP_MS, t) for k, t in enumerate(TARGET_SEQUENCE)])


def _dwell_selections():
    stream = []
    for k, target in enumerate(TARGET_SEQUENCE):
        stream.append((k * GAP_MS, target))
        stream.append((k * GAP_MS + 1000.0, None))
    return inp.dwell_select(stream, 800)


def _scan_selections():
    presses = []
    for k, target in enumerate(TARGET_SEQUENCE):
        presses.append(inp.scan_press_time_for(PALETTE, target, after_ms=k * GAP_MS))
    return inp.scan_step(PALETTE, presses, inp.DEFAULT_SCAN_INTERVAL_MS)


def _drive_trajectory(selections):
    """Normalized schedule: command k at t = 1 + 8k s; record each tick."""
    cat = rb.DEFAULT_CATALOG
    state = rb.RobotState("r", rb.RobotSpec(), pose=rb.Pose(2.0, 2.0, 0.0))
    schedule = {round((1.0 + 8.0 * k) * 10): s.target
                for k, s in enumerate(selections)}
    trajectory = []
    for tick in range(0, int((1.0 + 8.0 * len(selections) + 5.0) * 10)):
        target = schedule.get(tick)
        if target is not None:
            if target in cat.locomotion:
                rb.start_locomotion(state, target, 2.0)
            else:
                rb.start_motion(state, target)
        rb.step(state, 0.1)
        trajectory.append((state.pose.x_m, state.pose.y_m, state.pose.heading_rad,
                           state.joints.neck, state.joints.arm_left,
                           state.joints.arm_right, type(state.mode).__name__))
    return trajectory


def test_modality_equivalence():
    """Pointer, dwell, and scan produce identical robot trajectories."""
    by_modality = {
        "pointer": _pointer_selections(),
        "dwell": _dwell_selections(),
        "scan": _scan_selections(),
    }
    for name, selections in by_modality.items():
        assert [s.target for s in selections] == TARGET_SEQUENCE, name
    trajectories = {name: _drive_trajectory(sel)
                    for name, sel in by_modality.items()}
    assert trajectories["pointer"] == trajectories["dwell"] == trajectories["scan"]
    print(f"PASS: modality equivalence over {len(TARGET_SEQUENCE)} selections "
          f"({len(trajectories['pointer'])} identical trajectory samples)")
