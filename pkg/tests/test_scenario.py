"""Scenario parsing and the deterministic headless runner."""

import pytest

from telecafe.events import check_monotone, log_digest
from telecafe.scenario import (
    ScenarioParseError, first_day_script, load_script, parse_script,
    run_scenario, save_script, standard_day_script,
)


def test_parse_minimal():
    script = parse_script({"name": "min", "seed": 3, "sessions": 4})
    assert script.n_sessions == 4
    assert script.commands == []


@pytest.mark.parametrize("doc", [
    {"sessions": 2},
    {"sessions": 4, "commands": [{"t": 10, "robot": "mobile_1", "kind": "explode"}]},
    {"sessions": 4, "commands": [{"t": 10, "robot": "mobile_9",
                                  "kind": "stop"}]},
    {"sessions": 4, "commands": [{"t": 99999, "robot": "mobile_1", "kind": "stop"}]},
    {"sessions": 4, "parties": {"1": [5]}},
    {"sessions": 4, "parties": {"9": [2]}},
    {"sessions": 4, "parties": {"1": [1, 1, 1, 1, 1, 1, 1]}},
    {"sessions": 4, "staff_moves": [{"t": 10, "robot": "stationary_1",
                                     "table": "table_99"}]},
])
def test_parse_rejects_bad_documents(doc):
    with pytest.raises(ScenarioParseError):
        parse_script(doc)


def test_load_script_bad_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    with pytest.raises(ScenarioParseError):
        load_script(str(path))


def test_script_round_trip(tmp_path):
    script = standard_day_script()
    path = tmp_path / "day.json"
    save_script(script, str(path))
    loaded = load_script(str(path))
    assert loaded == script


def test_empty_scenario_only_phase_events():
    script = parse_script({"name": "empty", "seed": 1, "sessions": 4})
    result = run_scenario(script)
    assert {e.kind for e in result.events} == {"PhaseChange"}
    # 7 phases per session plus the day-end marker.
    assert len(result.events) == 7 * 4 + 1


def test_same_seed_identical_log():
    script = standard_day_script()
    digests = {log_digest(run_scenario(script).events) for _ in range(3)}
    assert len(digests) == 1


def test_different_seed_differs_only_in_chatter():
    """Diff oracle: replays differ only in rng-driven customer utterances."""
    script = standard_day_script()
    base = run_scenario(script).events
    other = run_scenario(script, seed=4242).events
    strip = lambda events: [e.to_json_line() for e in events if e.kind != "Utterance"]
    keep = lambda events: [e for e in events if e.kind == "Utterance"
                           and e.robot_id is None]
    assert log_digest(base) != log_digest(other)
    assert strip(base) == strip(other)
    assert [(e.timestamp_s, e.payload["text"]) for e in keep(base)] != \
           [(e.timestamp_s, e.payload["text"]) for e in keep(other)]


def test_canned_day_serves_every_table():
    result = run_scenario(standard_day_script())
    assert result.rejects == []
    for session in range(1, 5):
        delivered = {e.table_id for e in result.events
                     if e.kind == "DrinkDelivered"
                     and e.payload["order_id"].startswith(f"order_s{session}_")}
        assert delivered == {f"table_{i}" for i in range(1, 7)}


def test_working_time_summary():
    assert run_scenario(standard_day_script()).working_time_s == 13200
    assert run_scenario(first_day_script()).working_time_s == 9900


def test_log_is_time_ordered_and_conservative():
    result = run_scenario(standard_day_script())
    assert check_monotone(result.events)
    assert result.events[-1].timestamp_s <= result.world.clock_s
    assert result.world.check_conservation()


def test_smile_tags_paired_in_canned_day():
    result = run_scenario(standard_day_script())
    per_robot = {}
    for e in result.events:
        if e.kind in ("SmileTagOn", "SmileTagOff"):
            per_robot.setdefault(e.robot_id, []).append(e.kind)
    for robot, kinds in per_robot.items():
        assert kinds[::2] == ["SmileTagOn"] * (len(kinds) // 2), robot
        assert kinds[1::2] == ["SmileTagOff"] * (len(kinds) // 2), robot


def test_simulate_never_opens_a_socket(monkeypatch):
    import socket

    def explode(*args, **kwargs):
        raise AssertionError("simulate must not open sockets")

    monkeypatch.setattr(socket, "socket", explode)
    result = run_scenario(standard_day_script())
    assert result.working_time_s == 13200


def test_scripted_rejection_is_reported():
    script = parse_script({
        "name": "busycase", "seed": 1, "sessions": 4,
        "commands": [
            {"t": 10.0, "robot": "mobile_1", "kind": "locomote",
             "direction": "forward", "duration_s": 5.0},
            {"t": 11.0, "robot": "mobile_1", "kind": "select_head_motion",
             "motion_id": "nod_once"},
        ]})
    result = run_scenario(script)
    assert len(result.rejects) == 1
    assert result.rejects[0][2] == "busy"
