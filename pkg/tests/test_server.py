"""Service behavior over real sockets: acks, frames, the channel shim, pacing."""

import asyncio
import time

import pytest

from telecafe import protocol as pr
from telecafe.channel import ChannelModel
from telecafe.scenario import parse_script
from telecafe.server import CafeService, banner


def quiet_script(sessions=4, parties=True):
    doc = {"name": "serve_test", "seed": 9, "sessions": sessions}
    if parties:
        doc["parties"] = {"1": [2, 3]}
    return parse_script(doc)


async def _with_service(work, *, speed=20.0, channel=None):
    service = CafeService(quiet_script(), speed=speed, channel=channel)
    port = await service.start()
    run_task = asyncio.create_task(service.run())
    try:
        return await work(service, port)
    finally:
        run_task.cancel()
        try:
            await run_task
        except (asyncio.CancelledError, Exception):
            pass
        await service.close()


async def _talk(port, commands, *, expect, listen_s=0.0):
    reader, writer = await asyncio.open_connection("127.0.0.1", port)
    for cmd in commands:
        writer.write(pr.encode(cmd))
    await writer.drain()
    decoder = pr.FrameDecoder()
    responses, events = [], []
    loop = asyncio.get_running_loop()
    deadline = loop.time() + 10.0
    listen_until = loop.time() + listen_s
    while loop.time() < deadline:
        try:
            data = await asyncio.wait_for(reader.read(4096), timeout=0.1)
        except asyncio.TimeoutError:
            data = b""
        for msg in decoder.feed(data):
            if isinstance(msg, (pr.Ack, pr.Reject)):
                responses.append(msg)
            else:
                events.append(msg)
        if len(responses) >= expect and loop.time() >= listen_until:
            break
    writer.close()
    return responses, events


def test_ack_completeness_lossless():
    """Every command gets exactly one Ack or Reject on a clean channel."""
    commands = []
    seq = 0
    for i in range(10):
        seq += 1
        commands.append(pr.SelectHeadMotion(seq, "mobile_1", motion_id="nod_once"))
        seq += 1
        commands.append(pr.SelectArmMotion(seq, "mobile_2", motion_id="no_such_move"))
        seq += 1
        commands.append(pr.Speak(seq, "mobile_3", text=f"hello {i}"))

    async def work(service, port):
        responses, _ = await _talk(port, commands, expect=len(commands))
        return responses

    responses = asyncio.run(_with_service(work))
    assert len(responses) == len(commands)
    assert sum(isinstance(r, pr.Reject) for r in responses) >= 10  # bad motions
    answered = sorted(r.seq for r in responses)
    assert answered == [c.seq for c in commands]


def test_stale_seq_rejected():
    commands = [pr.Stop(5, "mobile_1"), pr.Stop(3, "mobile_1"), pr.Stop(6, "mobile_1")]

    async def work(service, port):
        responses, _ = await _talk(port, commands, expect=3)
        return responses

    responses = asyncio.run(_with_service(work))
    by_seq = {r.seq: r for r in responses}
    assert isinstance(by_seq[5], pr.Ack)
    assert isinstance(by_seq[3], pr.Reject) and by_seq[3].reason == "stale_seq"
    assert isinstance(by_seq[6], pr.Ack)


def test_frames_and_phase_events_flow():
    async def work(service, port):
        _, events = await _talk(port, [], expect=1, listen_s=0.7)
        return events

    events = asyncio.run(_with_service(work))
    frames = [e for e in events if isinstance(e, pr.WorldViewFrame)]
    assert frames, "expected world-view frames at 5 Hz"
    snap = frames[0].snapshot
    assert {"clock_s", "phase", "self", "robots", "tables"} <= set(snap)
    assert len(snap["robots"]) == 5


def test_channel_shim_drops_commands():
    """Dropped commands get no Ack at all; survivors stay in order."""
    channel = ChannelModel(latency_ms=5.0, jitter_ms=10.0, loss_rate=0.8, seed=21)
    commands = [pr.Speak(i, "mobile_1", text=f"m{i}") for i in range(1, 61)]

    async def work(service, port):
        responses, _ = await _talk(port, commands, expect=1, listen_s=2.5)
        return responses

    responses = asyncio.run(_with_service(work, channel=channel))
    assert 0 < len(responses) < len(commands)
    seqs = [r.seq for r in responses]
    assert seqs == sorted(seqs)


def test_speed_multiplier_paces_clock():
    """Timing oracle: simulated time advances at about speed x wall time."""
    async def work(service, port):
        await asyncio.sleep(0.3)    # let the loop settle
        c0, w0 = service.world.clock_s, time.monotonic()
        await asyncio.sleep(1.2)
        c1, w1 = service.world.clock_s, time.monotonic()
        return (c1 - c0) / (w1 - w0)

    rate = asyncio.run(_with_service(work, speed=240.0))
    assert rate == pytest.approx(240.0, rel=0.10)


def test_banner_lists_reference_crew():
    service = CafeService(quiet_script(), speed=1.0)
    text = banner(service, 8765)
    assert "3 mobile" in text
    assert "2 stationary" in text
    assert "port 8765" in text
    assert "tables: 6" in text


def test_service_writes_log_at_day_end(tmp_path):
    out = tmp_path / "day.jsonl"

    async def run_short():
        script = parse_script({"name": "fast", "seed": 9, "sessions": 3})
        service = CafeService(script, speed=200000.0, log_path=str(out))
        await service.start()
        await asyncio.wait_for(service.run(), timeout=30)
        return service

    service = asyncio.run(run_short())
    assert service.world.clock_tick == service.world.end_tick
    assert out.exists()
    from telecafe.events import read_log
    events = read_log(str(out))
    assert events[-1].payload["phase"] == "end_of_day"
