"""The cafe teleoperation service.

One asyncio task advances the world in paced simulated time (wall time times
a speed multiplier); each operator connection feeds decoded commands into a
single queue, merged by arrival.  Every command is answered with exactly one
Ack or Reject on the connection that sent it; world-view frames go out at
5 Hz of wall time.  The optional channel shim delays or drops inbound
commands the way a bad network would (dropped commands get no Ack at all:
retries are the client's concern).
"""

from __future__ import annotations

import asyncio
import random
import time
from collections import deque
from dataclasses import dataclass, field

from . import protocol as pr
from .channel import ChannelModel
from .events import ServiceEvent, UTTERANCE, PHASE_CHANGE
from .scenario import ScenarioScript, apply_command, build_world
from .world import World

FRAME_INTERVAL_WALL_S = 0.2         # 5 Hz world-view frames
BATTERY_WARN_FRACTION = 0.10


@dataclass(eq=False)
class _Connection:
    writer: asyncio.StreamWriter
    last_seq: int = -1
    rng: random.Random = field(default_factory=random.Random)
    horizon: float = 0.0            # per-sender order preservation under jitter
    inbox: deque = field(default_factory=deque)
    timer: asyncio.TimerHandle | None = None

    def send(self, event: pr.RobotEvent):
        try:
            self.writer.write(pr.encode(event))
        except ConnectionError:
            pass


class CafeService:
    """Owns the world, the command queue, and the connection set."""

    def __init__(self, script: ScenarioScript, speed: float = 1.0,
                 channel: ChannelModel | None = None, log_path: str | None = None,
                 seed: int | None = None):
        self.world: World = build_world(script, seed)
        if 1 in script.parties:
            self.world.seat_customers(script.parties[1])
        self.speed = speed
        self.channel = channel if channel and channel.impaired else None
        self.log_path = log_path
        self.events: list[ServiceEvent] = []
        self.queue: list[tuple[pr.OperatorCommand, _Connection]] = []
        self.connections: set[_Connection] = set()
        self.server: asyncio.base_events.Server | None = None
        self.finished = asyncio.Event()
        self._warned_battery: set[str] = set()
        self._acks = 0
        self._rejects = 0

    # --- lifecycle ---

    async def start(self, host: str = "127.0.0.1", port: int = 0) -> int:
        self.server = await asyncio.start_server(self._handle_connection, host, port)
        return self.server.sockets[0].getsockname()[1]

    async def run(self):
        """Advance the world until the day ends, pacing by wall clock."""
        last = time.monotonic()
        next_frame = last
        sim_target = 0.0
        log_file = open(self.log_path, "w", encoding="utf-8") if self.log_path else None
        try:
            while self.world.clock_tick < self.world.end_tick:
                await asyncio.sleep(0.02)
                now = time.monotonic()
                sim_target += (now - last) * self.speed
                last = now
                wrote = False
                while (self.world.clock_s < sim_target
                       and self.world.clock_tick < self.world.end_tick):
                    self._drain_queue()
                    for ev in self._advance_one_tick():
                        if log_file is not None:
                            log_file.write(ev.to_json_line() + "\n")
                            wrote = True
                if wrote:
                    log_file.flush()
                if now >= next_frame:
                    next_frame = now + FRAME_INTERVAL_WALL_S
                    self._broadcast_frames()
        finally:
            if log_file is not None:
                log_file.close()
            self.finished.set()
            await self.close()

    async def close(self):
        if self.server is not None:
            self.server.close()
            await self.server.wait_closed()
            self.server = None
        for conn in list(self.connections):
            try:
                conn.writer.close()
            except ConnectionError:
                pass

    # --- simulation side ---

    def _advance_one_tick(self) -> list[ServiceEvent]:
        modes_before = {rid: type(r.mode).__name__ for rid, r in self.world.robots.items()}
        new_events = self.world.tick()
        self.events.extend(new_events)
        for ev in new_events:
            self._broadcast_service_event(ev)
        for rid, r in self.world.robots.items():
            mode = type(r.mode).__name__
            if mode != modes_before[rid]:
                self._broadcast(pr.StateUpdate(rid, self.world._robot_digest(r)))
            frac = r.battery_s / r.spec.battery_capacity_s
            if frac <= BATTERY_WARN_FRACTION and rid not in self._warned_battery:
                self._warned_battery.add(rid)
                self._broadcast(pr.BatteryWarning(rid, round(frac * 100, 1)))
        return new_events

    def _drain_queue(self):
        queue, self.queue = self.queue, []
        for cmd, conn in queue:
            result = apply_command(self.world, cmd)
            if isinstance(result, pr.Ack):
                self._acks += 1
            else:
                self._rejects += 1
            conn.send(result)

    def _broadcast_service_event(self, ev: ServiceEvent):
        if ev.kind == UTTERANCE and ev.robot_id is None:
            self._broadcast(pr.CustomerUtterance(ev.table_id or "", ev.payload["text"]))
        elif ev.kind == PHASE_CHANGE:
            self._broadcast(pr.PhaseChange(ev.payload["phase"], ev.payload["session"],
                                           self.world._phase_remaining() or 0.0))

    def _broadcast_frames(self):
        for rid in sorted(self.world.robots):
            frame = pr.WorldViewFrame(rid, self.world.snapshot(rid))
            self._broadcast(frame)

    def _broadcast(self, event: pr.RobotEvent):
        for conn in list(self.connections):
            conn.send(event)

    # --- connection side ---

    async def _handle_connection(self, reader: asyncio.StreamReader,
                                 writer: asyncio.StreamWriter):
        conn = _Connection(writer)
        if self.channel:
            conn.rng = random.Random(self.channel.seed + len(self.connections))
        self.connections.add(conn)
        decoder = pr.FrameDecoder()
        try:
            while True:
                data = await reader.read(4096)
                if not data:
                    break
                try:
                    msgs = decoder.feed(data)
                except pr.ProtocolError:
                    break       # corrupt stream: drop the connection
                for msg in msgs:
                    self._ingest(msg, conn)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            self.connections.discard(conn)
            try:
                writer.close()
            except ConnectionError:
                pass

    def _ingest(self, msg: pr.Message, conn: _Connection):
        if not isinstance(msg, pr.OperatorCommand):
            return
        if msg.seq <= conn.last_seq:
            conn.send(pr.Reject(msg.seq, "stale_seq"))
            return
        conn.last_seq = msg.seq
        if self.channel is None:
            self.queue.append((msg, conn))
            return
        # Impaired-channel shim: drop or delay, preserving per-sender order.
        # One chained timer per connection delivers strictly in sequence (a
        # timer heap breaks ties arbitrarily, which would shuffle messages).
        if conn.rng.random() < self.channel.loss_rate:
            return
        delay = (self.channel.latency_ms
                 + conn.rng.uniform(0.0, self.channel.jitter_ms)) / 1000.0
        at = max(time.monotonic() + delay, conn.horizon)
        conn.horizon = at
        conn.inbox.append((at, msg))
        if conn.timer is None:
            self._arm_delivery(conn)

    def _arm_delivery(self, conn: _Connection):
        at, _ = conn.inbox[0]
        loop = asyncio.get_running_loop()
        conn.timer = loop.call_later(max(0.0, at - time.monotonic()),
                                     self._deliver_head, conn)

    def _deliver_head(self, conn: _Connection):
        conn.timer = None
        if not conn.inbox:
            return
        _, msg = conn.inbox.popleft()
        self.queue.append((msg, conn))
        if conn.inbox:
            self._arm_delivery(conn)

    # --- reporting ---

    def counters(self) -> dict[str, int]:
        return {"acks": self._acks, "rejects": self._rejects,
                "events": len(self.events)}


def banner(service: CafeService, port: int) -> str:
    robots = service.world.robots
    mobile = sorted(r for r, st in robots.items() if st.spec.kind == "mobile")
    fixed = sorted(r for r, st in robots.items() if st.spec.kind == "stationary")
    lines = [
        f"telecafe service listening on port {port}",
        f"robots: {len(mobile)} mobile ({', '.join(mobile)}), "
        f"{len(fixed)} stationary ({', '.join(fixed)})",
        f"tables: {len(service.world.plan.tables)}, "
        f"sessions: {service.world.schedule.n_sessions}, speed: x{service.speed:g}",
    ]
    if service.channel:
        ch = service.channel
        lines.append(f"channel shim: latency={ch.latency_ms:g}ms "
                     f"jitter={ch.jitter_ms:g}ms loss={ch.loss_rate:g}")
    return "\n".join(lines)
