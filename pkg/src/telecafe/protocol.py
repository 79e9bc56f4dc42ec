"""Wire protocol between operator clients and the cafe service.

Frame layout (documented bit-exactly; the operator console mirrors it):

    [4 bytes big-endian u32: N]  [N bytes frame content]
    frame content = [1 byte version] [N-1 bytes JSON body, UTF-8]

Version is currently 1.  The JSON body carries a single message envelope:
``{"t": "cmd"|"event", "kind": ..., ...fields}``.  ``decode`` is total: any
byte string yields a message or raises MalformedFrame/UnsupportedVersion,
never anything else.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, fields

PROTOCOL_VERSION = 1
MAX_TEXT_CHARS = 500
MAX_FRAME_BYTES = 1 << 20


class ProtocolError(Exception):
    pass


class MalformedFrame(ProtocolError):
    pass


class UnsupportedVersion(ProtocolError):
    pass


# --- operator commands ---

@dataclass(frozen=True)
class OperatorCommand:
    seq: int
    robot_id: str
    kind = ""

    def body(self) -> dict:
        doc = {"t": "cmd", "kind": self.kind, "seq": self.seq, "robot": self.robot_id}
        for f in fields(self):
            if f.name not in ("seq", "robot_id"):
                doc[f.name] = getattr(self, f.name)
        return doc


@dataclass(frozen=True)
class SelectHeadMotion(OperatorCommand):
    motion_id: str = ""
    kind = "select_head_motion"


@dataclass(frozen=True)
class SelectArmMotion(OperatorCommand):
    motion_id: str = ""
    kind = "select_arm_motion"


@dataclass(frozen=True)
class Locomote(OperatorCommand):
    direction: str = ""
    duration_s: float = 1.0
    kind = "locomote"


@dataclass(frozen=True)
class StartLineTrace(OperatorCommand):
    target_label: str = ""
    kind = "start_line_trace"


@dataclass(frozen=True)
class Speak(OperatorCommand):
    text: str = ""
    voice_mode: str = "synthesized"
    kind = "speak"

    def __post_init__(self):
        if len(self.text) > MAX_TEXT_CHARS:
            raise ValueError(f"text exceeds {MAX_TEXT_CHARS} chars")
        if self.voice_mode not in ("synthesized", "live"):
            raise ValueError(f"unknown voice mode {self.voice_mode!r}")


@dataclass(frozen=True)
class SmileTag(OperatorCommand):
    on: bool = True
    kind = "smile_tag"


@dataclass(frozen=True)
class Stop(OperatorCommand):
    kind = "stop"


COMMAND_TYPES = {
    c.kind: c for c in
    (SelectHeadMotion, SelectArmMotion, Locomote, StartLineTrace, Speak, SmileTag, Stop)
}


# --- robot events ---

@dataclass(frozen=True)
class RobotEvent:
    kind = ""

    def body(self) -> dict:
        doc = {"t": "event", "kind": self.kind}
        for f in fields(self):
            doc[f.name] = getattr(self, f.name)
        return doc


@dataclass(frozen=True, eq=True)
class WorldViewFrame(RobotEvent):
    robot_id: str = ""
    snapshot: dict = field(default_factory=dict)
    kind = "world_view_frame"


@dataclass(frozen=True, eq=True)
class StateUpdate(RobotEvent):
    robot_id: str = ""
    digest: dict = field(default_factory=dict)
    kind = "state_update"


@dataclass(frozen=True)
class CustomerUtterance(RobotEvent):
    table_id: str = ""
    text: str = ""
    kind = "customer_utterance"


@dataclass(frozen=True)
class PhaseChange(RobotEvent):
    phase: str = ""
    session: int = 0
    remaining_s: float = 0.0
    kind = "phase_change"


@dataclass(frozen=True)
class Ack(RobotEvent):
    seq: int = 0
    kind = "ack"


@dataclass(frozen=True)
class Reject(RobotEvent):
    seq: int = 0
    reason: str = ""
    kind = "reject"


@dataclass(frozen=True)
class BatteryWarning(RobotEvent):
    robot_id: str = ""
    battery_pct: float = 0.0
    kind = "battery_warning"


EVENT_TYPES = {
    e.kind: e for e in
    (WorldViewFrame, StateUpdate, CustomerUtterance, PhaseChange, Ack, Reject, BatteryWarning)
}

Message = OperatorCommand | RobotEvent


# --- codec ---

def _message_from_body(doc) -> Message:
    if not isinstance(doc, dict):
        raise MalformedFrame("body is not an object")
    tag, kind = doc.get("t"), doc.get("kind")
    table = COMMAND_TYPES if tag == "cmd" else EVENT_TYPES if tag == "event" else None
    if table is None or kind not in table:
        raise MalformedFrame(f"unknown message {tag!r}/{kind!r}")
    cls = table[kind]
    kwargs = dict(doc)
    kwargs.pop("t")
    kwargs.pop("kind")
    if tag == "cmd":
        kwargs["robot_id"] = kwargs.pop("robot", None)
    try:
        msg = cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise MalformedFrame(str(exc)) from exc
    _validate(msg)
    return msg


def _validate(msg: Message):
    if isinstance(msg, OperatorCommand):
        if not isinstance(msg.seq, int) or msg.seq < 0:
            raise MalformedFrame("seq must be a non-negative integer")
        if not isinstance(msg.robot_id, str) or not msg.robot_id:
            raise MalformedFrame("robot id required")
    if isinstance(msg, Locomote) and (
            not isinstance(msg.duration_s, (int, float)) or not 0 < msg.duration_s <= 3600):
        raise MalformedFrame("locomote duration out of range")


def encode(msg: Message) -> bytes:
    """One complete frame for the message."""
    body = json.dumps(msg.body(), sort_keys=True, separators=(",", ":")).encode("utf-8")
    content = bytes([PROTOCOL_VERSION]) + body
    return struct.pack(">I", len(content)) + content


def decode(data: bytes) -> Message:
    """Parse exactly one frame.  Total: raises only protocol errors."""
    msg, used = decode_prefix(data)
    if used != len(data):
        raise MalformedFrame("trailing bytes after frame")
    return msg


def decode_prefix(data: bytes) -> tuple[Message, int]:
    """Parse one frame from the head of data; returns (message, bytes consumed)."""
    if len(data) < 4:
        raise MalformedFrame("truncated length prefix")
    (length,) = struct.unpack(">I", data[:4])
    if length < 1 or length > MAX_FRAME_BYTES:
        raise MalformedFrame(f"bad frame length {length}")
    if len(data) < 4 + length:
        raise MalformedFrame("truncated frame")
    version = data[4]
    if version != PROTOCOL_VERSION:
        raise UnsupportedVersion(f"version {version}")
    try:
        doc = json.loads(data[5:4 + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedFrame(str(exc)) from exc
    return _message_from_body(doc), 4 + length


class FrameDecoder:
    """Incremental decoder for a byte stream (socket reads)."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        self._buf.extend(data)
        out = []
        while True:
            if len(self._buf) < 4:
                return out
            (length,) = struct.unpack(">I", self._buf[:4])
            if length < 1 or length > MAX_FRAME_BYTES:
                raise MalformedFrame(f"bad frame length {length}")
            if len(self._buf) < 4 + length:
                return out
            frame = bytes(self._buf[:4 + length])
            del self._buf[:4 + length]
            out.append(decode(frame))
