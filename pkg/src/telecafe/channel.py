"""Simulated impaired network channel.

Messages are delayed by a base latency plus seeded jitter and dropped with a
fixed probability.  Delivery never reorders a sender's messages: a delayed
message holds back the ones behind it (late, not shuffled).
"""

from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class ChannelModel:
    latency_ms: float = 0.0
    jitter_ms: float = 0.0
    loss_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise ValueError("latency and jitter must be >= 0")
        if not 0.0 <= self.loss_rate < 1.0:
            raise ValueError("loss_rate must be in [0, 1)")

    @property
    def impaired(self) -> bool:
        return self.latency_ms > 0 or self.jitter_ms > 0 or self.loss_rate > 0


@dataclass(frozen=True)
class Delivery:
    send_ms: float
    deliver_ms: float
    index: int          # position in the sender's original sequence
    payload: object


def transmit(channel: ChannelModel, msgs: list[tuple[float, object]]) -> list[Delivery]:
    """Schedule deliveries for one sender's timestamped messages.

    Jitter is uniform on [0, jitter_ms].  Dropped messages simply vanish
    (at-most-once; retries are the client's concern).  The result is ordered
    by delivery time, which by construction preserves send order.
    """
    rng = random.Random(channel.seed)
    deliveries = []
    horizon = 0.0
    for i, (t, payload) in enumerate(msgs):
        dropped = rng.random() < channel.loss_rate
        delay = channel.latency_ms + rng.uniform(0.0, channel.jitter_ms)
        if dropped:
            continue
        at = max(t + delay, horizon)    # never overtake an earlier message
        horizon = at
        deliveries.append(Delivery(t, at, i, payload))
    return deliveries


def parse_channel_spec(spec: str, seed: int = 0) -> ChannelModel:
    """Parse the CLI form ``latency=200,jitter=40,loss=0.1``."""
    kwargs = {"seed": seed}
    if spec:
        for part in spec.split(","):
            key, _, value = part.partition("=")
            key = key.strip()
            if key == "latency":
                kwargs["latency_ms"] = float(value)
            elif key == "jitter":
                kwargs["jitter_ms"] = float(value)
            elif key == "loss":
                kwargs["loss_rate"] = float(value)
            else:
                raise ValueError(f"unknown channel option {key!r}")
    return ChannelModel(**kwargs)
