"""Accessibility input adapters.

Three ways to pick an item from a palette, all producing the same selection
vocabulary so the choice of device never changes command semantics:

* pointer        - direct activation at the gesture time
* gaze dwell     - hold the gaze on one target for dwell_ms, fires once,
                   then a refractory period of the same length
* switch scan    - the highlight cycles through the palette every
                   interval_ms; a switch press takes whatever is highlighted
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_DWELL_MS = 800
DEFAULT_SCAN_INTERVAL_MS = 1500
MIN_DWELL_MS = 100
MIN_SCAN_INTERVAL_MS = 300

POINTER = "pointer"
GAZE_DWELL = "gaze_dwell"
SWITCH_SCAN = "switch_scan"


@dataclass(frozen=True)
class InputModality:
    kind: str = POINTER
    dwell_ms: int = DEFAULT_DWELL_MS
    interval_ms: int = DEFAULT_SCAN_INTERVAL_MS

    def __post_init__(self):
        if self.kind not in (POINTER, GAZE_DWELL, SWITCH_SCAN):
            raise ValueError(f"unknown modality {self.kind!r}")
        if self.dwell_ms < MIN_DWELL_MS:
            raise ValueError(f"dwell_ms must be >= {MIN_DWELL_MS}")
        if self.interval_ms < MIN_SCAN_INTERVAL_MS:
            raise ValueError(f"interval_ms must be >= {MIN_SCAN_INTERVAL_MS}")


@dataclass(frozen=True)
class Selection:
    t_ms: float
    target: str


def dwell_select(gaze_stream: list[tuple[float, str | None]],
                 dwell_ms: float = DEFAULT_DWELL_MS) -> list[Selection]:
    """Selections from a piecewise-constant gaze signal.

    Each (t_ms, target) entry holds until the next entry's timestamp; the last
    entry terminates the signal (use target=None).  A selection fires the
    moment one target has been gazed continuously for dwell_ms; switching
    targets resets the timer, and after each selection nothing can fire for
    another dwell_ms.
    """
    if any(b[0] < a[0] for a, b in zip(gaze_stream, gaze_stream[1:])):
        raise ValueError("gaze timestamps must be monotone")
    selections: list[Selection] = []
    refractory_until = -1.0
    run_target: str | None = None
    run_start = 0.0
    for (t, target), (t_next, _) in zip(gaze_stream, gaze_stream[1:]):
        if target != run_target:
            run_target, run_start = target, t
        if run_target is None:
            continue
        # Fire on the earliest instant within [t, t_next) where both the
        # dwell and the refractory period have elapsed.
        due = max(run_start + dwell_ms, refractory_until)
        while due < t_next:
            selections.append(Selection(due, run_target))
            refractory_until = due + dwell_ms
            run_start = refractory_until  # re-accumulate on the same target
            due = max(run_start + dwell_ms, refractory_until)
    return selections


def scan_step(items: list[str], switch_presses: list[float],
              interval_ms: float = DEFAULT_SCAN_INTERVAL_MS) -> list[Selection]:
    """Selections from single-switch scanning over items in catalog order.

    The highlight starts on items[0] at t=0 and advances every interval_ms,
    wrapping around; each press selects whatever is highlighted.
    """
    if not items:
        return []
    if any(b < a for a, b in zip(switch_presses, switch_presses[1:])):
        raise ValueError("switch presses must be monotone")
    out = []
    for t in switch_presses:
        index = int(t // interval_ms) % len(items)
        out.append(Selection(t, items[index]))
    return out


def scan_press_time_for(items: list[str], target: str, after_ms: float,
                        interval_ms: float = DEFAULT_SCAN_INTERVAL_MS) -> float:
    """Earliest press time at/after after_ms that selects target (mid-window)."""
    index = items.index(target)
    n = len(items)
    cycle_start = int(after_ms // (interval_ms * n)) * interval_ms * n
    while True:
        t = cycle_start + index * interval_ms + interval_ms / 2
        if t >= after_ms:
            return t
        cycle_start += interval_ms * n


def pointer_select(gestures: list[tuple[float, str]]) -> list[Selection]:
    """Direct activation: one selection per gesture, at the gesture time."""
    return [Selection(t, target) for t, target in gestures]
