/**
 * Input modality engines. All take explicit clock times so tests can drive
 * them deterministically; each engine yields at most one selection per
 * completed gesture (the one-command-per-gesture contract).
 */

export const DEFAULT_DWELL_MS = 800;
export const DEFAULT_SCAN_INTERVAL_MS = 1500;
export const POINTER_DEBOUNCE_MS = 150;

/** Direct activation with key-repeat suppression. */
export class PointerEngine {
  private lastFire = -Infinity;

  constructor(private debounceMs = POINTER_DEBOUNCE_MS) {}

  activate(index: number, nowMs: number): number | null {
    if (nowMs - this.lastFire < this.debounceMs) return null;
    this.lastFire = nowMs;
    return index;
  }
}

/**
 * Gaze-dwell selection: holding the focus on one item for dwellMs fires it
 * once, then nothing can fire for another dwellMs (refractory period).
 * Moving the focus resets the timer.
 */
export class DwellEngine {
  private target: number | null = null;
  private runStart = 0;
  private refractoryUntil = -Infinity;

  constructor(private dwellMs = DEFAULT_DWELL_MS) {}

  hover(target: number | null, nowMs: number): void {
    if (target !== this.target) {
      this.target = target;
      this.runStart = nowMs;
    }
  }

  /** Poll the timer; returns the item index at most once per dwell. */
  tick(nowMs: number): number | null {
    if (this.target === null) return null;
    const due = Math.max(this.runStart + this.dwellMs, this.refractoryUntil);
    if (nowMs < due) return null;
    this.refractoryUntil = nowMs + this.dwellMs;
    this.runStart = this.refractoryUntil;
    return this.target;
  }

  progress(nowMs: number): number {
    if (this.target === null) return 0;
    const start = Math.max(this.runStart, this.refractoryUntil - this.dwellMs);
    return Math.max(0, Math.min(1, (nowMs - start) / this.dwellMs));
  }
}

/**
 * Single-switch scanning: the highlight walks the palette in catalog order,
 * one step per interval, wrapping around; a press takes what is highlighted.
 */
export class ScanEngine {
  constructor(private intervalMs = DEFAULT_SCAN_INTERVAL_MS,
              private count = 0,
              private epochMs = 0) {}

  setCount(count: number): void {
    this.count = count;
  }

  highlightAt(nowMs: number): number {
    if (this.count <= 0) return 0;
    const steps = Math.floor(Math.max(0, nowMs - this.epochMs) / this.intervalMs);
    return steps % this.count;
  }

  press(nowMs: number): number {
    return this.highlightAt(nowMs);
  }
}
