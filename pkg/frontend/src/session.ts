/**
 * Operator console state machine.
 *
 * Holds exactly one assigned robot, the latest world-view frame, and the
 * pending command bookkeeping. Commands can only be emitted while the
 * connection is open, every displayed fact originates from a server event,
 * and each completed gesture emits exactly one command.
 */

import { DwellEngine, PointerEngine, ScanEngine } from "./modality.js";
import type { CommandBody, ServerEvent, WorldSnapshot } from "./messages.js";
import { buildPalette, commandFor, type PaletteItem } from "./palette.js";

export type Modality = "pointer" | "dwell" | "scan";
export type ConnectionState = "connecting" | "open" | "closed";

export const STALE_AFTER_MS = 2000;

export interface SessionOptions {
  robotId: string;
  modality: Modality;
  send: (body: CommandBody) => void;
  dwellMs?: number;
  scanIntervalMs?: number;
  speakText?: string;
  locomoteDuration?: number;
}

export interface PendingCommand {
  seq: number;
  label: string;
  smileValue?: boolean;
}

export class ConsoleSession {
  readonly robotId: string;
  readonly modality: Modality;
  readonly palette: PaletteItem[];

  connection: ConnectionState = "connecting";
  frame: WorldSnapshot | null = null;
  phase: string | null = null;
  phaseRemainingS: number | null = null;
  session: number | null = null;
  batteryWarning: string | null = null;
  utterances: { table: string; text: string }[] = [];
  lastReject: { seq: number; reason: string; label: string } | null = null;
  smileOn = false;
  focus = 0;

  readonly pointer: PointerEngine;
  readonly dwell: DwellEngine;
  readonly scan: ScanEngine;

  private seq = 0;
  private pending = new Map<number, PendingCommand>();
  private lastSignalMs: number | null = null;
  private readonly send: (body: CommandBody) => void;
  private readonly speakText: string;
  private readonly locomoteDuration: number;

  constructor(opts: SessionOptions) {
    this.robotId = opts.robotId;
    this.modality = opts.modality;
    this.send = opts.send;
    this.speakText = opts.speakText ?? "Hello, welcome to the cafe!";
    this.locomoteDuration = opts.locomoteDuration ?? 2.0;
    this.palette = buildPalette();
    this.pointer = new PointerEngine();
    this.dwell = new DwellEngine(opts.dwellMs);
    this.scan = new ScanEngine(opts.scanIntervalMs, this.palette.length);
  }

  // --- connection lifecycle ---

  onConnected(nowMs: number): void {
    this.connection = "open";
    this.lastSignalMs = nowMs;
  }

  onDisconnected(): void {
    this.connection = "closed";
  }

  commandsEnabled(): boolean {
    return this.connection === "open";
  }

  // --- server events (the only source of displayed state) ---

  onEvent(ev: ServerEvent, nowMs: number): void {
    switch (ev.kind) {
      case "world_view_frame":
        if (ev.robot_id === this.robotId) {
          this.frame = ev.snapshot;
          this.phase = ev.snapshot.phase;
          this.phaseRemainingS = ev.snapshot.phase_remaining_s;
          this.session = ev.snapshot.session;
          this.lastSignalMs = nowMs;
        }
        break;
      case "phase_change":
        this.phase = ev.phase;
        this.session = ev.session;
        this.phaseRemainingS = ev.remaining_s;
        break;
      case "customer_utterance":
        this.utterances.push({ table: ev.table_id, text: ev.text });
        if (this.utterances.length > 5) this.utterances.shift();
        break;
      case "battery_warning":
        if (ev.robot_id === this.robotId) {
          this.batteryWarning = `battery low: ${ev.battery_pct}%`;
        }
        break;
      case "ack": {
        const done = this.pending.get(ev.seq);
        if (done?.smileValue !== undefined) this.smileOn = done.smileValue;
        this.pending.delete(ev.seq);
        break;
      }
      case "reject": {
        const failed = this.pending.get(ev.seq);
        this.lastReject = { seq: ev.seq, reason: ev.reason,
                            label: failed?.label ?? "?" };
        this.pending.delete(ev.seq);
        break;
      }
      case "state_update":
        break;    // frames carry the rendered state
    }
  }

  staleForMs(nowMs: number): number | null {
    if (this.lastSignalMs === null) return null;
    return nowMs - this.lastSignalMs;
  }

  isStale(nowMs: number): boolean {
    const silence = this.staleForMs(nowMs);
    return this.connection === "open" && silence !== null && silence > STALE_AFTER_MS;
  }

  pendingCount(): number {
    return this.pending.size;
  }

  // --- gestures (each emits at most one command) ---

  pointerActivate(index: number, nowMs: number): boolean {
    const fired = this.pointer.activate(index, nowMs);
    if (fired === null) return false;
    return this.selectItem(fired, nowMs);
  }

  moveFocus(delta: number, nowMs: number): void {
    const n = this.palette.length;
    this.focus = ((this.focus + delta) % n + n) % n;
    this.dwell.hover(this.focus, nowMs);
  }

  /** Poll the dwell timer; fires at most one selection per completed dwell. */
  pollDwell(nowMs: number): boolean {
    if (this.modality !== "dwell") return false;
    const fired = this.dwell.tick(nowMs);
    if (fired === null) return false;
    return this.selectItem(fired, nowMs);
  }

  scanPress(nowMs: number): boolean {
    return this.selectItem(this.scan.press(nowMs), nowMs);
  }

  scanHighlight(nowMs: number): number {
    return this.scan.highlightAt(nowMs);
  }

  private selectItem(index: number, _nowMs: number): boolean {
    if (!this.commandsEnabled()) return false;
    const item = this.palette[index];
    if (item === undefined) return false;
    this.seq += 1;
    const body = commandFor(item, {
      robot: this.robotId, seq: this.seq, speakText: this.speakText,
      smileOn: this.smileOn, locomoteDuration: this.locomoteDuration,
    });
    const pending: PendingCommand = { seq: this.seq, label: item.label };
    if (body.kind === "smile_tag") pending.smileValue = body.on;
    this.pending.set(this.seq, pending);
    this.send(body);
    return true;
  }
}
