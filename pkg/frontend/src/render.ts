/**
 * Plan-view rendering: the floor as a character grid plus status lines.
 * Pure string producers so every view is testable without a terminal.
 */

import type { RobotDigest, WorldSnapshot } from "./messages.js";
import type { ConsoleSession } from "./session.js";

const COLS = 41;
const ROWS = 17;

function glyphFor(robot: RobotDigest, own: boolean): string {
  const idx = robot.id.split("_")[1] ?? "?";
  const base = robot.kind === "mobile"
    ? "abc"[Number(idx) - 1] ?? "m"
    : "st"[Number(idx) - 1] ?? "s";
  return own ? base.toUpperCase() : base;
}

export function cellFor(position: [number, number],
                        bounds: [number, number]): [number, number] {
  const [w, h] = bounds;
  const col = Math.round((position[0] / w) * (COLS - 1));
  const row = (ROWS - 1) - Math.round((position[1] / h) * (ROWS - 1));
  return [Math.max(0, Math.min(COLS - 1, col)), Math.max(0, Math.min(ROWS - 1, row))];
}

export function renderWorld(session: ConsoleSession, nowMs: number): string[] {
  const lines: string[] = [];
  const frame = session.frame;
  if (session.connection === "closed") {
    lines.push("+-- DISCONNECTED: reconnecting... (commands disabled) --+");
  }
  if (frame === null) {
    lines.push("(awaiting first world frame)");
    return lines;
  }

  const stale = session.isStale(nowMs);
  if (stale) {
    const silence = ((session.staleForMs(nowMs) ?? 0) / 1000).toFixed(1);
    lines.push(`!! STALE FRAME: no signal for ${silence}s !!`);
  }

  const grid: string[][] = Array.from({ length: ROWS },
                                      () => Array<string>(COLS).fill("."));
  for (const table of frame.tables) {
    const [c, r] = cellFor(table.position, frame.bounds);
    const row = grid[r];
    if (row) row[c] = table.id.split("_")[1] ?? "?";
  }
  {
    const [c, r] = cellFor(frame.counter, frame.bounds);
    const row = grid[r];
    if (row) row[c] = "=";
  }
  for (const robot of frame.robots) {
    const [c, r] = cellFor([robot.pose[0], robot.pose[1]], frame.bounds);
    const row = grid[r];
    if (row) row[c] = glyphFor(robot, robot.id === session.robotId);
  }

  const remaining = session.phaseRemainingS;
  const countdown = remaining === null ? "" :
    ` (${Math.floor(remaining / 60)}:${String(Math.floor(remaining % 60)).padStart(2, "0")} left)`;
  lines.push(`session ${session.session ?? "-"} | phase: ${session.phase ?? "-"}${countdown}`);

  const own = frame.self;
  const batteryLine = `robot ${own.id} | battery ${own.battery_pct.toFixed(1)}%` +
    (own.battery_pct < 10 ? "  !! LOW BATTERY !!" : "") +
    (own.carrying.length ? ` | carrying ${own.carrying.join(", ")}` : "");
  lines.push(batteryLine);
  if (session.batteryWarning) lines.push(`!! ${session.batteryWarning} !!`);

  lines.push("+" + "-".repeat(COLS) + "+");
  for (const row of grid) lines.push("|" + row.join("") + "|");
  lines.push("+" + "-".repeat(COLS) + "+");

  const occupied = frame.tables.filter((t) => t.party_size > 0)
    .map((t) => `${t.id}(${t.party_size})`);
  lines.push(occupied.length ? `occupied: ${occupied.join(" ")}` : "occupied: none");
  for (const u of session.utterances.slice(-3)) {
    lines.push(`  ${u.table}: "${u.text}"`);
  }
  return lines;
}

export function renderPalette(session: ConsoleSession, nowMs: number): string[] {
  const lines: string[] = [];
  const highlight = session.modality === "scan" ? session.scanHighlight(nowMs) : -1;
  lines.push(`modality: ${session.modality}` +
    (session.commandsEnabled() ? "" : "  [commands disabled: not connected]"));
  if (session.lastReject) {
    lines.push(`rejected: ${session.lastReject.label} -> ` +
      `${session.lastReject.reason} (seq ${session.lastReject.seq})`);
  }
  session.palette.forEach((item, i) => {
    const markers =
      (i === session.focus ? ">" : " ") + (i === highlight ? "*" : " ");
    lines.push(`${markers} ${String(i + 1).padStart(2)} ${item.label}`);
  });
  if (session.modality === "dwell") {
    const pct = Math.round(session.dwell.progress(nowMs) * 100);
    lines.push(`dwell: ${pct}%`);
  }
  return lines;
}
