import { describe, expect, it } from "vitest";
import type { CommandBody, WorldSnapshot } from "../src/messages.js";
import { cellFor, renderPalette, renderWorld } from "../src/render.js";
import { ConsoleSession } from "../src/session.js";
import { recordedEvents } from "./stub.js";

function snapshotWith(overrides: Partial<WorldSnapshot>): WorldSnapshot {
  const robot = {
    id: "mobile_1", kind: "mobile" as const, pose: [7.9, 2.4, 1.5] as [number, number, number],
    battery_s: 20000, battery_pct: 92.6, mode: "Idle", carrying: [],
  };
  return {
    clock_s: 1234.5, session: 1, phase: "drink_serving", phase_remaining_s: 222.0,
    self: robot, robots: [robot],
    tables: [
      { id: "table_3", position: [8.0, 3.0], party_size: 2 },
      { id: "table_4", position: [2.0, 6.0], party_size: 0 },
    ],
    bounds: [10.0, 8.0], counter: [5.0, 0.5],
    ...overrides,
  };
}

function sessionWithFrame(snapshot: WorldSnapshot) {
  const session = new ConsoleSession({
    robotId: "mobile_1", modality: "pointer", send: () => {},
  });
  session.onConnected(1000);
  session.onEvent({ t: "event", kind: "world_view_frame", robot_id: "mobile_1",
                    snapshot }, 1000);
  return session;
}

describe("world view", () => {
  it("draws the robot glyph adjacent to the table it serves", () => {
    const snap = snapshotWith({});
    const lines = renderWorld(sessionWithFrame(snap), 1100);
    const gridTop = lines.findIndex((l) => l.startsWith("+--"));
    const grid = lines.slice(gridTop + 1, -2);
    const [rc, rr] = cellFor([7.9, 2.4], [10, 8]);
    const [tc, tr] = cellFor([8.0, 3.0], [10, 8]);
    expect(grid[rr]![rc + 1]).toBe("A");        // own robot, highlighted
    expect(grid[tr]![tc + 1]).toBe("3");
    expect(Math.abs(rr - tr) + Math.abs(rc - tc)).toBeLessThanOrEqual(2);
    expect(lines.join("\n")).toContain("occupied: table_3(2)");
  });

  it("shows the phase banner with the remaining time", () => {
    const lines = renderWorld(sessionWithFrame(snapshotWith({})), 1100);
    expect(lines.join("\n")).toContain("phase: drink_serving (3:42 left)");
  });

  it("styles a low battery as a warning", () => {
    const snap = snapshotWith({});
    snap.self.battery_pct = 7.5;
    const lines = renderWorld(sessionWithFrame(snap), 1100).join("\n");
    expect(lines).toContain("!! LOW BATTERY !!");
  });

  it("raises the stale-frame indicator after 2 s without frames", () => {
    const session = sessionWithFrame(snapshotWith({}));
    expect(renderWorld(session, 2900).join("\n")).not.toContain("STALE");
    expect(renderWorld(session, 3100).join("\n")).toContain("STALE FRAME");
  });

  it("renders the recorded stub stream", () => {
    const session = new ConsoleSession({
      robotId: "mobile_1", modality: "pointer", send: () => {},
    });
    session.onConnected(0);
    for (const ev of recordedEvents()) session.onEvent(ev, 0);
    const lines = renderWorld(session, 100).join("\n");
    expect(lines).toContain("session 1");
    expect(lines).toContain("battery");
  });

  it("shows the reconnect banner when the link drops", () => {
    const session = sessionWithFrame(snapshotWith({}));
    session.onDisconnected();
    const lines = renderWorld(session, 1200).join("\n");
    expect(lines).toContain("DISCONNECTED");
    expect(lines).toContain("commands disabled");
  });
});

describe("palette view", () => {
  it("marks the scan highlight and surfaces rejects inline", () => {
    const sent: CommandBody[] = [];
    const session = new ConsoleSession({
      robotId: "mobile_1", modality: "scan", send: (b) => sent.push(b),
      scanIntervalMs: 1500,
    });
    session.onConnected(0);
    for (const ev of recordedEvents()) session.onEvent(ev, 0);
    session.scanPress(1600);
    session.onEvent({ t: "event", kind: "reject", seq: sent[0]!.seq,
                      reason: "busy" }, 1700);
    const lines = renderPalette(session, 1600);
    expect(lines.some((l) => l.includes("*") && l.includes("look down"))).toBe(true);
    expect(lines.join("\n")).toContain("rejected: look down -> busy");
  });

  it("notes when commands are disabled", () => {
    const session = new ConsoleSession({
      robotId: "mobile_1", modality: "pointer", send: () => {},
    });
    expect(renderPalette(session, 0).join("\n")).toContain("commands disabled");
  });
});
