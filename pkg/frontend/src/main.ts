/**
 * Terminal entry point.
 *
 * Keys: arrows or j/k move the focus, Enter activates (pointer mode), space
 * is the single switch (scan mode); in dwell mode the focused item fires by
 * itself after the dwell time. "q" quits.
 *
 * Configuration via flags or environment:
 *   --host/-H (TELECAFE_HOST, default 127.0.0.1)   --port/-p (TELECAFE_PORT, 8765)
 *   --robot/-r (TELECAFE_ROBOT, mobile_1)          --modality/-m (pointer|dwell|scan)
 *   --dwell ms                                     --scan ms
 */

import { connectConsole } from "./client.js";
import { renderPalette, renderWorld } from "./render.js";
import { ConsoleSession, type Modality } from "./session.js";

function arg(flag: string, short: string, fallback: string): string {
  const argv = process.argv.slice(2);
  for (let i = 0; i < argv.length - 1; i++) {
    if (argv[i] === flag || argv[i] === short) return argv[i + 1] ?? fallback;
  }
  return fallback;
}

const host = arg("--host", "-H", process.env.TELECAFE_HOST ?? "127.0.0.1");
const port = Number(arg("--port", "-p", process.env.TELECAFE_PORT ?? "8765"));
const robot = arg("--robot", "-r", process.env.TELECAFE_ROBOT ?? "mobile_1");
const modality = arg("--modality", "-m",
                     process.env.TELECAFE_MODALITY ?? "pointer") as Modality;
const dwellMs = Number(arg("--dwell", "-d", "800"));
const scanMs = Number(arg("--scan", "-s", "1500"));

const session = new ConsoleSession({
  robotId: robot,
  modality,
  dwellMs,
  scanIntervalMs: scanMs,
  send: (body) => client.send(body),
});

const client = connectConsole(host, port, {
  onEvent: (ev, now) => session.onEvent(ev, now),
  onConnected: (now) => session.onConnected(now),
  onDisconnected: () => session.onDisconnected(),
});

if (process.stdin.isTTY) {
  process.stdin.setRawMode(true);
}
process.stdin.resume();
process.stdin.on("data", (key: Buffer) => {
  const s = key.toString("latin1");
  const now = Date.now();
  if (s === "q" || s === "") {
    client.close();
    process.exit(0);
  } else if (s === "[A" || s === "k") {
    session.moveFocus(-1, now);
  } else if (s === "[B" || s === "j") {
    session.moveFocus(1, now);
  } else if (s === "\r" && modality === "pointer") {
    session.pointerActivate(session.focus, now);
  } else if (s === " " && modality === "scan") {
    session.scanPress(now);
  }
});

setInterval(() => {
  const now = Date.now();
  session.pollDwell(now);
  const lines = [
    `telecafe console -> ${host}:${port} as ${robot}`,
    ...renderWorld(session, now),
    "",
    ...renderPalette(session, now),
    "",
    "arrows/jk: focus | enter: select (pointer) | space: switch (scan) | q: quit",
  ];
  process.stdout.write("[2J[H" + lines.join("\n") + "\n");
}, 100);
