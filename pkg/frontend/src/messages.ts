/** Message vocabulary shared with the service (JSON envelope bodies). */

export interface RobotDigest {
  id: string;
  kind: "mobile" | "stationary";
  pose: [number, number, number];
  battery_s: number;
  battery_pct: number;
  mode: string;
  carrying: string[];
}

export interface TableView {
  id: string;
  position: [number, number];
  party_size: number;
}

export interface WorldSnapshot {
  clock_s: number;
  session: number | null;
  phase: string;
  phase_remaining_s: number | null;
  self: RobotDigest;
  robots: RobotDigest[];
  tables: TableView[];
  bounds: [number, number];
  counter: [number, number];
}

export type ServerEvent =
  | { t: "event"; kind: "world_view_frame"; robot_id: string; snapshot: WorldSnapshot }
  | { t: "event"; kind: "state_update"; robot_id: string; digest: RobotDigest }
  | { t: "event"; kind: "customer_utterance"; table_id: string; text: string }
  | { t: "event"; kind: "phase_change"; phase: string; session: number; remaining_s: number }
  | { t: "event"; kind: "ack"; seq: number }
  | { t: "event"; kind: "reject"; seq: number; reason: string }
  | { t: "event"; kind: "battery_warning"; robot_id: string; battery_pct: number };

export function isServerEvent(doc: object): doc is ServerEvent {
  const d = doc as { t?: unknown; kind?: unknown };
  return d.t === "event" && typeof d.kind === "string";
}

export type CommandBody =
  | { t: "cmd"; kind: "select_head_motion"; seq: number; robot: string; motion_id: string }
  | { t: "cmd"; kind: "select_arm_motion"; seq: number; robot: string; motion_id: string }
  | { t: "cmd"; kind: "locomote"; seq: number; robot: string; direction: string; duration_s: number }
  | { t: "cmd"; kind: "start_line_trace"; seq: number; robot: string; target_label: string }
  | { t: "cmd"; kind: "speak"; seq: number; robot: string; text: string; voice_mode: "synthesized" | "live" }
  | { t: "cmd"; kind: "smile_tag"; seq: number; robot: string; on: boolean }
  | { t: "cmd"; kind: "stop"; seq: number; robot: string };
