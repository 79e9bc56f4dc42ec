/**
 * The operator's action palette: the 15 prepared-motion targets plus speak,
 * line-trace destinations, the smile tag, and stop. Every item is reachable
 * by pointer activation, dwell focus, or scan highlight alike.
 */

import type { CommandBody } from "./messages.js";

export const HEAD_MOTIONS = [
  "look_up", "look_down", "look_right", "look_left",
  "nod_once", "shake_head", "nod_twice",
] as const;

export const ARM_MOTIONS = [
  "raise_one_hand", "bye_bye", "hold_up_fists", "power_pose",
] as const;

export const LOCOMOTION = ["forward", "backward", "turn_left", "turn_right"] as const;

export type PaletteItem =
  | { kind: "head_motion"; id: string; label: string }
  | { kind: "arm_motion"; id: string; label: string }
  | { kind: "locomotion"; id: string; label: string }
  | { kind: "line_trace"; target: string; label: string }
  | { kind: "speak"; label: string }
  | { kind: "smile_toggle"; label: string }
  | { kind: "stop"; label: string };

const pretty = (id: string) => id.replace(/_/g, " ");

export function buildPalette(lineTraceTargets: string[] = [
  "table_1", "table_2", "table_3", "table_4", "table_5", "table_6", "counter",
]): PaletteItem[] {
  return [
    ...HEAD_MOTIONS.map((id): PaletteItem => ({ kind: "head_motion", id, label: pretty(id) })),
    ...ARM_MOTIONS.map((id): PaletteItem => ({ kind: "arm_motion", id, label: pretty(id) })),
    ...LOCOMOTION.map((id): PaletteItem => ({ kind: "locomotion", id, label: pretty(id) })),
    ...lineTraceTargets.map((target): PaletteItem => (
      { kind: "line_trace", target, label: `go to ${pretty(target)}` })),
    { kind: "speak", label: "speak" },
    { kind: "smile_toggle", label: "smile tag" },
    { kind: "stop", label: "stop" },
  ];
}

/** The prepared-motion targets only: always 7 + 4 + 4 = 15. */
export function motionTargets(palette: PaletteItem[]): PaletteItem[] {
  return palette.filter((item) =>
    item.kind === "head_motion" || item.kind === "arm_motion" || item.kind === "locomotion");
}

export interface CommandContext {
  robot: string;
  seq: number;
  speakText: string;
  smileOn: boolean;        // current tag state; a toggle flips it
  locomoteDuration: number;
}

export function commandFor(item: PaletteItem, ctx: CommandContext): CommandBody {
  switch (item.kind) {
    case "head_motion":
      return { t: "cmd", kind: "select_head_motion", seq: ctx.seq, robot: ctx.robot,
               motion_id: item.id };
    case "arm_motion":
      return { t: "cmd", kind: "select_arm_motion", seq: ctx.seq, robot: ctx.robot,
               motion_id: item.id };
    case "locomotion":
      return { t: "cmd", kind: "locomote", seq: ctx.seq, robot: ctx.robot,
               direction: item.id, duration_s: ctx.locomoteDuration };
    case "line_trace":
      return { t: "cmd", kind: "start_line_trace", seq: ctx.seq, robot: ctx.robot,
               target_label: item.target };
    case "speak":
      return { t: "cmd", kind: "speak", seq: ctx.seq, robot: ctx.robot,
               text: ctx.speakText, voice_mode: "synthesized" };
    case "smile_toggle":
      return { t: "cmd", kind: "smile_tag", seq: ctx.seq, robot: ctx.robot,
               on: !ctx.smileOn };
    case "stop":
      return { t: "cmd", kind: "stop", seq: ctx.seq, robot: ctx.robot };
  }
}
