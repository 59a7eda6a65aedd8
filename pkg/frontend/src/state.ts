// Console state and its update rules. The UI layer owns the DOM; everything
// that can be reasoned about without a browser lives here: the frame counter,
// the rolling robot trace, the latency estimate, and reply bookkeeping.

import type { ServerReply, SpotReply, TemplateInfo } from "./protocol.js";
import { blendPose } from "./blend.js";

export type Connection = "disconnected" | "connecting" | "connected";

export interface TracePoint {
  t: number;
  position: number[];
  orientation: number[];
  vacuum: boolean;
}

export const TRACE_LIMIT = 600; // rolling window of robot snapshots (~9 s)
const LATENCY_SMOOTHING = 0.2; // EMA weight for the newest sample

export interface ConsoleState {
  connection: Connection;
  presetA: number | null; // template labels
  presetB: number | null;
  blend: number; // 0 = pure A, 1 = pure B
  overrides: Map<number, number>; // sensor index -> fine-slider value
  noise: boolean;
  noiseSigma: number;
  button: boolean;
  nextT: number;
  lastSpot: SpotReply | null;
  lastError: string | null;
  queueDepth: number;
  latencyMs: number | null;
  trace: TracePoint[];
}

export function initialState(): ConsoleState {
  return {
    connection: "disconnected",
    presetA: null,
    presetB: null,
    blend: 0,
    overrides: new Map(),
    noise: false,
    noiseSigma: 0.01,
    button: false,
    nextT: 0,
    lastSpot: null,
    lastError: null,
    queueDepth: 0,
    latencyMs: null,
    trace: [],
  };
}

// Strictly increasing per session; never reused even across reconnects.
export function takeFrameT(state: ConsoleState): number {
  const t = state.nextT;
  state.nextT += 1;
  return t;
}

export function composePose(state: ConsoleState, templates: Map<number, TemplateInfo>): number[] {
  const a = state.presetA !== null ? templates.get(state.presetA) : undefined;
  const b = state.presetB !== null ? templates.get(state.presetB) : undefined;
  let pose: number[];
  if (a && b) {
    pose = blendPose(a.pose, b.pose, state.blend);
  } else if (a) {
    pose = a.pose.slice();
  } else if (b) {
    pose = b.pose.slice();
  } else {
    pose = new Array(22).fill(0.5);
  }
  for (const [index, value] of state.overrides) {
    if (index >= 0 && index < pose.length) {
      pose[index] = value;
    }
  }
  return pose;
}

export function applyReply(
  state: ConsoleState,
  reply: ServerReply,
  roundTripMs?: number,
): void {
  state.queueDepth = reply.queue_depth;
  switch (reply.type) {
    case "spot": {
      state.lastSpot = reply;
      state.lastError = null;
      state.trace.push({
        t: reply.robot.t,
        position: reply.robot.position.slice(),
        orientation: reply.robot.orientation.slice(),
        vacuum: reply.robot.vacuum,
      });
      if (state.trace.length > TRACE_LIMIT) {
        state.trace.splice(0, state.trace.length - TRACE_LIMIT);
      }
      if (roundTripMs !== undefined && Number.isFinite(roundTripMs)) {
        state.latencyMs =
          state.latencyMs === null
            ? roundTripMs
            : state.latencyMs + LATENCY_SMOOTHING * (roundTripMs - state.latencyMs);
      }
      break;
    }
    case "reset_done":
      state.trace = [];
      state.lastSpot = null;
      state.lastError = null;
      break;
    case "error":
      state.lastError = reply.message;
      break;
  }
}

export function markConnecting(state: ConsoleState): void {
  state.connection = "connecting";
}

export function markConnected(state: ConsoleState): void {
  state.connection = "connected";
  state.lastError = null;
}

export function markDisconnected(state: ConsoleState): void {
  state.connection = "disconnected";
  state.lastSpot = null;
  state.queueDepth = 0;
}
